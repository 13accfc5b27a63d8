#pragma once

namespace ringvec {

// Straight-line d-lane reductions shared by every reuse mode, so all training
// paths produce bitwise-identical arithmetic for the same pairing sequence.

// Four-way partial sums: fixed association order, vectorizable without
// fast-math.
inline float dot_f32(const float* a, const float* b, int d) {
    float s0 = 0.0f, s1 = 0.0f, s2 = 0.0f, s3 = 0.0f;
    int k = 0;
    for (; k + 4 <= d; k += 4) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    float s = (s0 + s1) + (s2 + s3);
    for (; k < d; ++k) s += a[k] * b[k];
    return s;
}

// One SGNS pairing: ctx += g*smp, smp += g*ctx, both sides from the values
// current at the start of the pairing. Buffers must not overlap.
inline void pairing_update_f32(float* __restrict ctx, float* __restrict smp, float g, int d) {
    for (int k = 0; k < d; ++k) {
        float c = ctx[k];
        float s = smp[k];
        ctx[k] = c + g * s;
        smp[k] = s + g * c;
    }
}

// y += g*x
inline void axpy_f32(float* __restrict y, const float* __restrict x, float g, int d) {
    for (int k = 0; k < d; ++k) y[k] += g * x[k];
}

} // namespace ringvec
