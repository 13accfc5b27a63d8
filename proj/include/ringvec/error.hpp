#pragma once

#include <stdexcept>
#include <string>

namespace ringvec {

enum class ErrorCode {
    io,
    invalid_utf8,
    empty_vocab,
    bad_argument,
    bad_config,
    unknown_key,
    bad_format,
    dim_mismatch,
    row_count_mismatch,
    duplicate_token,
    oov_query,
    zero_vector,
    no_usable_pairs,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace ringvec
