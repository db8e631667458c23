#pragma once

#include <stdexcept>
#include <string>

namespace lsd {

enum class ErrorCode {
    invalid_argument = 1,
    parse,
    io,
    unsatisfiable,
    duplicate_column,
    overlapping_rows,
    not_in_image,
    domain,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception type thrown by every module of the library. The code maps
/// one-to-one onto the status values of the C interface.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace lsd
