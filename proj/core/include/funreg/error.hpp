#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace funreg {

enum class ErrorCode {
    invalid_grid,
    dimension_mismatch,
    invalid_argument,
    parse_error,
    not_psd,
    bandwidth_too_small,
    invalid_covariance,
    singular_covariance,
    truncation_too_large,
    rank_deficient,
    infeasible,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. Input/validation problems and
/// numerical breakdowns are told apart by `is_numerical()`.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    bool is_numerical() const noexcept;

private:
    ErrorCode code_;
};

} // namespace funreg
