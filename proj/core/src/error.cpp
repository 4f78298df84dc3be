#include "funreg/error.hpp"

namespace funreg {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::not_psd: return "not-psd";
    case ErrorCode::bandwidth_too_small: return "bandwidth-too-small";
    case ErrorCode::invalid_covariance: return "invalid-covariance";
    case ErrorCode::singular_covariance: return "singular-covariance";
    case ErrorCode::truncation_too_large: return "truncation-too-large";
    case ErrorCode::rank_deficient: return "rank-deficient";
    case ErrorCode::infeasible: return "infeasible";
    }
    return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message)
    , code_(code)
{
}

bool Error::is_numerical() const noexcept
{
    switch (code_) {
    case ErrorCode::bandwidth_too_small:
    case ErrorCode::invalid_covariance:
    case ErrorCode::singular_covariance:
    case ErrorCode::truncation_too_large:
    case ErrorCode::rank_deficient:
    case ErrorCode::infeasible:
        return true;
    default:
        return false;
    }
}

} // namespace funreg
