#include "screenrev/error.hpp"

namespace screenrev
{
char const* to_string(ErrorCode code) noexcept
{
    switch (code)
    {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::negative_density: return "NegativeDensity";
        case ErrorCode::mass_mismatch: return "MassMismatch";
        case ErrorCode::overlapping_pieces: return "OverlappingPieces";
        case ErrorCode::infinite_mean: return "InfiniteMean";
        case ErrorCode::empty_truncation: return "EmptyTruncation";
        case ErrorCode::bad_params: return "BadParams";
        case ErrorCode::not_a_cdf: return "NotACdf";
        case ErrorCode::zero_evidence: return "ZeroEvidence";
        case ErrorCode::bad_cutoffs: return "BadCutoffs";
        case ErrorCode::not_an_interval: return "NotAnInterval";
        case ErrorCode::zero_density: return "ZeroDensity";
        case ErrorCode::no_threshold: return "NoThreshold";
        case ErrorCode::acceptance_starved: return "AcceptanceStarved";
        case ErrorCode::config_error: return "ConfigError";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::unsupported: return "Unsupported";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, std::string const& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

void fail(ErrorCode code, std::string const& what)
{
    throw Error(code, what);
}

}  // namespace screenrev
