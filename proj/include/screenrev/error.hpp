#pragma once

#include <stdexcept>
#include <string>

namespace screenrev
{
//! Failure categories surfaced by every module and mapped 1:1 onto C status codes.
enum class ErrorCode
{
    invalid_argument = 1,
    negative_density,
    mass_mismatch,
    overlapping_pieces,
    infinite_mean,
    empty_truncation,
    bad_params,
    not_a_cdf,
    zero_evidence,
    bad_cutoffs,
    not_an_interval,
    zero_density,
    no_threshold,
    acceptance_starved,
    config_error,
    io_error,
    unsupported,
};

char const* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, std::string const& what);

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, std::string const& what);

}  // namespace screenrev
