#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screenrev/distribution.hpp"

namespace screenrev
{
//! Uniform density on [lo, hi]
Distribution uniform(double lo, double hi);
//! rate * exp(-rate |x - anchor|) on the given side of the anchor
Distribution exponential(double rate, double anchor = 0, TailSide side = TailSide::upper);
//! alpha * scale^alpha / x^(alpha + 1) on [scale, inf)
Distribution pareto(double alpha, double scale);
//! Normal(mu, sigma) as a piecewise cubic on mu +- 8 sigma
Distribution normal(double mu, double sigma);
//! (1 - iota) uniform[0, 1] + iota standard normal
Distribution footnote_mixture(double iota);

/*!
 * Build a prior family by name.
 *
 * Names and parameters: uniform [lo hi], exponential [rate anchor side]
 * (side +1 upper, -1 lower; anchor and side optional), pareto [alpha scale],
 * normal [mu sigma], footnote_mixture [iota].
 */
Distribution make_named_prior(std::string_view name, std::span<double const> params);
std::vector<std::string> named_prior_names();

//! Absolute density tolerance used when approximating the normal component
inline constexpr double normal_fit_tolerance = 1e-12;

}  // namespace screenrev
