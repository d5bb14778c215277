#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "screenrev/distribution.hpp"

namespace screenrev
{
/*!
 * Plain-text distribution schema, one record per line:
 *
 *   piece <lo> <hi> <term> [+ <term> ...]
 *       poly <c0> <c1> ...        coefficients of (x - lo), or of (x - hi)
 *                                 when lo is -inf
 *       exp <A> <r> <anchor>      A exp(r (x - anchor))
 *       power <A> <c> <k>         A |x - c|^-k
 *   atom <location> <mass>
 *   tail exponential|pareto lower|upper <rate|shape> <anchor> [<mass> [<center>]]
 *   normalize                     rescale to unit mass instead of failing
 *   evidence <value>              metadata attached to posteriors
 *
 * Blank lines and text after '#' are ignored; "inf" and "-inf" are accepted.
 */
struct ParsedDistribution
{
    Distribution dist;
    std::optional<double> evidence;
};

ParsedDistribution parse_distribution(std::string_view text);

//! Serialize with 17 significant digits; parse_distribution round-trips it
std::string to_text(Distribution const& d, std::optional<double> evidence = std::nullopt);

//! Shortest exact decimal for a double ("inf"/"-inf"/"nan" for specials)
std::string format_number(double v);

}  // namespace screenrev
