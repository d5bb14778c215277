#pragma once

#include <optional>
#include <variant>

#include "screenrev/polynomial.hpp"

namespace screenrev
{
//! poly(x - origin)
struct PolyTerm
{
    double origin = 0;
    Polynomial poly;
};

//! amplitude * exp(rate * (x - anchor))
struct ExpTerm
{
    double amplitude = 0;
    double rate = 0;
    double anchor = 0;
};

//! amplitude * |x - center|^(-exponent); Pareto-type densities
struct PowerTerm
{
    double amplitude = 0;
    double center = 0;
    double exponent = 0;
};

//! One additive component of a density on a piece
using Term = std::variant<PolyTerm, ExpTerm, PowerTerm>;

double evaluate(Term const& term, double x);
//! d/dx of the term
double derivative(Term const& term, double x);

//! Integral over [a, b]; a may be -inf and b may be +inf when the term decays
double integrate(Term const& term, double a, double b);
//! Integral of x * term over [a, b]
double integrate_moment(Term const& term, double a, double b);

//! Whether integrate() and integrate_moment() are finite on [a, b]
bool integrable(Term const& term, double a, double b);
bool moment_finite(Term const& term, double a, double b);

bool is_zero(Term const& term);

Term scaled(Term const& term, double s);
//! Re-express a polynomial term about a new origin; other kinds unchanged
Term rebased(Term const& term, double origin);
//! The term as a function of x' where the old variable is z - x'
Term reflected(Term const& term, double z, double new_origin);
//! Density of offset + scale * X in terms of the density of X
Term affine(Term const& term, double offset, double scale, double new_origin);

/*!
 * Closed-form product when the pair stays inside the term family.
 *
 * \c reference must be a finite point of the interval on which the product
 * lives; it becomes the origin/anchor of the result.
 */
std::optional<Term> multiply(Term const& a, Term const& b, double reference);

}  // namespace screenrev
