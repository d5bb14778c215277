#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "screenrev/terms.hpp"

namespace screenrev
{
//---------------------------------------------------------------------------//
/*!
 * Density on the half-open interval [lo, hi) as a sum of terms.
 *
 * Either end may be infinite when every term decays there (exponential or
 * power tails). Polynomial terms are kept about \c lo.
 */
struct Piece
{
    double lo = 0;
    double hi = 0;
    std::vector<Term> terms;

    double density(double x) const;
    //! Mass of [max(a, lo), min(b, hi)]
    double mass(double a, double b) const;
    double mass() const { return mass(lo, hi); }
    double moment() const;
    //! A finite point of the interval (lo when finite)
    double reference() const;
    bool bounded() const;
};

struct Atom
{
    double location = 0;
    double mass = 0;
};

enum class TailKind
{
    exponential,
    pareto,
};

enum class TailSide
{
    lower,
    upper,
};

/*!
 * Parametric tail on an unbounded end of the support.
 *
 * Exponential: mass * rate * exp(-rate |x - anchor|) beyond the anchor.
 * Pareto: mass * shape * d^shape / |x - center|^(shape + 1) beyond the
 * anchor, with d = |anchor - center| the Pareto scale.
 */
struct TailDescriptor
{
    TailKind kind = TailKind::exponential;
    TailSide side = TailSide::upper;
    double rate_or_shape = 1;
    double anchor = 0;
    double mass = 1;
    double center = 0;
};

Piece tail_piece(TailDescriptor const& tail);

struct BuildOptions
{
    //! Rescale to unit mass instead of rejecting a mismatch
    bool normalize = false;
    double tol_mass = 1e-10;
    //! Metadata carried on the result
    double approximation_error = 0;
    double discarded_mass = 0;
};

//---------------------------------------------------------------------------//
/*!
 * One-dimensional distribution: piecewise density plus point masses.
 *
 * Immutable after construction; only make_distribution and the transforms
 * in this header produce instances, and all of them validate nonnegativity,
 * ordering and unit mass.
 */
class Distribution
{
  public:
    Distribution() = default;

    std::span<Piece const> pieces() const { return pieces_; }
    std::span<Atom const> atoms() const { return atoms_; }

    double support_lo() const;
    double support_hi() const;
    std::optional<TailDescriptor> tail(TailSide side) const;

    //! Right-continuous density; at the right end of the support the left limit
    double density(double x) const;
    //! P(X <= x)
    double cdf(double x) const;
    //! P(X < x)
    double cdf_left(double x) const;
    //! Smallest x with cdf(x) >= p
    double quantile(double p) const;
    //! Atom mass located exactly at x
    double atom_at(double x) const;

    //! Piece boundaries and atom locations (finite only), sorted and unique
    std::vector<double> breakpoints() const;
    //! Support is a single interval (no interior gaps of zero probability)
    bool is_interval() const;

    double approximation_error() const { return approximation_error_; }
    double discarded_mass() const { return discarded_mass_; }

  private:
    std::vector<Piece> pieces_;
    std::vector<Atom> atoms_;
    std::vector<double> piece_cum_;  // piece mass strictly before piece i
    std::vector<double> piece_mass_;
    std::vector<double> atom_cum_;  // atom mass of atoms [0, i)
    double approximation_error_ = 0;
    double discarded_mass_ = 0;

    double piece_cdf(double x) const;
    double invert_in_piece(std::size_t i, double target) const;

    friend Distribution
    make_distribution(std::vector<Piece>, std::vector<Atom>, BuildOptions);
};

//! Validate and assemble; see BuildOptions for normalization
Distribution make_distribution(std::vector<Piece> pieces,
                               std::vector<Atom> atoms,
                               BuildOptions options = {});
Distribution make_distribution(std::vector<Piece> pieces,
                               std::vector<Atom> atoms,
                               std::vector<TailDescriptor> const& tails,
                               BuildOptions options = {});

double mean(Distribution const& d);
double total_mass(std::span<Piece const> pieces, std::span<Atom const> atoms);

//! Renormalized restriction to [lo, hi]; discarded mass is recorded
Distribution truncate(Distribution const& d, double lo, double hi);

//! Law of offset + scale * X
Distribution affine_map(Distribution const& d, double offset, double scale);
//! Law of -X
Distribution reflect(Distribution const& d);

//! Weighted sum of distributions; weights are normalized
Distribution mixture(std::span<std::pair<double, Distribution> const> components);

//! Sum of piecewise densities over the union of their breakpoints
std::vector<Piece> overlay(std::span<std::vector<Piece> const> layers);
//! Merge polynomial terms about \c origin and drop zero terms
std::vector<Term> simplify_terms(std::vector<Term> terms, double origin);

}  // namespace screenrev
