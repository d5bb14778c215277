#pragma once

#include <functional>
#include <vector>

#include "screenrev/distribution.hpp"

namespace screenrev
{
struct CubicApproximation
{
    std::vector<Piece> pieces;
    //! Bound on the L1 distance between the fit and the function
    double l1_error = 0;
};

/*!
 * Piecewise-cubic interpolant of a nonnegative function on [lo, hi].
 *
 * Each cell is interpolated at the Chebyshev-Lobatto nodes and checked at
 * interior midpoints; cells above \c abs_tol are bisected. A cell whose
 * cubic dips below zero falls back to linear interpolation when that is
 * within tolerance, so the result is a valid density piece set.
 */
CubicApproximation approximate_cubic(std::function<double(double)> const& f,
                                     double lo,
                                     double hi,
                                     double abs_tol,
                                     int max_depth = 40);

}  // namespace screenrev
