#pragma once

#include <functional>

#include "screenrev/distribution.hpp"
#include "screenrev/kernels.hpp"

namespace screenrev
{
enum class ConditioningKind
{
    //! Z = z
    point,
    //! S >= b for the threshold signal built from a kernel
    threshold_transform,
    //! X + e >= b for independent additive noise
    threshold_additive,
    //! Z >= b for a kernel
    threshold_kernel,
};

char const* to_string(ConditioningKind kind);

struct Conditioning
{
    ConditioningKind kind = ConditioningKind::point;
    double value = 0;
};

struct Posterior
{
    Distribution dist;
    Conditioning conditioning;
    //! Marginal density of Z at z (point) or probability of the event (threshold)
    double evidence = 0;
    //! Prior probability dropped when cutting unbounded products to finite ranges
    double discarded_mass = 0;
    //! L1 bound on approximated product pieces, relative to the posterior
    double approximation_error = 0;
};

//! Options for products that leave the closed-form term family
struct UpdateOptions
{
    double abs_tol = 1e-11;
    double tail_mass = 1e-12;
};

Posterior posterior_point(Distribution const& prior, SignalKernel const& k, double z,
                          UpdateOptions const& options = {});
Posterior posterior_threshold(Distribution const& prior, ThresholdSignal const& ts, double b,
                              UpdateOptions const& options = {});
Posterior posterior_threshold_additive(Distribution const& prior, Distribution const& noise, double b,
                                       UpdateOptions const& options = {});
//! Conditioning on Z >= b for the kernel itself
Posterior posterior_threshold_kernel(Distribution const& prior, SignalKernel const& k, double b,
                                     UpdateOptions const& options = {});

/*!
 * Generic update: posterior density proportional to weight(x) f_X(x).
 *
 * \c at_atom gives the weight at a prior atom; deltas in \c weights pick up
 * the prior density at their location.
 */
Posterior bayes_update(Distribution const& prior,
                       XWeights const& weights,
                       std::function<double(double)> const& at_atom,
                       Conditioning conditioning,
                       UpdateOptions const& options = {});

}  // namespace screenrev
