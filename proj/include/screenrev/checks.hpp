#pragma once

#include <string>
#include <utility>
#include <vector>

#include "screenrev/bayes.hpp"
#include "screenrev/kernels.hpp"

namespace screenrev
{
enum class RuleoutTrigger
{
    none,
    lemma_high_values,
    lemma_low_values,
    corollary_i,
    corollary_ii,
    corollary_iii,
};

char const* to_string(RuleoutTrigger t);

//! Interval of x values with positive prior probability behind a verdict
struct WitnessInterval
{
    double lo = 0;
    double hi = 0;
    bool lo_closed = false;
    bool hi_closed = false;
    double mass = 0;
};

struct RuleoutVerdict
{
    bool precluded = false;
    RuleoutTrigger trigger = RuleoutTrigger::none;
    WitnessInterval witness;
};

//! Probabilities below this count as zero in the interval tests
inline constexpr double ruleout_mass_floor = 1e-12;

/*!
 * Posterior at z1 cannot dominate the posterior at z2 when X puts mass on
 * (z1 - e_lo, z2 - e_lo] (values only the higher signal allows) or on
 * [z1 - e_hi, z2 - e_hi) (values only the lower signal allows).
 */
RuleoutVerdict ruleout_lemma(Distribution const& prior, double noise_lo, double noise_hi, double z1, double z2);

//! Conditions that rule out dominance for every pair z1 < z2
RuleoutVerdict ruleout_corollary(Distribution const& prior, double noise_lo, double noise_hi);

struct SlopeEstimate
{
    double value = 0;
    double finite_difference = 0;
    //! value came from the closed form of the noise piece
    bool closed_form = false;
};

/*!
 * d ln f(z | x) / dz.
 *
 * Closed form on the noise piece containing z - x, with a central
 * difference (Richardson-refined) as cross-check. A nonpositive step picks
 * the default of 1e-5 times the noise window width.
 */
SlopeEstimate loglik_slope(SignalKernel const& k, double z, double x, double step = 0);

enum class Monotonicity
{
    strictly_decreasing,
    weakly_decreasing,
    violated,
};

char const* to_string(Monotonicity m);

//! Slope magnitude of h in x treated as zero
inline constexpr double slope_tolerance = 1e-8;

struct SlopeReport
{
    double z = 0;
    std::vector<double> x_grid;
    std::vector<double> h_values;
    Monotonicity monotone = Monotonicity::violated;
    std::vector<double> violation_points;
    //! Grid points with zero density at z (no slope defined)
    std::vector<double> skipped_points;
};

SlopeReport check_h_monotone(SignalKernel const& k, double z, std::vector<double> const& x_grid);

//! Worst classification over n_z values of z spanning [z1, z2]
struct RangeSlopeReport
{
    Monotonicity monotone = Monotonicity::violated;
    std::vector<SlopeReport> reports;
};

RangeSlopeReport check_h_monotone_range(SignalKernel const& k, double z1, double z2,
                                        std::vector<double> const& x_grid, int n_z = 11);

/*!
 * dF(w | z)/dz by central differences in z with Richardson refinement when
 * the full- and half-step estimates disagree by more than 1e-6.
 *
 * A nonpositive step picks 1e-5 times the noise window width, or the prior
 * support width when the window is unbounded.
 */
double posterior_z_derivative(Distribution const& prior, SignalKernel const& k, double w, double z,
                              double step = 0);

struct NoiseThreshold
{
    double eps_hat = 0;
    //! f'/f strictly increasing past eps_hat (otherwise only nondecreasing)
    bool strict = false;
    std::size_t n_probes = 0;
};

/*!
 * Smallest probe point from which f'/f of the noise is nondecreasing.
 *
 * Probes cover the support on a uniform grid and a quantile grid; points
 * where the density is negligible against its maximum are skipped.
 */
NoiseThreshold independent_noise_threshold(Distribution const& noise, int grid = 10000);

struct ZBarResult
{
    //! Largest z known to satisfy F(w | 0) < F(w | z') for all probed w and z' in (0, z]
    double lower_bound = 0;
    //! No failure found up to the scan limit
    bool unbounded = false;
};

/*!
 * Certified lower bound on the cutoff below which a zero report is the
 * worst news, by scanning then bisecting on the probe predicate.
 */
ZBarResult tax_zbar(Distribution const& prior, SignalKernel const& k, std::vector<double> const& w_grid,
                    double z_max, int n_scan = 50);

}  // namespace screenrev
