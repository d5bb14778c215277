#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "screenrev/distribution.hpp"

namespace screenrev
{
//---------------------------------------------------------------------------//
/*!
 * Probability p(x) of the exact (noise-free) report in the evasion kernel.
 *
 * The library treats p as given: it need not be monotone, only valued in
 * (0, 1) on the probe grid. Callables must be pure.
 */
class EvasionProbability
{
  public:
    enum class Kind
    {
        constant,
        logistic,
        callable,
    };

    static EvasionProbability constant(double c);
    //! 1 / (1 + exp(-k (x - x0)))
    static EvasionProbability logistic(double k, double x0);
    static EvasionProbability callable(std::function<double(double)> fn, std::string label = "callable");

    double operator()(double x) const;
    //! d ln p / dx
    double log_slope(double x) const;

    Kind kind() const { return kind_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    double constant_value() const { return c_; }
    std::string describe() const;

  private:
    Kind kind_ = Kind::constant;
    double c_ = 0;
    double k_ = 0;
    double x0_ = 0;
    std::function<double(double)> fn_;
    std::string label_;
};

//! Weight as a function of x on [lo, hi): either closed-form terms or a callable
struct WeightSegment
{
    double lo = 0;
    double hi = 0;
    std::vector<Term> terms;
    std::function<double(double)> fn;

    double operator()(double x) const;
};

//! A function of x: sorted disjoint segments plus Dirac deltas at points
struct XWeights
{
    std::vector<WeightSegment> segments;
    std::vector<Atom> deltas;

    //! Continuous part at x (0 outside every segment)
    double operator()(double x) const;
};

//! Grid used to validate kernels that depend on x through p(x)
struct ProbeGrid
{
    int n_x = 100;
    int n_z = 10000;
    double x_lo = -10;
    double x_hi = 10;
};

enum class KernelKind
{
    triangle_rectangle,
    three_piece,
    additive,
    evasion_mixture,
};

char const* to_string(KernelKind kind);

//---------------------------------------------------------------------------//
/*!
 * Conditional law of the signal Z given X = x.
 *
 * Every kernel here is Z = x + e where the noise e has law
 * p(x) delta_0 + (1 - p(x)) g; p vanishes except for the evasion kernel, and
 * g is an arbitrary Distribution (atoms allowed). Densities are
 * right-continuous in z.
 */
class SignalKernel
{
  public:
    KernelKind kind() const { return kind_; }
    Distribution const& noise() const { return g_; }
    std::optional<EvasionProbability> const& evasion() const { return p_; }
    //! h of the three-piece kernel, or iota/xi parameters when relevant
    double param(std::string const& name) const;

    //! Continuous density f(z | x), right-continuous in z
    double density(double z, double x) const;
    //! Left limit in z of the continuous density
    double density_left(double z, double x) const;
    //! P(Z = z | x)
    double atom_mass(double z, double x) const;
    //! P(Z >= b | x)
    double survival(double b, double x) const;
    //! Total probability (density integral plus atoms) at x
    double total_mass(double x) const;

    //! Range [lo, hi] of the additive noise (possibly infinite)
    std::pair<double, double> noise_range() const;

    //! f(z | .) as a function of x; kernel atoms at z become deltas in x
    XWeights likelihood_in_x(double z) const;
    //! P(Z >= b | .) as a function of x
    XWeights survival_in_x(double b) const;

    //! Validate p(x) on the probe grid
    void validate(ProbeGrid const& grid = {}) const;

    std::string describe() const;

  private:
    KernelKind kind_ = KernelKind::additive;
    Distribution g_;
    std::optional<EvasionProbability> p_;
    std::vector<std::pair<std::string, double>> params_;

    double p_at(double x) const { return p_ ? (*p_)(x) : 0.0; }

    friend SignalKernel triangle_rectangle_kernel();
    friend SignalKernel three_piece_kernel(double iota, double xi);
    friend SignalKernel additive_kernel(Distribution noise);
    friend SignalKernel evasion_kernel(EvasionProbability p, Distribution g, ProbeGrid const& grid);
    friend SignalKernel affine_kernel(SignalKernel const& k, double offset, double scale);
};

//! f(z|x) = 1 - 2(z - x)/3 on [x, x+1), 1/3 on [x+1, x+2)
SignalKernel triangle_rectangle_kernel();
//! Continuous three-piece kernel; iota in (0, 1), xi in [1, (2 - iota)/(1 + iota))
SignalKernel three_piece_kernel(double iota, double xi);
//! Height of the middle piece of the three-piece kernel
double three_piece_height(double iota, double xi);
SignalKernel additive_kernel(Distribution noise);
SignalKernel evasion_kernel(EvasionProbability p, Distribution g, ProbeGrid const& grid = {});

//! Kernel of (offset + scale Z) given (offset + scale X)
SignalKernel affine_kernel(SignalKernel const& k, double offset, double scale);
//! Sign flip of both X and Z
SignalKernel reflect_kernel(SignalKernel const& k);
//! (offset, scale) taking [a, b] onto [0, 1]
std::pair<double, double> unit_rescaling(double a, double b);

//---------------------------------------------------------------------------//
/*!
 * Threshold signal S with P(S < s | x) = 1 - f(s | x) on the noise window.
 *
 * The event {S >= b} then has conditional probability f(b | x), so
 * conditioning on it reproduces the point posterior at Z = b. Where 1 - f
 * has not reached 1 at the right end of the window, the remainder is an
 * atom there.
 */
class ThresholdSignal
{
  public:
    SignalKernel const& source() const { return k_; }
    //! P(S <= s | x)
    double cdf(double s, double x) const;
    //! P(S >= b | x)
    double survival(double b, double x) const;
    //! Mass of the atom at the right end of the window
    double terminal_atom() const { return terminal_atom_; }
    std::pair<double, double> window() const { return k_.noise_range(); }
    //! Inverse-cdf draw of S given x from a uniform variate in [0, 1)
    double sample(double x, double uniform) const;
    //! P(S >= b | .) as a function of x
    XWeights survival_in_x(double b) const;

  private:
    SignalKernel k_;
    double terminal_atom_ = 0;

    friend ThresholdSignal threshold_transform(SignalKernel const& k);
};

ThresholdSignal threshold_transform(SignalKernel const& k);

}  // namespace screenrev
