#include "screenrev/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"

namespace screenrev
{
char const* to_string(RuleoutTrigger t)
{
    switch (t)
    {
        case RuleoutTrigger::none:
            return "none";
        case RuleoutTrigger::lemma_high_values:
            return "lemma_high_values";
        case RuleoutTrigger::lemma_low_values:
            return "lemma_low_values";
        case RuleoutTrigger::corollary_i:
            return "corollary_i";
        case RuleoutTrigger::corollary_ii:
            return "corollary_ii";
        case RuleoutTrigger::corollary_iii:
            return "corollary_iii";
    }
    return "unknown";
}

char const* to_string(Monotonicity m)
{
    switch (m)
    {
        case Monotonicity::strictly_decreasing:
            return "strictly_decreasing";
        case Monotonicity::weakly_decreasing:
            return "weakly_decreasing";
        case Monotonicity::violated:
            return "violated";
    }
    return "unknown";
}

//---------------------------------------------------------------------------//
// Ruling out dominance
//---------------------------------------------------------------------------//
RuleoutVerdict ruleout_lemma(Distribution const& prior, double noise_lo, double noise_hi, double z1, double z2)
{
    if (!(z1 < z2))
        fail(ErrorCode::bad_cutoffs, "ruleout needs z1 < z2");
    if (std::isnan(noise_lo) || std::isnan(noise_hi) || !(noise_lo <= noise_hi))
        fail(ErrorCode::invalid_argument, "noise range must satisfy lo <= hi");
    RuleoutVerdict v;
    if (std::isfinite(noise_lo))
    {
        // (z1 - e_lo, z2 - e_lo]
        double a = z1 - noise_lo, b = z2 - noise_lo;
        double m = prior.cdf(b) - prior.cdf(a);
        if (m > ruleout_mass_floor)
        {
            v.precluded = true;
            v.trigger = RuleoutTrigger::lemma_high_values;
            v.witness = {a, b, false, true, m};
            return v;
        }
    }
    if (std::isfinite(noise_hi))
    {
        // [z1 - e_hi, z2 - e_hi)
        double a = z1 - noise_hi, b = z2 - noise_hi;
        double m = prior.cdf_left(b) - prior.cdf_left(a);
        if (m > ruleout_mass_floor)
        {
            v.precluded = true;
            v.trigger = RuleoutTrigger::lemma_low_values;
            v.witness = {a, b, true, false, m};
        }
    }
    return v;
}

RuleoutVerdict ruleout_corollary(Distribution const& prior, double noise_lo, double noise_hi)
{
    if (std::isnan(noise_lo) || std::isnan(noise_hi) || !(noise_lo <= noise_hi))
        fail(ErrorCode::invalid_argument, "noise range must satisfy lo <= hi");
    if (!prior.is_interval())
        fail(ErrorCode::not_an_interval, "prior support has gaps");
    double xlo = prior.support_lo(), xhi = prior.support_hi();
    RuleoutVerdict v;
    v.witness = {xlo, xhi, std::isfinite(xlo), std::isfinite(xhi), 1.0};
    double noise_width = noise_hi - noise_lo;
    // The unbounded-support conditions are reported first: they name the
    // reason more specifically than the width comparison, which also holds
    if (std::isfinite(noise_lo) && std::isinf(xhi))
        v.trigger = RuleoutTrigger::corollary_ii;
    else if (std::isfinite(noise_hi) && std::isinf(xlo))
        v.trigger = RuleoutTrigger::corollary_iii;
    else if (std::isfinite(noise_width) && noise_width <= xhi - xlo)
        v.trigger = RuleoutTrigger::corollary_i;
    v.precluded = v.trigger != RuleoutTrigger::none;
    return v;
}

//---------------------------------------------------------------------------//
// Log-likelihood slope
//---------------------------------------------------------------------------//
namespace
{
double default_kernel_step(SignalKernel const& k, double fallback_width)
{
    auto [lo, hi] = k.noise_range();
    double width = hi - lo;
    if (std::isfinite(width) && width > 0)
        return 1e-5 * width;
    if (std::isfinite(fallback_width) && fallback_width > 0)
        return 1e-5 * fallback_width;
    return 1e-5;
}

template<class F>
double richardson(F const& central, double step)
{
    double full = central(step);
    double half = central(0.5 * step);
    if (std::abs(full - half) > 1e-6)
        return (4 * half - full) / 3;
    return half;
}

[[noreturn]] void zero_density(double z, double x)
{
    std::ostringstream os;
    os << "kernel density vanishes near z = " << format_number(z) << ", x = " << format_number(x);
    fail(ErrorCode::zero_density, os.str());
}

//! f'/f of the noise at u from the piece containing u, if any
bool noise_log_slope(Distribution const& g, double u, double& out)
{
    auto pieces = g.pieces();
    auto it = std::upper_bound(pieces.begin(), pieces.end(), u,
                               [](double v, Piece const& p) { return v < p.lo; });
    if (it == pieces.begin())
        return false;
    Piece const& p = *std::prev(it);
    if (!(u < p.hi))
        return false;
    double f = 0, df = 0;
    for (auto const& t : p.terms)
    {
        f += evaluate(t, u);
        df += derivative(t, u);
    }
    if (!(f > 0))
        return false;
    out = df / f;
    return true;
}
}  // namespace

SlopeEstimate loglik_slope(SignalKernel const& k, double z, double x, double step)
{
    if (!(step > 0))
    {
        auto [lo, hi] = k.noise_range();
        step = std::isfinite(hi - lo) ? 1e-5 * (hi - lo) : 1e-5 * std::max(1.0, std::abs(z - x));
    }
    if (!(k.density(z, x) > 0) || !(k.density(z + step, x) > 0) || !(k.density(z - step, x) > 0))
        zero_density(z, x);
    SlopeEstimate s;
    auto central = [&](double h) {
        return (std::log(k.density(z + h, x)) - std::log(k.density(z - h, x))) / (2 * h);
    };
    s.finite_difference = richardson(central, step);
    double closed = 0;
    if (noise_log_slope(k.noise(), z - x, closed))
    {
        s.value = closed;
        s.closed_form = true;
    }
    else
    {
        s.value = s.finite_difference;
    }
    return s;
}

SlopeReport check_h_monotone(SignalKernel const& k, double z, std::vector<double> const& x_grid)
{
    if (!std::is_sorted(x_grid.begin(), x_grid.end()))
        fail(ErrorCode::invalid_argument, "x grid must be increasing");
    SlopeReport r;
    r.z = z;
    for (double x : x_grid)
    {
        double h = 0;
        if (!(k.density(z, x) > 0) || !noise_log_slope(k.noise(), z - x, h))
        {
            r.skipped_points.push_back(x);
            continue;
        }
        r.x_grid.push_back(x);
        r.h_values.push_back(h);
    }
    if (r.x_grid.size() < 2)
    {
        r.monotone = Monotonicity::violated;
        return r;
    }
    bool strict = true;
    for (std::size_t i = 0; i + 1 < r.x_grid.size(); ++i)
    {
        double dx = r.x_grid[i + 1] - r.x_grid[i];
        if (!(dx > 0))
            continue;
        double slope = (r.h_values[i + 1] - r.h_values[i]) / dx;
        if (slope > slope_tolerance)
            r.violation_points.push_back(r.x_grid[i + 1]);
        if (slope >= -slope_tolerance)
            strict = false;
    }
    if (!r.violation_points.empty())
        r.monotone = Monotonicity::violated;
    else
        r.monotone = strict ? Monotonicity::strictly_decreasing : Monotonicity::weakly_decreasing;
    return r;
}

RangeSlopeReport check_h_monotone_range(SignalKernel const& k, double z1, double z2,
                                        std::vector<double> const& x_grid, int n_z)
{
    if (!(z1 <= z2))
        fail(ErrorCode::bad_cutoffs, "slope range needs z1 <= z2");
    n_z = std::max(n_z, 1);
    RangeSlopeReport out;
    out.monotone = Monotonicity::strictly_decreasing;
    for (int i = 0; i < n_z; ++i)
    {
        double z = n_z == 1 ? z1 : z1 + (z2 - z1) * i / (n_z - 1);
        auto r = check_h_monotone(k, z, x_grid);
        if (r.monotone == Monotonicity::violated)
            out.monotone = Monotonicity::violated;
        else if (r.monotone == Monotonicity::weakly_decreasing && out.monotone != Monotonicity::violated)
            out.monotone = Monotonicity::weakly_decreasing;
        out.reports.push_back(std::move(r));
    }
    return out;
}

double posterior_z_derivative(Distribution const& prior, SignalKernel const& k, double w, double z, double step)
{
    if (!(step > 0))
        step = default_kernel_step(k, prior.support_hi() - prior.support_lo());
    auto central = [&](double h) {
        double up = posterior_point(prior, k, z + h).dist.cdf(w);
        double down = posterior_point(prior, k, z - h).dist.cdf(w);
        return (up - down) / (2 * h);
    };
    return richardson(central, step);
}

//---------------------------------------------------------------------------//
// Independent noise threshold
//---------------------------------------------------------------------------//
NoiseThreshold independent_noise_threshold(Distribution const& noise, int grid)
{
    grid = std::max(grid, 16);
    double lo = noise.support_lo(), hi = noise.support_hi();
    double glo = std::isfinite(lo) ? lo : noise.quantile(1e-12);
    double ghi = std::isfinite(hi) ? hi : noise.quantile(1 - 1e-12);
    std::vector<double> u;
    for (int i = 0; i <= grid; ++i)
        u.push_back(glo + (ghi - glo) * i / grid);
    for (int i = 1; i < grid; ++i)
        u.push_back(noise.quantile(static_cast<double>(i) / grid));
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());

    double fmax = 0;
    for (double x : u)
        fmax = std::max(fmax, noise.density(x));
    std::vector<double> pts, ratio;
    for (double x : u)
    {
        double r = 0;
        if (noise.density(x) < 1e-8 * fmax || !noise_log_slope(noise, x, r))
            continue;
        pts.push_back(x);
        ratio.push_back(r);
    }
    constexpr std::size_t min_run = 16;
    if (pts.size() < min_run)
        fail(ErrorCode::no_threshold, "too few probes with positive density");

    // Longest suffix on which f'/f is nondecreasing
    std::size_t start = pts.size() - 1;
    bool strict = true;
    while (start > 0)
    {
        double a = ratio[start - 1], b = ratio[start];
        double tol = slope_tolerance * std::max({std::abs(a), std::abs(b), 1e-300});
        if (b - a < -tol)
            break;
        if (b - a <= tol)
            strict = false;
        --start;
    }
    if (pts.size() - start < min_run)
        fail(ErrorCode::no_threshold, "f'/f is not eventually nondecreasing on the probed range");
    NoiseThreshold t;
    t.eps_hat = pts[start];
    t.strict = strict;
    t.n_probes = pts.size();
    return t;
}

//---------------------------------------------------------------------------//
// Tax model cutoff
//---------------------------------------------------------------------------//
ZBarResult tax_zbar(Distribution const& prior, SignalKernel const& k, std::vector<double> const& w_grid,
                    double z_max, int n_scan)
{
    if (!(z_max > 0) || w_grid.empty())
        fail(ErrorCode::invalid_argument, "z bar search needs z_max > 0 and probe points");
    Posterior at_zero = posterior_point(prior, k, 0.0);
    auto holds = [&](double z) {
        Posterior p = posterior_point(prior, k, z);
        for (double w : w_grid)
            if (!(at_zero.dist.cdf(w) < p.dist.cdf(w)))
                return false;
        return true;
    };
    n_scan = std::max(n_scan, 1);
    double last_ok = 0;
    for (int i = 1; i <= n_scan; ++i)
    {
        double z = z_max * i / n_scan;
        if (holds(z))
        {
            last_ok = z;
            continue;
        }
        double a = last_ok, b = z;
        for (int it = 0; it < 50; ++it)
        {
            double m = 0.5 * (a + b);
            if (m <= a || m >= b)
                break;
            if (holds(m))
                a = m;
            else
                b = m;
        }
        return {a, false};
    }
    return {last_ok, true};
}

}  // namespace screenrev
