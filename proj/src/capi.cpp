#include "screenrev/screenrev.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "screenrev/bayes.hpp"
#include "screenrev/checks.hpp"
#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"
#include "screenrev/mc.hpp"
#include "screenrev/named.hpp"
#include "screenrev/ordering.hpp"
#include "screenrev/scenario.hpp"

struct sr_distribution
{
    screenrev::Distribution d;
};

struct sr_kernel
{
    screenrev::SignalKernel k;
};

struct sr_threshold
{
    screenrev::ThresholdSignal t;
};

struct sr_posterior
{
    screenrev::Posterior p;
};

namespace
{
using namespace screenrev;

thread_local std::string last_error;

sr_status set_error(sr_status s, char const* what)
{
    last_error = what;
    return s;
}

template<class F>
sr_status guard(F&& f)
{
    try
    {
        f();
        last_error.clear();
        return SR_OK;
    }
    catch (Error const& e)
    {
        return set_error(static_cast<sr_status>(e.code()), e.what());
    }
    catch (std::bad_alloc const&)
    {
        return set_error(SR_INTERNAL, "out of memory");
    }
    catch (std::exception const& e)
    {
        return set_error(SR_INTERNAL, e.what());
    }
    catch (...)
    {
        return set_error(SR_INTERNAL, "unknown failure");
    }
}

template<class... Ps>
void require(Ps const*... ptrs)
{
    if (((ptrs == nullptr) || ...))
        fail(ErrorCode::invalid_argument, "null pointer argument");
}

void copy_text(std::string const& s, char* buf, size_t cap, size_t* needed)
{
    if (needed)
        *needed = s.size() + 1;
    if (buf && cap > 0)
    {
        size_t n = std::min(cap - 1, s.size());
        std::memcpy(buf, s.data(), n);
        buf[n] = '\0';
    }
}

void fill(ScreeningCurve const& c, double* values, double* evidences)
{
    std::copy(c.values.begin(), c.values.end(), values);
    if (evidences)
        std::copy(c.evidences.begin(), c.evidences.end(), evidences);
}

void fill(RuleoutVerdict const& v, sr_ruleout_verdict* out)
{
    out->precluded = v.precluded ? 1 : 0;
    out->trigger = static_cast<sr_ruleout_trigger>(v.trigger);
    out->witness_lo = v.witness.lo;
    out->witness_hi = v.witness.hi;
    out->witness_lo_closed = v.witness.lo_closed ? 1 : 0;
    out->witness_hi_closed = v.witness.hi_closed ? 1 : 0;
    out->witness_mass = v.witness.mass;
}

void emit_samples(EmpiricalCdf const& e, double* samples, sr_mc_stats* stats)
{
    std::copy(e.samples.begin(), e.samples.end(), samples);
    if (stats)
    {
        stats->proposed = e.proposed;
        stats->accepted = e.accepted;
    }
}
}  // namespace

extern "C" {

const char* sr_version(void)
{
    return "0.1.0";
}

const char* sr_status_name(sr_status status)
{
    if (status == SR_OK)
        return "Ok";
    if (status == SR_INTERNAL)
        return "Internal";
    if (status >= SR_INVALID_ARGUMENT && status <= SR_UNSUPPORTED)
        return to_string(static_cast<ErrorCode>(status));
    return "Unknown";
}

const char* sr_last_error(void)
{
    return last_error.c_str();
}

//---------------------------------------------------------------------------//
// Distributions
//---------------------------------------------------------------------------//
sr_status sr_distribution_parse(const char* text, sr_distribution** out, double* evidence)
{
    return guard([&] {
        require(text, out);
        auto parsed = parse_distribution(text);
        if (evidence)
            *evidence = parsed.evidence.value_or(std::numeric_limits<double>::quiet_NaN());
        *out = new sr_distribution{std::move(parsed.dist)};
    });
}

sr_status sr_distribution_named(const char* name, const double* params, size_t n_params, sr_distribution** out)
{
    return guard([&] {
        require(name, out);
        if (n_params > 0)
            require(params);
        *out = new sr_distribution{make_named_prior(name, std::span<double const>(params, n_params))};
    });
}

void sr_distribution_free(sr_distribution* d)
{
    delete d;
}

sr_status sr_distribution_cdf(const sr_distribution* d, double x, double* out)
{
    return guard([&] {
        require(d, out);
        *out = d->d.cdf(x);
    });
}

sr_status sr_distribution_cdf_left(const sr_distribution* d, double x, double* out)
{
    return guard([&] {
        require(d, out);
        *out = d->d.cdf_left(x);
    });
}

sr_status sr_distribution_density(const sr_distribution* d, double x, double* out)
{
    return guard([&] {
        require(d, out);
        *out = d->d.density(x);
    });
}

sr_status sr_distribution_atom(const sr_distribution* d, double x, double* out)
{
    return guard([&] {
        require(d, out);
        *out = d->d.atom_at(x);
    });
}

sr_status sr_distribution_mean(const sr_distribution* d, double* out)
{
    return guard([&] {
        require(d, out);
        *out = mean(d->d);
    });
}

sr_status sr_distribution_quantile(const sr_distribution* d, double p, double* out)
{
    return guard([&] {
        require(d, out);
        *out = d->d.quantile(p);
    });
}

sr_status sr_distribution_support(const sr_distribution* d, double* lo, double* hi)
{
    return guard([&] {
        require(d, lo, hi);
        *lo = d->d.support_lo();
        *hi = d->d.support_hi();
    });
}

sr_status sr_distribution_truncate(const sr_distribution* d, double lo, double hi, sr_distribution** out)
{
    return guard([&] {
        require(d, out);
        *out = new sr_distribution{truncate(d->d, lo, hi)};
    });
}

sr_status sr_distribution_discarded_mass(const sr_distribution* d, double* out)
{
    return guard([&] {
        require(d, out);
        *out = d->d.discarded_mass();
    });
}

sr_status sr_distribution_to_text(const sr_distribution* d, char* buf, size_t cap, size_t* needed)
{
    return guard([&] {
        require(d);
        copy_text(to_text(d->d), buf, cap, needed);
    });
}

//---------------------------------------------------------------------------//
// Kernels
//---------------------------------------------------------------------------//
sr_status sr_kernel_triangle_rectangle(sr_kernel** out)
{
    return guard([&] {
        require(out);
        *out = new sr_kernel{triangle_rectangle_kernel()};
    });
}

sr_status sr_kernel_three_piece(double iota, double xi, sr_kernel** out)
{
    return guard([&] {
        require(out);
        *out = new sr_kernel{three_piece_kernel(iota, xi)};
    });
}

sr_status sr_kernel_additive(const sr_distribution* noise, sr_kernel** out)
{
    return guard([&] {
        require(noise, out);
        *out = new sr_kernel{additive_kernel(noise->d)};
    });
}

sr_status sr_kernel_evasion_constant(double p, const sr_distribution* g, sr_kernel** out)
{
    return guard([&] {
        require(g, out);
        *out = new sr_kernel{evasion_kernel(EvasionProbability::constant(p), g->d)};
    });
}

sr_status sr_kernel_evasion_logistic(double k, double x0, const sr_distribution* g, sr_kernel** out)
{
    return guard([&] {
        require(g, out);
        *out = new sr_kernel{evasion_kernel(EvasionProbability::logistic(k, x0), g->d)};
    });
}

sr_status sr_kernel_evasion_callback(sr_probability_fn fn, void* user, const sr_distribution* g, sr_kernel** out)
{
    return guard([&] {
        require(g, out);
        if (!fn)
            fail(ErrorCode::invalid_argument, "null probability callback");
        auto p = EvasionProbability::callable([fn, user](double x) { return fn(x, user); }, "c_callback");
        *out = new sr_kernel{evasion_kernel(p, g->d)};
    });
}

sr_status sr_kernel_reflect(const sr_kernel* k, sr_kernel** out)
{
    return guard([&] {
        require(k, out);
        *out = new sr_kernel{reflect_kernel(k->k)};
    });
}

void sr_kernel_free(sr_kernel* k)
{
    delete k;
}

sr_status sr_kernel_density(const sr_kernel* k, double z, double x, double* out)
{
    return guard([&] {
        require(k, out);
        *out = k->k.density(z, x);
    });
}

sr_status sr_kernel_atom_mass(const sr_kernel* k, double z, double x, double* out)
{
    return guard([&] {
        require(k, out);
        *out = k->k.atom_mass(z, x);
    });
}

sr_status sr_kernel_noise_range(const sr_kernel* k, double* lo, double* hi)
{
    return guard([&] {
        require(k, lo, hi);
        std::tie(*lo, *hi) = k->k.noise_range();
    });
}

//---------------------------------------------------------------------------//
// Threshold signals
//---------------------------------------------------------------------------//
sr_status sr_threshold_transform(const sr_kernel* k, sr_threshold** out)
{
    return guard([&] {
        require(k, out);
        *out = new sr_threshold{threshold_transform(k->k)};
    });
}

void sr_threshold_free(sr_threshold* t)
{
    delete t;
}

sr_status sr_threshold_cdf(const sr_threshold* t, double s, double x, double* out)
{
    return guard([&] {
        require(t, out);
        *out = t->t.cdf(s, x);
    });
}

sr_status sr_threshold_terminal_atom(const sr_threshold* t, double* out)
{
    return guard([&] {
        require(t, out);
        *out = t->t.terminal_atom();
    });
}

//---------------------------------------------------------------------------//
// Posteriors
//---------------------------------------------------------------------------//
sr_status sr_posterior_point(const sr_distribution* prior, const sr_kernel* k, double z, sr_posterior** out)
{
    return guard([&] {
        require(prior, k, out);
        *out = new sr_posterior{posterior_point(prior->d, k->k, z)};
    });
}

sr_status sr_posterior_threshold(const sr_distribution* prior, const sr_threshold* t, double b, sr_posterior** out)
{
    return guard([&] {
        require(prior, t, out);
        *out = new sr_posterior{posterior_threshold(prior->d, t->t, b)};
    });
}

sr_status sr_posterior_threshold_additive(const sr_distribution* prior, const sr_distribution* noise, double b,
                                          sr_posterior** out)
{
    return guard([&] {
        require(prior, noise, out);
        *out = new sr_posterior{posterior_threshold_additive(prior->d, noise->d, b)};
    });
}

sr_status sr_posterior_threshold_kernel(const sr_distribution* prior, const sr_kernel* k, double b,
                                        sr_posterior** out)
{
    return guard([&] {
        require(prior, k, out);
        *out = new sr_posterior{posterior_threshold_kernel(prior->d, k->k, b)};
    });
}

void sr_posterior_free(sr_posterior* p)
{
    delete p;
}

sr_status sr_posterior_evidence(const sr_posterior* p, double* out)
{
    return guard([&] {
        require(p, out);
        *out = p->p.evidence;
    });
}

sr_status sr_posterior_distribution(const sr_posterior* p, sr_distribution** out)
{
    return guard([&] {
        require(p, out);
        *out = new sr_distribution{p->p.dist};
    });
}

//---------------------------------------------------------------------------//
// Ordering
//---------------------------------------------------------------------------//
sr_status sr_fosd_compare(const sr_distribution* d1, const sr_distribution* d2, double tol, int grid,
                          sr_fosd_verdict* out)
{
    return guard([&] {
        require(d1, d2, out);
        FosdOptions o;
        if (tol > 0)
            o.tol = tol;
        if (grid > 0)
            o.grid = grid;
        auto v = fosd_compare(d1->d, d2->d, o);
        out->relation = static_cast<sr_fosd_relation>(v.relation);
        out->max_gap_pos = v.max_gap_pos;
        out->max_gap_neg = v.max_gap_neg;
        out->min_interior_gap = v.min_interior_gap;
        out->tol = v.tol;
        out->n_probes = v.n_probes;
        out->n_witnesses = std::min<size_t>(3, v.witnesses.size());
        for (size_t i = 0; i < 3; ++i)
            out->witnesses[i] = i < v.witnesses.size() ? v.witnesses[i] : 0.0;
    });
}

sr_status sr_screening_curve_threshold(const sr_distribution* prior, const sr_threshold* t, const double* cutoffs,
                                       size_t n, double* values, double* evidences)
{
    return guard([&] {
        require(prior, t, cutoffs, values);
        fill(screening_curve(prior->d, t->t, std::vector<double>(cutoffs, cutoffs + n)), values, evidences);
    });
}

sr_status sr_screening_curve_additive(const sr_distribution* prior, const sr_distribution* noise,
                                      const double* cutoffs, size_t n, double* values, double* evidences)
{
    return guard([&] {
        require(prior, noise, cutoffs, values);
        fill(screening_curve(prior->d, noise->d, std::vector<double>(cutoffs, cutoffs + n)), values, evidences);
    });
}

sr_status sr_screening_curve_kernel(const sr_distribution* prior, const sr_kernel* k, const double* cutoffs,
                                    size_t n, double* values, double* evidences)
{
    return guard([&] {
        require(prior, k, cutoffs, values);
        fill(screening_curve(prior->d, k->k, std::vector<double>(cutoffs, cutoffs + n)), values, evidences);
    });
}

sr_status sr_detect_reversals(const double* cutoffs, const double* values, size_t n, double tol, sr_reversal* out,
                              size_t cap, size_t* count)
{
    return guard([&] {
        require(cutoffs, values, count);
        if (cap > 0)
            require(out);
        ScreeningCurve c;
        c.cutoffs.assign(cutoffs, cutoffs + n);
        c.values.assign(values, values + n);
        c.evidences.assign(n, 0.0);
        auto rev = detect_reversals(c, tol);
        *count = rev.size();
        for (size_t i = 0; i < std::min(cap, rev.size()); ++i)
            out[i] = {rev[i].i, rev[i].j, rev[i].gap};
    });
}

//---------------------------------------------------------------------------//
// Ordering and rule-out checks
//---------------------------------------------------------------------------//
sr_status sr_ruleout_lemma(const sr_distribution* prior, double noise_lo, double noise_hi, double z1, double z2,
                           sr_ruleout_verdict* out)
{
    return guard([&] {
        require(prior, out);
        fill(ruleout_lemma(prior->d, noise_lo, noise_hi, z1, z2), out);
    });
}

sr_status sr_ruleout_corollary(const sr_distribution* prior, double noise_lo, double noise_hi,
                               sr_ruleout_verdict* out)
{
    return guard([&] {
        require(prior, out);
        fill(ruleout_corollary(prior->d, noise_lo, noise_hi), out);
    });
}

sr_status sr_loglik_slope(const sr_kernel* k, double z, double x, double step, double* value,
                          double* finite_difference)
{
    return guard([&] {
        require(k, value);
        auto s = loglik_slope(k->k, z, x, step);
        *value = s.value;
        if (finite_difference)
            *finite_difference = s.finite_difference;
    });
}

sr_status sr_check_h_monotone(const sr_kernel* k, double z, const double* x_grid, size_t n, sr_monotonicity* out,
                              size_t* violations)
{
    return guard([&] {
        require(k, x_grid, out);
        auto r = check_h_monotone(k->k, z, std::vector<double>(x_grid, x_grid + n));
        *out = static_cast<sr_monotonicity>(r.monotone);
        if (violations)
            *violations = r.violation_points.size();
    });
}

sr_status sr_posterior_z_derivative(const sr_distribution* prior, const sr_kernel* k, double w, double z,
                                    double step, double* out)
{
    return guard([&] {
        require(prior, k, out);
        *out = posterior_z_derivative(prior->d, k->k, w, z, step);
    });
}

sr_status sr_noise_threshold(const sr_distribution* noise, int grid, double* eps_hat, int* strict)
{
    return guard([&] {
        require(noise, eps_hat);
        auto t = independent_noise_threshold(noise->d, grid > 0 ? grid : 10000);
        *eps_hat = t.eps_hat;
        if (strict)
            *strict = t.strict ? 1 : 0;
    });
}

sr_status sr_tax_zbar(const sr_distribution* prior, const sr_kernel* k, const double* w_grid, size_t n_w,
                      double z_max, int n_scan, double* lower_bound, int* unbounded)
{
    return guard([&] {
        require(prior, k, w_grid, lower_bound);
        auto r = tax_zbar(prior->d, k->k, std::vector<double>(w_grid, w_grid + n_w), z_max, n_scan > 0 ? n_scan : 50);
        *lower_bound = r.lower_bound;
        if (unbounded)
            *unbounded = r.unbounded ? 1 : 0;
    });
}

//---------------------------------------------------------------------------//
// Monte Carlo oracle
//---------------------------------------------------------------------------//
double sr_dkw_band(size_t n, double confidence)
{
    return dkw_band(n, confidence);
}

sr_status sr_sample_point(const sr_distribution* prior, const sr_kernel* k, double z, double bandwidth,
                          sr_band_side side, size_t n, uint64_t seed, double* samples, sr_mc_stats* stats)
{
    return guard([&] {
        require(prior, k, samples);
        auto cond = McCondition::band(z, bandwidth, static_cast<BandSide>(side));
        emit_samples(sample_conditional(prior->d, k->k, cond, n, seed), samples, stats);
    });
}

sr_status sr_sample_threshold_kernel(const sr_distribution* prior, const sr_kernel* k, double b, size_t n,
                                     uint64_t seed, double* samples, sr_mc_stats* stats)
{
    return guard([&] {
        require(prior, k, samples);
        emit_samples(sample_conditional(prior->d, k->k, McCondition::threshold(b), n, seed), samples, stats);
    });
}

sr_status sr_sample_threshold(const sr_distribution* prior, const sr_threshold* t, double b, size_t n,
                              uint64_t seed, double* samples, sr_mc_stats* stats)
{
    return guard([&] {
        require(prior, t, samples);
        emit_samples(sample_conditional(prior->d, t->t, b, n, seed), samples, stats);
    });
}

sr_status sr_oracle_compare(const double* samples, size_t n, const sr_distribution* analytic, double confidence,
                            const double* windows, size_t n_windows, sr_oracle_result* out)
{
    return guard([&] {
        require(samples, analytic, out);
        if (n_windows > 0)
            require(windows);
        EmpiricalCdf e;
        e.samples.assign(samples, samples + n);
        if (!std::is_sorted(e.samples.begin(), e.samples.end()))
            fail(ErrorCode::invalid_argument, "samples must be sorted");
        std::vector<AtomWindow> w;
        for (size_t i = 0; i < n_windows; ++i)
            w.push_back({windows[2 * i], windows[2 * i + 1]});
        auto c = compare_to_cdf(e, analytic->d, confidence, w);
        *out = {c.sup_gap, c.band, c.window_gap, c.pass ? 1 : 0};
    });
}

//---------------------------------------------------------------------------//
// Scenarios
//---------------------------------------------------------------------------//
size_t sr_builtin_count(void)
{
    return builtin_names().size();
}

const char* sr_builtin_name(size_t i)
{
    static std::vector<std::string> const names = builtin_names();
    return i < names.size() ? names[i].c_str() : nullptr;
}

void sr_run_options_default(sr_run_options* options)
{
    if (!options)
        return;
    *options = sr_run_options{};
    options->out_dir = "reports";
    options->timestamp = 1;
}

sr_status sr_run_scenario(const char* target, const sr_run_options* options, int* passed, char* summary, size_t cap,
                          size_t* needed)
{
    return guard([&] {
        require(target, passed);
        RunOptions o;
        if (options)
        {
            if (options->out_dir)
                o.out_dir = options->out_dir;
            if (options->grid > 0)
                o.grid = options->grid;
            if (options->tol > 0)
                o.tol = options->tol;
            if (options->mc_n > 0)
                o.mc_n = static_cast<std::size_t>(options->mc_n);
            if (options->override_seed)
                o.seed = options->seed;
            o.timestamp = options->timestamp != 0;
        }
        Scenario s = load_scenario(target);
        RunResult r;
        try
        {
            r = run_scenario(s, o);
        }
        catch (Error const& e)
        {
            fail(e.code(), "scenario '" + s.name + "': " + e.what());
        }
        *passed = r.pass ? 1 : 0;
        std::ostringstream os;
        for (auto const& c : r.records)
            os << "check=" << c.check << ' ' << c.fields << " pass=" << (c.pass ? "true" : "false") << '\n';
        os << "status=" << (r.pass ? "pass" : "fail") << " dir=" << r.directory << '\n';
        copy_text(os.str(), summary, cap, needed);
    });
}

}  // extern "C"
