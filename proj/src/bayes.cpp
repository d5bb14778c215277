#include "screenrev/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "screenrev/approximation.hpp"
#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
struct Accumulator
{
    std::vector<Piece> pieces;
    double approx_error = 0;
    double discarded = 0;
};

void weigh_piece(Distribution const& prior,
                 Piece const& p,
                 WeightSegment const& s,
                 UpdateOptions const& options,
                 Accumulator& acc)
{
    double lo = std::max(p.lo, s.lo), hi = std::min(p.hi, s.hi);
    if (!(lo < hi))
        return;
    Piece out{lo, hi, {}};
    double ref = out.reference();
    bool exact = !s.fn;
    if (exact)
    {
        for (auto const& a : p.terms)
        {
            for (auto const& b : s.terms)
            {
                auto prod = multiply(a, b, ref);
                if (!prod)
                {
                    exact = false;
                    break;
                }
                out.terms.push_back(*prod);
            }
            if (!exact)
                break;
        }
    }
    if (exact)
    {
        out.terms = simplify_terms(std::move(out.terms), ref);
        if (!out.terms.empty())
            acc.pieces.push_back(std::move(out));
        return;
    }

    // Outside the closed-form family: cut unbounded ends at small prior mass
    if (std::isinf(lo))
    {
        double cut = std::max(prior.quantile(options.tail_mass), hi - 1e6);
        if (cut >= hi)
            return;
        acc.discarded += p.mass(lo, cut);
        lo = cut;
    }
    if (std::isinf(hi))
    {
        double cut = std::min(prior.quantile(1 - options.tail_mass), lo + 1e6);
        if (cut <= lo)
            return;
        acc.discarded += p.mass(cut, hi);
        hi = cut;
    }
    auto f = [&p, &s](double x) { return std::max(0.0, p.density(x) * s(x)); };
    double scale = 0;
    for (int i = 0; i <= 8; ++i)
        scale = std::max(scale, f(lo + (hi - lo) * i / 8));
    double tol = options.abs_tol * std::max(scale, 1e-300);
    auto fit = approximate_cubic(f, lo, hi, tol);
    acc.approx_error += fit.l1_error;
    for (auto& piece : fit.pieces)
        acc.pieces.push_back(std::move(piece));
}

[[noreturn]] void zero_evidence(Conditioning c)
{
    std::ostringstream os;
    os << "conditioning event " << to_string(c.kind) << " at " << format_number(c.value)
       << " has zero evidence under the prior";
    fail(ErrorCode::zero_evidence, os.str());
}
}  // namespace

char const* to_string(ConditioningKind kind)
{
    switch (kind)
    {
        case ConditioningKind::point:
            return "point";
        case ConditioningKind::threshold_transform:
            return "threshold_transform";
        case ConditioningKind::threshold_additive:
            return "threshold_additive";
        case ConditioningKind::threshold_kernel:
            return "threshold_kernel";
    }
    return "unknown";
}

Posterior bayes_update(Distribution const& prior,
                       XWeights const& weights,
                       std::function<double(double)> const& at_atom,
                       Conditioning conditioning,
                       UpdateOptions const& options)
{
    Accumulator acc;
    auto pieces = prior.pieces();
    for (auto const& s : weights.segments)
    {
        for (auto const& p : pieces)
        {
            if (p.hi <= s.lo || p.lo >= s.hi)
                continue;
            weigh_piece(prior, p, s, options, acc);
        }
    }
    std::vector<Atom> atoms;
    for (auto const& a : prior.atoms())
    {
        double w = at_atom(a.location);
        if (w > 0)
            atoms.push_back({a.location, w * a.mass});
    }
    for (auto const& d : weights.deltas)
    {
        double w = d.mass * prior.density(d.location);
        if (w > 0)
            atoms.push_back({d.location, w});
    }

    double evidence = total_mass(acc.pieces, atoms);
    if (!(evidence > 0) || !std::isfinite(evidence))
        zero_evidence(conditioning);
    for (auto& p : acc.pieces)
        for (auto& t : p.terms)
            t = scaled(t, 1 / evidence);
    for (auto& a : atoms)
        a.mass /= evidence;

    BuildOptions opts;
    opts.normalize = true;
    opts.approximation_error = acc.approx_error / evidence + prior.approximation_error();
    opts.discarded_mass = prior.discarded_mass() + acc.discarded;
    Posterior post;
    post.dist = make_distribution(std::move(acc.pieces), std::move(atoms), opts);
    post.conditioning = conditioning;
    post.evidence = evidence;
    post.discarded_mass = opts.discarded_mass;
    post.approximation_error = opts.approximation_error;
    return post;
}

Posterior posterior_point(Distribution const& prior, SignalKernel const& k, double z,
                          UpdateOptions const& options)
{
    Conditioning c{ConditioningKind::point, z};
    // A prior atom meeting a kernel atom gives the event Z = z positive probability
    std::vector<Atom> atoms;
    for (auto const& a : prior.atoms())
    {
        double m = k.atom_mass(z, a.location);
        if (m > 0)
            atoms.push_back({a.location, a.mass * m});
    }
    if (!atoms.empty())
    {
        double evidence = total_mass({}, atoms);
        Posterior post;
        post.dist = make_distribution({}, std::move(atoms), BuildOptions{.normalize = true});
        post.conditioning = c;
        post.evidence = evidence;
        return post;
    }
    return bayes_update(prior, k.likelihood_in_x(z), [&](double x) { return k.density(z, x); }, c,
                        options);
}

Posterior posterior_threshold(Distribution const& prior, ThresholdSignal const& ts, double b,
                              UpdateOptions const& options)
{
    return bayes_update(prior, ts.survival_in_x(b), [&](double x) { return ts.survival(b, x); },
                        {ConditioningKind::threshold_transform, b}, options);
}

Posterior posterior_threshold_kernel(Distribution const& prior, SignalKernel const& k, double b,
                                     UpdateOptions const& options)
{
    return bayes_update(prior, k.survival_in_x(b), [&](double x) { return k.survival(b, x); },
                        {ConditioningKind::threshold_kernel, b}, options);
}

Posterior posterior_threshold_additive(Distribution const& prior, Distribution const& noise, double b,
                                       UpdateOptions const& options)
{
    auto post = posterior_threshold_kernel(prior, additive_kernel(noise), b, options);
    post.conditioning.kind = ConditioningKind::threshold_additive;
    return post;
}

}  // namespace screenrev
