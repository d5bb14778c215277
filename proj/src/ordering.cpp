#include "screenrev/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "screenrev/error.hpp"

namespace screenrev
{
char const* to_string(FosdRelation r)
{
    switch (r)
    {
        case FosdRelation::strict_dominates:
            return "strict_dominates";
        case FosdRelation::weak_dominates:
            return "weak_dominates";
        case FosdRelation::equal:
            return "equal";
        case FosdRelation::dominated:
            return "dominated";
        case FosdRelation::incomparable:
            return "incomparable";
    }
    return "unknown";
}

FosdVerdict fosd_compare(Distribution const& d1, Distribution const& d2, FosdOptions const& options,
                         std::vector<FosdProbe>* probes)
{
    if (!(options.tol > 0))
        fail(ErrorCode::invalid_argument, "fosd tolerance must be positive");
    double lo = std::min(d1.support_lo(), d2.support_lo());
    double hi = std::max(d1.support_hi(), d2.support_hi());
    double glo = std::isfinite(lo) ? lo : std::min(d1.quantile(options.tail), d2.quantile(options.tail));
    double ghi = std::isfinite(hi) ? hi
                                   : std::max(d1.quantile(1 - options.tail), d2.quantile(1 - options.tail));

    std::vector<std::pair<double, bool>> pts;
    int n = std::max(options.grid, 2);
    for (int i = 0; i <= n; ++i)
        pts.emplace_back(glo + (ghi - glo) * i / n, false);
    for (auto const* d : {&d1, &d2})
    {
        for (double b : d->breakpoints())
            pts.emplace_back(b, false);
        for (auto const& a : d->atoms())
            pts.emplace_back(a.location, true);
    }
    std::sort(pts.begin(), pts.end(), [](auto const& a, auto const& b) {
        return a.first < b.first || (a.first == b.first && a.second && !b.second);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto shared_atom = [&](double w) { return d1.atom_at(w) > 0 && d2.atom_at(w) > 0; };

    FosdVerdict v;
    v.tol = options.tol;
    v.n_probes = pts.size();
    double max_pos = -1, max_neg = -1, min_int = std::numeric_limits<double>::infinity();
    double w_pos = glo, w_neg = glo, w_int = glo;
    bool any_interior = false;
    if (probes)
        probes->clear();
    for (auto const& [w, left] : pts)
    {
        double f1 = left ? d1.cdf_left(w) : d1.cdf(w);
        double f2 = left ? d2.cdf_left(w) : d2.cdf(w);
        if (probes)
            probes->push_back({w, left, f1, f2});
        double gap = f2 - f1;
        if (gap > max_pos)
        {
            max_pos = gap;
            w_pos = w;
        }
        if (-gap > max_neg)
        {
            max_neg = -gap;
            w_neg = w;
        }
        bool interior = w > lo && w < hi && !shared_atom(w);
        if (interior && gap < min_int)
        {
            min_int = gap;
            w_int = w;
            any_interior = true;
        }
    }
    v.max_gap_pos = std::max(max_pos, 0.0);
    v.max_gap_neg = std::max(max_neg, 0.0);
    v.min_interior_gap = any_interior ? min_int : 0.0;
    v.witnesses = {w_pos, w_neg, w_int};
    v.witnesses.erase(std::unique(v.witnesses.begin(), v.witnesses.end()), v.witnesses.end());

    double tol = options.tol;
    if (v.max_gap_pos <= tol && v.max_gap_neg <= tol)
        v.relation = FosdRelation::equal;
    else if (v.max_gap_neg <= tol && any_interior && v.min_interior_gap > tol)
        v.relation = FosdRelation::strict_dominates;
    else if (v.max_gap_neg <= tol)
        v.relation = FosdRelation::weak_dominates;
    else if (v.max_gap_pos <= tol)
        v.relation = FosdRelation::dominated;
    else
        v.relation = FosdRelation::incomparable;
    return v;
}

namespace
{
ScreeningCurve curve_from(std::vector<double> const& cutoffs, std::function<Posterior(double)> const& post)
{
    if (!std::is_sorted(cutoffs.begin(), cutoffs.end()))
        fail(ErrorCode::invalid_argument, "screening cutoffs must be in increasing order");
    ScreeningCurve c;
    c.cutoffs = cutoffs;
    for (double b : cutoffs)
    {
        Posterior p = post(b);
        c.values.push_back(mean(p.dist));
        c.evidences.push_back(p.evidence);
    }
    return c;
}
}  // namespace

ScreeningCurve screening_curve(Distribution const& prior, ThresholdSignal const& ts,
                               std::vector<double> const& cutoffs)
{
    return curve_from(cutoffs, [&](double b) { return posterior_threshold(prior, ts, b); });
}

ScreeningCurve screening_curve(Distribution const& prior, Distribution const& noise,
                               std::vector<double> const& cutoffs)
{
    return curve_from(cutoffs, [&](double b) { return posterior_threshold_additive(prior, noise, b); });
}

ScreeningCurve screening_curve(Distribution const& prior, SignalKernel const& k,
                               std::vector<double> const& cutoffs)
{
    return curve_from(cutoffs, [&](double b) { return posterior_threshold_kernel(prior, k, b); });
}

std::vector<Reversal> detect_reversals(ScreeningCurve const& c, double tol)
{
    std::vector<Reversal> out;
    for (std::size_t i = 0; i < c.values.size(); ++i)
        for (std::size_t j = i + 1; j < c.values.size(); ++j)
            if (c.values[i] > c.values[j] + tol)
                out.push_back({i, j, c.values[i] - c.values[j]});
    std::stable_sort(out.begin(), out.end(), [](Reversal const& a, Reversal const& b) { return a.gap > b.gap; });
    return out;
}

}  // namespace screenrev
