// Properties that cut across modules, over randomly drawn piecewise priors
#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "screenrev/bayes.hpp"
#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"
#include "screenrev/mc.hpp"
#include "screenrev/named.hpp"
#include "screenrev/ordering.hpp"

using namespace screenrev;

namespace
{
//! Piecewise-linear density on [0, 1] with 1 to 4 pieces and an optional atom
Distribution random_prior(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0, 1);
    int n = 1 + static_cast<int>(rng() % 4);
    std::vector<double> cuts{0, 1};
    for (int i = 1; i < n; ++i)
        cuts.push_back(u(rng));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        double lo = cuts[i], hi = cuts[i + 1];
        if (hi - lo < 1e-3)
            continue;
        double a = 0.1 + u(rng), b = 0.1 + u(rng);
        pieces.push_back(Piece{lo, hi, {PolyTerm{lo, Polynomial{a, (b - a) / (hi - lo)}}}});
    }
    std::vector<Atom> atoms;
    if (rng() % 2)
        atoms.push_back({0.05 + 0.9 * u(rng), 0.2 * u(rng)});
    double mass = 0;
    for (auto const& p : pieces)
        mass += p.mass(p.lo, p.hi);
    for (auto const& a : atoms)
        mass += a.mass;
    for (auto& p : pieces)
        std::get<PolyTerm>(p.terms[0]).poly = std::get<PolyTerm>(p.terms[0]).poly * (1 / mass);
    for (auto& a : atoms)
        a.mass /= mass;
    return make_distribution(pieces, atoms);
}
}  // namespace

TEST(CrossProperty, TextRoundTripPreservesPosteriors)
{
    std::mt19937_64 rng(3);
    auto k = three_piece_kernel(0.1, 1);
    for (int trial = 0; trial < 40; ++trial)
    {
        auto prior = random_prior(rng);
        auto post = posterior_point(prior, k, 0.5 + 1.5 * (trial % 7) / 6.0);
        auto parsed = parse_distribution(to_text(post.dist, post.evidence));
        ASSERT_TRUE(parsed.evidence.has_value());
        EXPECT_EQ(*parsed.evidence, post.evidence);
        for (int i = 0; i <= 50; ++i)
        {
            double w = -0.1 + 1.2 * i / 50;
            EXPECT_NEAR(parsed.dist.cdf(w), post.dist.cdf(w), 1e-15) << trial << " w=" << w;
        }
    }
}

TEST(CrossProperty, CurveValuesAreThresholdPosteriorMeans)
{
    std::mt19937_64 rng(5);
    auto ts = threshold_transform(triangle_rectangle_kernel());
    std::vector<double> cutoffs{0.25, 0.75, 1.25, 1.75};
    for (int trial = 0; trial < 25; ++trial)
    {
        auto prior = random_prior(rng);
        auto c = screening_curve(prior, ts, cutoffs);
        for (std::size_t i = 0; i < cutoffs.size(); ++i)
        {
            auto p = posterior_threshold(prior, ts, cutoffs[i]);
            EXPECT_NEAR(c.values[i], mean(p.dist), 1e-14);
            EXPECT_NEAR(c.evidences[i], p.evidence, 1e-14);
        }
    }
}

TEST(CrossProperty, ThresholdSamplerAgreesWithAnalyticPosterior)
{
    // Threshold conditioning is exact, so any gap beyond the DKW band is a bug
    std::mt19937_64 rng(9);
    auto k = triangle_rectangle_kernel();
    auto ts = threshold_transform(k);
    for (int trial = 0; trial < 6; ++trial)
    {
        auto prior = random_prior(rng);
        double b = 0.5 + 0.25 * trial;
        auto e = sample_conditional(prior, ts, b, 100000, 1000 + trial);
        auto c = compare_to_cdf(e, posterior_threshold(prior, ts, b).dist, 1 - 1e-6);
        EXPECT_TRUE(c.pass) << "trial " << trial << " gap " << c.sup_gap << " band " << c.band;

        auto ek = sample_conditional(prior, k, McCondition::threshold(b), 100000, 2000 + trial);
        auto ck = compare_to_cdf(ek, posterior_threshold_kernel(prior, k, b).dist, 1 - 1e-6);
        EXPECT_TRUE(ck.pass) << "trial " << trial << " gap " << ck.sup_gap << " band " << ck.band;
    }
}

TEST(CrossProperty, PointPosteriorsAverageToThresholdPosterior)
{
    // P(X <= w | Z >= b) is the evidence-weighted mix of point posteriors over z >= b
    std::mt19937_64 rng(13);
    auto k = triangle_rectangle_kernel();
    for (int trial = 0; trial < 10; ++trial)
    {
        auto prior = random_prior(rng);
        double b = 1.0;
        int m = 4000;
        double hi = 3.0, mass = 0;
        std::vector<double> acc(5, 0.0);
        for (int i = 0; i < m; ++i)
        {
            double z = b + (hi - b) * (i + 0.5) / m;
            Posterior p;
            try
            {
                p = posterior_point(prior, k, z);
            }
            catch (Error const&)
            {
                continue;
            }
            mass += p.evidence;
            for (int j = 0; j < 5; ++j)
                acc[j] += p.evidence * p.dist.cdf(0.2 * j + 0.1);
        }
        auto direct = posterior_threshold_kernel(prior, k, b);
        // Midpoint rule over z with jumps in the integrand: error O(step)
        EXPECT_NEAR(mass * (hi - b) / m, direct.evidence, 1e-3);
        for (int j = 0; j < 5; ++j)
            EXPECT_NEAR(acc[j] / mass, direct.dist.cdf(0.2 * j + 0.1), 2e-3) << trial << " j=" << j;
    }
}
