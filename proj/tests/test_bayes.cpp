#include <cmath>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "screenrev/bayes.hpp"
#include "screenrev/error.hpp"
#include "screenrev/named.hpp"

using namespace screenrev;

namespace
{
ErrorCode code_of(auto&& f)
{
    try
    {
        f();
    }
    catch (Error const& e)
    {
        return e.code();
    }
    return ErrorCode::unsupported;
}

double sup_gap(Distribution const& a, Distribution const& b, double lo, double hi, int n = 2000)
{
    double gap = 0;
    for (int i = 0; i <= n; ++i)
    {
        double w = lo + (hi - lo) * i / n;
        gap = std::max(gap, std::abs(a.cdf(w) - b.cdf(w)));
    }
    return gap;
}

Piece linear_piece(double lo, double hi, double c0, double c1 = 0)
{
    return Piece{lo, hi, {PolyTerm{lo, Polynomial{c0, c1}}}};
}
}  // namespace

TEST(PosteriorPoint, Examples)
{
    auto prior = uniform(0, 1);
    auto k = triangle_rectangle_kernel();

    auto at2 = posterior_point(prior, k, 2);
    EXPECT_LT(sup_gap(at2.dist, prior, 0, 1), 1e-15);

    auto at1 = posterior_point(prior, k, 1);
    EXPECT_NEAR(at1.dist.cdf(0.5), 0.375, 1e-15);
    EXPECT_NEAR(at1.evidence, 2.0 / 3.0, 1e-15);
    oracle::Reweighted ref(oracle::uniform_prior(0, 1), [](double x) { return oracle::triangle_rectangle(1, x); });
    for (double w : {0.1, 0.25, 0.5, 0.8, 1.0})
    {
        EXPECT_NEAR(at1.dist.cdf(w), (w + w * w) / 2, 1e-15);
        EXPECT_NEAR(at1.dist.cdf(w), ref.cdf(w), 1e-13);
    }

    EXPECT_EQ(code_of([&] { posterior_point(prior, k, 3.5); }), ErrorCode::zero_evidence);
    EXPECT_EQ(code_of([&] { posterior_point(prior, k, -0.5); }), ErrorCode::zero_evidence);
}

TEST(PosteriorThreshold, Examples)
{
    auto prior = uniform(0, 1);
    auto ts = threshold_transform(triangle_rectangle_kernel());

    auto b1 = posterior_threshold(prior, ts, 1);
    auto z1 = posterior_point(prior, triangle_rectangle_kernel(), 1);
    EXPECT_LT(sup_gap(b1.dist, z1.dist, 0, 1), 1e-15);

    auto b2 = posterior_threshold(prior, ts, 2);
    EXPECT_NEAR(mean(b2.dist), 0.5, 1e-15);
    EXPECT_NEAR(b2.evidence, 1.0 / 3.0, 1e-15);
    EXPECT_LT(sup_gap(b2.dist, prior, 0, 1), 1e-15);

    auto below = posterior_threshold(prior, ts, -1);
    EXPECT_NEAR(below.evidence, 1.0, 1e-15);
    EXPECT_LT(sup_gap(below.dist, prior, 0, 1), 1e-15);

    EXPECT_EQ(code_of([&] { posterior_threshold(prior, ts, 3.5); }), ErrorCode::zero_evidence);
}

TEST(PosteriorThresholdAdditive, Examples)
{
    auto prior = uniform(0, 1);
    auto noise = uniform(0, 1);
    auto b0 = posterior_threshold_additive(prior, noise, 0);
    EXPECT_LT(sup_gap(b0.dist, prior, 0, 1), 1e-15);

    auto b1 = posterior_threshold_additive(prior, noise, 1);
    EXPECT_NEAR(mean(b1.dist), 2.0 / 3.0, 1e-15);
    for (double w : {0.2, 0.5, 0.9})
        EXPECT_NEAR(b1.dist.cdf(w), w * w, 1e-15);

    EXPECT_EQ(code_of([&] { posterior_threshold_additive(prior, noise, 2.5); }), ErrorCode::zero_evidence);
}

TEST(PosteriorPoint, EvasionAtomCarriesPriorDensity)
{
    auto prior = truncate(exponential(1, 0, TailSide::lower), -30, 0);
    auto k = evasion_kernel(EvasionProbability::constant(0.3), exponential(1));
    auto post = posterior_point(prior, k, 0);
    double f0 = prior.density(0);
    EXPECT_NEAR(post.dist.atom_at(0), 0.3 * f0 / post.evidence, 1e-14);

    oracle::Prior p;
    double norm = 1 - std::exp(-30.0);
    p.density = [norm](double x) { return x >= -30 && x <= 0 ? std::exp(x) / norm : 0.0; };
    p.lo = -30;
    p.hi = 0;
    oracle::Reweighted ref(p, [](double x) { return x <= 0 ? 0.7 * std::exp(x) : 0.0; }, {}, {{0.0, 0.3}});
    EXPECT_NEAR(post.evidence, ref.evidence(), 1e-13);
    for (double w : {-5.0, -2.0, -1.0, -0.5, -1e-9, 0.0})
        EXPECT_NEAR(post.dist.cdf(w), ref.cdf(w), 1e-12) << "w=" << w;
}

TEST(PosteriorPoint, PriorAtomsWeightedByLikelihood)
{
    auto prior = make_distribution({linear_piece(0, 1, 0.7)}, {{0.5, 0.3}});
    auto post = posterior_point(prior, triangle_rectangle_kernel(), 1);
    oracle::Prior p;
    p.density = [](double x) { return x >= 0 && x <= 1 ? 0.7 : 0.0; };
    p.atoms = {{0.5, 0.3}};
    oracle::Reweighted ref(p, [](double x) { return oracle::triangle_rectangle(1, x); });
    EXPECT_NEAR(post.evidence, ref.evidence(), 1e-14);
    for (double w : {0.2, 0.4999, 0.5, 0.7, 1.0})
        EXPECT_NEAR(post.dist.cdf(w), ref.cdf(w), 1e-13);
}

TEST(PosteriorPoint, MatchesQuadratureAcrossKernels)
{
    struct Case
    {
        Distribution prior;
        oracle::Prior ref_prior;
        SignalKernel k;
        std::function<double(double, double)> f;
        std::vector<double> zs;
    };
    auto tri = [](double z, double x) { return oracle::triangle_rectangle(z, x); };
    oracle::Prior ramp;
    ramp.density = [](double x) { return x >= 0 && x <= 1 ? 2 * x : 0.0; };
    std::vector<Case> cases{
        {uniform(0, 1), oracle::uniform_prior(0, 1), triangle_rectangle_kernel(), tri, {0.3, 1, 1.5, 2, 2.7}},
        {make_distribution({linear_piece(0, 1, 0, 2)}, {}), ramp, triangle_rectangle_kernel(), tri, {0.5, 1.2, 2.5}},
        {uniform(0, 1), oracle::uniform_prior(0, 1), three_piece_kernel(0.1, 1),
         [](double z, double x) { return oracle::three_piece(z, x, 0.1, 1); }, {0.4, 1, 2, 2.05}},
        {uniform(-1, 0), oracle::uniform_prior(-1, 0), additive_kernel(pareto(2, 1)),
         [](double z, double x) { return z - x >= 1 ? 2 / std::pow(z - x, 3) : 0.0; }, {0.5, 1, 1.5, 3}},
        {uniform(-1, 0), oracle::uniform_prior(-1, 0), additive_kernel(exponential(1)),
         [](double z, double x) { return z >= x ? std::exp(x - z) : 0.0; }, {-0.5, 1, 5}},
    };
    for (auto const& c : cases)
    {
        for (double z : c.zs)
        {
            auto post = posterior_point(c.prior, c.k, z);
            std::vector<double> breaks;
            for (double b : c.prior.breakpoints())
                breaks.push_back(b);
            auto [lo, hi] = c.k.noise_range();
            for (double e : {0.0, 1.0, 1.1, 2.0, 2.1})
                breaks.push_back(z - e);
            breaks.push_back(z - lo);
            if (std::isfinite(hi))
                breaks.push_back(z - hi);
            auto f = c.f;
            oracle::Reweighted ref(c.ref_prior, [f, z](double x) { return f(z, x); }, breaks);
            EXPECT_NEAR(post.evidence, ref.evidence(), 1e-12) << c.k.describe() << " z=" << z;
            for (int i = 0; i <= 20; ++i)
            {
                double w = c.ref_prior.lo + (c.ref_prior.hi - c.ref_prior.lo) * i / 20;
                EXPECT_NEAR(post.dist.cdf(w), ref.cdf(w), 1e-12) << c.k.describe() << " z=" << z << " w=" << w;
            }
            EXPECT_NEAR(mean(post.dist), ref.mean(), 1e-12);
        }
    }
}

//---------------------------------------------------------------------------//
// Properties
//---------------------------------------------------------------------------//
TEST(BayesProperty, UninformativeKernelReturnsPrior)
{
    // At z = 2 the triangle+rectangle kernel is 1/3 for every x in [0, 1]
    std::vector<Distribution> priors{uniform(0, 1), make_distribution({linear_piece(0, 1, 0, 2)}, {}),
                                     make_distribution({linear_piece(0, 0.4, 1.25), linear_piece(0.6, 1, 1.25)}, {}),
                                     make_distribution({linear_piece(0, 1, 0.7)}, {{0.5, 0.3}})};
    for (auto const& prior : priors)
    {
        auto post = posterior_point(prior, triangle_rectangle_kernel(), 2);
        ASSERT_EQ(post.dist.pieces().size(), prior.pieces().size());
        for (std::size_t i = 0; i < prior.pieces().size(); ++i)
        {
            auto const& a = post.dist.pieces()[i];
            auto const& b = prior.pieces()[i];
            EXPECT_EQ(a.lo, b.lo);
            EXPECT_EQ(a.hi, b.hi);
            for (double t : {0.0, 0.3, 0.7})
            {
                double x = a.lo + (a.hi - a.lo) * t;
                EXPECT_NEAR(a.density(x), b.density(x), 1e-15);
            }
        }
        ASSERT_EQ(post.dist.atoms().size(), prior.atoms().size());
        for (std::size_t i = 0; i < prior.atoms().size(); ++i)
            EXPECT_NEAR(post.dist.atoms()[i].mass, prior.atoms()[i].mass, 1e-15);
    }
}

TEST(BayesProperty, PosteriorsHaveUnitMass)
{
    double iota[] = {0.05};
    auto footnote = make_named_prior("footnote_mixture", iota);
    auto ts = threshold_transform(triangle_rectangle_kernel());
    std::vector<Posterior> ps{posterior_point(uniform(0, 1), triangle_rectangle_kernel(), 1.3),
                              posterior_point(uniform(-1, 0), additive_kernel(pareto(2, 1)), 2),
                              posterior_threshold(footnote, ts, 1),
                              posterior_threshold(footnote, ts, 2),
                              posterior_threshold_additive(uniform(0, 1), exponential(2), 1.5),
                              posterior_point(truncate(exponential(1, 0, TailSide::lower), -30, 0),
                                              evasion_kernel(EvasionProbability::constant(0.3), exponential(1)), 0.5)};
    for (auto const& p : ps)
    {
        double m = 0;
        for (auto const& piece : p.dist.pieces())
            m += piece.mass();
        for (auto const& a : p.dist.atoms())
            m += a.mass;
        EXPECT_NEAR(m, 1.0, 1e-10);
        EXPECT_GT(p.evidence, 0);
    }
}

TEST(BayesProperty, ThresholdTransformEquivalence)
{
    std::vector<Distribution> priors{uniform(0, 1), make_distribution({linear_piece(0, 1, 0, 2)}, {}),
                                     make_distribution({linear_piece(0, 1, 0.7)}, {{0.5, 0.3}})};
    for (auto const& k : {triangle_rectangle_kernel(), three_piece_kernel(0.1, 1)})
    {
        auto ts = threshold_transform(k);
        for (auto const& prior : priors)
        {
            // The events agree once z is at or above the prior's upper support
            for (int i = 0; i < 30; ++i)
            {
                double z = 1 + 1.95 * i / 29;
                auto a = posterior_threshold(prior, ts, z);
                auto b = posterior_point(prior, k, z);
                EXPECT_LT(sup_gap(a.dist, b.dist, -0.01, 1.01, 500), 1e-9) << k.describe() << " z=" << z;
            }
        }
    }
}

TEST(BayesProperty, SupportClipping)
{
    auto prior = uniform(0, 2);
    auto k = additive_kernel(uniform(0, 1));
    for (double z : {0.3, 0.9, 1.5, 2.4})
    {
        auto post = posterior_point(prior, k, z);
        EXPECT_GE(post.dist.support_lo(), std::max(0.0, z - 1) - 1e-15);
        EXPECT_LE(post.dist.support_hi(), std::min(2.0, z) + 1e-15);
    }
}
