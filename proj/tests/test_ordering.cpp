#include <cmath>

#include <gtest/gtest.h>

#include "screenrev/error.hpp"
#include "screenrev/named.hpp"
#include "screenrev/ordering.hpp"

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

Piece linear_piece(double lo, double hi, double c0, double c1 = 0)
{
    return Piece{lo, hi, {PolyTerm{lo, Polynomial{c0, c1}}}};
}

//! Distributions the ordering properties are checked over
std::vector<Distribution> corpus()
{
    double iota[] = {0.05};
    auto tri = triangle_rectangle_kernel();
    auto prior = uniform(0, 1);
    return {prior,
            uniform(0.25, 0.75),
            make_distribution({linear_piece(0, 1, 0, 2)}, {}),
            make_distribution({linear_piece(0, 1, 2, -2)}, {}),
            make_distribution({linear_piece(0, 1, 0.7)}, {{0.5, 0.3}}),
            posterior_point(prior, tri, 1).dist,
            posterior_point(prior, tri, 0.5).dist,
            posterior_point(uniform(-1, 0), additive_kernel(pareto(2, 1)), 2).dist,
            make_named_prior("footnote_mixture", iota),
            exponential(1, 0, TailSide::lower)};
}
}  // namespace

TEST(Fosd, Examples)
{
    auto u = uniform(0, 1);
    EXPECT_EQ(fosd_compare(u, u).relation, FosdRelation::equal);

    auto post = posterior_point(u, triangle_rectangle_kernel(), 1).dist;
    auto v = fosd_compare(post, u);
    EXPECT_EQ(v.relation, FosdRelation::strict_dominates);
    EXPECT_NEAR(v.max_gap_pos, 0.125, 1e-12);
    EXPECT_LE(v.max_gap_neg, v.tol);
    EXPECT_GE(v.n_probes, 10000u);
    ASSERT_FALSE(v.witnesses.empty());
    EXPECT_NEAR(v.witnesses.front(), 0.5, 1e-4);

    auto narrow = uniform(0.25, 0.75);
    EXPECT_EQ(fosd_compare(u, narrow).relation, FosdRelation::incomparable);
}

TEST(Fosd, AtomsProbedOnBothSides)
{
    // The gap sits on [0.25, 0.5), visible only just below the atom at 0.5
    auto a = make_distribution({}, {{0.5, 1.0}});
    auto b = make_distribution({}, {{0.25, 0.5}, {0.5, 0.5}});
    EXPECT_EQ(fosd_compare(a, b).relation, FosdRelation::strict_dominates);
    EXPECT_EQ(fosd_compare(b, a).relation, FosdRelation::dominated);
}

TEST(Fosd, WeakWhenCdfsTouchInside)
{
    // Same cdf outside [0.4, 0.6]
    auto u = uniform(0, 1);
    auto shifted = make_distribution({linear_piece(0, 0.4, 1), linear_piece(0.4, 0.5, 1.5),
                                      linear_piece(0.5, 0.6, 0.5), linear_piece(0.6, 1, 1)},
                                     {});
    EXPECT_EQ(fosd_compare(u, shifted).relation, FosdRelation::weak_dominates);
    EXPECT_EQ(fosd_compare(shifted, u).relation, FosdRelation::dominated);
}

TEST(ScreeningCurve, Examples)
{
    auto prior = uniform(0, 1);
    auto ts = threshold_transform(triangle_rectangle_kernel());
    auto c = screening_curve(prior, ts, {1, 2});
    ASSERT_EQ(c.values.size(), 2u);
    EXPECT_NEAR(c.values[0], 7.0 / 12.0, 1e-15);
    EXPECT_NEAR(c.values[1], 0.5, 1e-15);
    EXPECT_NEAR(c.evidences[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(c.evidences[1], 1.0 / 3.0, 1e-15);

    auto add = screening_curve(prior, uniform(0, 1), {0, 1});
    EXPECT_NEAR(add.values[0], 0.5, 1e-15);
    EXPECT_NEAR(add.values[1], 2.0 / 3.0, 1e-15);
    EXPECT_TRUE(detect_reversals(add).empty());

    try
    {
        screening_curve(prior, ts, {1, 5});
        FAIL() << "expected ZeroEvidence";
    }
    catch (Error const& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::zero_evidence);
        EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
    }
    EXPECT_EQ(code_of([&] { screening_curve(prior, ts, {2, 1}); }), ErrorCode::invalid_argument);
}

TEST(ScreeningCurve, KernelThresholdAndEvidenceMonotone)
{
    auto c = screening_curve(uniform(0, 1), triangle_rectangle_kernel(), {0, 0.5, 1, 1.5, 2, 2.5});
    for (std::size_t i = 1; i < c.evidences.size(); ++i)
        EXPECT_LE(c.evidences[i], c.evidences[i - 1] + 1e-15);
    for (double v : c.values)
    {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(DetectReversals, Examples)
{
    ScreeningCurve c{{1, 2}, {7.0 / 12.0, 0.5}, {2.0 / 3.0, 1.0 / 3.0}};
    auto r = detect_reversals(c);
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].i, 0u);
    EXPECT_EQ(r[0].j, 1u);
    EXPECT_NEAR(r[0].gap, 1.0 / 12.0, 1e-15);

    ScreeningCurve mono{{0, 1, 2}, {0.5, 0.55, 0.6}, {1, 1, 1}};
    EXPECT_TRUE(detect_reversals(mono).empty());
    ScreeningCurve tie{{0, 1}, {0.5, 0.5}, {1, 1}};
    EXPECT_TRUE(detect_reversals(tie, 1e-9).empty());

    ScreeningCurve many{{0, 1, 2, 3}, {0.9, 0.5, 0.7, 0.4}, {1, 1, 1, 1}};
    auto rs = detect_reversals(many);
    ASSERT_EQ(rs.size(), 5u);
    for (std::size_t i = 1; i < rs.size(); ++i)
        EXPECT_GE(rs[i - 1].gap, rs[i].gap);
    EXPECT_EQ(rs[0].i, 0u);
    EXPECT_EQ(rs[0].j, 3u);
}

//---------------------------------------------------------------------------//
// Properties
//---------------------------------------------------------------------------//
TEST(FosdProperty, ReflexiveAndAntisymmetric)
{
    auto ds = corpus();
    for (std::size_t i = 0; i < ds.size(); ++i)
    {
        EXPECT_EQ(fosd_compare(ds[i], ds[i]).relation, FosdRelation::equal) << i;
        for (std::size_t j = 0; j < ds.size(); ++j)
        {
            if (i == j)
                continue;
            auto ab = fosd_compare(ds[i], ds[j]).relation;
            auto ba = fosd_compare(ds[j], ds[i]).relation;
            if (ab == FosdRelation::strict_dominates)
            {
                EXPECT_TRUE(ba == FosdRelation::incomparable || ba == FosdRelation::dominated) << i << "," << j;
            }
        }
    }
}

TEST(FosdProperty, DominanceOrdersMeans)
{
    auto ds = corpus();
    for (auto const& a : ds)
    {
        for (auto const& b : ds)
        {
            auto v = fosd_compare(a, b);
            if (v.relation != FosdRelation::strict_dominates)
                continue;
            double lo = std::min(a.quantile(1e-12), b.quantile(1e-12));
            double hi = std::max(a.quantile(1 - 1e-12), b.quantile(1 - 1e-12));
            EXPECT_GE(mean(a), mean(b) + v.tol * (hi - lo));
        }
    }
}

TEST(FosdProperty, GridRefinementKeepsStrictVerdicts)
{
    auto prior = uniform(0, 1);
    auto tri = triangle_rectangle_kernel();
    auto three = three_piece_kernel(0.1, 1);
    std::vector<std::pair<Distribution, Distribution>> pairs{
        {posterior_point(prior, tri, 1).dist, posterior_point(prior, tri, 2).dist},
        {posterior_point(prior, tri, 1.5).dist, posterior_point(prior, tri, 2).dist},
        {posterior_point(prior, three, 1).dist, posterior_point(prior, three, 2).dist},
        {posterior_point(prior, tri, 1).dist, prior},
    };
    for (auto const& [a, b] : pairs)
    {
        FosdOptions o;
        for (int grid : {10000, 20000, 40000})
        {
            o.grid = grid;
            EXPECT_EQ(fosd_compare(a, b, o).relation, FosdRelation::strict_dominates) << "grid=" << grid;
        }
    }
}
