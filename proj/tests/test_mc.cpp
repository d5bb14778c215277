#include <cmath>
#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "screenrev/error.hpp"
#include "screenrev/mc.hpp"
#include "screenrev/named.hpp"
#include "screenrev/philox.hpp"

using namespace screenrev;

namespace
{
constexpr double confidence = 1 - 1e-6;

double sup_gap(EmpiricalCdf const& e, Distribution const& d)
{
    // Both one-sided limits at each distinct sample; ties carry the atoms
    double gap = 0;
    double n = static_cast<double>(e.n());
    std::size_t i = 0;
    while (i < e.samples.size())
    {
        double x = e.samples[i];
        std::size_t j = i;
        while (j < e.samples.size() && e.samples[j] == x)
            ++j;
        gap = std::max({gap, std::abs(static_cast<double>(j) / n - d.cdf(x)),
                        std::abs(static_cast<double>(i) / n - d.cdf_left(x))});
        i = j;
    }
    return gap;
}
}  // namespace

TEST(Philox, KnownAnswers)
{
    using P = Philox4x32;
    EXPECT_EQ(P::generate({0, 0, 0, 0}, {0, 0}), (P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(P::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
              (P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(P::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
              (P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Philox, UnitIntervalIsHalfOpen)
{
    EXPECT_EQ(Philox4x32::to_unit(0, 0), 0.0);
    EXPECT_LT(Philox4x32::to_unit(0xffffffff, 0xffffffff), 1.0);
}

TEST(DkwBand, Examples)
{
    double expected = std::sqrt(std::log(2 / (1 - confidence)) / 2e6);
    EXPECT_NEAR(dkw_band(1000000, confidence), expected, 1e-15);
    EXPECT_NEAR(dkw_band(1000000, confidence), 0.002697, 5e-6);
    EXPECT_DOUBLE_EQ(dkw_band(1, confidence), 1.0);
    EXPECT_NEAR(dkw_band(100, 0.95), 0.1358, 5e-5);
}

TEST(SampleConditional, TransformThresholdAtTwoGivesPrior)
{
    // P(S >= 2 | x) = f(2 | x) = 1/3 on [0, 1]
    auto prior = uniform(0, 1);
    auto ts = threshold_transform(triangle_rectangle_kernel());
    auto e = sample_conditional(prior, ts, 2, 1000000, 17);
    ASSERT_EQ(e.n(), 1000000u);
    EXPECT_TRUE(std::is_sorted(e.samples.begin(), e.samples.end()));
    EXPECT_LE(sup_gap(e, prior), dkw_band(e.n(), confidence));
    EXPECT_NEAR(static_cast<double>(e.accepted) / static_cast<double>(e.proposed), 1.0 / 3.0, 5e-3);
}

TEST(SampleConditional, KernelThreshold)
{
    // P(Z >= 2 | x) = x / 3
    auto prior = uniform(0, 1);
    auto k = triangle_rectangle_kernel();
    auto e = sample_conditional(prior, k, McCondition::threshold(2), 500000, 19);
    auto ramp = make_distribution({Piece{0, 1, {PolyTerm{0, Polynomial{0, 2}}}}}, {});
    EXPECT_LE(sup_gap(e, ramp), dkw_band(e.n(), confidence));
    EXPECT_NEAR(static_cast<double>(e.accepted) / static_cast<double>(e.proposed), 1.0 / 6.0, 5e-3);
}

TEST(SampleConditional, BandAroundOne)
{
    auto prior = uniform(0, 1);
    auto k = triangle_rectangle_kernel();
    auto e = sample_conditional(prior, k, McCondition::band(1, 1e-3), 1000000, 5);
    auto post = posterior_point(prior, k, 1).dist;
    auto c = compare_to_cdf(e, post, confidence);
    EXPECT_TRUE(c.pass) << "sup " << c.sup_gap << " band " << c.band;
    EXPECT_NEAR(c.sup_gap, sup_gap(e, post), 1e-12);
}

TEST(SampleConditional, ThresholdSignal)
{
    auto prior = uniform(0, 1);
    auto ts = threshold_transform(triangle_rectangle_kernel());
    auto e = sample_conditional(prior, ts, 1, 500000, 9);
    auto post = posterior_threshold(prior, ts, 1).dist;
    EXPECT_LE(sup_gap(e, post), dkw_band(e.n(), confidence));
}

TEST(SampleConditional, AtomsAreSampledExactly)
{
    Piece piece{0, 1, {PolyTerm{0, Polynomial{0.6}}}};
    auto prior = make_distribution({piece}, {{0.5, 0.4}});
    auto e = sample_conditional(prior, triangle_rectangle_kernel(), McCondition::threshold(1.2), 400000, 3);
    auto post = posterior_threshold_kernel(prior, triangle_rectangle_kernel(), 1.2).dist;
    double at = e.cdf(0.5) - e.cdf_left(0.5);
    EXPECT_NEAR(at, post.atom_at(0.5), dkw_band(e.n(), confidence));
    EXPECT_LE(sup_gap(e, post), dkw_band(e.n(), confidence));
}

TEST(SampleConditional, EvasionAtomWindow)
{
    auto prior = truncate(exponential(1, 0, TailSide::lower), -30, 0);
    auto k = evasion_kernel(EvasionProbability::constant(0.3), exponential(1));
    auto cond = McCondition::band(0, 1e-3, BandSide::left);
    auto e = sample_conditional(prior, k, cond, 1000000, 23);
    auto post = posterior_point(prior, k, 0).dist;
    auto windows = kernel_atom_windows(post, prior, cond);
    ASSERT_EQ(windows.size(), 1u);
    EXPECT_LE(windows[0].lo, 0.0);
    EXPECT_GE(windows[0].hi, 0.0);
    auto c = compare_to_cdf(e, post, confidence, windows);
    EXPECT_TRUE(c.pass) << "sup " << c.sup_gap << " window " << c.window_gap;
}

TEST(SampleConditional, AcceptanceStarved)
{
    try
    {
        sample_conditional(uniform(0, 1), triangle_rectangle_kernel(), McCondition::threshold(5), 1000, 1);
        FAIL() << "expected AcceptanceStarved";
    }
    catch (Error const& e)
    {
        EXPECT_EQ(e.code(), ErrorCode::acceptance_starved);
    }
}

TEST(SampleConditional, ReproducibleAcrossWorkerCounts)
{
    auto prior = uniform(0, 1);
    auto k = triangle_rectangle_kernel();
    McOptions one;
    one.workers = 1;
    one.block = 4096;
    McOptions three = one;
    three.workers = 3;
    auto a = sample_conditional(prior, k, McCondition::band(1.3, 1e-2), 50000, 99, one);
    auto b = sample_conditional(prior, k, McCondition::band(1.3, 1e-2), 50000, 99, three);
    auto c = sample_conditional(prior, k, McCondition::band(1.3, 1e-2), 50000, 99, one);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    EXPECT_EQ(std::memcmp(a.samples.data(), b.samples.data(), a.samples.size() * sizeof(double)), 0);
    EXPECT_EQ(std::memcmp(a.samples.data(), c.samples.data(), a.samples.size() * sizeof(double)), 0);
    EXPECT_EQ(a.proposed, b.proposed);
    auto d = sample_conditional(prior, k, McCondition::band(1.3, 1e-2), 50000, 100, one);
    EXPECT_NE(std::memcmp(a.samples.data(), d.samples.data(), a.samples.size() * sizeof(double)), 0);
}

TEST(SampleConditional, OneSidedBandBiasIsFirstOrder)
{
    // Right-sided bands shift the effective z by about bw, so the
    // discrepancy against the z = 1 posterior should halve with bw
    auto prior = uniform(0, 1);
    auto k = triangle_rectangle_kernel();
    auto post = posterior_point(prior, k, 1).dist;
    std::vector<double> gaps;
    for (double bw : {0.1, 0.05, 0.025})
    {
        auto e = sample_conditional(prior, k, McCondition::band(1, bw, BandSide::right), 1000000, 31);
        gaps.push_back(sup_gap(e, post));
    }
    for (std::size_t i = 1; i < gaps.size(); ++i)
    {
        double ratio = gaps[i] / gaps[i - 1];
        EXPECT_GT(ratio, 0.35) << "gaps " << gaps[i - 1] << " -> " << gaps[i];
        EXPECT_LT(ratio, 0.65) << "gaps " << gaps[i - 1] << " -> " << gaps[i];
    }
}

TEST(WriteSamples, LittleEndianDoubles)
{
    EmpiricalCdf e;
    e.samples = {-1.5, 0.25, 3.0};
    auto path = std::filesystem::temp_directory_path() / "screenrev_samples_test.bin";
    write_samples(path.string(), e);
    std::ifstream is(path, std::ios::binary);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    ASSERT_EQ(bytes.size(), 3 * sizeof(double));
    for (std::size_t i = 0; i < 3; ++i)
    {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b)
            bits = bits << 8 | bytes[i * 8 + b];
        double v;
        std::memcpy(&v, &bits, sizeof v);
        EXPECT_EQ(v, e.samples[i]);
    }
    std::filesystem::remove(path);
}
