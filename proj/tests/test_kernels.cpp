#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracle.hpp"
#include "screenrev/error.hpp"
#include "screenrev/kernels.hpp"
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

//! Integral of the continuous part over the window plus kernel atoms, by quadrature
double quadrature_mass(SignalKernel const& k, double x)
{
    auto [lo, hi] = k.noise_range();
    std::vector<double> breaks;
    for (double b : k.noise().breakpoints())
        breaks.push_back(x + b);
    double m = oracle::integrate([&](double z) { return k.density(z, x); }, x + lo, x + hi, breaks);
    m += k.atom_mass(x, x);
    for (auto const& a : k.noise().atoms())
        if (a.location != 0)
            m += k.atom_mass(x + a.location, x);
    return m;
}
}  // namespace

TEST(TriangleRectangle, Examples)
{
    auto k = triangle_rectangle_kernel();
    EXPECT_NEAR(k.density(1, 0.5), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(k.density(2, 0.5), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(quadrature_mass(k, 0), 1.0, 1e-13);
    auto [lo, hi] = k.noise_range();
    EXPECT_DOUBLE_EQ(lo, 0.0);
    EXPECT_DOUBLE_EQ(hi, 2.0);
    for (double z : {-0.2, 0.0, 0.4, 1.0, 1.7, 2.0, 2.5})
        EXPECT_NEAR(k.density(z, 0), oracle::triangle_rectangle(z, 0), 1e-15) << "z=" << z;
}

TEST(ThreePiece, Examples)
{
    EXPECT_NEAR(three_piece_height(0.1, 1), 1.11 / 3.1, 1e-15);
    auto k = three_piece_kernel(0.1, 1);
    for (double x : {0.0, 0.3, 1.0})
        EXPECT_NEAR(quadrature_mass(k, x), 1.0, 1e-12);
    EXPECT_EQ(code_of([] { three_piece_kernel(0.5, 1.5); }), ErrorCode::bad_params);
    EXPECT_EQ(code_of([] { three_piece_kernel(0.1, 0.9); }), ErrorCode::bad_params);
    EXPECT_EQ(code_of([] { three_piece_kernel(1.0, 1.0); }), ErrorCode::bad_params);
}

TEST(ThreePiece, MatchesDirectFormulaAndIsContinuous)
{
    for (double iota : {0.1, 0.05, 0.01})
    {
        auto k = three_piece_kernel(iota, 1);
        for (int i = 0; i <= 2000; ++i)
        {
            double z = -0.1 + 2.3 * i / 2000;
            EXPECT_NEAR(k.density(z, 0), oracle::three_piece(z, 0, iota, 1), 1e-13) << "z=" << z;
        }
        // No jumps at the breakpoints
        for (double b : {1.0, 2.0})
            EXPECT_NEAR(k.density(b, 0), k.density_left(b, 0), 1e-13);
    }
}

TEST(Additive, Examples)
{
    EXPECT_DOUBLE_EQ(additive_kernel(uniform(0, 1)).density(0.7, 0.5), 1.0);
    EXPECT_NEAR(additive_kernel(exponential(1)).density(2, 0.5), std::exp(-1.5), 1e-15);
    EXPECT_NEAR(additive_kernel(pareto(2, 1)).density(3, 1), 0.25, 1e-15);
}

TEST(Evasion, Examples)
{
    auto k = evasion_kernel(EvasionProbability::constant(0.3), exponential(1));
    EXPECT_NEAR(k.density(1, 0), 0.7 * std::exp(-1.0), 1e-15);
    EXPECT_DOUBLE_EQ(k.atom_mass(0, 0), 0.3);
    EXPECT_DOUBLE_EQ(k.atom_mass(0.5, 0), 0.0);
    for (double x : {-5.0, 0.0, 2.0})
        EXPECT_NEAR(k.total_mass(x), 1.0, 1e-14);
    EXPECT_NEAR(quadrature_mass(k, -1), 1.0, 1e-12);
    EXPECT_EQ(code_of([] { evasion_kernel(EvasionProbability::constant(1.0), exponential(1)); }),
              ErrorCode::bad_params);
    EXPECT_EQ(code_of([] { evasion_kernel(EvasionProbability::constant(0.0), exponential(1)); }),
              ErrorCode::bad_params);
}

TEST(Evasion, LogisticAndCallableProbabilities)
{
    auto logistic = EvasionProbability::logistic(2, 0.5);
    EXPECT_NEAR(logistic(0.5), 0.5, 1e-15);
    EXPECT_NEAR(logistic(1.5), 1 / (1 + std::exp(-2.0)), 1e-15);
    auto k = evasion_kernel(EvasionProbability::callable([](double x) { return 0.2 + 0.1 * std::tanh(x); }),
                            exponential(2));
    EXPECT_NEAR(k.atom_mass(1, 1), 0.2 + 0.1 * std::tanh(1.0), 1e-15);
    EXPECT_NEAR(k.total_mass(1), 1.0, 1e-14);
    // p escaping (0, 1) on the probe grid
    EXPECT_EQ(code_of([] {
                  evasion_kernel(EvasionProbability::callable([](double x) { return 0.5 + x; }), exponential(1));
              }),
              ErrorCode::bad_params);
}

TEST(ThresholdTransform, TriangleRectangle)
{
    auto ts = threshold_transform(triangle_rectangle_kernel());
    double x = 0.25;
    EXPECT_DOUBLE_EQ(ts.cdf(x, x), 0.0);
    EXPECT_NEAR(ts.cdf(x + 0.5, x), 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(ts.cdf(x + 1.5, x), 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(ts.cdf(x + 2, x), 1.0, 1e-15);
    EXPECT_NEAR(ts.terminal_atom(), 1.0 / 3.0, 1e-15);
}

TEST(ThresholdTransform, Rejections)
{
    auto tri = make_distribution({Piece{-1, 0, {PolyTerm{-1, Polynomial{0, 1}}}},
                                  Piece{0, 1, {PolyTerm{0, Polynomial{1, -1}}}}},
                                 {});
    EXPECT_EQ(code_of([&] { threshold_transform(additive_kernel(tri)); }), ErrorCode::not_a_cdf);
    EXPECT_EQ(code_of([] { threshold_transform(additive_kernel(normal(0, 1))); }), ErrorCode::not_a_cdf);
    EXPECT_NO_THROW(threshold_transform(three_piece_kernel(0.1, 1)));
}

//---------------------------------------------------------------------------//
// Properties
//---------------------------------------------------------------------------//
TEST(KernelProperty, NormalizationAtRandomX)
{
    std::vector<SignalKernel> ks{triangle_rectangle_kernel(), three_piece_kernel(0.1, 1),
                                 three_piece_kernel(0.01, 1.5), additive_kernel(pareto(2, 1)),
                                 additive_kernel(exponential(1)),
                                 evasion_kernel(EvasionProbability::constant(0.3), exponential(1)),
                                 evasion_kernel(EvasionProbability::logistic(-1, 0), exponential(2))};
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(-1, 1);
    for (auto const& k : ks)
    {
        for (int i = 0; i < 100; ++i)
        {
            double x = ux(rng);
            ASSERT_NEAR(k.total_mass(x), 1.0, 1e-9) << k.describe() << " x=" << x;
        }
        for (int i = 0; i < 5; ++i)
        {
            double x = ux(rng);
            EXPECT_NEAR(quadrature_mass(k, x), 1.0, 1e-9) << k.describe() << " x=" << x;
        }
    }
}

TEST(KernelProperty, AdditiveTranslationEquivariance)
{
    auto k = additive_kernel(pareto(3, 0.5));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 200; ++i)
    {
        double z = u(rng), x = u(rng), c = 0.25 * std::floor(4 * u(rng));
        EXPECT_NEAR(k.density(z, x), k.density(z + c, x + c), 1e-12 * (1 + k.density(z, x)));
    }
}

TEST(KernelProperty, TransformRoundTrip)
{
    for (auto const& k : {triangle_rectangle_kernel(), three_piece_kernel(0.1, 1), three_piece_kernel(0.05, 1.2)})
    {
        auto ts = threshold_transform(k);
        auto [lo, hi] = k.noise_range();
        for (double x : {0.0, 0.4, 1.0})
        {
            for (int i = 1; i < 400; ++i)
            {
                double z = x + lo + (hi - lo) * i / 400;
                EXPECT_NEAR(ts.survival(z, x), k.density(z, x), 1e-14) << k.describe() << " z=" << z;
            }
        }
    }
}

TEST(KernelProperty, UnitRescaling)
{
    auto [offset, scale] = unit_rescaling(2, 6);
    EXPECT_DOUBLE_EQ(offset + scale * 2, 0.0);
    EXPECT_DOUBLE_EQ(offset + scale * 6, 1.0);
    auto k = affine_kernel(triangle_rectangle_kernel(), 2, 4);
    // Z' = 2 + 4 Z and X' = 2 + 4 X: f'(z'|x') = f(z|x) / 4
    EXPECT_NEAR(k.density(2 + 4 * 1.0, 2 + 4 * 0.5), oracle::triangle_rectangle(1.0, 0.5) / 4, 1e-15);
    EXPECT_NEAR(k.total_mass(3), 1.0, 1e-14);
}
