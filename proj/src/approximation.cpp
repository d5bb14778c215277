#include "screenrev/approximation.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
constexpr std::array<double, 4> nodes{0.0, 0.25, 0.75, 1.0};
constexpr std::array<double, 5> checks{0.125, 0.375, 0.5, 0.625, 0.875};

//! Newton interpolant through (t_i, y_i) expanded into monomials of t
Polynomial interpolate(std::array<double, 4> const& t, std::array<double, 4> y)
{
    // Divided differences in place
    for (std::size_t j = 1; j < 4; ++j)
        for (std::size_t i = 3; i >= j; --i)
            y[i] = (y[i] - y[i - 1]) / (t[i] - t[i - j]);
    Polynomial result{y[3]};
    for (std::size_t i = 3; i-- > 0;)
        result = result * Polynomial{-t[i], 1.0} + Polynomial{y[i]};
    return result;
}

struct Builder
{
    std::function<double(double)> const& f;
    double tol;
    int max_depth;
    CubicApproximation out;

    void fit(double a, double b, int depth)
    {
        double len = b - a;
        std::array<double, 4> t{}, y{};
        for (std::size_t i = 0; i < 4; ++i)
        {
            t[i] = nodes[i] * len;
            y[i] = f(a + t[i]);
            if (!(y[i] >= 0) || !std::isfinite(y[i]))
                fail(ErrorCode::invalid_argument, "approximated function must be finite and nonnegative");
        }
        Polynomial cubic = interpolate(t, y);
        Polynomial linear{y[0], (y[3] - y[0]) / len};

        double err_cubic = 0, err_linear = 0, min_cubic = std::min(y[0], y[3]);
        for (double c : checks)
        {
            double s = c * len;
            double v = f(a + s);
            err_cubic = std::max(err_cubic, std::abs(cubic(s) - v));
            err_linear = std::max(err_linear, std::abs(linear(s) - v));
            min_cubic = std::min(min_cubic, cubic(s));
        }
        for (double s : cubic.critical_points(0, len))
            min_cubic = std::min(min_cubic, cubic(s));

        bool last = depth >= max_depth;
        if (min_cubic >= 0 && (err_cubic <= tol || last))
        {
            emit(a, b, cubic, err_cubic);
            return;
        }
        if (err_linear <= tol || (last && min_cubic < 0))
        {
            emit(a, b, linear, err_linear);
            return;
        }
        double m = a + 0.5 * len;
        fit(a, m, depth + 1);
        fit(m, b, depth + 1);
    }

    void emit(double a, double b, Polynomial const& p, double err)
    {
        out.l1_error += err * (b - a);
        if (p.is_zero())
            return;
        out.pieces.push_back(Piece{a, b, {PolyTerm{a, p}}});
    }
};
}  // namespace

CubicApproximation approximate_cubic(std::function<double(double)> const& f,
                                     double lo,
                                     double hi,
                                     double abs_tol,
                                     int max_depth)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
        fail(ErrorCode::invalid_argument, "approximation range must be finite and nonempty");
    if (!(abs_tol > 0))
        fail(ErrorCode::invalid_argument, "approximation tolerance must be positive");
    Builder b{f, abs_tol, max_depth, {}};
    b.fit(lo, hi, 0);
    return std::move(b.out);
}

}  // namespace screenrev
