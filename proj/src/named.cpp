#include "screenrev/named.hpp"

#include <cmath>
#include <numbers>

#include "screenrev/approximation.hpp"
#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
void require(bool ok, char const* what)
{
    if (!ok)
        fail(ErrorCode::bad_params, what);
}

bool finite_all(std::initializer_list<double> v)
{
    for (double x : v)
        if (!std::isfinite(x))
            return false;
    return true;
}
}  // namespace

Distribution uniform(double lo, double hi)
{
    require(finite_all({lo, hi}) && lo < hi, "uniform needs finite lo < hi");
    return make_distribution({Piece{lo, hi, {PolyTerm{lo, Polynomial{1 / (hi - lo)}}}}}, {},
                             BuildOptions{.normalize = true});
}

Distribution exponential(double rate, double anchor, TailSide side)
{
    require(finite_all({rate, anchor}) && rate > 0, "exponential needs a positive finite rate");
    TailDescriptor td{TailKind::exponential, side, rate, anchor, 1.0, 0.0};
    return make_distribution({}, {}, {td});
}

Distribution pareto(double alpha, double scale)
{
    require(finite_all({alpha, scale}) && alpha > 0 && scale > 0,
            "pareto needs positive shape and scale");
    TailDescriptor td{TailKind::pareto, TailSide::upper, alpha, scale, 1.0, 0.0};
    return make_distribution({}, {}, {td});
}

Distribution normal(double mu, double sigma)
{
    require(finite_all({mu, sigma}) && sigma > 0, "normal needs finite mu and positive sigma");
    double const c = 1 / (sigma * std::sqrt(2 * std::numbers::pi));
    auto phi = [=](double x) {
        double u = (x - mu) / sigma;
        return c * std::exp(-0.5 * u * u);
    };
    auto fit = approximate_cubic(phi, mu - 8 * sigma, mu + 8 * sigma, normal_fit_tolerance * c / 0.4);
    // Mass beyond 8 sigma on both sides
    double outside = std::erfc(8 / std::numbers::sqrt2);
    BuildOptions opts;
    opts.normalize = true;
    opts.tol_mass = 1e-9;
    opts.approximation_error = fit.l1_error;
    opts.discarded_mass = outside;
    return make_distribution(std::move(fit.pieces), {}, opts);
}

Distribution footnote_mixture(double iota)
{
    require(std::isfinite(iota) && iota >= 0 && iota < 1, "footnote mixture needs iota in [0, 1)");
    std::pair<double, Distribution> parts[] = {{1 - iota, uniform(0, 1)}, {iota, normal(0, 1)}};
    return mixture(parts);
}

Distribution make_named_prior(std::string_view name, std::span<double const> params)
{
    auto n = params.size();
    auto arg = [&](std::size_t i, double fallback) { return i < n ? params[i] : fallback; };
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (n < lo || n > hi)
            fail(ErrorCode::bad_params, "wrong number of parameters for prior '" + std::string(name) + "'");
    };
    if (name == "uniform")
    {
        need(0, 2);
        return uniform(arg(0, 0), arg(1, 1));
    }
    if (name == "exponential")
    {
        need(1, 3);
        double side = arg(2, 1);
        require(side == 1 || side == -1, "exponential side must be +1 or -1");
        return exponential(params[0], arg(1, 0), side > 0 ? TailSide::upper : TailSide::lower);
    }
    if (name == "pareto")
    {
        need(1, 2);
        return pareto(params[0], arg(1, 1));
    }
    if (name == "normal")
    {
        need(0, 2);
        return normal(arg(0, 0), arg(1, 1));
    }
    if (name == "footnote_mixture")
    {
        need(1, 1);
        return footnote_mixture(params[0]);
    }
    fail(ErrorCode::bad_params, "unknown prior family '" + std::string(name) + "'");
}

std::vector<std::string> named_prior_names()
{
    return {"uniform", "exponential", "pareto", "normal", "footnote_mixture"};
}

}  // namespace screenrev
