#include "screenrev/terms.hpp"

#include <cmath>
#include <limits>

#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
template<class... Ts>
struct Overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double inf = std::numeric_limits<double>::infinity();

//! Integral of u^(-k) on [lo, hi] with 0 < lo <= hi <= inf
double power_integral(double k, double lo, double hi)
{
    if (k == 1)
        return std::log(hi) - std::log(lo);
    double e = 1 - k;
    double top = std::isinf(hi) ? 0.0 : std::pow(hi, e);
    return (top - std::pow(lo, e)) / e;
}

//! \int_0^L s e^{rs} ds
double exp_first_moment(double r, double length)
{
    double rl = r * length;
    if (std::abs(rl) < 1e-2)
    {
        // sum_n r^n L^(n+2) / (n! (n+2))
        double sum = 0;
        double fact = 1;
        double pw = length * length;
        for (int n = 0; n < 10; ++n)
        {
            if (n > 0)
                fact *= n;
            sum += pw / (fact * (n + 2));
            pw *= rl;
        }
        return sum;
    }
    double e1 = std::expm1(rl) / r;
    return (length * std::exp(rl) - e1) / r;
}

struct PowerRange
{
    double lo;
    double hi;
    bool right;  // x > center
};

PowerRange power_range(PowerTerm const& t, double a, double b)
{
    if (a >= t.center)
        return {a - t.center, b - t.center, true};
    if (b <= t.center)
        return {t.center - b, t.center - a, false};
    fail(ErrorCode::invalid_argument, "power term center inside integration range");
}
}  // namespace

double evaluate(Term const& term, double x)
{
    return std::visit(
        Overloaded{
            [x](PolyTerm const& t) { return t.poly(x - t.origin); },
            [x](ExpTerm const& t) {
                return t.amplitude * std::exp(t.rate * (x - t.anchor));
            },
            [x](PowerTerm const& t) {
                return t.amplitude * std::pow(std::abs(x - t.center), -t.exponent);
            },
        },
        term);
}

double derivative(Term const& term, double x)
{
    return std::visit(
        Overloaded{
            [x](PolyTerm const& t) { return t.poly.derivative()(x - t.origin); },
            [x](ExpTerm const& t) {
                return t.rate * t.amplitude * std::exp(t.rate * (x - t.anchor));
            },
            [x](PowerTerm const& t) {
                double v = t.amplitude * std::pow(std::abs(x - t.center), -t.exponent);
                return -t.exponent * v / (x - t.center);
            },
        },
        term);
}

bool integrable(Term const& term, double a, double b)
{
    return std::visit(
        Overloaded{
            [a, b](PolyTerm const& t) {
                return t.poly.is_zero() || (std::isfinite(a) && std::isfinite(b));
            },
            [a, b](ExpTerm const& t) {
                if (std::isinf(a) && std::isinf(b))
                    return t.amplitude == 0;
                if (std::isinf(a))
                    return t.rate > 0 || t.amplitude == 0;
                if (std::isinf(b))
                    return t.rate < 0 || t.amplitude == 0;
                return true;
            },
            [a, b](PowerTerm const& t) {
                if (t.amplitude == 0)
                    return true;
                if (a < t.center && b > t.center)
                    return false;
                if (a == t.center || b == t.center)
                    return t.exponent < 1;
                if (std::isinf(a) || std::isinf(b))
                    return t.exponent > 1;
                return true;
            },
        },
        term);
}

bool moment_finite(Term const& term, double a, double b)
{
    if (!integrable(term, a, b))
        return false;
    if (auto const* p = std::get_if<PowerTerm>(&term))
    {
        if (p->amplitude != 0 && (std::isinf(a) || std::isinf(b)))
            return p->exponent > 2;
    }
    return true;
}

double integrate(Term const& term, double a, double b)
{
    if (!(a < b))
        return 0.0;
    return std::visit(
        Overloaded{
            [a, b](PolyTerm const& t) {
                if (t.poly.is_zero())
                    return 0.0;
                return t.poly.integrate(a - t.origin, b - t.origin);
            },
            [a, b](ExpTerm const& t) {
                if (t.amplitude == 0)
                    return 0.0;
                if (t.rate == 0)
                    return t.amplitude * (b - a);
                if (std::isinf(a))
                    return t.amplitude / t.rate * std::exp(t.rate * (b - t.anchor));
                double base = t.amplitude * std::exp(t.rate * (a - t.anchor));
                if (std::isinf(b))
                    return -base / t.rate;
                return base * std::expm1(t.rate * (b - a)) / t.rate;
            },
            [a, b](PowerTerm const& t) {
                if (t.amplitude == 0)
                    return 0.0;
                auto r = power_range(t, a, b);
                return t.amplitude * power_integral(t.exponent, r.lo, r.hi);
            },
        },
        term);
}

double integrate_moment(Term const& term, double a, double b)
{
    if (!(a < b))
        return 0.0;
    return std::visit(
        Overloaded{
            [a, b](PolyTerm const& t) {
                if (t.poly.is_zero())
                    return 0.0;
                double lo = a - t.origin, hi = b - t.origin;
                Polynomial tq = t.poly * Polynomial{0.0, 1.0};
                return t.origin * t.poly.integrate(lo, hi) + tq.integrate(lo, hi);
            },
            [a, b](ExpTerm const& t) {
                if (t.amplitude == 0)
                    return 0.0;
                double r = t.rate;
                if (r == 0)
                    return t.amplitude * 0.5 * (b * b - a * a);
                if (std::isinf(a))
                {
                    double base = t.amplitude * std::exp(r * (b - t.anchor));
                    return base * (b / r - 1 / (r * r));
                }
                double base = t.amplitude * std::exp(r * (a - t.anchor));
                if (std::isinf(b))
                    return base * (a / -r + 1 / (r * r));
                double length = b - a;
                double e1 = std::expm1(r * length) / r;
                return base * (a * e1 + exp_first_moment(r, length));
            },
            [a, b](PowerTerm const& t) {
                if (t.amplitude == 0)
                    return 0.0;
                auto rg = power_range(t, a, b);
                double zeroth = power_integral(t.exponent, rg.lo, rg.hi);
                double first = power_integral(t.exponent - 1, rg.lo, rg.hi);
                return t.amplitude * (t.center * zeroth + (rg.right ? first : -first));
            },
        },
        term);
}

bool is_zero(Term const& term)
{
    return std::visit(Overloaded{
                          [](PolyTerm const& t) { return t.poly.is_zero(); },
                          [](ExpTerm const& t) { return t.amplitude == 0; },
                          [](PowerTerm const& t) { return t.amplitude == 0; },
                      },
                      term);
}

Term scaled(Term const& term, double s)
{
    return std::visit(Overloaded{
                          [s](PolyTerm t) -> Term {
                              t.poly = t.poly * s;
                              return t;
                          },
                          [s](ExpTerm t) -> Term {
                              t.amplitude *= s;
                              return t;
                          },
                          [s](PowerTerm t) -> Term {
                              t.amplitude *= s;
                              return t;
                          },
                      },
                      term);
}

Term rebased(Term const& term, double origin)
{
    if (auto const* p = std::get_if<PolyTerm>(&term))
    {
        if (p->origin == origin || p->poly.is_constant())
            return PolyTerm{origin, p->poly};
        return PolyTerm{origin, p->poly.shifted(origin - p->origin)};
    }
    return term;
}

Term reflected(Term const& term, double z, double new_origin)
{
    return std::visit(
        Overloaded{
            [z, new_origin](PolyTerm const& t) -> Term {
                // old t = z - x - origin = (z - origin - new_origin) - t'
                return PolyTerm{new_origin, t.poly.reflected(z - t.origin - new_origin)};
            },
            [z](ExpTerm const& t) -> Term {
                return ExpTerm{t.amplitude, -t.rate, z - t.anchor};
            },
            [z](PowerTerm const& t) -> Term {
                return PowerTerm{t.amplitude, z - t.center, t.exponent};
            },
        },
        term);
}

Term affine(Term const& term, double offset, double scale, double new_origin)
{
    double jac = 1 / std::abs(scale);
    return std::visit(
        Overloaded{
            [=](PolyTerm const& t) -> Term {
                double delta = new_origin - offset - scale * t.origin;
                Polynomial q = t.poly.shifted(delta / scale).scaled_argument(1 / scale);
                return PolyTerm{new_origin, q * jac};
            },
            [=](ExpTerm const& t) -> Term {
                return ExpTerm{t.amplitude * jac, t.rate / scale, offset + scale * t.anchor};
            },
            [=](PowerTerm const& t) -> Term {
                double amp = t.amplitude * std::pow(std::abs(scale), t.exponent) * jac;
                return PowerTerm{amp, offset + scale * t.center, t.exponent};
            },
        },
        term);
}

std::optional<Term> multiply(Term const& a, Term const& b, double reference)
{
    if (is_zero(a) || is_zero(b))
        return PolyTerm{reference, {}};
    auto const* pa = std::get_if<PolyTerm>(&a);
    auto const* pb = std::get_if<PolyTerm>(&b);
    if (pa && pa->poly.is_constant())
        return scaled(rebased(b, reference), pa->poly.constant());
    if (pb && pb->poly.is_constant())
        return scaled(rebased(a, reference), pb->poly.constant());
    if (pa && pb)
    {
        if (pa->poly.degree() + pb->poly.degree() > Polynomial::max_degree)
            return std::nullopt;
        auto ra = std::get<PolyTerm>(rebased(a, reference));
        auto rb = std::get<PolyTerm>(rebased(b, reference));
        return PolyTerm{reference, ra.poly * rb.poly};
    }
    auto const* ea = std::get_if<ExpTerm>(&a);
    auto const* eb = std::get_if<ExpTerm>(&b);
    if (ea && eb)
    {
        double amp = ea->amplitude * eb->amplitude
                     * std::exp(ea->rate * (reference - ea->anchor)
                                + eb->rate * (reference - eb->anchor));
        double rate = ea->rate + eb->rate;
        if (rate == 0)
            return PolyTerm{reference, Polynomial{amp}};
        return ExpTerm{amp, rate, reference};
    }
    auto const* wa = std::get_if<PowerTerm>(&a);
    auto const* wb = std::get_if<PowerTerm>(&b);
    if (wa && wb && wa->center == wb->center)
        return PowerTerm{wa->amplitude * wb->amplitude, wa->center, wa->exponent + wb->exponent};
    return std::nullopt;
}

}  // namespace screenrev
