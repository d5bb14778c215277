#include "screenrev/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "screenrev/dist_text.hpp"
#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

//! Density of g with pieces taken as [lo, hi)
double value_right(Distribution const& g, double u)
{
    auto pieces = g.pieces();
    auto it = std::upper_bound(pieces.begin(), pieces.end(), u,
                               [](double v, Piece const& p) { return v < p.lo; });
    if (it == pieces.begin())
        return 0.0;
    Piece const& p = *std::prev(it);
    return u < p.hi ? p.density(u) : 0.0;
}

//! Density of g with pieces taken as (lo, hi]
double value_left(Distribution const& g, double u)
{
    auto pieces = g.pieces();
    auto it = std::lower_bound(pieces.begin(), pieces.end(), u,
                               [](Piece const& p, double v) { return p.lo < v; });
    if (it == pieces.begin())
        return 0.0;
    Piece const& p = *std::prev(it);
    return u <= p.hi ? p.density(u) : 0.0;
}

double finite_end(double lo, double hi)
{
    return std::isfinite(lo) ? lo : hi;
}

struct Integrated
{
    double constant = 0;
    Term term;
};

/*!
 * \int_{b - x}^{t} term(u) du as a function of x, expressed about x origin xo.
 */
Integrated integral_to(Term const& term, double b, double t, double xo)
{
    if (auto const* p = std::get_if<PolyTerm>(&term))
    {
        Polynomial q = p->poly.antiderivative();
        double top = std::isfinite(t) ? q(t - p->origin) : 0.0;
        // v - origin = (b - origin - xo) - (x - xo)
        Polynomial r = q.reflected(b - p->origin - xo) * -1.0;
        return {top, PolyTerm{xo, r}};
    }
    if (auto const* e = std::get_if<ExpTerm>(&term))
    {
        double a = e->amplitude, r = e->rate;
        if (r == 0)
            return {a * (t - b), PolyTerm{xo, Polynomial{a * xo, a}}};
        double top = std::isfinite(t) ? a / r * std::exp(r * (t - e->anchor)) : 0.0;
        return {top, ExpTerm{-a / r, -r, b - e->anchor}};
    }
    auto const& w = std::get<PowerTerm>(term);
    double k = w.exponent;
    if (k == 1)
        fail(ErrorCode::unsupported, "survival of a 1/|u| density term has no power form");
    double a = w.amplitude / (1 - k);
    double center = b - w.center;
    if (t > w.center)
    {
        double top = std::isfinite(t) ? a * std::pow(t - w.center, 1 - k) : 0.0;
        return {top, PowerTerm{-a, center, k - 1}};
    }
    return {-a * std::pow(w.center - t, 1 - k), PowerTerm{a, center, k - 1}};
}

std::vector<Atom> merge_deltas(std::vector<Atom> deltas)
{
    std::sort(deltas.begin(), deltas.end(),
              [](Atom const& a, Atom const& b) { return a.location < b.location; });
    std::vector<Atom> out;
    for (auto const& d : deltas)
    {
        if (d.mass == 0)
            continue;
        if (!out.empty() && out.back().location == d.location)
            out.back().mass += d.mass;
        else
            out.push_back(d);
    }
    return out;
}
}  // namespace

//---------------------------------------------------------------------------//
// EvasionProbability
//---------------------------------------------------------------------------//
EvasionProbability EvasionProbability::constant(double c)
{
    EvasionProbability p;
    p.kind_ = Kind::constant;
    p.c_ = c;
    return p;
}

EvasionProbability EvasionProbability::logistic(double k, double x0)
{
    if (!std::isfinite(k) || !std::isfinite(x0))
        fail(ErrorCode::bad_params, "logistic parameters must be finite");
    EvasionProbability p;
    p.kind_ = Kind::logistic;
    p.k_ = k;
    p.x0_ = x0;
    return p;
}

EvasionProbability EvasionProbability::callable(std::function<double(double)> fn, std::string label)
{
    if (!fn)
        fail(ErrorCode::bad_params, "evasion probability callable is empty");
    EvasionProbability p;
    p.kind_ = Kind::callable;
    p.fn_ = std::move(fn);
    p.label_ = std::move(label);
    return p;
}

double EvasionProbability::operator()(double x) const
{
    switch (kind_)
    {
        case Kind::constant:
            return c_;
        case Kind::logistic:
            return 1 / (1 + std::exp(-k_ * (x - x0_)));
        case Kind::callable:
            return fn_(x);
    }
    return 0;
}

double EvasionProbability::log_slope(double x) const
{
    switch (kind_)
    {
        case Kind::constant:
            return 0;
        case Kind::logistic:
            return k_ * (1 - (*this)(x));
        case Kind::callable: {
            double h = 1e-6 * std::max(1.0, std::abs(x));
            return (std::log(fn_(x + h)) - std::log(fn_(x - h))) / (2 * h);
        }
    }
    return 0;
}

std::string EvasionProbability::describe() const
{
    std::ostringstream os;
    switch (kind_)
    {
        case Kind::constant:
            os << "constant " << format_number(c_);
            break;
        case Kind::logistic:
            os << "logistic " << format_number(k_) << ' ' << format_number(x0_);
            break;
        case Kind::callable:
            os << label_;
            break;
    }
    return os.str();
}

//---------------------------------------------------------------------------//
// Weights
//---------------------------------------------------------------------------//
double WeightSegment::operator()(double x) const
{
    if (fn)
        return fn(x);
    double r = 0;
    for (auto const& t : terms)
        r += evaluate(t, x);
    return r;
}

double XWeights::operator()(double x) const
{
    auto it = std::upper_bound(segments.begin(), segments.end(), x,
                               [](double v, WeightSegment const& s) { return v < s.lo; });
    if (it == segments.begin())
        return 0.0;
    auto const& s = *std::prev(it);
    return x < s.hi ? s(x) : 0.0;
}

//---------------------------------------------------------------------------//
// SignalKernel
//---------------------------------------------------------------------------//
char const* to_string(KernelKind kind)
{
    switch (kind)
    {
        case KernelKind::triangle_rectangle:
            return "triangle_rectangle";
        case KernelKind::three_piece:
            return "three_piece";
        case KernelKind::additive:
            return "additive";
        case KernelKind::evasion_mixture:
            return "evasion_mixture";
    }
    return "unknown";
}

double SignalKernel::param(std::string const& name) const
{
    for (auto const& [key, value] : params_)
        if (key == name)
            return value;
    fail(ErrorCode::invalid_argument, std::string("kernel ") + to_string(kind_) + " has no parameter '" + name + "'");
}

double SignalKernel::density(double z, double x) const
{
    return (1 - p_at(x)) * value_right(g_, z - x);
}

double SignalKernel::density_left(double z, double x) const
{
    return (1 - p_at(x)) * value_left(g_, z - x);
}

double SignalKernel::atom_mass(double z, double x) const
{
    double p = p_at(x);
    double m = (1 - p) * g_.atom_at(z - x);
    if (z == x)
        m += p;
    return m;
}

double SignalKernel::survival(double b, double x) const
{
    double p = p_at(x);
    double r = (1 - p) * (1 - g_.cdf_left(b - x));
    if (x >= b)
        r += p;
    return r;
}

double SignalKernel::total_mass(double x) const
{
    double p = p_at(x);
    double m = 0;
    for (auto const& piece : g_.pieces())
        m += piece.mass();
    for (auto const& a : g_.atoms())
        m += a.mass;
    return p + (1 - p) * m;
}

std::pair<double, double> SignalKernel::noise_range() const
{
    double lo = g_.support_lo(), hi = g_.support_hi();
    if (p_)
    {
        lo = std::min(lo, 0.0);
        hi = std::max(hi, 0.0);
    }
    return {lo, hi};
}

XWeights SignalKernel::likelihood_in_x(double z) const
{
    XWeights w;
    bool const_p = !p_ || p_->is_constant();
    double scale = 1 - (p_ ? (const_p ? p_->constant_value() : 0.0) : 0.0);
    auto pieces = g_.pieces();
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
    {
        Piece const& piece = *it;
        WeightSegment s;
        s.lo = z - piece.hi;
        s.hi = z - piece.lo;
        if (!(s.lo < s.hi))
            continue;
        if (const_p)
        {
            double xo = finite_end(s.lo, s.hi);
            for (auto const& t : piece.terms)
                s.terms.push_back(scaled(reflected(t, z, xo), scale));
            s.terms = simplify_terms(std::move(s.terms), xo);
            if (s.terms.empty())
                continue;
        }
        else
        {
            s.fn = [this, z](double x) { return density(z, x); };
        }
        w.segments.push_back(std::move(s));
    }
    std::vector<Atom> deltas;
    for (auto const& a : g_.atoms())
    {
        double x = z - a.location;
        deltas.push_back({x, (1 - p_at(x)) * a.mass});
    }
    if (p_)
        deltas.push_back({z, p_at(z)});
    w.deltas = merge_deltas(std::move(deltas));
    return w;
}

XWeights SignalKernel::survival_in_x(double b) const
{
    XWeights w;
    bool const_p = !p_ || p_->is_constant();
    double c = p_ && const_p ? p_->constant_value() : 0.0;

    std::vector<double> cuts = g_.breakpoints();
    if (p_)
        cuts.push_back(0.0);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> edges{-inf};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(inf);

    auto pieces = g_.pieces();
    // Walk v = b - x from high to low so that x increases
    for (std::size_t i = edges.size() - 1; i-- > 0;)
    {
        double s = edges[i], t = edges[i + 1];
        WeightSegment seg;
        seg.lo = b - t;
        seg.hi = b - s;
        if (!(seg.lo < seg.hi))
            continue;
        if (!const_p)
        {
            seg.fn = [this, b](double x) { return survival(b, x); };
            w.segments.push_back(std::move(seg));
            continue;
        }
        double xo = finite_end(seg.lo, seg.hi);
        double constant = std::isfinite(t) ? 1 - g_.cdf_left(t) : 0.0;
        auto piece = std::find_if(pieces.begin(), pieces.end(), [&](Piece const& p) {
            return p.lo <= s && t <= p.hi;
        });
        std::vector<Term> terms;
        if (piece != pieces.end())
        {
            for (auto const& term : piece->terms)
            {
                auto r = integral_to(term, b, t, xo);
                constant += r.constant;
                terms.push_back(r.term);
            }
        }
        for (auto& term : terms)
            term = scaled(term, 1 - c);
        constant *= 1 - c;
        // x >= b exactly when v <= 0
        if (p_ && t <= 0)
            constant += c;
        if (constant != 0)
            terms.push_back(PolyTerm{xo, Polynomial{constant}});
        seg.terms = simplify_terms(std::move(terms), xo);
        if (seg.terms.empty())
            continue;
        w.segments.push_back(std::move(seg));
    }
    return w;
}

void SignalKernel::validate(ProbeGrid const& grid) const
{
    if (!p_)
        return;
    if (grid.n_x < 2 || !(grid.x_lo < grid.x_hi))
        fail(ErrorCode::invalid_argument, "probe grid needs at least two x values");
    for (int i = 0; i < grid.n_x; ++i)
    {
        double x = grid.x_lo + (grid.x_hi - grid.x_lo) * i / (grid.n_x - 1);
        double p = (*p_)(x);
        if (!(p > 0 && p < 1))
        {
            std::ostringstream os;
            os << "evasion probability " << p << " at x = " << x << " is outside (0, 1)";
            fail(ErrorCode::bad_params, os.str());
        }
    }
}

std::string SignalKernel::describe() const
{
    std::ostringstream os;
    os << to_string(kind_);
    if (!params_.empty())
    {
        os << '(';
        for (std::size_t i = 0; i < params_.size(); ++i)
            os << (i ? ", " : "") << params_[i].first << '=' << format_number(params_[i].second);
        os << ')';
    }
    if (p_)
        os << " p=" << p_->describe();
    return os.str();
}

//---------------------------------------------------------------------------//
// Factories
//---------------------------------------------------------------------------//
SignalKernel triangle_rectangle_kernel()
{
    SignalKernel k;
    k.kind_ = KernelKind::triangle_rectangle;
    k.g_ = make_distribution({Piece{0, 1, {PolyTerm{0, Polynomial{1.0, -2.0 / 3}}}},
                              Piece{1, 2, {PolyTerm{1, Polynomial{1.0 / 3}}}}},
                             {});
    return k;
}

double three_piece_height(double iota, double xi)
{
    return (2 + iota + iota * iota - xi) / (2 + xi + iota);
}

SignalKernel three_piece_kernel(double iota, double xi)
{
    if (!(iota > 0 && iota < 1))
        fail(ErrorCode::bad_params, "iota must lie in (0, 1)");
    double xi_max = (2 - iota) / (1 + iota);
    if (!(xi >= 1 && xi < xi_max))
    {
        std::ostringstream os;
        os << "xi = " << xi << " outside [1, " << xi_max << ")";
        fail(ErrorCode::bad_params, os.str());
    }
    double h = three_piece_height(iota, xi);
    SignalKernel k;
    k.kind_ = KernelKind::three_piece;
    k.params_ = {{"iota", iota}, {"xi", xi}, {"h", h}};
    k.g_ = make_distribution(
        {Piece{0, xi, {PolyTerm{0, Polynomial{1.0, -(1 - h) / xi}}}},
         Piece{xi, xi + 1, {PolyTerm{xi, Polynomial{h, -iota}}}},
         Piece{xi + 1, xi + 1 + iota, {PolyTerm{xi + 1, Polynomial{h - iota, -(h - iota) / iota}}}}},
        {});
    return k;
}

SignalKernel additive_kernel(Distribution noise)
{
    SignalKernel k;
    k.kind_ = KernelKind::additive;
    k.g_ = std::move(noise);
    return k;
}

SignalKernel evasion_kernel(EvasionProbability p, Distribution g, ProbeGrid const& grid)
{
    if (!g.atoms().empty())
        fail(ErrorCode::bad_params, "evasion noise g must be continuous");
    if (g.support_lo() < 0)
        fail(ErrorCode::bad_params, "evasion noise g must live on [0, inf)");
    SignalKernel k;
    k.kind_ = KernelKind::evasion_mixture;
    k.g_ = std::move(g);
    k.p_ = std::move(p);
    if (k.p_->is_constant())
        k.params_ = {{"p", k.p_->constant_value()}};
    k.validate(grid);
    return k;
}

SignalKernel affine_kernel(SignalKernel const& k, double offset, double scale)
{
    SignalKernel out = k;
    out.g_ = affine_map(k.g_, 0.0, scale);
    if (k.p_ && !k.p_->is_constant())
    {
        auto p = *k.p_;
        out.p_ = EvasionProbability::callable(
            [p, offset, scale](double x) { return p((x - offset) / scale); }, p.describe() + " (mapped)");
    }
    return out;
}

SignalKernel reflect_kernel(SignalKernel const& k)
{
    return affine_kernel(k, 0.0, -1.0);
}

std::pair<double, double> unit_rescaling(double a, double b)
{
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        fail(ErrorCode::invalid_argument, "rescaling needs finite a < b");
    return {-a / (b - a), 1 / (b - a)};
}

//---------------------------------------------------------------------------//
// ThresholdSignal
//---------------------------------------------------------------------------//
ThresholdSignal threshold_transform(SignalKernel const& k)
{
    auto not_cdf = [&k](std::string const& why) {
        fail(ErrorCode::not_a_cdf, "1 - f is not a cdf for " + k.describe() + ": " + why);
    };
    if (k.evasion())
        not_cdf("the kernel has a point mass");
    Distribution const& g = k.noise();
    if (!g.atoms().empty())
        not_cdf("the noise has atoms");
    double lo = g.support_lo(), hi = g.support_hi();
    if (!std::isfinite(lo))
        not_cdf("the window has no finite left end");
    constexpr double tol = 1e-12;
    if (std::abs(value_right(g, lo) - 1) > tol)
        not_cdf("density at the left end of the window is not 1");

    // Probe 1 - f for monotonicity on breakpoints plus a uniform grid
    std::vector<double> probes = g.breakpoints();
    double top = std::isfinite(hi) ? hi : g.quantile(1 - 1e-12);
    constexpr int n = 10000;
    for (int i = 0; i <= n; ++i)
        probes.push_back(lo + (top - lo) * i / n);
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    double prev = 1.0;
    for (double u : probes)
    {
        if (u > top)
            break;
        double l = value_left(g, u);
        double r = value_right(g, u);
        if (u > lo && l > prev + tol)
            not_cdf("density increases before " + format_number(u));
        if (u < top && r > (u > lo ? l : 1.0) + tol)
            not_cdf("density jumps up at " + format_number(u));
        if (r > 1 + tol || l > 1 + tol)
            not_cdf("density exceeds 1 near " + format_number(u));
        prev = r;
    }
    for (auto const& piece : g.pieces())
    {
        for (auto const& t : piece.terms)
        {
            if (!std::holds_alternative<PolyTerm>(t))
                continue;
            for (double u : {piece.lo, piece.hi})
            {
                if (!std::isfinite(u))
                    continue;
                double slope = 0;
                for (auto const& tt : piece.terms)
                    slope += derivative(tt, u);
                if (slope > tol)
                    not_cdf("density increases at " + format_number(u));
            }
        }
    }

    ThresholdSignal ts;
    ts.k_ = k;
    if (std::isfinite(hi))
    {
        double atom = value_left(g, hi);
        ts.terminal_atom_ = atom > tol ? atom : 0.0;
    }
    return ts;
}

double ThresholdSignal::cdf(double s, double x) const
{
    auto [lo, hi] = window();
    double u = s - x;
    if (u < lo)
        return 0.0;
    if (u >= hi)
        return 1.0;
    return std::clamp(1 - value_right(k_.noise(), u), 0.0, 1.0);
}

double ThresholdSignal::survival(double b, double x) const
{
    auto [lo, hi] = window();
    double u = b - x;
    if (u <= lo)
        return 1.0;
    if (u > hi)
        return 0.0;
    return std::clamp(value_left(k_.noise(), u), 0.0, 1.0);
}

double ThresholdSignal::sample(double x, double uniform) const
{
    auto [lo, hi] = window();
    if (std::isfinite(hi) && uniform >= 1 - terminal_atom_)
        return x + hi;
    // Smallest u with f(u) <= 1 - uniform; f is nonincreasing on the window
    double y = 1 - uniform;
    for (auto const& p : k_.noise().pieces())
    {
        if (p.density(p.lo) <= y)
            return x + p.lo;
        double end = std::isfinite(p.hi) ? p.density(p.hi) : 0.0;
        if (end > y)
            continue;
        if (p.terms.size() == 1)
        {
            auto const* poly = std::get_if<PolyTerm>(&p.terms.front());
            if (poly && poly->poly.degree() == 1)
            {
                auto c = poly->poly.coeffs();
                return x + std::clamp(poly->origin + (y - c[0]) / c[1], p.lo, p.hi);
            }
        }
        double a = p.lo, b = std::isfinite(p.hi) ? p.hi : p.lo + 1;
        while (p.density(b) > y)
            b = p.lo + 2 * (b - p.lo);
        for (int i = 0; i < 200; ++i)
        {
            double m = 0.5 * (a + b);
            if (m <= a || m >= b)
                break;
            if (p.density(m) <= y)
                b = m;
            else
                a = m;
        }
        return x + b;
    }
    return x + hi;
}

XWeights ThresholdSignal::survival_in_x(double b) const
{
    XWeights w = k_.likelihood_in_x(b);
    auto [lo, hi] = window();
    WeightSegment one;
    one.lo = b - lo;
    one.hi = inf;
    one.terms.push_back(PolyTerm{one.lo, Polynomial{1.0}});
    w.segments.push_back(std::move(one));
    w.deltas.clear();
    return w;
}

}  // namespace screenrev
