#include "screenrev/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();

std::string describe(Piece const& p)
{
    std::ostringstream os;
    os << "[" << p.lo << ", " << p.hi << ")";
    return os.str();
}

bool finite_term(Term const& t)
{
    return std::visit(
        [](auto const& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, PolyTerm>)
            {
                for (double c : v.poly.coeffs())
                    if (!std::isfinite(c))
                        return false;
                return std::isfinite(v.origin) || v.poly.is_zero();
            }
            else if constexpr (std::is_same_v<T, ExpTerm>)
            {
                return std::isfinite(v.amplitude) && std::isfinite(v.rate)
                       && std::isfinite(v.anchor);
            }
            else
            {
                return std::isfinite(v.amplitude) && std::isfinite(v.center)
                       && std::isfinite(v.exponent);
            }
        },
        t);
}

//! Points at which nonnegativity is probed
std::vector<double> probe_points(Piece const& p)
{
    std::vector<double> pts;
    if (p.bounded())
    {
        pts.push_back(p.lo);
        pts.push_back(p.hi);
        constexpr int n = 16;
        for (int i = 1; i < n; ++i)
            pts.push_back(p.lo + (p.hi - p.lo) * i / n);
        if (p.terms.size() == 1)
        {
            if (auto const* poly = std::get_if<PolyTerm>(&p.terms.front()))
            {
                for (double t : poly->poly.critical_points(p.lo - poly->origin,
                                                           p.hi - poly->origin))
                {
                    pts.push_back(poly->origin + t);
                }
            }
        }
    }
    else
    {
        double ref = p.reference();
        double dir = std::isinf(p.hi) ? 1.0 : -1.0;
        pts.push_back(ref);
        double step = std::max(1.0, std::abs(ref)) * 1e-3;
        for (int k = 0; k < 40; ++k, step *= 2)
            pts.push_back(ref + dir * step);
    }
    return pts;
}
}  // namespace

//---------------------------------------------------------------------------//
// Piece
//---------------------------------------------------------------------------//
double Piece::density(double x) const
{
    double r = 0;
    for (auto const& t : terms)
        r += evaluate(t, x);
    return r;
}

double Piece::mass(double a, double b) const
{
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (!(a < b))
        return 0.0;
    double r = 0;
    for (auto const& t : terms)
        r += integrate(t, a, b);
    return r;
}

double Piece::moment() const
{
    double r = 0;
    for (auto const& t : terms)
        r += integrate_moment(t, lo, hi);
    return r;
}

double Piece::reference() const
{
    if (std::isfinite(lo))
        return lo;
    if (std::isfinite(hi))
        return hi;
    return 0.0;
}

bool Piece::bounded() const
{
    return std::isfinite(lo) && std::isfinite(hi);
}

Piece tail_piece(TailDescriptor const& tail)
{
    if (!(tail.rate_or_shape > 0) || !std::isfinite(tail.rate_or_shape))
        fail(ErrorCode::bad_params, "tail rate or shape must be positive");
    if (!(tail.mass > 0))
        fail(ErrorCode::bad_params, "tail mass must be positive");
    bool upper = tail.side == TailSide::upper;
    Piece p;
    p.lo = upper ? tail.anchor : -inf;
    p.hi = upper ? inf : tail.anchor;
    double s = tail.rate_or_shape;
    if (tail.kind == TailKind::exponential)
    {
        p.terms.push_back(ExpTerm{tail.mass * s, upper ? -s : s, tail.anchor});
    }
    else
    {
        double d = upper ? tail.anchor - tail.center : tail.center - tail.anchor;
        if (!(d > 0))
            fail(ErrorCode::bad_params, "pareto anchor must lie beyond its center");
        p.terms.push_back(PowerTerm{tail.mass * s * std::pow(d, s), tail.center, s + 1});
    }
    return p;
}

//---------------------------------------------------------------------------//
// Distribution
//---------------------------------------------------------------------------//
double Distribution::support_lo() const
{
    double lo = inf;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
    {
        if (piece_mass_[i] > 0)
        {
            lo = pieces_[i].lo;
            break;
        }
    }
    if (!atoms_.empty())
        lo = std::min(lo, atoms_.front().location);
    return lo;
}

double Distribution::support_hi() const
{
    double hi = -inf;
    for (std::size_t i = pieces_.size(); i-- > 0;)
    {
        if (piece_mass_[i] > 0)
        {
            hi = pieces_[i].hi;
            break;
        }
    }
    if (!atoms_.empty())
        hi = std::max(hi, atoms_.back().location);
    return hi;
}

std::optional<TailDescriptor> Distribution::tail(TailSide side) const
{
    if (pieces_.empty())
        return std::nullopt;
    Piece const& p = side == TailSide::lower ? pieces_.front() : pieces_.back();
    bool unbounded = side == TailSide::lower ? std::isinf(p.lo) : std::isinf(p.hi);
    if (!unbounded || p.terms.size() != 1)
        return std::nullopt;
    TailDescriptor td;
    td.side = side;
    td.anchor = p.reference();
    td.mass = p.mass();
    if (auto const* e = std::get_if<ExpTerm>(&p.terms.front()))
    {
        td.kind = TailKind::exponential;
        td.rate_or_shape = std::abs(e->rate);
        return td;
    }
    if (auto const* w = std::get_if<PowerTerm>(&p.terms.front()))
    {
        td.kind = TailKind::pareto;
        td.rate_or_shape = w->exponent - 1;
        td.center = w->center;
        return td;
    }
    return std::nullopt;
}

double Distribution::density(double x) const
{
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, Piece const& p) { return v < p.lo; });
    if (it == pieces_.begin())
        return 0.0;
    Piece const& p = *std::prev(it);
    if (x < p.hi || x == p.hi)
        return p.density(x);
    return 0.0;
}

double Distribution::piece_cdf(double x) const
{
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, Piece const& p) { return v < p.lo; });
    if (it == pieces_.begin())
        return 0.0;
    auto i = static_cast<std::size_t>(std::distance(pieces_.begin(), it)) - 1;
    Piece const& p = pieces_[i];
    if (x >= p.hi)
        return piece_cum_[i] + piece_mass_[i];
    return piece_cum_[i] + p.mass(p.lo, x);
}

double Distribution::cdf(double x) const
{
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                               [](double v, Atom const& a) { return v < a.location; });
    double r = piece_cdf(x) + atom_cum_[std::distance(atoms_.begin(), it)];
    return std::clamp(r, 0.0, 1.0);
}

double Distribution::cdf_left(double x) const
{
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](Atom const& a, double v) { return a.location < v; });
    double r = piece_cdf(x) + atom_cum_[std::distance(atoms_.begin(), it)];
    return std::clamp(r, 0.0, 1.0);
}

double Distribution::atom_at(double x) const
{
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](Atom const& a, double v) { return a.location < v; });
    if (it != atoms_.end() && it->location == x)
        return it->mass;
    return 0.0;
}

double Distribution::invert_in_piece(std::size_t i, double target) const
{
    Piece const& p = pieces_[i];
    target = std::clamp(target, 0.0, piece_mass_[i]);
    auto clamp_result = [&p](double x) {
        if (std::isnan(x))
            return p.reference();
        return std::clamp(x, p.lo, p.hi);
    };
    if (p.terms.size() == 1)
    {
        Term const& t = p.terms.front();
        if (auto const* poly = std::get_if<PolyTerm>(&t); poly && p.bounded())
        {
            auto c = poly->poly.coeffs();
            double off = p.lo - poly->origin;
            if (poly->poly.degree() == 0)
                return clamp_result(p.lo + target / c[0]);
            if (poly->poly.degree() == 1 && off == 0.0)
            {
                double c0 = c[0], c1 = c[1];
                double disc = c0 * c0 + 2 * c1 * target;
                double s = std::sqrt(std::max(disc, 0.0));
                double denom = c0 + s;
                double t0 = denom > 0 ? 2 * target / denom : (s - c0) / c1;
                return clamp_result(p.lo + t0);
            }
        }
        else if (auto const* e = std::get_if<ExpTerm>(&t))
        {
            double r = e->rate;
            if (r != 0 && std::isfinite(p.lo))
            {
                double base = e->amplitude * std::exp(r * (p.lo - e->anchor));
                return clamp_result(p.lo + std::log1p(target * r / base) / r);
            }
            if (r > 0)
                return clamp_result(e->anchor + std::log(target * r / e->amplitude) / r);
        }
        else if (auto const* w = std::get_if<PowerTerm>(&t))
        {
            double k = w->exponent;
            if (k != 1)
            {
                double e1 = 1 - k;
                if (p.lo >= w->center)
                {
                    double ulo = p.lo - w->center;
                    double v = std::pow(ulo, e1) + target * e1 / w->amplitude;
                    return clamp_result(w->center + std::pow(v, 1 / e1));
                }
                double uhi = w->center - p.lo;
                double prim_hi = std::isinf(uhi) ? 0.0 : std::pow(uhi, e1) / e1;
                double prim_x = prim_hi - target / w->amplitude;
                return clamp_result(w->center - std::pow(prim_x * e1, 1 / e1));
            }
        }
    }
    // Bisection on the piece mass
    double a = p.lo, b = p.hi;
    if (std::isinf(a))
    {
        double step = 1;
        a = b - step;
        while (p.mass(a, b) < piece_mass_[i] - target && step < 1e300)
        {
            step *= 2;
            a = b - step;
        }
    }
    if (std::isinf(b))
    {
        double step = 1;
        b = a + step;
        while (p.mass(p.lo, b) < target && step < 1e300)
        {
            step *= 2;
            b = a + step;
        }
    }
    for (int it = 0; it < 200; ++it)
    {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        if (p.mass(p.lo, m) < target)
            a = m;
        else
            b = m;
    }
    return clamp_result(0.5 * (a + b));
}

double Distribution::quantile(double p) const
{
    if (!(p > 0))
        return support_lo();
    if (p >= 1)
        return support_hi();
    // Atom that carries the crossing
    auto at = std::partition_point(atoms_.begin(), atoms_.end(),
                                   [&](Atom const& a) { return cdf(a.location) < p; });
    if (at != atoms_.end() && cdf_left(at->location) < p)
        return at->location;
    // First piece whose right end reaches p
    auto pt = std::partition_point(pieces_.begin(), pieces_.end(), [&](Piece const& pc) {
        return std::isfinite(pc.hi) && cdf(pc.hi) < p;
    });
    if (pt == pieces_.end())
        return support_hi();
    auto i = static_cast<std::size_t>(std::distance(pieces_.begin(), pt));
    Piece const& pc = pieces_[i];
    bool interior_atoms = std::any_of(atoms_.begin(), atoms_.end(), [&](Atom const& a) {
        return a.location > pc.lo && a.location < pc.hi;
    });
    if (!interior_atoms)
    {
        double base = std::isfinite(pc.lo) ? cdf(pc.lo) : 0.0;
        return invert_in_piece(i, p - base);
    }
    double a = pc.lo, b = pc.hi;
    for (int it = 0; it < 200; ++it)
    {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b)
            break;
        if (cdf(m) < p)
            a = m;
        else
            b = m;
    }
    return b;
}

std::vector<double> Distribution::breakpoints() const
{
    std::vector<double> pts;
    for (auto const& p : pieces_)
    {
        if (std::isfinite(p.lo))
            pts.push_back(p.lo);
        if (std::isfinite(p.hi))
            pts.push_back(p.hi);
    }
    for (auto const& a : atoms_)
        pts.push_back(a.location);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

bool Distribution::is_interval() const
{
    double lo = support_lo(), hi = support_hi();
    // Covered stretch built from positive-mass pieces
    std::vector<std::pair<double, double>> spans;
    for (std::size_t i = 0; i < pieces_.size(); ++i)
        if (piece_mass_[i] > 0)
            spans.emplace_back(pieces_[i].lo, pieces_[i].hi);
    if (spans.empty())
        return atoms_.size() <= 1;
    for (std::size_t i = 1; i < spans.size(); ++i)
        if (spans[i].first > spans[i - 1].second)
            return false;
    for (auto const& a : atoms_)
        if (a.location < spans.front().first || a.location > spans.back().second)
            return false;
    return lo <= hi;
}

//---------------------------------------------------------------------------//
// Construction
//---------------------------------------------------------------------------//
std::vector<Term> simplify_terms(std::vector<Term> terms, double origin)
{
    std::vector<Term> out;
    std::optional<PolyTerm> poly;
    for (auto& t : terms)
    {
        if (is_zero(t))
            continue;
        if (auto const* p = std::get_if<PolyTerm>(&t))
        {
            auto r = std::get<PolyTerm>(rebased(*p, origin));
            if (poly)
                poly->poly = poly->poly + r.poly;
            else
                poly = r;
            continue;
        }
        bool merged = false;
        for (auto& o : out)
        {
            if (auto* e = std::get_if<ExpTerm>(&o))
            {
                if (auto const* f = std::get_if<ExpTerm>(&t); f && f->rate == e->rate)
                {
                    e->amplitude += f->amplitude * std::exp(f->rate * (e->anchor - f->anchor));
                    merged = true;
                    break;
                }
            }
            else if (auto* w = std::get_if<PowerTerm>(&o))
            {
                if (auto const* v = std::get_if<PowerTerm>(&t);
                    v && v->center == w->center && v->exponent == w->exponent)
                {
                    w->amplitude += v->amplitude;
                    merged = true;
                    break;
                }
            }
        }
        if (!merged)
            out.push_back(t);
    }
    if (poly && !poly->poly.is_zero())
        out.insert(out.begin(), *poly);
    return out;
}

double total_mass(std::span<Piece const> pieces, std::span<Atom const> atoms)
{
    double m = 0;
    for (auto const& p : pieces)
        m += p.mass();
    for (auto const& a : atoms)
        m += a.mass;
    return m;
}

Distribution make_distribution(std::vector<Piece> pieces, std::vector<Atom> atoms, BuildOptions options)
{
    // Structural checks
    for (auto& p : pieces)
    {
        if (std::isnan(p.lo) || std::isnan(p.hi) || !(p.lo < p.hi))
            fail(ErrorCode::invalid_argument, "piece " + describe(p) + " is empty or malformed");
        for (auto const& t : p.terms)
        {
            if (!finite_term(t))
                fail(ErrorCode::invalid_argument, "non-finite term on piece " + describe(p));
            if (!integrable(t, p.lo, p.hi))
                fail(ErrorCode::invalid_argument, "term not integrable on piece " + describe(p));
        }
        p.terms = simplify_terms(std::move(p.terms), p.reference());
    }
    std::erase_if(pieces, [](Piece const& p) { return p.terms.empty(); });
    std::sort(pieces.begin(), pieces.end(),
              [](Piece const& a, Piece const& b) { return a.lo < b.lo; });
    for (std::size_t i = 1; i < pieces.size(); ++i)
    {
        if (pieces[i].lo < pieces[i - 1].hi)
        {
            fail(ErrorCode::overlapping_pieces,
                 describe(pieces[i - 1]) + " overlaps " + describe(pieces[i]));
        }
    }

    // Nonnegativity
    std::vector<std::vector<double>> probes;
    double scale = 0;
    for (auto const& p : pieces)
    {
        probes.push_back(probe_points(p));
        for (double x : probes.back())
            scale = std::max(scale, std::abs(p.density(x)));
    }
    double neg_tol = 1e-9 * std::max(scale, 1e-300);
    for (std::size_t i = 0; i < pieces.size(); ++i)
    {
        for (double x : probes[i])
        {
            double v = pieces[i].density(x);
            if (v < -neg_tol || std::isnan(v))
            {
                std::ostringstream os;
                os << "density " << v << " at x = " << x << " on piece " << describe(pieces[i]);
                fail(ErrorCode::negative_density, os.str());
            }
        }
    }

    // Atoms
    for (auto const& a : atoms)
    {
        if (!std::isfinite(a.location) || !std::isfinite(a.mass))
            fail(ErrorCode::invalid_argument, "non-finite atom");
        if (a.mass < 0)
            fail(ErrorCode::negative_density, "atom with negative mass");
    }
    std::erase_if(atoms, [](Atom const& a) { return a.mass == 0; });
    std::sort(atoms.begin(), atoms.end(),
              [](Atom const& a, Atom const& b) { return a.location < b.location; });
    std::vector<Atom> merged;
    for (auto const& a : atoms)
    {
        if (!merged.empty() && merged.back().location == a.location)
            merged.back().mass += a.mass;
        else
            merged.push_back(a);
    }
    atoms = std::move(merged);

    // Mass
    double total = total_mass(pieces, atoms);
    if (!(total > 0) || !std::isfinite(total))
        fail(ErrorCode::mass_mismatch, "total mass is not positive and finite");
    if (std::abs(total - 1) > options.tol_mass)
    {
        if (!options.normalize)
        {
            std::ostringstream os;
            os.precision(17);
            os << "total mass " << total << " differs from 1";
            fail(ErrorCode::mass_mismatch, os.str());
        }
    }
    if (options.normalize && total != 1)
    {
        for (auto& p : pieces)
            for (auto& t : p.terms)
                t = scaled(t, 1 / total);
        for (auto& a : atoms)
            a.mass /= total;
    }

    Distribution d;
    d.pieces_ = std::move(pieces);
    d.atoms_ = std::move(atoms);
    double cum = 0;
    for (auto const& p : d.pieces_)
    {
        double m = p.mass();
        d.piece_cum_.push_back(cum);
        d.piece_mass_.push_back(m);
        cum += m;
    }
    cum = 0;
    d.atom_cum_.push_back(0);
    for (auto const& a : d.atoms_)
    {
        cum += a.mass;
        d.atom_cum_.push_back(cum);
    }
    d.approximation_error_ = options.approximation_error;
    d.discarded_mass_ = options.discarded_mass;
    return d;
}

Distribution make_distribution(std::vector<Piece> pieces,
                               std::vector<Atom> atoms,
                               std::vector<TailDescriptor> const& tails,
                               BuildOptions options)
{
    for (auto const& t : tails)
        pieces.push_back(tail_piece(t));
    return make_distribution(std::move(pieces), std::move(atoms), options);
}

//---------------------------------------------------------------------------//
// Functionals and transforms
//---------------------------------------------------------------------------//
double mean(Distribution const& d)
{
    double m = 0;
    for (auto const& p : d.pieces())
    {
        for (auto const& t : p.terms)
        {
            if (!moment_finite(t, p.lo, p.hi))
                fail(ErrorCode::infinite_mean, "tail on " + describe(p) + " has no finite mean");
        }
        m += p.moment();
    }
    for (auto const& a : d.atoms())
        m += a.location * a.mass;
    return m;
}

Distribution truncate(Distribution const& d, double lo, double hi)
{
    if (std::isnan(lo) || std::isnan(hi) || !(lo <= hi))
        fail(ErrorCode::invalid_argument, "truncation window must satisfy lo <= hi");
    double kept = d.cdf(hi) - d.cdf_left(lo);
    if (!(kept > 0))
        fail(ErrorCode::empty_truncation, "no probability inside the truncation window");
    std::vector<Piece> pieces;
    for (auto const& p : d.pieces())
    {
        double a = std::max(p.lo, lo), b = std::min(p.hi, hi);
        if (!(a < b))
            continue;
        Piece q{a, b, {}};
        double ref = q.reference();
        for (auto const& t : p.terms)
            q.terms.push_back(scaled(rebased(t, ref), 1 / kept));
        pieces.push_back(std::move(q));
    }
    std::vector<Atom> atoms;
    for (auto const& a : d.atoms())
        if (a.location >= lo && a.location <= hi)
            atoms.push_back({a.location, a.mass / kept});
    BuildOptions opts;
    opts.normalize = true;
    opts.approximation_error = d.approximation_error() / kept;
    opts.discarded_mass = d.cdf_left(lo) + (1 - d.cdf(hi));
    return make_distribution(std::move(pieces), std::move(atoms), opts);
}

Distribution affine_map(Distribution const& d, double offset, double scale)
{
    if (!(scale != 0) || !std::isfinite(scale) || !std::isfinite(offset))
        fail(ErrorCode::invalid_argument, "affine map needs a finite nonzero scale");
    std::vector<Piece> pieces;
    for (auto const& p : d.pieces())
    {
        double a = offset + scale * p.lo, b = offset + scale * p.hi;
        if (scale < 0)
            std::swap(a, b);
        Piece q{a, b, {}};
        double ref = q.reference();
        for (auto const& t : p.terms)
            q.terms.push_back(affine(t, offset, scale, ref));
        pieces.push_back(std::move(q));
    }
    std::vector<Atom> atoms;
    for (auto const& a : d.atoms())
        atoms.push_back({offset + scale * a.location, a.mass});
    BuildOptions opts;
    opts.normalize = true;
    opts.approximation_error = d.approximation_error() / std::abs(scale);
    opts.discarded_mass = d.discarded_mass();
    return make_distribution(std::move(pieces), std::move(atoms), opts);
}

Distribution reflect(Distribution const& d)
{
    return affine_map(d, 0.0, -1.0);
}

std::vector<Piece> overlay(std::span<std::vector<Piece> const> layers)
{
    std::vector<double> cuts;
    for (auto const& layer : layers)
    {
        for (auto const& p : layer)
        {
            cuts.push_back(p.lo);
            cuts.push_back(p.hi);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Piece> out;
    std::vector<std::size_t> cursor(layers.size(), 0);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c)
    {
        double a = cuts[c], b = cuts[c + 1];
        Piece q{a, b, {}};
        double ref = q.reference();
        for (std::size_t l = 0; l < layers.size(); ++l)
        {
            auto const& layer = layers[l];
            auto& k = cursor[l];
            while (k < layer.size() && layer[k].hi <= a)
                ++k;
            if (k < layer.size() && layer[k].lo <= a && b <= layer[k].hi)
            {
                for (auto const& t : layer[k].terms)
                    q.terms.push_back(rebased(t, ref));
            }
        }
        q.terms = simplify_terms(std::move(q.terms), ref);
        if (!q.terms.empty())
            out.push_back(std::move(q));
    }
    return out;
}

Distribution mixture(std::span<std::pair<double, Distribution> const> components)
{
    double wsum = 0;
    for (auto const& [w, d] : components)
    {
        if (!(w >= 0) || !std::isfinite(w))
            fail(ErrorCode::bad_params, "mixture weights must be nonnegative");
        wsum += w;
    }
    if (!(wsum > 0))
        fail(ErrorCode::bad_params, "mixture weights sum to zero");
    std::vector<std::vector<Piece>> layers;
    std::vector<Atom> atoms;
    double approx = 0, discarded = 0;
    for (auto const& [w, d] : components)
    {
        double s = w / wsum;
        if (s == 0)
            continue;
        std::vector<Piece> layer;
        for (auto const& p : d.pieces())
        {
            Piece q{p.lo, p.hi, {}};
            for (auto const& t : p.terms)
                q.terms.push_back(scaled(t, s));
            layer.push_back(std::move(q));
        }
        layers.push_back(std::move(layer));
        for (auto const& a : d.atoms())
            atoms.push_back({a.location, a.mass * s});
        approx += s * d.approximation_error();
        discarded += s * d.discarded_mass();
    }
    BuildOptions opts;
    opts.normalize = true;
    opts.approximation_error = approx;
    opts.discarded_mass = discarded;
    return make_distribution(overlay(layers), std::move(atoms), opts);
}

}  // namespace screenrev
