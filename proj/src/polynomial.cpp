#include "screenrev/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "screenrev/error.hpp"

namespace screenrev
{
namespace
{
void check_degree(std::size_t size)
{
    if (size > static_cast<std::size_t>(Polynomial::max_degree) + 1)
    {
        fail(ErrorCode::unsupported,
             "polynomial degree " + std::to_string(size - 1)
                 + " exceeds cap " + std::to_string(Polynomial::max_degree));
    }
}

double bisect_root(Polynomial const& p, double a, double b)
{
    double fa = p(a);
    for (int i = 0; i < 200 && b - a > 1e-15 * (1 + std::abs(a)); ++i)
    {
        double m = 0.5 * (a + b);
        double fm = p(m);
        if ((fm < 0) == (fa < 0))
        {
            a = m;
            fa = fm;
        }
        else
        {
            b = m;
        }
    }
    return 0.5 * (a + b);
}
}  // namespace

Polynomial::Polynomial(std::initializer_list<double> coeffs) : c_(coeffs)
{
    trim();
    check_degree(c_.size());
}

Polynomial::Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs))
{
    trim();
    check_degree(c_.size());
}

void Polynomial::trim()
{
    while (!c_.empty() && c_.back() == 0.0)
        c_.pop_back();
}

double Polynomial::operator()(double t) const
{
    double r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
        r = r * t + *it;
    return r;
}

Polynomial Polynomial::derivative() const
{
    if (c_.size() <= 1)
        return {};
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k)
        d[k - 1] = c_[k] * static_cast<double>(k);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::antiderivative() const
{
    if (c_.empty())
        return {};
    std::vector<double> a(c_.size() + 1, 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k)
        a[k + 1] = c_[k] / static_cast<double>(k + 1);
    Polynomial result;
    result.c_ = std::move(a);
    result.trim();
    return result;
}

double Polynomial::integrate(double a, double b) const
{
    // Horner on the antiderivative without materializing it (no degree check)
    auto prim = [this](double t) {
        double r = 0;
        for (std::size_t k = c_.size(); k-- > 0;)
            r = r * t + c_[k] / static_cast<double>(k + 1);
        return r * t;
    };
    return prim(b) - prim(a);
}

Polynomial Polynomial::shifted(double delta) const
{
    // Repeated synthetic division (Taylor shift)
    std::vector<double> c = c_;
    std::size_t n = c.size();
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t k = n - 1; k > i; --k)
            c[k - 1] += delta * c[k];
    Polynomial result;
    result.c_ = std::move(c);
    result.trim();
    return result;
}

Polynomial Polynomial::reflected(double length) const
{
    // q(length - t) = q(length + (-t))
    return shifted(length).scaled_argument(-1.0);
}

Polynomial Polynomial::scaled_argument(double s) const
{
    std::vector<double> c = c_;
    double f = 1;
    for (auto& ck : c)
    {
        ck *= f;
        f *= s;
    }
    Polynomial result;
    result.c_ = std::move(c);
    result.trim();
    return result;
}

std::vector<double> Polynomial::critical_points(double lo, double hi) const
{
    std::vector<double> roots;
    Polynomial d = derivative();
    if (d.degree() < 1)
        return roots;
    if (d.degree() == 1)
    {
        double r = -d.c_[0] / d.c_[1];
        if (r > lo && r < hi)
            roots.push_back(r);
        return roots;
    }
    if (d.degree() == 2)
    {
        double a = d.c_[2], b = d.c_[1], c = d.c_[0];
        double disc = b * b - 4 * a * c;
        if (disc < 0)
            return roots;
        double sq = std::sqrt(disc);
        double q = -0.5 * (b + std::copysign(sq, b));
        for (double r : {q / a, q != 0 ? c / q : -b / (2 * a)})
            if (r > lo && r < hi)
                roots.push_back(r);
        std::sort(roots.begin(), roots.end());
        return roots;
    }
    constexpr int n = 64;
    double prev_t = lo;
    double prev = d(lo);
    for (int i = 1; i <= n; ++i)
    {
        double t = lo + (hi - lo) * i / n;
        double v = d(t);
        if ((v < 0) != (prev < 0))
            roots.push_back(bisect_root(d, prev_t, t));
        prev_t = t;
        prev = v;
    }
    return roots;
}

Polynomial Polynomial::operator+(Polynomial const& other) const
{
    std::vector<double> c(std::max(c_.size(), other.c_.size()), 0.0);
    for (std::size_t k = 0; k < c_.size(); ++k)
        c[k] += c_[k];
    for (std::size_t k = 0; k < other.c_.size(); ++k)
        c[k] += other.c_[k];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(Polynomial const& other) const
{
    if (c_.empty() || other.c_.empty())
        return {};
    std::vector<double> c(c_.size() + other.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < c_.size(); ++i)
        for (std::size_t j = 0; j < other.c_.size(); ++j)
            c[i + j] += c_[i] * other.c_[j];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(double s) const
{
    std::vector<double> c = c_;
    for (auto& ck : c)
        ck *= s;
    return Polynomial(std::move(c));
}

}  // namespace screenrev
