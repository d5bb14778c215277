#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace screenrev
{
//---------------------------------------------------------------------------//
/*!
 * Dense univariate polynomial in a local coordinate t.
 *
 * Coefficients are stored lowest order first. Densities built by this library
 * are products of at most a handful of low-order factors, so the degree is
 * capped at \c max_degree and exceeding it is an error rather than a silent
 * truncation.
 */
class Polynomial
{
  public:
    static constexpr int max_degree = 7;

    Polynomial() = default;
    Polynomial(std::initializer_list<double> coeffs);
    explicit Polynomial(std::vector<double> coeffs);

    std::span<double const> coeffs() const { return c_; }
    //! Degree of the zero polynomial is -1
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    bool is_constant() const { return c_.size() <= 1; }
    double constant() const { return c_.empty() ? 0.0 : c_.front(); }

    double operator()(double t) const;

    Polynomial derivative() const;
    //! Antiderivative vanishing at t = 0
    Polynomial antiderivative() const;
    //! Integral over [a, b]
    double integrate(double a, double b) const;

    //! q(t + delta)
    Polynomial shifted(double delta) const;
    //! q(length - t)
    Polynomial reflected(double length) const;
    //! q(s * t)
    Polynomial scaled_argument(double s) const;

    //! Real roots of the derivative inside (lo, hi), sorted
    std::vector<double> critical_points(double lo, double hi) const;

    Polynomial operator+(Polynomial const& other) const;
    Polynomial operator*(Polynomial const& other) const;
    Polynomial operator*(double s) const;

  private:
    std::vector<double> c_;

    void trim();
};

}  // namespace screenrev
