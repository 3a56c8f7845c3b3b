#pragma once

#include <cstddef>
#include <vector>

#include "garchre/random.hpp"

/// Rational (Pade 0/4) error law with unit variance:
///
///   p(x; a) = a / (pi * (1 + (a^2 - 2) x^2 + x^4)),   a > 0.
///
/// The denominator equals (x^2 - 1)^2 + a^2 x^2, so the density is positive
/// for every a > 0. Tails decay like a / (pi x^4); the fourth moment is
/// infinite. The density peaks at the origin only when a^2 >= 2.
namespace garchre::rational {

/// Throws a domain error unless a is finite and positive.
void require_valid_shape(double a);

double pdf(double x, double a);
double log_pdf(double x, double a);
/// Direct adaptive quadrature; cdf(0, a) == 0.5 exactly.
double cdf(double x, double a);

/// True when the density has its single maximum at the origin (a^2 >= 2).
bool unimodal_at_origin(double a);

/// Integral of x^2 p(x; a) over the real line, by quadrature.
double variance_check(double a);
/// Integral of p(x; a) over the real line, by quadrature.
double normalization_check(double a);

/// Tabulated CDF on a symmetric knot grid out to |x| = kTableLimit with an
/// analytic power-law closure beyond it. Immutable after construction.
class CdfTable {
 public:
  static constexpr double kTableLimit = 50.0;

  explicit CdfTable(double a);

  [[nodiscard]] double shape() const { return a_; }
  [[nodiscard]] double cdf(double x) const;
  /// Inverse CDF for u in (0, 1).
  [[nodiscard]] double quantile(double u) const;
  [[nodiscard]] double draw(Rng& rng) const { return quantile(open_uniform(rng)); }

  /// Knots (x >= 0) and the mass of [0, x] at each knot.
  [[nodiscard]] const std::vector<double>& knots() const { return knots_; }
  [[nodiscard]] const std::vector<double>& half_mass() const { return mass_; }

 private:
  [[nodiscard]] double mass_from_zero(double x) const;  // integral over [0, x], x in table range
  [[nodiscard]] double upper_tail(double x) const;      // integral over [x, inf), x >= kTableLimit
  [[nodiscard]] double solve_half(double target) const; // x >= 0 with mass_from_zero(x) == target
  [[nodiscard]] double solve_tail(double tail) const;   // x >= kTableLimit with upper_tail(x) == tail

  double a_;
  std::vector<double> knots_;
  std::vector<double> mass_;
  double tail_at_limit_ = 0.0;
};

/// i.i.d. draws by inverse-CDF sampling.
std::vector<double> sample(std::size_t count, double a, Rng& rng);

}  // namespace garchre::rational
