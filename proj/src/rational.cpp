#include "garchre/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "garchre/error.hpp"
#include "quadrature.hpp"

namespace garchre::rational {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadTol = 1e-14;

// (x^2 - 1)^2 + a^2 x^2, the cancellation-free form of 1 + (a^2 - 2) x^2 + x^4.
inline double denominator(double x, double a) {
  const double x2 = x * x;
  const double d = x2 - 1.0;
  return d * d + a * a * x2;
}

inline double density(double x, double a) { return a / (kPi * denominator(x, a)); }

// Mass of [0, x] for x >= 0. Beyond x = 1 the substitution x -> 1/s maps the
// remaining range onto [1/x, 1] with integrand s^2 p(s), which stays bounded.
double half_mass_direct(double x, double a) {
  const auto p = [a](double t) { return density(t, a); };
  if (x <= 1.0) return detail::adaptive_integrate(p, 0.0, x, kQuadTol);
  const auto q = [a](double s) { return s * s * density(s, a); };
  const double lo = std::isinf(x) ? 0.0 : 1.0 / x;
  return detail::adaptive_integrate(p, 0.0, 1.0, kQuadTol) +
         detail::adaptive_integrate(q, lo, 1.0, kQuadTol);
}

}  // namespace

void require_valid_shape(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(ErrorKind::domain, "rational error law requires a > 0, got " + std::to_string(a));
  }
}

double pdf(double x, double a) {
  require_valid_shape(a);
  return density(x, a);
}

double log_pdf(double x, double a) {
  require_valid_shape(a);
  const double ax = std::abs(x);
  if (ax > 1e50) {
    // x^4 would overflow; factor it out.
    const double u = 1.0 / (ax * ax);
    const double d = 1.0 - u;
    return std::log(a / kPi) - 4.0 * std::log(ax) - std::log(d * d + a * a * u);
  }
  return std::log(a / kPi) - std::log(denominator(x, a));
}

double cdf(double x, double a) {
  require_valid_shape(a);
  if (std::isnan(x)) return x;
  if (x == 0.0) return 0.5;
  const double m = half_mass_direct(std::abs(x), a);
  return x > 0.0 ? std::min(1.0, 0.5 + m) : std::max(0.0, 0.5 - m);
}

bool unimodal_at_origin(double a) {
  require_valid_shape(a);
  return a * a >= 2.0;
}

double variance_check(double a) {
  require_valid_shape(a);
  // Over [1, inf), x -> 1/s turns x^2 p(x) dx into p(s) ds on [0, 1].
  const auto p = [a](double t) { return density(t, a); };
  const auto x2p = [a](double t) { return t * t * density(t, a); };
  return 2.0 * (detail::adaptive_integrate(x2p, 0.0, 1.0, kQuadTol) +
                detail::adaptive_integrate(p, 0.0, 1.0, kQuadTol));
}

double normalization_check(double a) {
  require_valid_shape(a);
  return 2.0 * half_mass_direct(std::numeric_limits<double>::infinity(), a);
}

// ---------------------------------------------------------------------------

CdfTable::CdfTable(double a) : a_(a) {
  require_valid_shape(a);
  for (int i = 0; i <= 200; ++i) knots_.push_back(0.025 * i);
  while (knots_.back() < kTableLimit) knots_.push_back(std::min(kTableLimit, knots_.back() * 1.025));

  const auto p = [a](double t) { return density(t, a); };
  mass_.resize(knots_.size());
  mass_[0] = 0.0;
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    mass_[k] = mass_[k - 1] + detail::adaptive_integrate(p, knots_[k - 1], knots_[k], kQuadTol);
  }
  tail_at_limit_ = upper_tail(kTableLimit);
}

double CdfTable::mass_from_zero(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const auto p = [a = a_](double t) { return density(t, a); };
  return mass_[k] + detail::adaptive_integrate(p, knots_[k], x, kQuadTol);
}

double CdfTable::upper_tail(double x) const {
  // p(t) = (a/pi) t^-4 / (1 + b t^-2 + t^-4) with b = a^2 - 2; expand the
  // reciprocal as sum c_n t^-2n (c_0 = 1, c_1 = -b, c_n = -b c_{n-1} - c_{n-2})
  // and integrate term by term.
  const double b = a_ * a_ - 2.0;
  const double inv2 = 1.0 / (x * x);
  double c_prev = 1.0, c = -b;
  double power = 1.0 / (x * x * x);
  double sum = power / 3.0;
  for (int n = 1; n < 10; ++n) {
    power *= inv2;
    sum += c * power / (2.0 * n + 3.0);
    const double next = -b * c - c_prev;
    c_prev = c;
    c = next;
  }
  return a_ / kPi * sum;
}

double CdfTable::cdf(double x) const {
  if (std::isnan(x)) return x;
  if (x == 0.0) return 0.5;
  const double ax = std::abs(x);
  if (ax >= kTableLimit) {
    const double tail = std::isinf(ax) ? 0.0 : upper_tail(ax);
    return x > 0.0 ? 1.0 - tail : tail;
  }
  const double m = mass_from_zero(ax);
  return x > 0.0 ? 0.5 + m : 0.5 - m;
}

double CdfTable::solve_half(double target) const {
  if (target <= 0.0) return 0.0;
  if (target >= mass_.back()) return kTableLimit;
  const auto it = std::upper_bound(mass_.begin(), mass_.end(), target);
  const std::size_t k = static_cast<std::size_t>(it - mass_.begin()) - 1;
  const double lo = knots_[k], hi = knots_[k + 1];
  const double base = mass_[k];
  const auto p = [a = a_](double t) { return density(t, a); };
  const auto excess = [&](double x) { return base + detail::adaptive_integrate(p, lo, x, kQuadTol) - target; };

  // Newton on the segment, falling back to bisection when a step leaves the bracket.
  double x = lo + (hi - lo) * (target - base) / (mass_[k + 1] - base);
  double bracket_lo = lo, bracket_hi = hi;
  for (int iter = 0; iter < 60; ++iter) {
    const double f = excess(x);
    if (f > 0.0) bracket_hi = x; else bracket_lo = x;
    double next = x - f / density(x, a_);
    if (!(next > bracket_lo && next < bracket_hi)) next = 0.5 * (bracket_lo + bracket_hi);
    if (std::abs(next - x) <= 1e-15 * (1.0 + x)) return next;
    x = next;
  }
  return x;
}

double CdfTable::solve_tail(double tail) const {
  double x = std::cbrt(a_ / (3.0 * kPi * tail));
  x = std::max(x, kTableLimit);
  for (int iter = 0; iter < 50; ++iter) {
    const double step = (upper_tail(x) - tail) / density(x, a_);
    const double next = std::max(kTableLimit, x + step);
    if (std::abs(next - x) <= 1e-15 * x) return next;
    x = next;
  }
  return x;
}

double CdfTable::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw Error(ErrorKind::domain, "quantile requires u in (0, 1)");
  }
  if (u == 0.5) return 0.0;
  const bool upper = u > 0.5;
  const double side = upper ? 1.0 - u : u;  // probability beyond |x| on that side
  const double magnitude = side <= tail_at_limit_ ? solve_tail(side) : solve_half(0.5 - side);
  return upper ? magnitude : -magnitude;
}

std::vector<double> sample(std::size_t count, double a, Rng& rng) {
  std::vector<double> out;
  if (count == 0) return out;
  const CdfTable table(a);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(table.draw(rng));
  return out;
}

}  // namespace garchre::rational
