#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "garchre/timeseries.hpp"

namespace garchre {

enum class ErrorLaw { normal, rational };

/// GARCH(1,1) parameters: sigma2_t = omega + alpha * y_{t-1}^2 + beta * sigma2_{t-1},
/// y_t = sigma_t * eps_t with eps_t following `law`. `shape` is the rational
/// law's a and is ignored for the normal law.
struct GarchParams {
  double omega = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  ErrorLaw law = ErrorLaw::normal;
  double shape = 0.0;

  static GarchParams normal(double omega, double alpha, double beta) {
    return {omega, alpha, beta, ErrorLaw::normal, 0.0};
  }
  static GarchParams rational(double omega, double alpha, double beta, double a) {
    return {omega, alpha, beta, ErrorLaw::rational, a};
  }

  [[nodiscard]] double persistence() const { return alpha + beta; }
};

struct ConstraintReport {
  bool valid = false;
  bool nonstationary = false;  ///< alpha + beta >= 1
  bool off_origin_mode = false;  ///< rational law with a^2 < 2
  std::vector<std::string> messages;
};

/// Strict positivity omega, alpha, beta (and a) > 0. Stationarity and the
/// rational-law mode location only produce warnings.
ConstraintReport check_constraints(const GarchParams& params);

/// Conditional variances aligned with a return series.
struct VolSeries {
  std::vector<Date> dates;
  std::vector<double> variance;

  [[nodiscard]] std::size_t size() const { return variance.size(); }
};

/// omega > 0, alpha >= 0, beta >= 0 (and a > 0): the domain on which the
/// recursion keeps every variance positive. Weaker than check_constraints.
bool is_admissible(const GarchParams& params);

/// Sample variance (1/N) of the returns; the default sigma2_1.
double default_init_variance(std::span<const double> returns);

/// sigma2_1 = init_variance, then the GARCH(1,1) recursion. Requires omega > 0
/// and alpha, beta >= 0 so every entry is at least min(omega, init_variance).
std::vector<double> variance_path(const GarchParams& params, std::span<const double> returns,
                                  double init_variance);

VolSeries volatility_recursion(const GarchParams& params, const ReturnSeries& returns,
                               double init_variance);

/// Conditional log-likelihood given sigma2_1. Throws NumericalError naming the
/// first observation whose contribution is not finite.
double log_likelihood(const GarchParams& params, std::span<const double> returns, double init_variance);
double log_likelihood(const GarchParams& params, const ReturnSeries& returns,
                      std::optional<double> init_variance = std::nullopt);

namespace detail {
/// Non-throwing likelihood for samplers: -inf for inadmissible parameters or
/// non-finite intermediate values.
double log_likelihood_or_neg_inf(const GarchParams& params, std::span<const double> returns,
                                 double init_variance) noexcept;
}  // namespace detail

}  // namespace garchre
