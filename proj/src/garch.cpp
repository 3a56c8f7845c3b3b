#include "garchre/garch.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "garchre/error.hpp"

namespace garchre {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;  // ln(2 pi)

}  // namespace

bool is_admissible(const GarchParams& p) {
  const bool core = p.omega > 0.0 && p.alpha >= 0.0 && p.beta >= 0.0 && std::isfinite(p.omega) &&
                    std::isfinite(p.alpha) && std::isfinite(p.beta);
  if (!core) return false;
  return p.law == ErrorLaw::normal || (p.shape > 0.0 && std::isfinite(p.shape));
}

namespace {

void require_admissible(const GarchParams& p) {
  if (!is_admissible(p)) {
    throw Error(ErrorKind::domain,
                "GARCH parameters out of domain (need omega > 0, alpha >= 0, beta >= 0, a > 0)");
  }
}

// Accumulates the log-likelihood; returns the index of the first non-finite
// contribution through `bad`, or leaves it untouched.
double accumulate(const GarchParams& p, std::span<const double> y, double init, std::size_t& bad) {
  const std::size_t n = y.size();
  double s2 = init;
  double sum = 0.0;
  if (p.law == ErrorLaw::normal) {
    for (std::size_t t = 0; t < n; ++t) {
      if (t > 0) s2 = p.omega + p.alpha * y[t - 1] * y[t - 1] + p.beta * s2;
      const double term = -0.5 * (kLogTwoPi + std::log(s2) + y[t] * y[t] / s2);
      if (!std::isfinite(term)) {
        bad = t;
        return -std::numeric_limits<double>::infinity();
      }
      sum += term;
    }
    return sum;
  }

  // log p(z) - 0.5 ln s2 with z^2 = y^2 / s2; the constant ln(a / pi) is added once.
  const double a2 = p.shape * p.shape;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) s2 = p.omega + p.alpha * y[t - 1] * y[t - 1] + p.beta * s2;
    const double z2 = y[t] * y[t] / s2;
    const double d = z2 - 1.0;
    const double term = -std::log(d * d + a2 * z2) - 0.5 * std::log(s2);
    if (!std::isfinite(term)) {
      bad = t;
      return -std::numeric_limits<double>::infinity();
    }
    sum += term;
  }
  return sum + static_cast<double>(n) * std::log(p.shape / std::numbers::pi);
}

}  // namespace

ConstraintReport check_constraints(const GarchParams& params) {
  ConstraintReport r;
  r.valid = params.omega > 0.0 && params.alpha > 0.0 && params.beta > 0.0 &&
            std::isfinite(params.omega) && std::isfinite(params.alpha) && std::isfinite(params.beta);
  if (!r.valid) r.messages.emplace_back("positivity violated: need omega > 0, alpha > 0, beta > 0");
  if (params.law == ErrorLaw::rational) {
    if (!(params.shape > 0.0) || !std::isfinite(params.shape)) {
      r.valid = false;
      r.messages.emplace_back("rational law requires a > 0");
    } else if (params.shape * params.shape < 2.0) {
      r.off_origin_mode = true;
      r.messages.emplace_back("warning: a < sqrt(2), error density has two off-origin maxima");
    }
  }
  if (params.alpha + params.beta >= 1.0) {
    r.nonstationary = true;
    r.messages.emplace_back("warning: alpha + beta >= 1, variance process is not covariance-stationary");
  }
  return r;
}

double default_init_variance(std::span<const double> returns) {
  if (returns.empty()) throw Error(ErrorKind::insufficient_data, "empty return series");
  double mean = 0.0;
  for (double v : returns) mean += v;
  mean /= static_cast<double>(returns.size());
  double ss = 0.0;
  for (double v : returns) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(returns.size());
  if (!(var > 0.0)) throw Error(ErrorKind::domain, "return series has zero variance");
  return var;
}

std::vector<double> variance_path(const GarchParams& params, std::span<const double> returns,
                                  double init_variance) {
  require_admissible(params);
  if (returns.empty()) throw Error(ErrorKind::insufficient_data, "empty return series");
  if (!(init_variance > 0.0) || !std::isfinite(init_variance)) {
    throw Error(ErrorKind::domain, "initial variance must be positive");
  }
  std::vector<double> out(returns.size());
  out[0] = init_variance;
  for (std::size_t t = 1; t < returns.size(); ++t) {
    out[t] = params.omega + params.alpha * returns[t - 1] * returns[t - 1] + params.beta * out[t - 1];
  }
  return out;
}

VolSeries volatility_recursion(const GarchParams& params, const ReturnSeries& returns, double init_variance) {
  VolSeries v;
  v.variance = variance_path(params, returns.values(), init_variance);
  v.dates.assign(returns.dates().begin(), returns.dates().end());
  return v;
}

double log_likelihood(const GarchParams& params, std::span<const double> returns, double init_variance) {
  require_admissible(params);
  if (returns.empty()) throw Error(ErrorKind::insufficient_data, "empty return series");
  if (!(init_variance > 0.0) || !std::isfinite(init_variance)) {
    throw Error(ErrorKind::domain, "initial variance must be positive");
  }
  std::size_t bad = returns.size();
  const double ll = accumulate(params, returns, init_variance, bad);
  if (bad < returns.size()) {
    throw NumericalError("non-finite log-likelihood contribution at observation " + std::to_string(bad), bad);
  }
  return ll;
}

double log_likelihood(const GarchParams& params, const ReturnSeries& returns, std::optional<double> init_variance) {
  const double init = init_variance ? *init_variance : default_init_variance(returns.values());
  return log_likelihood(params, returns.values(), init);
}

namespace detail {

double log_likelihood_or_neg_inf(const GarchParams& params, std::span<const double> returns,
                                 double init_variance) noexcept {
  if (!is_admissible(params) || returns.empty()) return -std::numeric_limits<double>::infinity();
  std::size_t bad = returns.size();
  const double ll = accumulate(params, returns, init_variance, bad);
  return std::isfinite(ll) ? ll : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

}  // namespace garchre
