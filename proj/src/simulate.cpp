#include "garchre/simulate.hpp"

#include <cmath>
#include <optional>

#include "garchre/error.hpp"
#include "garchre/rational.hpp"

namespace garchre {

using namespace std::chrono;

namespace {

enum Stream : std::uint64_t { kDiffusion = 1, kNoise = 2, kOvernight = 3, kGarch = 4, kIntraday = 5 };

}  // namespace

GarchPath simulate_garch(const GarchParams& params, std::span<const Date> dates, Rng& rng) {
  if (!is_admissible(params)) {
    throw Error(ErrorKind::domain, "cannot simulate: need omega > 0, alpha >= 0, beta >= 0, a > 0");
  }
  const std::size_t length = dates.size();
  if (length == 0) throw Error(ErrorKind::invalid_argument, "simulation length must be at least 1");

  std::vector<double> y(length), s2(length);
  s2[0] = params.persistence() < 1.0 ? params.omega / (1.0 - params.persistence()) : params.omega;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::optional<rational::CdfTable> table;
  if (params.law == ErrorLaw::rational) table.emplace(params.shape);
  for (std::size_t t = 0; t < length; ++t) {
    if (t > 0) s2[t] = params.omega + params.alpha * y[t - 1] * y[t - 1] + params.beta * s2[t - 1];
    const double eps = table ? table->draw(rng) : normal(rng);
    y[t] = std::sqrt(s2[t]) * eps;
  }
  std::vector<Date> d(dates.begin(), dates.end());
  GarchPath path{ReturnSeries(d, std::move(y)), VolSeries{d, std::move(s2)}};
  return path;
}

GarchPath simulate_garch(const GarchParams& params, std::size_t length, Rng& rng, Date start) {
  if (length == 0) throw Error(ErrorKind::invalid_argument, "simulation length must be at least 1");
  const auto dates = business_days(start, length);
  return simulate_garch(params, dates, rng);
}

IntradaySimulation simulate_intraday(const DiffusionSpec& spec, std::size_t days, std::uint64_t seed) {
  if (days == 0) throw Error(ErrorKind::invalid_argument, "simulate at least one day");
  if (spec.steps_per_day == 0) throw Error(ErrorKind::invalid_argument, "steps_per_day must be positive");
  if (spec.daily_variance.empty() || (spec.daily_variance.size() != 1 && spec.daily_variance.size() < days)) {
    throw Error(ErrorKind::invalid_argument, "daily_variance needs one entry or one per day");
  }
  if (!spec.pinned_returns.empty() && spec.pinned_returns.size() < days) {
    throw Error(ErrorKind::invalid_argument, "pinned_returns needs one entry per day");
  }
  if (!(spec.overnight_fraction >= 0.0 && spec.overnight_fraction < 1.0)) {
    throw Error(ErrorKind::invalid_argument, "overnight_fraction must lie in [0, 1)");
  }
  if (!(spec.noise.variance >= 0.0)) throw Error(ErrorKind::invalid_argument, "noise variance must be >= 0");
  if (!(spec.initial_price > 0.0)) throw Error(ErrorKind::invalid_argument, "initial price must be positive");

  IntradaySimulation out;
  out.dates = spec.calendar.trading_days(spec.start, days);
  out.spot_variance.reserve(days);
  out.integrated_variance.reserve(days);

  std::vector<Tick> ticks;
  ticks.reserve(days * (spec.steps_per_day + 2));
  std::vector<DailyPrice> closes;
  closes.reserve(days);

  const double noise_sd = std::sqrt(spec.noise.variance);
  double close_log_price = std::log(spec.initial_price);
  std::vector<double> path;  // true in-session log-price offsets from the open, per step

  for (std::size_t t = 0; t < days; ++t) {
    const Date date = out.dates[t];
    const auto sessions = spec.calendar.sessions_on(date);
    const auto trading = spec.calendar.trading_seconds(date);
    if (trading.count() % static_cast<std::int64_t>(spec.steps_per_day) != 0) {
      throw Error(ErrorKind::invalid_argument, "steps_per_day does not split the trading day into whole seconds");
    }
    const seconds step{trading.count() / static_cast<std::int64_t>(spec.steps_per_day)};
    for (const auto& s : sessions) {
      if (s.length().count() % step.count() != 0) {
        throw Error(ErrorKind::invalid_argument, "simulation step does not divide every session");
      }
    }

    const double total_var = spec.daily_variance.size() == 1 ? spec.daily_variance[0] : spec.daily_variance[t];
    if (!(total_var >= 0.0)) throw Error(ErrorKind::invalid_argument, "daily variance must be non-negative");
    const double h = static_cast<double>(trading.count());
    const double spot = (1.0 - spec.overnight_fraction) * total_var / h;
    out.spot_variance.push_back(spot);
    out.integrated_variance.push_back(spot * h);

    Rng diffusion = derive_stream(seed, {t, kDiffusion});
    Rng noise = derive_stream(seed, {t, kNoise});
    Rng overnight = derive_stream(seed, {t, kOvernight});
    std::normal_distribution<double> normal(0.0, 1.0);

    const double gap = spec.overnight_fraction > 0.0
                           ? std::sqrt(spec.overnight_fraction * total_var) * normal(overnight)
                           : 0.0;
    const std::size_t n = spec.steps_per_day;
    const double step_sd = std::sqrt(spot * static_cast<double>(step.count()));
    path.assign(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k) path[k] = path[k - 1] + step_sd * normal(diffusion);
    if (!spec.pinned_returns.empty()) {
      // Brownian bridge to the in-session part of the pinned return.
      const double target = spec.pinned_returns[t] - gap;
      const double excess = path[n] - target;
      for (std::size_t k = 1; k <= n; ++k) path[k] -= excess * static_cast<double>(k) / static_cast<double>(n);
      path[n] = target;
    }

    const double open_log_price = close_log_price + gap;
    std::size_t k = 0;
    double last_observed = 0.0;
    const sys_days midnight{date};
    for (const auto& s : sessions) {
      const auto steps = s.length() / step;
      for (std::int64_t j = 0; j <= steps; ++j) {
        if (j > 0) ++k;
        const double observed = open_log_price + path[k] + noise_sd * normal(noise);
        last_observed = std::exp(observed);
        ticks.push_back({midnight + s.open + j * step, last_observed});
      }
    }
    close_log_price = open_log_price + path[n];
    closes.push_back({date, last_observed});
  }
  out.ticks = TickSeries(std::move(ticks));
  out.daily = DailyPriceSeries(std::move(closes));
  return out;
}

MarketSimulation simulate_market(const MarketSpec& spec, std::uint64_t seed) {
  if (spec.days == 0) throw Error(ErrorKind::invalid_argument, "simulate at least one day");
  const auto dates = spec.calendar.trading_days(spec.start, spec.days);
  Rng garch_rng = derive_stream(seed, {kGarch});
  MarketSimulation sim{simulate_garch(spec.params, dates, garch_rng), {}};

  if (spec.steps_per_day == 0) {
    // Daily prices only.
    sim.intraday.dates = dates;
    std::vector<DailyPrice> closes;
    double log_price = std::log(spec.initial_price);
    const auto y = sim.garch.returns.values();
    for (std::size_t t = 0; t < dates.size(); ++t) {
      log_price += y[t];
      closes.push_back({dates[t], std::exp(log_price)});
      const double integrated = (1.0 - spec.overnight_fraction) * sim.garch.variance.variance[t];
      const double h = static_cast<double>(spec.calendar.trading_seconds(dates[t]).count());
      sim.intraday.spot_variance.push_back(integrated / h);
      sim.intraday.integrated_variance.push_back(sim.intraday.spot_variance.back() * h);
    }
    sim.intraday.daily = DailyPriceSeries(std::move(closes));
    return sim;
  }

  DiffusionSpec diffusion;
  diffusion.calendar = spec.calendar;
  diffusion.steps_per_day = spec.steps_per_day;
  diffusion.daily_variance = sim.garch.variance.variance;
  diffusion.pinned_returns.assign(sim.garch.returns.values().begin(), sim.garch.returns.values().end());
  diffusion.noise = spec.noise;
  diffusion.overnight_fraction = spec.overnight_fraction;
  diffusion.start = spec.start;
  diffusion.initial_price = spec.initial_price;
  const auto intraday_seed = derive_stream(seed, {kIntraday})();
  sim.intraday = simulate_intraday(diffusion, spec.days, intraday_seed);
  return sim;
}

}  // namespace garchre
