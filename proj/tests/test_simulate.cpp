#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "garchre/error.hpp"
#include "garchre/export.hpp"
#include "garchre/rational.hpp"
#include "garchre/realized.hpp"
#include "garchre/simulate.hpp"

using namespace garchre;
using namespace std::chrono;

namespace {

double sample_variance(std::span<const double> x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size());
}

SessionCalendar day_session() { return SessionCalendar::single_session(hours{9} + minutes{30}, hours{16}); }

}  // namespace

TEST_CASE("alpha = beta = 0 gives iid normal returns with variance omega") {
  Rng rng(11);
  const double omega = 1e-4;
  const auto path = simulate_garch(GarchParams::normal(omega, 0.0, 0.0), 100000, rng);
  const double v = sample_variance(path.returns.values());
  // Standard error of the sample variance: omega sqrt(2 / N).
  CHECK(std::fabs(v - omega) < 3.0 * omega * std::sqrt(2.0 / 1e5));
  for (double s : path.variance.variance) CHECK(s == omega);
}

TEST_CASE("GARCH-N with a finite fourth moment reaches its unconditional variance") {
  Rng rng(2024);
  // 3 alpha^2 + 2 alpha beta + beta^2 < 1, so the sample variance settles.
  const auto p = GarchParams::normal(2.8e-5, 0.1, 0.85);
  const auto path = simulate_garch(p, 100000, rng);
  const double target = p.omega / (1.0 - p.alpha - p.beta);
  CHECK(std::fabs(sample_variance(path.returns.values()) / target - 1.0) < 0.1);
  CHECK(path.variance.variance[0] == doctest::Approx(target).epsilon(1e-14));
}

TEST_CASE("rational GARCH standardized returns follow the rational law") {
  Rng rng(2025);
  const auto p = GarchParams::rational(2.8e-5, 0.132, 0.858, 1.57);
  const auto path = simulate_garch(p, 100000, rng);
  std::vector<double> z;
  for (std::size_t t = 0; t < path.returns.size(); ++t) {
    z.push_back(path.returns.values()[t] / std::sqrt(path.variance.variance[t]));
  }
  std::sort(z.begin(), z.end());
  const double n = static_cast<double>(z.size());
  double d = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double f = rational::cdf(z[i], 1.57);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  CHECK(d < 1.36 / std::sqrt(n));
  // Conditional variances follow the recursion exactly.
  const auto rebuilt = variance_path(p, path.returns.values(), path.variance.variance[0]);
  for (std::size_t t = 0; t < rebuilt.size(); t += 997) CHECK(rebuilt[t] == path.variance.variance[t]);
}

TEST_CASE("simulation is deterministic in the seed") {
  const auto p = GarchParams::rational(1.3e-5, 0.148, 0.836, 1.57);
  Rng a(8), b(8), c(9);
  const auto x = simulate_garch(p, 500, a);
  const auto y = simulate_garch(p, 500, b);
  const auto z = simulate_garch(p, 500, c);
  CHECK(std::equal(x.returns.values().begin(), x.returns.values().end(), y.returns.values().begin()));
  CHECK_FALSE(std::equal(x.returns.values().begin(), x.returns.values().end(), z.returns.values().begin()));

  MarketSpec spec;
  spec.days = 5;
  spec.steps_per_day = 270;
  spec.noise.variance = 1e-7;
  const auto m1 = simulate_market(spec, 3);
  const auto m2 = simulate_market(spec, 3);
  REQUIRE(m1.intraday.ticks.size() == m2.intraday.ticks.size());
  for (std::size_t i = 0; i < m1.intraday.ticks.size(); ++i) {
    CHECK(m1.intraday.ticks.ticks()[i].price == m2.intraday.ticks.ticks()[i].price);
  }
  CHECK_THROWS_AS(simulate_garch(GarchParams::normal(-1.0, 0.1, 0.8), 10, a), Error);
}

TEST_CASE("integrated variance is spot variance times trading seconds") {
  DiffusionSpec spec;
  spec.steps_per_day = 540;
  spec.daily_variance = {1e-4, 2e-4, 5e-5};
  spec.overnight_fraction = 0.25;
  const auto sim = simulate_intraday(spec, 3, 1);
  for (std::size_t t = 0; t < 3; ++t) {
    const double h = static_cast<double>(spec.calendar.trading_seconds(sim.dates[t]).count());
    CHECK(sim.integrated_variance[t] == sim.spot_variance[t] * h);
    CHECK(sim.integrated_variance[t] == doctest::Approx(0.75 * spec.daily_variance[t]).epsilon(1e-14));
  }
  // 540 steps over two sessions: one tick per step plus one at each open.
  CHECK(sim.ticks.size() == 3 * (540 + 2));
}

TEST_CASE("pinned market reproduces the GARCH returns from daily closes") {
  MarketSpec spec;
  spec.days = 40;
  spec.steps_per_day = 540;
  spec.overnight_fraction = 0.3;
  const auto sim = simulate_market(spec, 77);
  const auto daily = daily_log_returns(sim.intraday.daily);
  const auto y = sim.garch.returns.values();
  REQUIRE(daily.size() == y.size() - 1);
  for (std::size_t t = 0; t < daily.size(); ++t) CHECK(std::fabs(daily.values()[t] - y[t + 1]) < 1e-12);

  MarketSpec closes_only = spec;
  closes_only.steps_per_day = 0;
  const auto flat = simulate_market(closes_only, 77);
  CHECK(flat.intraday.ticks.empty());
  const auto r = daily_log_returns(flat.intraday.daily);
  for (std::size_t t = 0; t < r.size(); ++t) CHECK(std::fabs(r.values()[t] - y[t + 1]) < 1e-12);
}

TEST_CASE("changing the noise leaves the true path unchanged") {
  DiffusionSpec spec;
  spec.calendar = day_session();
  spec.steps_per_day = 390;
  const auto clean = simulate_intraday(spec, 4, 5);
  spec.noise.variance = 1e-7;
  const auto noisy = simulate_intraday(spec, 4, 5);
  double max_diff = 0.0;
  const auto a = clean.ticks.ticks();
  const auto b = noisy.ticks.ticks();
  REQUIRE(a.size() == b.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::log(b[i].price / a[i].price);
    ss += d * d;
    max_diff = std::max(max_diff, std::fabs(d));
  }
  // The difference is exactly the noise: variance rho^2.
  CHECK(ss / static_cast<double>(a.size()) == doctest::Approx(1e-7).epsilon(0.1));
  CHECK(max_diff < 10.0 * std::sqrt(1e-7));
}

TEST_CASE("pure noise: increments form an MA(1) with lag-one slope -1/2") {
  DiffusionSpec spec;
  spec.calendar = day_session();
  spec.steps_per_day = 23400;
  spec.daily_variance = {0.0};
  spec.noise.variance = 1e-6;
  const auto sim = simulate_intraday(spec, 20, 42);
  const auto ticks = sim.ticks.ticks();
  const double p0 = std::log(spec.initial_price);
  double sxx = 0.0, sxy = 0.0;
  double noise_ss = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 2; i < ticks.size(); ++i) {
    if (date_of(ticks[i].time) != date_of(ticks[i - 2].time)) continue;
    const double x = std::log(ticks[i - 1].price) - std::log(ticks[i - 2].price);
    const double y = std::log(ticks[i].price) - std::log(ticks[i - 1].price);
    sxx += x * x;
    sxy += x * y;
    const double xi = std::log(ticks[i].price) - p0;
    noise_ss += xi * xi;
    ++count;
  }
  CHECK(std::fabs(sxy / sxx + 0.5) < 0.01);
  CHECK(noise_ss / static_cast<double>(count) == doctest::Approx(1e-6).epsilon(0.02));

  // RV of pure noise with n returns has mean 2 n rho^2.
  const auto rv = realized_series(sim.ticks, spec.calendar, seconds{60});
  CHECK(rv.mean() == doctest::Approx(2.0 * 390.0 * 1e-6).epsilon(0.02));
}

TEST_CASE("overnight share sets the HL factor") {
  DiffusionSpec spec;
  spec.calendar = day_session();
  spec.steps_per_day = 780;
  spec.overnight_fraction = 0.5;
  const auto sim = simulate_intraday(spec, 2000, 19);
  const auto daily = daily_log_returns(sim.daily);
  const auto rv = realized_series(sim.ticks, spec.calendar, seconds{300});
  // 1 / (1 - f) = 2; relative sd of the estimate is about sqrt(2 / 2000).
  CHECK(std::fabs(hl_factor(daily, rv) - 2.0) < 0.1);
}

TEST_CASE("without noise or overnight gap, squared daily returns average the integrated variance") {
  MarketSpec spec;
  spec.days = 3000;
  spec.steps_per_day = 0;
  spec.params = GarchParams::normal(1e-5, 0.08, 0.9);
  const auto sim = simulate_market(spec, 6);
  const auto y = sim.garch.returns.values();
  double sq = 0.0, iv = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    sq += y[t] * y[t];
    iv += sim.intraday.integrated_variance[t];
  }
  CHECK(sq / iv == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("simulated prices survive a CSV round trip") {
  MarketSpec spec;
  spec.days = 50;
  spec.steps_per_day = 0;
  const auto sim = simulate_market(spec, 12);
  std::stringstream io;
  const std::vector<std::string> prov{"seed=12"};
  write_daily_prices(io, sim.intraday.daily, prov);
  const auto loaded = daily_log_returns(load_daily_prices(io));
  const auto y = sim.garch.returns.values();
  REQUIRE(loaded.size() == y.size() - 1);
  for (std::size_t t = 0; t < loaded.size(); ++t) CHECK(std::fabs(loaded.values()[t] - y[t + 1]) < 1e-12);
}

TEST_CASE("input validation") {
  DiffusionSpec spec;
  CHECK_THROWS_AS(simulate_intraday(spec, 0, 1), Error);
  spec.steps_per_day = 7;
  CHECK_THROWS_AS(simulate_intraday(spec, 1, 1), Error);
  spec.steps_per_day = 540;
  spec.overnight_fraction = 1.0;
  CHECK_THROWS_AS(simulate_intraday(spec, 1, 1), Error);
  spec.overnight_fraction = 0.0;
  spec.noise.variance = -1.0;
  CHECK_THROWS_AS(simulate_intraday(spec, 1, 1), Error);
}
