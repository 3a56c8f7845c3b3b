#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "garchre/error.hpp"
#include "garchre/realized.hpp"
#include "garchre/simulate.hpp"

using namespace garchre;
using namespace std::chrono;

namespace {

Date ymd(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

IntradaySimulation constant_diffusion(std::size_t days, double noise, std::uint64_t seed, std::size_t steps = 4680) {
  DiffusionSpec spec;
  spec.calendar = SessionCalendar::single_session(hours{9} + minutes{30}, hours{16});
  spec.steps_per_day = steps;
  spec.daily_variance = {1e-4};
  spec.noise.variance = noise;
  return simulate_intraday(spec, days, seed);
}

}  // namespace

TEST_CASE("realized variance") {
  CHECK(realized_variance(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(realized_variance(std::vector<double>{0.01, -0.02}) == doctest::Approx(0.0005).epsilon(1e-14));
  CHECK(realized_variance(std::vector<double>{}) == 0.0);
}

TEST_CASE("hl factor") {
  const std::vector<double> r{0.01, -0.02, 0.03, 0.005};
  const double m = mean_of(r);
  std::vector<double> rv;
  for (double v : r) rv.push_back((v - m) * (v - m));
  CHECK(hl_factor(r, rv) == doctest::Approx(1.0).epsilon(1e-14));

  std::vector<double> half = rv;
  for (double& v : half) v *= 0.5;
  CHECK(hl_factor(r, half) == doctest::Approx(2.0 * hl_factor(r, rv)).epsilon(1e-14));

  const std::vector<double> zero(4, 0.0);
  CHECK_THROWS_AS(hl_factor(r, zero), Error);
  CHECK_THROWS_AS(hl_factor(r, std::vector<double>{1.0}), Error);
}

TEST_CASE("HL identity: mean of c RV equals the daily-return variance") {
  const std::vector<double> r{0.011, -0.023, 0.031, 0.004, -0.017};
  const std::vector<double> rv{1e-4, 3e-4, 2e-4, 5e-5, 7e-4};
  const double c = hl_factor(r, rv);
  const double m = mean_of(r);
  double var = 0.0;
  for (double v : r) var += (v - m) * (v - m);
  var /= static_cast<double>(r.size());
  double adj = 0.0;
  for (double v : rv) adj += c * v;
  CHECK(adj / static_cast<double>(rv.size()) == doctest::Approx(var).epsilon(1e-14));
}

TEST_CASE("alignment drops unmatched days") {
  const ReturnSeries returns({ymd(2006, 6, 5), ymd(2006, 6, 6), ymd(2006, 6, 7)}, {0.01, 0.02, 0.03});
  RvSeries rv;
  rv.dates = {ymd(2006, 6, 6), ymd(2006, 6, 7), ymd(2006, 6, 8)};
  rv.rv = {1e-4, 2e-4, 3e-4};
  const auto a = align_by_date(returns, rv);
  CHECK(a.dates.size() == 2);
  CHECK(a.dropped == 2);
  CHECK(a.returns[0] == 0.02);
  CHECK(a.rv[1] == 2e-4);
}

TEST_CASE("scale_to_daily_variance") {
  const std::vector<double> r{0.02, -0.02, 0.02, -0.02};  // variance 4e-4
  const std::vector<double> model{1e-4, 3e-4, 2e-4, 2e-4};  // mean 2e-4
  const auto scaled = scale_to_daily_variance(model, r);
  for (std::size_t i = 0; i < model.size(); ++i) CHECK(scaled[i] == doctest::Approx(2.0 * model[i]).epsilon(1e-14));

  const auto again = scale_to_daily_variance(scaled, r);
  for (std::size_t i = 0; i < model.size(); ++i) CHECK(again[i] == doctest::Approx(scaled[i]).epsilon(1e-14));

  std::vector<double> doubled = model;
  for (double& v : doubled) v *= 2.0;
  const auto same = scale_to_daily_variance(doubled, r);
  for (std::size_t i = 0; i < model.size(); ++i) CHECK(same[i] == doctest::Approx(scaled[i]).epsilon(1e-14));

  CHECK_THROWS_AS(scale_to_daily_variance(std::vector<double>(4, 0.0), r), Error);
}

TEST_CASE("rmspe") {
  const std::vector<double> crv{1e-4, 2e-4};
  CHECK(rmspe(crv, crv) == 0.0);
  CHECK(rmspe(std::vector<double>{2e-4}, std::vector<double>{1e-4}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rmspe(std::vector<double>{1.3, 1.4}, std::vector<double>{1.0, 1.0}) ==
        doctest::Approx(0.3535533906).epsilon(1e-9));
  CHECK(rmspe(std::vector<double>{1.3, 1.4}, std::vector<double>{1.0, 1.0}, RmspeForm::literal) ==
        doctest::Approx(0.5).epsilon(1e-14));
  // Invariant under a common rescaling.
  CHECK(rmspe(std::vector<double>{13.0, 14.0}, std::vector<double>{10.0, 10.0}) ==
        doctest::Approx(rmspe(std::vector<double>{1.3, 1.4}, std::vector<double>{1.0, 1.0})).epsilon(1e-14));
  try {
    rmspe(std::vector<double>{1.0, 1.0, 1.0}, std::vector<double>{1.0, 0.0, 0.0});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
    CHECK(std::string(e.what()).find("1, 2") != std::string::npos);
  }
}

TEST_CASE("RV of a day is the sum of its sessions") {
  DiffusionSpec spec;  // Tokyo sessions
  spec.steps_per_day = 16200;
  const auto sim = simulate_intraday(spec, 3, 12);
  const auto grid = resample_grid(sim.ticks, spec.calendar, seconds{60});
  const auto rv = realized_series(grid);
  for (std::size_t d = 0; d < grid.days.size(); ++d) {
    double by_session = 0.0;
    for (const auto& s : grid.days[d].sessions) {
      std::vector<double> r;
      for (std::size_t i = 1; i < s.size(); ++i) r.push_back(s[i] - s[i - 1]);
      by_session += realized_variance(r);
    }
    CHECK(rv.rv[d] == doctest::Approx(by_session).epsilon(1e-13));
  }
}

TEST_CASE("realized variance converges to the integrated variance") {
  const auto sim = constant_diffusion(200, 0.0, 31);
  const auto cal = SessionCalendar::single_session(hours{9} + minutes{30}, hours{16});
  const auto rv = realized_series(sim.ticks, cal, seconds{60});
  REQUIRE(rv.size() == 200);
  CHECK(std::fabs(rv.mean() / 1e-4 - 1.0) < 0.02);
}

TEST_CASE("signature curve") {
  const auto cal = SessionCalendar::single_session(hours{9} + minutes{30}, hours{16});
  const auto clean = constant_diffusion(150, 0.0, 8);
  const auto noisy = constant_diffusion(150, 2e-7, 8);
  const std::vector<seconds> deltas{seconds{5}, seconds{60}, seconds{300}, seconds{1800}};
  const auto flat = signature_curve(clean.ticks, cal, deltas);
  const auto rising = signature_curve(noisy.ticks, cal, deltas);
  REQUIRE(flat.points.size() == 4);
  for (const auto& p : flat.points) CHECK(std::fabs(p.average_rv / 1e-4 - 1.0) < 0.1);
  for (std::size_t i = 1; i < rising.points.size(); ++i) {
    CHECK(rising.points[i - 1].average_rv > rising.points[i].average_rv);
  }
  CHECK(rising.points[0].average_rv > 5.0 * flat.points[0].average_rv);
  CHECK_FALSE(flat.points[0].hl_factor.has_value());

  // One sampling period spanning the session: mean squared session return.
  const std::vector<seconds> whole{seconds{23400}};
  const auto one = signature_curve(clean.ticks, cal, whole);
  const auto closes = daily_closes(clean.ticks, cal);
  double ss = 0.0;
  const auto ticks = clean.ticks.ticks();
  std::size_t i = 0;
  for (const auto& e : closes.entries()) {
    const double open = ticks[i].price;
    while (i < ticks.size() && date_of(ticks[i].time) == e.date) ++i;
    const double r = std::log(e.close / open);
    ss += r * r;
  }
  REQUIRE(one.points.size() == 1);
  CHECK(one.points[0].average_rv == doctest::Approx(ss / static_cast<double>(closes.size())).epsilon(1e-12));
  CHECK_THROWS_AS(signature_curve(clean.ticks, cal, std::vector<seconds>{}), Error);
}

TEST_CASE("rmspe curve is zero when model variances equal adjusted RV") {
  const auto cal = SessionCalendar::single_session(hours{9} + minutes{30}, hours{16});
  DiffusionSpec spec;
  spec.calendar = cal;
  spec.steps_per_day = 4680;
  spec.daily_variance = {1e-4};
  spec.overnight_fraction = 0.3;
  const auto sim = simulate_intraday(spec, 60, 4);
  const auto daily = daily_log_returns(sim.daily);
  const std::vector<seconds> deltas{seconds{300}};
  const auto curve = signature_curve(sim.ticks, cal, deltas, &daily);
  const auto& series = curve.series[0];
  // Model path = c RV on the return dates.
  std::vector<double> model;
  for (const auto d : daily.dates()) {
    const auto it = std::find(series.dates.begin(), series.dates.end(), d);
    REQUIRE(it != series.dates.end());
    model.push_back(*series.hl_factor * series.rv[static_cast<std::size_t>(it - series.dates.begin())]);
  }
  const std::vector<std::vector<double>> models{model};
  const auto points = rmspe_curve(curve, daily, models);
  REQUIRE(points.size() == 1);
  CHECK(points[0].rmspe[0] < 1e-12);
  CHECK(points[0].days == daily.size());
}
