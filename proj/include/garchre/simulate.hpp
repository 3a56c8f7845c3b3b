#pragma once

#include <cstdint>
#include <vector>

#include "garchre/garch.hpp"
#include "garchre/random.hpp"
#include "garchre/timeseries.hpp"

namespace garchre {

/// Independent observation noise on log-prices with variance rho^2.
struct NoiseModel {
  double variance = 0.0;
};

struct GarchPath {
  ReturnSeries returns;
  VolSeries variance;  ///< true conditional variances
};

/// y_t = sigma_t eps_t with the GARCH(1,1) recursion driven by its own draws.
/// sigma2_1 = omega / (1 - alpha - beta) when alpha + beta < 1, else omega.
/// Returns are dated by consecutive business days from `start`.
GarchPath simulate_garch(const GarchParams& params, std::size_t length, Rng& rng,
                         Date start = Date{std::chrono::year{2006}, std::chrono::June, std::chrono::day{5}});
GarchPath simulate_garch(const GarchParams& params, std::span<const Date> dates, Rng& rng);

/// Piecewise-constant spot volatility per day inside the sessions of
/// `calendar`. Day t has close-to-close variance daily_variance[t] (a single
/// entry applies to every day); a share `overnight_fraction` of it is an
/// overnight Gaussian gap and the rest is diffused evenly over the trading
/// seconds, so the in-session integrated variance is
/// (1 - overnight_fraction) * daily_variance[t]. Prices do not move during
/// breaks between sessions.
///
/// When `pinned_returns` is set, each day's true close-to-close log return is
/// reproduced exactly by running the in-session path as a Brownian bridge.
struct DiffusionSpec {
  SessionCalendar calendar = SessionCalendar::tokyo();
  std::size_t steps_per_day = 16200;  ///< must split every session into whole seconds
  std::vector<double> daily_variance{1e-4};
  std::vector<double> pinned_returns;
  NoiseModel noise;
  double overnight_fraction = 0.0;
  Date start{std::chrono::year{2006}, std::chrono::June, std::chrono::day{5}};
  double initial_price = 1000.0;
};

struct IntradaySimulation {
  TickSeries ticks;               ///< observed (noisy) prices, one tick per step plus one at each session open
  DailyPriceSeries daily;         ///< last observed price of each day
  std::vector<Date> dates;
  std::vector<double> spot_variance;        ///< per second, per day
  std::vector<double> integrated_variance;  ///< spot_variance * trading seconds, per day
};

/// Every day draws from its own streams derived from `seed`, so a day's path
/// does not depend on the others, and the diffusion, noise and overnight draws
/// are separate streams: changing the noise variance leaves the true path unchanged.
IntradaySimulation simulate_intraday(const DiffusionSpec& spec, std::size_t days, std::uint64_t seed);

struct MarketSpec {
  GarchParams params = GarchParams::rational(1.3e-5, 0.148, 0.836, 1.57);
  std::size_t days = 500;
  NoiseModel noise;
  double overnight_fraction = 0.0;
  std::size_t steps_per_day = 3240;  ///< 0: daily prices only, no ticks
  SessionCalendar calendar = SessionCalendar::tokyo();
  Date start{std::chrono::year{2006}, std::chrono::June, std::chrono::day{5}};
  double initial_price = 1000.0;
};

struct MarketSimulation {
  GarchPath garch;  ///< dated by trading day; return t is day t's true close-to-close return
  IntradaySimulation intraday;
};

/// GARCH daily returns and variances, then an intraday path pinned to them.
MarketSimulation simulate_market(const MarketSpec& spec, std::uint64_t seed);

}  // namespace garchre
