#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "garchre/garch.hpp"
#include "garchre/timeseries.hpp"

namespace garchre {

/// Sum of squared intraday returns; 0 for an empty day.
double realized_variance(std::span<const double> day_returns);

/// Per-day realized variance at one sampling period, optionally with the
/// HL adjustment factor c.
struct RvSeries {
  std::chrono::seconds delta{};
  std::vector<Date> dates;
  std::vector<double> rv;
  std::optional<double> hl_factor;

  [[nodiscard]] std::size_t size() const { return rv.size(); }
  /// c * rv per day; requires hl_factor.
  [[nodiscard]] std::vector<double> adjusted() const;
  [[nodiscard]] double mean() const;
};

RvSeries realized_series(const GridPrices& grid);
RvSeries realized_series(const TickSeries& ticks, const SessionCalendar& calendar, std::chrono::seconds delta);

/// Returns and realized variances restricted to the dates present in both.
struct AlignedDays {
  std::vector<Date> dates;
  std::vector<double> returns;
  std::vector<double> rv;
  std::size_t dropped = 0;  ///< days present in only one input
};

AlignedDays align_by_date(const ReturnSeries& returns, const RvSeries& rv);

/// c = sum (R_t - mean R)^2 / sum RV_t over aligned inputs.
double hl_factor(std::span<const double> daily_returns, std::span<const double> rv);
/// Aligns by date first; sets nothing on `rv`.
double hl_factor(const ReturnSeries& daily_returns, const RvSeries& rv);

struct SignaturePoint {
  std::chrono::seconds delta{};
  double average_rv = 0.0;
  std::optional<double> hl_factor;
  std::size_t days = 0;
};

struct SignatureCurve {
  std::vector<SignaturePoint> points;
  std::vector<RvSeries> series;  ///< per delta, with hl_factor set when daily returns were given
  std::vector<std::string> warnings;
};

/// For each delta: resample, realized variance per day, average over days,
/// and c(delta) against `daily_returns` when provided.
SignatureCurve signature_curve(const TickSeries& ticks, const SessionCalendar& calendar,
                               std::span<const std::chrono::seconds> deltas,
                               const ReturnSeries* daily_returns = nullptr);

/// Multiplies model variances so their mean equals the daily-return variance
/// (1/N) sum (R_t - mean R)^2.
std::vector<double> scale_to_daily_variance(std::span<const double> model_variance,
                                            std::span<const double> daily_returns);
VolSeries scale_to_daily_variance(const VolSeries& model_variance, const ReturnSeries& daily_returns);

enum class RmspeForm {
  mean,           ///< sqrt((1/N) sum e_t^2)
  literal,  ///< sqrt(sum e_t^2)
};

/// Root of the (mean) squared relative error (model - cRV) / cRV.
/// Throws a domain error listing indices where cRV is not positive.
double rmspe(std::span<const double> scaled_model_variance, std::span<const double> adjusted_rv,
             RmspeForm form = RmspeForm::mean);

struct RmspePoint {
  std::chrono::seconds delta{};
  double hl_factor = 0.0;
  std::vector<double> rmspe;  ///< one per model
  std::size_t days = 0;
};

/// Date-aligned RMSPE of each model's variance path against c(delta)-adjusted
/// RV, for every delta. Each model path is aligned to `daily_returns`.
std::vector<RmspePoint> rmspe_curve(const SignatureCurve& curve, const ReturnSeries& daily_returns,
                                    std::span<const std::vector<double>> model_variances,
                                    RmspeForm form = RmspeForm::mean);

}  // namespace garchre
