#include "garchre/realized.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "garchre/error.hpp"

namespace garchre {

namespace {

double centered_sum_squares(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss;
}

}  // namespace

double realized_variance(std::span<const double> day_returns) {
  double s = 0.0;
  for (double r : day_returns) s += r * r;
  return s;
}

std::vector<double> RvSeries::adjusted() const {
  if (!hl_factor) throw Error(ErrorKind::invalid_argument, "RV series has no HL factor");
  std::vector<double> out(rv.size());
  for (std::size_t i = 0; i < rv.size(); ++i) out[i] = *hl_factor * rv[i];
  return out;
}

double RvSeries::mean() const {
  if (rv.empty()) return 0.0;
  return std::accumulate(rv.begin(), rv.end(), 0.0) / static_cast<double>(rv.size());
}

RvSeries realized_series(const GridPrices& grid) {
  RvSeries out;
  out.delta = grid.delta;
  for (const auto& day : intraday_returns(grid)) {
    out.dates.push_back(day.date);
    out.rv.push_back(realized_variance(day.returns));
  }
  return out;
}

RvSeries realized_series(const TickSeries& ticks, const SessionCalendar& calendar, std::chrono::seconds delta) {
  return realized_series(resample_grid(ticks, calendar, delta));
}

AlignedDays align_by_date(const ReturnSeries& returns, const RvSeries& rv) {
  AlignedDays out;
  const auto rd = returns.dates();
  const auto rvals = returns.values();
  std::size_t i = 0, j = 0;
  while (i < rd.size() && j < rv.dates.size()) {
    if (rd[i] < rv.dates[j]) {
      ++i;
      ++out.dropped;
    } else if (rv.dates[j] < rd[i]) {
      ++j;
      ++out.dropped;
    } else {
      out.dates.push_back(rd[i]);
      out.returns.push_back(rvals[i]);
      out.rv.push_back(rv.rv[j]);
      ++i;
      ++j;
    }
  }
  out.dropped += (rd.size() - i) + (rv.dates.size() - j);
  return out;
}

double hl_factor(std::span<const double> daily_returns, std::span<const double> rv) {
  if (daily_returns.size() != rv.size()) {
    throw Error(ErrorKind::invalid_argument, "HL factor needs the same days in both inputs");
  }
  const double rv_sum = std::accumulate(rv.begin(), rv.end(), 0.0);
  if (!(rv_sum > 0.0)) throw Error(ErrorKind::domain, "HL factor undefined: realized variances sum to zero");
  return centered_sum_squares(daily_returns) / rv_sum;
}

double hl_factor(const ReturnSeries& daily_returns, const RvSeries& rv) {
  const auto aligned = align_by_date(daily_returns, rv);
  return hl_factor(aligned.returns, aligned.rv);
}

SignatureCurve signature_curve(const TickSeries& ticks, const SessionCalendar& calendar,
                               std::span<const std::chrono::seconds> deltas, const ReturnSeries* daily_returns) {
  if (deltas.empty()) throw Error(ErrorKind::invalid_argument, "signature curve needs at least one sampling period");
  SignatureCurve curve;
  for (const auto delta : deltas) {
    auto grid = resample_grid(ticks, calendar, delta);
    if (curve.warnings.empty()) curve.warnings = std::move(grid.warnings);
    RvSeries series = realized_series(grid);
    SignaturePoint point{delta, series.mean(), std::nullopt, series.size()};
    if (daily_returns != nullptr) {
      series.hl_factor = hl_factor(*daily_returns, series);
      point.hl_factor = series.hl_factor;
    }
    curve.points.push_back(point);
    curve.series.push_back(std::move(series));
  }
  return curve;
}

std::vector<double> scale_to_daily_variance(std::span<const double> model_variance,
                                            std::span<const double> daily_returns) {
  if (model_variance.size() != daily_returns.size() || model_variance.empty()) {
    throw Error(ErrorKind::invalid_argument, "model variances and daily returns must be aligned and non-empty");
  }
  const double n = static_cast<double>(model_variance.size());
  const double model_mean = std::accumulate(model_variance.begin(), model_variance.end(), 0.0) / n;
  if (!(model_mean > 0.0)) throw Error(ErrorKind::domain, "mean model variance is zero");
  const double factor = (centered_sum_squares(daily_returns) / n) / model_mean;
  std::vector<double> out(model_variance.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = model_variance[i] * factor;
  return out;
}

VolSeries scale_to_daily_variance(const VolSeries& model_variance, const ReturnSeries& daily_returns) {
  if (!std::equal(model_variance.dates.begin(), model_variance.dates.end(), daily_returns.dates().begin(),
                  daily_returns.dates().end())) {
    throw Error(ErrorKind::invalid_argument, "model variances and daily returns cover different dates");
  }
  return VolSeries{model_variance.dates, scale_to_daily_variance(model_variance.variance, daily_returns.values())};
}

double rmspe(std::span<const double> scaled_model_variance, std::span<const double> adjusted_rv, RmspeForm form) {
  if (scaled_model_variance.size() != adjusted_rv.size() || adjusted_rv.empty()) {
    throw Error(ErrorKind::invalid_argument, "RMSPE inputs must be aligned and non-empty");
  }
  std::string bad;
  double ss = 0.0;
  for (std::size_t t = 0; t < adjusted_rv.size(); ++t) {
    if (!(adjusted_rv[t] > 0.0)) {
      bad += (bad.empty() ? "" : ", ") + std::to_string(t);
      continue;
    }
    const double e = (scaled_model_variance[t] - adjusted_rv[t]) / adjusted_rv[t];
    ss += e * e;
  }
  if (!bad.empty()) throw Error(ErrorKind::domain, "RMSPE undefined: adjusted RV is zero at index " + bad);
  if (form == RmspeForm::mean) ss /= static_cast<double>(adjusted_rv.size());
  return std::sqrt(ss);
}

std::vector<RmspePoint> rmspe_curve(const SignatureCurve& curve, const ReturnSeries& daily_returns,
                                    std::span<const std::vector<double>> model_variances, RmspeForm form) {
  for (const auto& m : model_variances) {
    if (m.size() != daily_returns.size()) {
      throw Error(ErrorKind::invalid_argument, "model variance path does not match the daily returns");
    }
  }
  std::vector<RmspePoint> out;
  for (const auto& series : curve.series) {
    // Index of each aligned day within daily_returns.
    const auto dates = daily_returns.dates();
    std::vector<std::size_t> idx;
    std::vector<double> rv, ret;
    std::size_t i = 0;
    for (std::size_t j = 0; j < series.dates.size(); ++j) {
      while (i < dates.size() && dates[i] < series.dates[j]) ++i;
      if (i < dates.size() && dates[i] == series.dates[j]) {
        idx.push_back(i);
        rv.push_back(series.rv[j]);
        ret.push_back(daily_returns.values()[i]);
      }
    }
    if (idx.empty()) throw Error(ErrorKind::insufficient_data, "no common days between RV and daily returns");
    const double c = hl_factor(ret, rv);
    std::vector<double> crv(rv.size());
    for (std::size_t k = 0; k < rv.size(); ++k) crv[k] = c * rv[k];

    RmspePoint point{series.delta, c, {}, idx.size()};
    for (const auto& m : model_variances) {
      std::vector<double> sub(idx.size());
      for (std::size_t k = 0; k < idx.size(); ++k) sub[k] = m[idx[k]];
      point.rmspe.push_back(rmspe(scale_to_daily_variance(sub, ret), crv, form));
    }
    out.push_back(std::move(point));
  }
  return out;
}

}  // namespace garchre
