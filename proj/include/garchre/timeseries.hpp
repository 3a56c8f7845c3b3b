#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace garchre {

using Date = std::chrono::year_month_day;
/// Exchange-local wall-clock instant. No time-zone conversion is applied anywhere.
using Timestamp = std::chrono::sys_seconds;

Date parse_date(std::string_view text);
Timestamp parse_timestamp(std::string_view text);
std::string format_date(Date date);
std::string format_timestamp(Timestamp ts);
Date date_of(Timestamp ts);

/// Weekdays after `start` (inclusive), skipping Saturday and Sunday.
std::vector<Date> business_days(Date start, std::size_t count);

// ---------------------------------------------------------------------------
// Daily data

struct DailyPrice {
  Date date;
  double close;
};

/// Close prices ordered by strictly increasing date; every price positive.
class DailyPriceSeries {
 public:
  DailyPriceSeries() = default;
  /// Sorts by date and validates. Throws a validation error on duplicate dates
  /// or non-positive prices.
  explicit DailyPriceSeries(std::vector<DailyPrice> entries);

  [[nodiscard]] std::span<const DailyPrice> entries() const { return entries_; }
  [[nodiscard]] std::size_t size() const { return entries_.size(); }
  [[nodiscard]] bool empty() const { return entries_.empty(); }

 private:
  std::vector<DailyPrice> entries_;
};

/// Dated daily log-returns with a cached arithmetic mean.
class ReturnSeries {
 public:
  ReturnSeries() = default;
  ReturnSeries(std::vector<Date> dates, std::vector<double> values);

  /// Undated convenience: assigns consecutive business days from 2000-01-03.
  static ReturnSeries from_values(std::vector<double> values);

  [[nodiscard]] std::span<const Date> dates() const { return dates_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] bool empty() const { return values_.empty(); }
  [[nodiscard]] double mean() const { return mean_; }
  /// Population variance (1/N) about the mean.
  [[nodiscard]] double variance() const;

 private:
  std::vector<Date> dates_;
  std::vector<double> values_;
  double mean_ = 0.0;
};

DailyPriceSeries load_daily_prices(std::istream& in);
DailyPriceSeries load_daily_prices_file(const std::string& path);
void write_daily_prices(std::ostream& out, const DailyPriceSeries& prices,
                        std::span<const std::string> comments = {});

/// Close-to-close log returns, each dated by the later day.
ReturnSeries daily_log_returns(const DailyPriceSeries& prices);

// ---------------------------------------------------------------------------
// Intraday data

struct Tick {
  Timestamp time;
  double price;
};

/// Ticks with non-decreasing timestamps and positive prices.
class TickSeries {
 public:
  TickSeries() = default;
  explicit TickSeries(std::vector<Tick> ticks);

  [[nodiscard]] std::span<const Tick> ticks() const { return ticks_; }
  [[nodiscard]] std::size_t size() const { return ticks_.size(); }
  [[nodiscard]] bool empty() const { return ticks_.empty(); }

 private:
  std::vector<Tick> ticks_;
};

TickSeries load_ticks(std::istream& in);
TickSeries load_ticks_file(const std::string& path);
void write_ticks(std::ostream& out, const TickSeries& ticks, std::span<const std::string> comments = {});

/// Trading session as offsets from local midnight.
struct Session {
  std::chrono::seconds open;
  std::chrono::seconds close;

  [[nodiscard]] std::chrono::seconds length() const { return close - open; }
  friend bool operator==(const Session&, const Session&) = default;
};

class SessionCalendar {
 public:
  using WeeklySessions = std::array<std::vector<Session>, 7>;  // index: weekday c_encoding, Sunday = 0

  /// Validates that each weekday's sessions are ordered, non-overlapping and within one day.
  SessionCalendar(WeeklySessions weekly, std::vector<Date> holidays);

  /// Tokyo Stock Exchange: Monday to Friday, 09:00-11:00 and 12:30-15:00.
  static SessionCalendar tokyo();
  /// One session per weekday.
  static SessionCalendar single_session(std::chrono::seconds open, std::chrono::seconds close);
  static SessionCalendar from_json(std::string_view json);
  static SessionCalendar from_json_file(const std::string& path);

  [[nodiscard]] std::span<const Session> sessions_on(Date date) const;
  [[nodiscard]] bool is_trading_day(Date date) const { return !sessions_on(date).empty(); }
  [[nodiscard]] std::chrono::seconds trading_seconds(Date date) const;
  [[nodiscard]] std::vector<Date> trading_days(Date start, std::size_t count) const;
  [[nodiscard]] std::string to_json() const;

 private:
  WeeklySessions weekly_;
  std::vector<Date> holidays_;  // sorted
};

/// Log-prices on a regular grid inside each session of one day. Consecutive
/// sessions are kept separate so no return spans a break.
struct GridDay {
  Date date;
  std::vector<std::vector<double>> sessions;

  [[nodiscard]] std::size_t return_count() const;
};

struct GridPrices {
  std::chrono::seconds delta{};
  std::vector<GridDay> days;
  std::vector<std::string> warnings;
};

/// Previous-tick sampling on the grid open, open + delta, ... of every
/// session. A session of length L gets floor(L / delta) intervals, or a single
/// open-to-close interval when delta exceeds L. Grid instants before the first
/// tick of a day take that first tick. Trading days without ticks are skipped
/// and reported in `warnings`.
GridPrices resample_grid(const TickSeries& ticks, const SessionCalendar& calendar,
                         std::chrono::seconds delta);

struct DayReturns {
  Date date;
  std::vector<double> returns;
};

/// Within-session log-price differences; the difference across a break is not a return.
std::vector<DayReturns> intraday_returns(const GridPrices& grid);

/// Last tick price of each trading day, as a daily close series.
DailyPriceSeries daily_closes(const TickSeries& ticks, const SessionCalendar& calendar);

}  // namespace garchre
