#include "garchre/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "csv.hpp"
#include "garchre/error.hpp"

namespace garchre {

using namespace std::chrono;

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len, std::string_view whole) {
  int value = 0;
  if (pos + len > text.size()) {
    throw Error(ErrorKind::parse, "malformed date/time '" + std::string(whole) + "'");
  }
  auto sub = text.substr(pos, len);
  auto [ptr, ec] = std::from_chars(sub.data(), sub.data() + sub.size(), value);
  if (ec != std::errc{} || ptr != sub.data() + sub.size()) {
    throw Error(ErrorKind::parse, "malformed date/time '" + std::string(whole) + "'");
  }
  return value;
}

Date parse_date_prefix(std::string_view text, std::string_view whole) {
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorKind::parse, "expected YYYY-MM-DD, got '" + std::string(whole) + "'");
  }
  const int y = parse_fixed_int(text, 0, 4, whole);
  const int m = parse_fixed_int(text, 5, 2, whole);
  const int d = parse_fixed_int(text, 8, 2, whole);
  Date date{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
  if (!date.ok()) {
    throw Error(ErrorKind::parse, "invalid calendar date '" + std::string(whole) + "'");
  }
  return date;
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10) {
    throw Error(ErrorKind::parse, "expected YYYY-MM-DD, got '" + std::string(text) + "'");
  }
  return parse_date_prefix(text, text);
}

Timestamp parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SS (a space separator is also accepted)
  if (text.size() != 19 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' || text[16] != ':') {
    throw Error(ErrorKind::parse, "expected YYYY-MM-DDTHH:MM:SS, got '" + std::string(text) + "'");
  }
  const Date date = parse_date_prefix(text, text);
  const int hh = parse_fixed_int(text, 11, 2, text);
  const int mm = parse_fixed_int(text, 14, 2, text);
  const int ss = parse_fixed_int(text, 17, 2, text);
  if (hh > 23 || mm > 59 || ss > 59) {
    throw Error(ErrorKind::parse, "time of day out of range in '" + std::string(text) + "'");
  }
  return sys_days{date} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_date(Date date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string format_timestamp(Timestamp ts) {
  const auto day_start = floor<days>(ts);
  const hh_mm_ss tod{ts - day_start};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02ld:%02ld:%02ld", format_date(Date{day_start}).c_str(),
                static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                static_cast<long>(tod.seconds().count()));
  return buf;
}

Date date_of(Timestamp ts) { return Date{floor<days>(ts)}; }

std::vector<Date> business_days(Date start, std::size_t count) {
  std::vector<Date> out;
  out.reserve(count);
  for (sys_days d{start}; out.size() < count; d += days{1}) {
    const weekday wd{d};
    if (wd != Saturday && wd != Sunday) out.emplace_back(d);
  }
  return out;
}

// ---------------------------------------------------------------------------

DailyPriceSeries::DailyPriceSeries(std::vector<DailyPrice> entries) : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const DailyPrice& a, const DailyPrice& b) { return a.date < b.date; });
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!(entries_[i].close > 0.0) || !std::isfinite(entries_[i].close)) {
      throw Error(ErrorKind::validation,
                  "non-positive close price on " + format_date(entries_[i].date));
    }
    if (i > 0 && entries_[i].date == entries_[i - 1].date) {
      throw Error(ErrorKind::validation, "duplicate date " + format_date(entries_[i].date));
    }
  }
}

ReturnSeries::ReturnSeries(std::vector<Date> dates, std::vector<double> values)
    : dates_(std::move(dates)), values_(std::move(values)) {
  if (dates_.size() != values_.size()) {
    throw Error(ErrorKind::invalid_argument, "return series: dates and values differ in length");
  }
  if (!values_.empty()) {
    mean_ = std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
  }
}

ReturnSeries ReturnSeries::from_values(std::vector<double> values) {
  auto dates = business_days(Date{year{2000}, January, day{3}}, values.size());
  return ReturnSeries(std::move(dates), std::move(values));
}

double ReturnSeries::variance() const {
  if (values_.empty()) return 0.0;
  double ss = 0.0;
  for (double v : values_) ss += (v - mean_) * (v - mean_);
  return ss / static_cast<double>(values_.size());
}

DailyPriceSeries load_daily_prices(std::istream& in) {
  detail::CsvReader reader(in, {"date", "close"});
  std::vector<DailyPrice> rows;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    try {
      rows.push_back({parse_date(fields[0]), detail::parse_double(fields[1])});
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(reader.line()) + ": " + e.what());
    }
    if (!(rows.back().close > 0.0)) {
      throw Error(ErrorKind::validation,
                  "line " + std::to_string(reader.line()) + ": close price must be positive");
    }
  }
  return DailyPriceSeries(std::move(rows));
}

DailyPriceSeries load_daily_prices_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open daily price file '" + path + "'");
  return load_daily_prices(in);
}

void write_daily_prices(std::ostream& out, const DailyPriceSeries& prices,
                        std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "date,close\n";
  for (const auto& e : prices.entries()) {
    out << format_date(e.date) << ',' << detail::format_double(e.close) << '\n';
  }
}

ReturnSeries daily_log_returns(const DailyPriceSeries& prices) {
  if (prices.size() < 2) {
    throw Error(ErrorKind::insufficient_data, "at least two daily prices are needed for a return");
  }
  const auto entries = prices.entries();
  std::vector<Date> dates;
  std::vector<double> values;
  dates.reserve(entries.size() - 1);
  values.reserve(entries.size() - 1);
  for (std::size_t i = 1; i < entries.size(); ++i) {
    dates.push_back(entries[i].date);
    values.push_back(std::log(entries[i].close) - std::log(entries[i - 1].close));
  }
  return ReturnSeries(std::move(dates), std::move(values));
}

// ---------------------------------------------------------------------------

TickSeries::TickSeries(std::vector<Tick> ticks) : ticks_(std::move(ticks)) {
  for (std::size_t i = 0; i < ticks_.size(); ++i) {
    if (!(ticks_[i].price > 0.0) || !std::isfinite(ticks_[i].price)) {
      throw Error(ErrorKind::validation, "non-positive tick price at " + format_timestamp(ticks_[i].time));
    }
    if (i > 0 && ticks_[i].time < ticks_[i - 1].time) {
      throw Error(ErrorKind::validation, "tick timestamps decrease at " + format_timestamp(ticks_[i].time));
    }
  }
}

TickSeries load_ticks(std::istream& in) {
  detail::CsvReader reader(in, {"timestamp", "price"});
  std::vector<Tick> rows;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    try {
      rows.push_back({parse_timestamp(fields[0]), detail::parse_double(fields[1])});
    } catch (const Error& e) {
      throw Error(ErrorKind::parse, "line " + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  return TickSeries(std::move(rows));
}

TickSeries load_ticks_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open tick file '" + path + "'");
  return load_ticks(in);
}

void write_ticks(std::ostream& out, const TickSeries& ticks, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "timestamp,price\n";
  for (const auto& t : ticks.ticks()) {
    out << format_timestamp(t.time) << ',' << detail::format_double(t.price) << '\n';
  }
}

// ---------------------------------------------------------------------------

std::size_t GridDay::return_count() const {
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.empty() ? 0 : s.size() - 1;
  return n;
}

GridPrices resample_grid(const TickSeries& ticks, const SessionCalendar& calendar, seconds delta) {
  if (delta <= seconds{0}) {
    throw Error(ErrorKind::invalid_argument, "sampling period must be positive");
  }
  GridPrices grid;
  grid.delta = delta;
  const auto all = ticks.ticks();
  if (all.empty()) {
    throw Error(ErrorKind::insufficient_data, "tick series is empty");
  }

  std::size_t begin = 0;
  const sys_days first_day = floor<days>(all.front().time);
  const sys_days last_day = floor<days>(all.back().time);
  for (sys_days d = first_day; d <= last_day; d += days{1}) {
    std::size_t end = begin;
    while (end < all.size() && floor<days>(all[end].time) == d) ++end;
    const auto day_ticks = all.subspan(begin, end - begin);
    begin = end;

    const Date date{d};
    const auto sessions = calendar.sessions_on(date);
    if (sessions.empty()) {
      if (!day_ticks.empty()) {
        grid.warnings.push_back("ticks on non-trading day " + format_date(date) + " ignored");
      }
      continue;
    }
    if (day_ticks.empty()) {
      grid.warnings.push_back("no ticks on trading day " + format_date(date) + "; day skipped");
      continue;
    }

    GridDay out{date, {}};
    std::size_t cursor = 0;  // index of the last tick at or before the current instant
    auto price_at = [&](Timestamp t) {
      while (cursor + 1 < day_ticks.size() && day_ticks[cursor + 1].time <= t) ++cursor;
      return std::log(day_ticks[cursor].price);
    };
    for (const auto& s : sessions) {
      const auto intervals = s.length() / delta;
      std::vector<double> prices;
      const Timestamp open = d + s.open;
      if (intervals == 0) {
        prices.push_back(price_at(open));
        prices.push_back(price_at(d + s.close));
      } else {
        prices.reserve(static_cast<std::size_t>(intervals) + 1);
        for (std::int64_t j = 0; j <= intervals; ++j) prices.push_back(price_at(open + j * delta));
      }
      out.sessions.push_back(std::move(prices));
    }
    grid.days.push_back(std::move(out));
  }
  return grid;
}

std::vector<DayReturns> intraday_returns(const GridPrices& grid) {
  std::vector<DayReturns> out;
  out.reserve(grid.days.size());
  for (const auto& day : grid.days) {
    DayReturns dr{day.date, {}};
    dr.returns.reserve(day.return_count());
    for (const auto& s : day.sessions) {
      for (std::size_t i = 1; i < s.size(); ++i) dr.returns.push_back(s[i] - s[i - 1]);
    }
    out.push_back(std::move(dr));
  }
  return out;
}

DailyPriceSeries daily_closes(const TickSeries& ticks, const SessionCalendar& calendar) {
  std::vector<DailyPrice> closes;
  for (const auto& t : ticks.ticks()) {
    const Date date = date_of(t.time);
    if (!calendar.is_trading_day(date)) continue;
    if (!closes.empty() && closes.back().date == date) {
      closes.back().close = t.price;
    } else {
      closes.push_back({date, t.price});
    }
  }
  return DailyPriceSeries(std::move(closes));
}

}  // namespace garchre
