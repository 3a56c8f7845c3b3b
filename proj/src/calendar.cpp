#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "garchre/error.hpp"
#include "garchre/timeseries.hpp"

namespace garchre {

using namespace std::chrono;

namespace {

constexpr std::array<const char*, 7> kWeekdayKeys{"sun", "mon", "tue", "wed", "thu", "fri", "sat"};

seconds parse_time_of_day(const std::string& text) {
  int h = 0, m = 0, s = 0;
  char tail = 0;
  const int n = std::sscanf(text.c_str(), "%d:%d:%d%c", &h, &m, &s, &tail);
  if ((n != 2 && n != 3) || h < 0 || h > 24 || m < 0 || m > 59 || s < 0 || s > 59 ||
      (h == 24 && (m != 0 || s != 0))) {
    throw Error(ErrorKind::parse, "calendar: bad time of day '" + text + "' (expected HH:MM[:SS])");
  }
  return hours{h} + minutes{m} + seconds{s};
}

std::string format_time_of_day(seconds t) {
  const hh_mm_ss hms{t};
  auto two = [](long v) { return (v < 10 ? "0" : "") + std::to_string(v); };
  std::string out = two(hms.hours().count()) + ":" + two(hms.minutes().count());
  if (hms.seconds().count() != 0) out += ":" + two(hms.seconds().count());
  return out;
}

}  // namespace

SessionCalendar::SessionCalendar(WeeklySessions weekly, std::vector<Date> holidays)
    : weekly_(std::move(weekly)), holidays_(std::move(holidays)) {
  for (std::size_t wd = 0; wd < weekly_.size(); ++wd) {
    const auto& sessions = weekly_[wd];
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      const auto& s = sessions[i];
      if (s.open < seconds{0} || s.close > hours{24} || s.open >= s.close) {
        throw Error(ErrorKind::validation,
                    std::string("calendar: invalid session on ") + kWeekdayKeys[wd]);
      }
      if (i > 0 && s.open < sessions[i - 1].close) {
        throw Error(ErrorKind::validation,
                    std::string("calendar: overlapping or unordered sessions on ") + kWeekdayKeys[wd]);
      }
    }
  }
  std::sort(holidays_.begin(), holidays_.end());
  holidays_.erase(std::unique(holidays_.begin(), holidays_.end()), holidays_.end());
}

SessionCalendar SessionCalendar::tokyo() {
  WeeklySessions weekly;
  const std::vector<Session> day{{hours{9}, hours{11}}, {hours{12} + minutes{30}, hours{15}}};
  for (unsigned wd = 1; wd <= 5; ++wd) weekly[wd] = day;
  return SessionCalendar(std::move(weekly), {});
}

SessionCalendar SessionCalendar::single_session(seconds open, seconds close) {
  WeeklySessions weekly;
  for (unsigned wd = 1; wd <= 5; ++wd) weekly[wd] = {Session{open, close}};
  return SessionCalendar(std::move(weekly), {});
}

SessionCalendar SessionCalendar::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::parse, std::string("calendar: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("sessions") || !doc["sessions"].is_object()) {
    throw Error(ErrorKind::parse, "calendar: expected an object with a 'sessions' object");
  }
  WeeklySessions weekly;
  for (const auto& [key, value] : doc["sessions"].items()) {
    const auto it = std::find(kWeekdayKeys.begin(), kWeekdayKeys.end(), key);
    if (it == kWeekdayKeys.end()) {
      throw Error(ErrorKind::parse, "calendar: unknown weekday key '" + key + "'");
    }
    auto& sessions = weekly[static_cast<std::size_t>(it - kWeekdayKeys.begin())];
    if (!value.is_array()) throw Error(ErrorKind::parse, "calendar: sessions for '" + key + "' must be a list");
    for (const auto& pair : value) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
        throw Error(ErrorKind::parse, "calendar: each session must be [\"HH:MM\", \"HH:MM\"]");
      }
      sessions.push_back({parse_time_of_day(pair[0].get<std::string>()),
                          parse_time_of_day(pair[1].get<std::string>())});
    }
  }
  std::vector<Date> holidays;
  if (doc.contains("holidays")) {
    for (const auto& h : doc["holidays"]) {
      if (!h.is_string()) throw Error(ErrorKind::parse, "calendar: holidays must be date strings");
      holidays.push_back(parse_date(h.get<std::string>()));
    }
  }
  return SessionCalendar(std::move(weekly), std::move(holidays));
}

SessionCalendar SessionCalendar::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open calendar file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

std::span<const Session> SessionCalendar::sessions_on(Date date) const {
  if (std::binary_search(holidays_.begin(), holidays_.end(), date)) return {};
  return weekly_[weekday{sys_days{date}}.c_encoding()];
}

seconds SessionCalendar::trading_seconds(Date date) const {
  seconds total{0};
  for (const auto& s : sessions_on(date)) total += s.length();
  return total;
}

std::vector<Date> SessionCalendar::trading_days(Date start, std::size_t count) const {
  const bool any = std::any_of(weekly_.begin(), weekly_.end(), [](const auto& s) { return !s.empty(); });
  if (!any && count > 0) throw Error(ErrorKind::validation, "calendar has no trading sessions");
  std::vector<Date> out;
  out.reserve(count);
  for (sys_days d{start}; out.size() < count; d += days{1}) {
    if (is_trading_day(Date{d})) out.emplace_back(d);
  }
  return out;
}

std::string SessionCalendar::to_json() const {
  nlohmann::ordered_json doc;
  doc["sessions"] = nlohmann::ordered_json::object();
  for (std::size_t wd = 0; wd < weekly_.size(); ++wd) {
    if (weekly_[wd].empty()) continue;
    auto list = nlohmann::ordered_json::array();
    for (const auto& s : weekly_[wd]) list.push_back({format_time_of_day(s.open), format_time_of_day(s.close)});
    doc["sessions"][kWeekdayKeys[wd]] = std::move(list);
  }
  auto hol = nlohmann::ordered_json::array();
  for (const auto& h : holidays_) hol.push_back(format_date(h));
  doc["holidays"] = std::move(hol);
  return doc.dump();
}

}  // namespace garchre
