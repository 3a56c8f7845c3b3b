#include "garchre/export.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "csv.hpp"
#include "garchre/error.hpp"

namespace garchre {

namespace {

using json = nlohmann::ordered_json;

void write_comments(std::ostream& out, std::span<const std::string> provenance) {
  for (const auto& line : provenance) out << "# " << line << '\n';
}

std::string optional_field(const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); }

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(ErrorKind::parse, std::string("summary is missing numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

}  // namespace

std::string data_fingerprint(std::span<const double> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : values) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_with_uncertainty(double value, double sd) {
  if (!std::isfinite(value)) return "nan";
  if (!std::isfinite(sd) || sd <= 0.0) return detail::format_double(value);
  int exponent = 0;
  const double mag = std::fabs(value);
  if (mag > 0.0 && (mag < 1e-3 || mag >= 1e4)) exponent = static_cast<int>(std::floor(std::log10(mag)));
  const double scale = std::pow(10.0, -exponent);
  const double v = value * scale;
  const double s = sd * scale;
  // Two significant digits of the uncertainty.
  const int last = static_cast<int>(std::floor(std::log10(s))) - 1;
  const int decimals = last < 0 ? -last : 0;
  auto digits = static_cast<long long>(std::llround(s / std::pow(10.0, last)));
  if (digits >= 100) digits = (digits + 5) / 10 * 10;  // 99.6 rounds up to 100
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string out = buf;
  if (last > 0) digits *= static_cast<long long>(std::llround(std::pow(10.0, last)));
  out += "(" + std::to_string(digits) + ")";
  if (exponent != 0) {
    std::snprintf(buf, sizeof buf, "e%+03d", exponent);
    out += buf;
  }
  return out;
}

void write_chain_csv(std::ostream& out, const PosteriorChain& chain, std::span<const std::string> provenance) {
  write_comments(out, provenance);
  const auto names = parameter_names(chain.model);
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < chain.natural.rows(); ++i) {
    for (Eigen::Index j = 0; j < chain.natural.cols(); ++j) {
      out << (j ? "," : "") << detail::format_double(chain.natural(i, j));
    }
    out << '\n';
  }
}

std::string summary_json(const PosteriorChain& chain, std::span<const double> returns, AicForm form,
                         std::span<const std::string> provenance) {
  const FitScore score = score_chain(chain, returns, form);
  json j;
  j["model"] = std::string(model_name(chain.model));
  j["provenance"] = json::array();
  for (const auto& line : provenance) j["provenance"].push_back(line);
  j["data"] = {{"observations", returns.size()}, {"fingerprint", data_fingerprint(returns)}};
  j["config"] = {{"burn_in", chain.config.burn_in},
                 {"samples", chain.config.samples},
                 {"adapt_interval", chain.config.adapt_interval},
                 {"nu", chain.config.nu},
                 {"seed", chain.config.seed},
                 {"init_variance", chain.init_variance}};
  json params = json::array();
  for (const auto& p : chain.summary) {
    params.push_back({{"name", p.name},
                      {"mean", number_or_null(p.mean)},
                      {"sd", number_or_null(p.sd)},
                      {"tau_int", number_or_null(p.tau_int)}});
  }
  j["parameters"] = std::move(params);
  j["acceptance_rate"] = chain.acceptance_rate;
  j["lnL_at_mean"] = number_or_null(score.lnL_at_mean);
  j["mean_lnL"] = number_or_null(score.mean_lnL);
  j["k"] = score.k;
  j["aic"] = number_or_null(score.aic);
  j["aic_form"] = form == AicForm::standard ? "standard" : "literal";
  j["dic"] = number_or_null(score.dic);
  return j.dump(2) + "\n";
}

std::string summary_table(const PosteriorChain& chain) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %-22s %10s\n", "parameter", "mean(sd)", "tau_int");
  out << model_name(chain.model) << '\n' << buf;
  for (const auto& p : chain.summary) {
    std::snprintf(buf, sizeof buf, "%-10s %-22s %10.2f\n", p.name.c_str(),
                  format_with_uncertainty(p.mean, p.sd).c_str(), p.tau_int);
    out << buf;
  }
  std::snprintf(buf, sizeof buf, "acceptance rate %.4f over %zu samples\n", chain.acceptance_rate,
                static_cast<std::size_t>(chain.natural.rows()));
  out << buf;
  return out.str();
}

SummaryRecord parse_summary(const std::string& text, AicForm form) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::parse, std::string("summary is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("model") || !j.at("model").is_string()) {
    throw Error(ErrorKind::parse, "summary has no model name");
  }
  SummaryRecord r;
  r.score.model = j.at("model").get<std::string>();
  const Model model = parse_model(r.score.model);
  const double k = number_field(j, "k");
  if (k != static_cast<double>(parameter_count(model))) {
    throw Error(ErrorKind::validation, "summary parameter count does not match model " + r.score.model);
  }
  r.score.k = static_cast<std::size_t>(k);
  r.score.lnL_at_mean = number_field(j, "lnL_at_mean");
  r.score.mean_lnL = number_field(j, "mean_lnL");
  r.score.aic_form = form;
  r.score.aic = aic(r.score.lnL_at_mean, r.score.k, form);
  r.score.dic = dic(r.score.lnL_at_mean, r.score.mean_lnL);
  if (j.contains("data") && j.at("data").is_object()) {
    const auto& d = j.at("data");
    if (d.contains("fingerprint") && d.at("fingerprint").is_string()) r.fingerprint = d.at("fingerprint");
    if (d.contains("observations") && d.at("observations").is_number_unsigned()) {
      r.observations = d.at("observations").get<std::size_t>();
    }
  }
  return r;
}

void write_volatility_csv(std::ostream& out, std::span<const Date> dates, std::span<const double> variance,
                          std::span<const std::string> provenance) {
  if (dates.size() != variance.size()) throw Error(ErrorKind::invalid_argument, "dates and variances differ in length");
  write_comments(out, provenance);
  out << "date,variance\n";
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out << format_date(dates[i]) << ',' << detail::format_double(variance[i]) << '\n';
  }
}

VolSeries load_volatility_csv(std::istream& in) {
  detail::CsvReader reader(in, {"date", "variance"});
  VolSeries out;
  std::vector<std::string_view> fields;
  while (reader.next(fields)) {
    try {
      const Date d = parse_date(fields[0]);
      if (!out.dates.empty() && !(out.dates.back() < d)) {
        throw Error(ErrorKind::validation, "dates must be strictly increasing");
      }
      const double v = detail::parse_double(fields[1]);
      if (!(v > 0.0)) throw Error(ErrorKind::validation, "variance must be positive");
      out.dates.push_back(d);
      out.variance.push_back(v);
    } catch (const Error& e) {
      throw Error(e.kind(), "line " + std::to_string(reader.line()) + ": " + e.what());
    }
  }
  if (out.variance.empty()) throw Error(ErrorKind::insufficient_data, "volatility file has no rows");
  return out;
}

VolSeries load_volatility_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open volatility file '" + path + "'");
  try {
    return load_volatility_csv(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_rv_csv(std::ostream& out, const RvSeries& rv, std::span<const std::string> provenance) {
  write_comments(out, provenance);
  out << "date,rv,c_adjusted_rv\n";
  for (std::size_t i = 0; i < rv.size(); ++i) {
    out << format_date(rv.dates[i]) << ',' << detail::format_double(rv.rv[i]) << ','
        << (rv.hl_factor ? detail::format_double(*rv.hl_factor * rv.rv[i]) : std::string()) << '\n';
  }
}

void write_signature_csv(std::ostream& out, const SignatureCurve& curve, std::span<const std::string> provenance) {
  write_comments(out, provenance);
  out << "delta_seconds,avg_rv,hl_factor\n";
  for (const auto& p : curve.points) {
    out << p.delta.count() << ',' << detail::format_double(p.average_rv) << ',' << optional_field(p.hl_factor)
        << '\n';
  }
}

void write_rmspe_csv(std::ostream& out, std::span<const RmspePoint> points, std::span<const std::string> models,
                     std::span<const std::string> provenance) {
  write_comments(out, provenance);
  out << "delta_seconds,hl_factor";
  for (const auto& m : models) out << ",rmspe_" << m;
  out << '\n';
  for (const auto& p : points) {
    if (p.rmspe.size() != models.size()) throw Error(ErrorKind::invalid_argument, "one RMSPE column per model");
    out << p.delta.count() << ',' << detail::format_double(p.hl_factor);
    for (double v : p.rmspe) out << ',' << detail::format_double(v);
    out << '\n';
  }
}

void write_truth_csv(std::ostream& out, const MarketSimulation& sim, std::span<const std::string> provenance) {
  write_comments(out, provenance);
  out << "date,return,garch_variance,integrated_variance\n";
  const auto dates = sim.garch.returns.dates();
  const auto y = sim.garch.returns.values();
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out << format_date(dates[i]) << ',' << detail::format_double(y[i]) << ','
        << detail::format_double(sim.garch.variance.variance[i]) << ','
        << (i < sim.intraday.integrated_variance.size() ? detail::format_double(sim.intraday.integrated_variance[i])
                                                        : std::string())
        << '\n';
  }
}

}  // namespace garchre
