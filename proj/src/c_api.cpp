#include "garchre/garchre.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "csv.hpp"
#include "garchre/error.hpp"
#include "garchre/export.hpp"
#include "garchre/mcmc.hpp"
#include "garchre/realized.hpp"
#include "garchre/selection.hpp"
#include "garchre/simulate.hpp"
#include "garchre/timeseries.hpp"

struct garchre_returns {
  garchre::ReturnSeries series;
};

struct garchre_calendar {
  garchre::SessionCalendar calendar;
};

struct garchre_ticks {
  garchre::TickSeries series;
};

struct garchre_chain {
  garchre::PosteriorChain chain;
};

namespace {

thread_local std::string last_error;

garchre_status status_of(garchre::ErrorKind kind) {
  using garchre::ErrorKind;
  switch (kind) {
    case ErrorKind::invalid_argument: return GARCHRE_ERR_INVALID_ARGUMENT;
    case ErrorKind::io: return GARCHRE_ERR_IO;
    case ErrorKind::parse: return GARCHRE_ERR_PARSE;
    case ErrorKind::validation: return GARCHRE_ERR_VALIDATION;
    case ErrorKind::insufficient_data: return GARCHRE_ERR_INSUFFICIENT_DATA;
    case ErrorKind::domain: return GARCHRE_ERR_DOMAIN;
    case ErrorKind::numerical: return GARCHRE_ERR_NUMERICAL;
    case ErrorKind::adaptation: return GARCHRE_ERR_ADAPTATION;
  }
  return GARCHRE_ERR_INTERNAL;
}

template <class F>
garchre_status guarded(F&& body) noexcept {
  try {
    last_error.clear();
    body();
    return GARCHRE_OK;
  } catch (const garchre::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return GARCHRE_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return GARCHRE_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw garchre::Error(garchre::ErrorKind::invalid_argument, std::string(what) + " is NULL");
}

std::vector<std::string> split_lines(const char* text) {
  std::vector<std::string> lines;
  if (text == nullptr) return lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

char* duplicate(const std::string& s) {
  auto* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

garchre::Model to_model(garchre_model m) {
  switch (m) {
    case GARCHRE_MODEL_N: return garchre::Model::garch_n;
    case GARCHRE_MODEL_RE: return garchre::Model::garch_re;
  }
  throw garchre::Error(garchre::ErrorKind::invalid_argument, "unknown model");
}

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw garchre::Error(garchre::ErrorKind::io, "cannot write '" + path + "'");
  return out;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw garchre::Error(garchre::ErrorKind::io, "failed writing '" + path + "'");
}

std::vector<std::chrono::seconds> to_deltas(const int64_t* deltas, size_t count) {
  if (count == 0) throw garchre::Error(garchre::ErrorKind::invalid_argument, "delta list is empty");
  require(deltas, "deltas");
  std::vector<std::chrono::seconds> out;
  for (size_t i = 0; i < count; ++i) {
    if (deltas[i] <= 0) throw garchre::Error(garchre::ErrorKind::invalid_argument, "sampling periods must be positive");
    out.emplace_back(deltas[i]);
  }
  return out;
}

std::string join(const std::filesystem::path& dir, const std::string& name) { return (dir / name).string(); }

}  // namespace

extern "C" {

const char* garchre_last_error(void) { return last_error.c_str(); }

void garchre_string_free(char* s) { delete[] s; }

const char* garchre_version(void) { return "0.1.0"; }

garchre_status garchre_parse_model(const char* name, garchre_model* out) {
  return guarded([&] {
    require(name, "model name");
    require(out, "out");
    *out = garchre::parse_model(name) == garchre::Model::garch_n ? GARCHRE_MODEL_N : GARCHRE_MODEL_RE;
  });
}

const char* garchre_model_name(garchre_model model) {
  return model == GARCHRE_MODEL_N ? "garch-n" : model == GARCHRE_MODEL_RE ? "garch-re" : "";
}

garchre_status garchre_returns_load_prices(const char* path, garchre_returns** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto prices = garchre::load_daily_prices_file(path);
    *out = new garchre_returns{garchre::daily_log_returns(prices)};
  });
}

garchre_status garchre_returns_from_values(const double* values, size_t count, garchre_returns** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) require(values, "values");
    std::vector<double> v(values, values + count);
    *out = new garchre_returns{garchre::ReturnSeries::from_values(std::move(v))};
  });
}

size_t garchre_returns_size(const garchre_returns* r) { return r ? r->series.size() : 0; }

size_t garchre_returns_copy(const garchre_returns* r, double* out, size_t capacity) {
  if (r == nullptr || out == nullptr) return 0;
  const auto v = r->series.values();
  const size_t n = std::min(capacity, v.size());
  std::copy_n(v.begin(), n, out);
  return n;
}

void garchre_returns_free(garchre_returns* r) { delete r; }

garchre_status garchre_calendar_tokyo(garchre_calendar** out) {
  return guarded([&] {
    require(out, "out");
    *out = new garchre_calendar{garchre::SessionCalendar::tokyo()};
  });
}

garchre_status garchre_calendar_load(const char* path, garchre_calendar** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new garchre_calendar{garchre::SessionCalendar::from_json_file(path)};
  });
}

void garchre_calendar_free(garchre_calendar* c) { delete c; }

garchre_status garchre_ticks_load(const char* path, garchre_ticks** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new garchre_ticks{garchre::load_ticks_file(path)};
  });
}

size_t garchre_ticks_size(const garchre_ticks* t) { return t ? t->series.size() : 0; }

garchre_status garchre_ticks_daily_returns(const garchre_ticks* t, const garchre_calendar* c, garchre_returns** out) {
  return guarded([&] {
    require(t, "ticks");
    require(c, "calendar");
    require(out, "out");
    *out = new garchre_returns{garchre::daily_log_returns(garchre::daily_closes(t->series, c->calendar))};
  });
}

void garchre_ticks_free(garchre_ticks* t) { delete t; }

void garchre_chain_config_init(garchre_chain_config* config) {
  if (config == nullptr) return;
  const garchre::ChainConfig d;
  config->burn_in = d.burn_in;
  config->samples = d.samples;
  config->adapt_interval = d.adapt_interval;
  config->nu = d.nu;
  config->seed = d.seed;
  config->has_init_variance = 0;
  config->init_variance = 0.0;
}

garchre_status garchre_chain_run(garchre_model model, const garchre_returns* returns,
                                 const garchre_chain_config* config, garchre_chain** out) {
  return guarded([&] {
    require(returns, "returns");
    require(config, "config");
    require(out, "out");
    garchre::ChainConfig c;
    c.burn_in = config->burn_in;
    c.samples = config->samples;
    c.adapt_interval = config->adapt_interval;
    c.nu = config->nu;
    c.seed = config->seed;
    if (config->has_init_variance) c.init_variance = config->init_variance;
    *out = new garchre_chain{garchre::run_chain(to_model(model), returns->series, c)};
  });
}

size_t garchre_chain_parameter_count(const garchre_chain* chain) { return chain ? chain->chain.summary.size() : 0; }

size_t garchre_chain_sample_count(const garchre_chain* chain) {
  return chain ? static_cast<size_t>(chain->chain.natural.rows()) : 0;
}

double garchre_chain_acceptance_rate(const garchre_chain* chain) { return chain ? chain->chain.acceptance_rate : 0.0; }

garchre_status garchre_chain_parameter(const garchre_chain* chain, size_t index, double* mean, double* sd,
                                       double* tau_int) {
  return guarded([&] {
    require(chain, "chain");
    if (index >= chain->chain.summary.size()) {
      throw garchre::Error(garchre::ErrorKind::invalid_argument, "parameter index out of range");
    }
    const auto& p = chain->chain.summary[index];
    if (mean) *mean = p.mean;
    if (sd) *sd = p.sd;
    if (tau_int) *tau_int = p.tau_int;
  });
}

garchre_status garchre_chain_write_samples(const garchre_chain* chain, const char* path, const char* provenance) {
  return guarded([&] {
    require(chain, "chain");
    require(path, "path");
    auto out = open_output(path);
    garchre::write_chain_csv(out, chain->chain, split_lines(provenance));
    close_output(out, path);
  });
}

garchre_status garchre_chain_summary_json(const garchre_chain* chain, const garchre_returns* returns,
                                          int literal_aic, const char* provenance, char** out) {
  return guarded([&] {
    require(chain, "chain");
    require(returns, "returns");
    require(out, "out");
    const auto form = literal_aic ? garchre::AicForm::literal : garchre::AicForm::standard;
    *out = duplicate(garchre::summary_json(chain->chain, returns->series.values(), form, split_lines(provenance)));
  });
}

garchre_status garchre_chain_table(const garchre_chain* chain, char** out) {
  return guarded([&] {
    require(chain, "chain");
    require(out, "out");
    *out = duplicate(garchre::summary_table(chain->chain));
  });
}

garchre_status garchre_chain_write_volatility(const garchre_chain* chain, const garchre_returns* returns,
                                              const char* path, const char* provenance) {
  return guarded([&] {
    require(chain, "chain");
    require(returns, "returns");
    require(path, "path");
    const auto variance = garchre::posterior_mean_variance(chain->chain, returns->series.values());
    auto out = open_output(path);
    garchre::write_volatility_csv(out, returns->series.dates(), variance, split_lines(provenance));
    close_output(out, path);
  });
}

void garchre_chain_free(garchre_chain* chain) { delete chain; }

garchre_status garchre_compare_summaries(const char* first_json, const char* second_json, int literal_aic,
                                         char** json_out, char** table_out) {
  return guarded([&] {
    require(first_json, "first summary");
    require(second_json, "second summary");
    const auto form = literal_aic ? garchre::AicForm::literal : garchre::AicForm::standard;
    const auto a = garchre::parse_summary(first_json, form);
    const auto b = garchre::parse_summary(second_json, form);
    if (a.fingerprint.empty() || b.fingerprint.empty()) {
      throw garchre::Error(garchre::ErrorKind::validation, "summary lacks a data fingerprint; cannot verify the datasets match");
    }
    if (a.fingerprint != b.fingerprint || a.observations != b.observations) {
      throw garchre::Error(garchre::ErrorKind::validation,
                           "the summaries were fitted to different datasets (" + std::to_string(a.observations) +
                               " returns, fingerprint " + a.fingerprint + " vs " + std::to_string(b.observations) +
                               " returns, fingerprint " + b.fingerprint + "); information criteria are not comparable");
    }
    const auto c = garchre::compare(a.score, b.score);
    if (json_out) *json_out = duplicate(garchre::comparison_json(c));
    if (table_out) *table_out = duplicate(garchre::comparison_table(c));
  });
}

garchre_status garchre_rv_run(const garchre_ticks* ticks, const garchre_calendar* calendar,
                              const garchre_returns* daily, const int64_t* deltas, size_t delta_count,
                              const char* out_dir, const char* provenance) {
  return guarded([&] {
    require(ticks, "ticks");
    require(calendar, "calendar");
    require(out_dir, "out_dir");
    const auto d = to_deltas(deltas, delta_count);
    const auto lines = split_lines(provenance);
    const auto curve = garchre::signature_curve(ticks->series, calendar->calendar, d, daily ? &daily->series : nullptr);
    const std::filesystem::path dir(out_dir);
    for (const auto& series : curve.series) {
      const auto path = join(dir, "rv_" + std::to_string(series.delta.count()) + ".csv");
      auto out = open_output(path);
      garchre::write_rv_csv(out, series, lines);
      close_output(out, path);
    }
    auto with_warnings = lines;
    for (const auto& w : curve.warnings) with_warnings.push_back("warning: " + w);
    {
      const auto path = join(dir, "signature.csv");
      auto out = open_output(path);
      garchre::write_signature_csv(out, curve, with_warnings);
      close_output(out, path);
    }
    if (daily) {
      const auto path = join(dir, "hl_factor.csv");
      auto out = open_output(path);
      for (const auto& l : lines) out << "# " << l << '\n';
      out << "delta_seconds,hl_factor\n";
      for (const auto& p : curve.points) {
        out << p.delta.count() << ',' << garchre::detail::format_double(*p.hl_factor) << '\n';
      }
      close_output(out, path);
    }
  });
}

garchre_status garchre_rmspe_run(const garchre_ticks* ticks, const garchre_calendar* calendar,
                                 const garchre_returns* daily, const char* const* volatility_paths,
                                 const char* const* labels, size_t model_count, const int64_t* deltas,
                                 size_t delta_count, int literal_rmspe, const char* out_path,
                                 const char* provenance) {
  return guarded([&] {
    require(ticks, "ticks");
    require(calendar, "calendar");
    require(daily, "daily returns");
    require(out_path, "out_path");
    if (model_count == 0) throw garchre::Error(garchre::ErrorKind::invalid_argument, "no volatility files given");
    require(volatility_paths, "volatility_paths");
    require(labels, "labels");
    const auto d = to_deltas(deltas, delta_count);

    // Restrict the daily returns to dates every model covers.
    std::vector<std::map<garchre::Date, double>> by_date(model_count);
    std::vector<std::string> names;
    for (size_t m = 0; m < model_count; ++m) {
      require(volatility_paths[m], "volatility path");
      require(labels[m], "label");
      names.emplace_back(labels[m]);
      const auto vol = garchre::load_volatility_csv_file(volatility_paths[m]);
      for (size_t i = 0; i < vol.size(); ++i) by_date[m][vol.dates[i]] = vol.variance[i];
    }
    std::vector<garchre::Date> dates;
    std::vector<double> returns;
    std::vector<std::vector<double>> model_variances(model_count);
    const auto rd = daily->series.dates();
    const auto rv = daily->series.values();
    for (size_t i = 0; i < rd.size(); ++i) {
      bool all = true;
      for (const auto& m : by_date) all = all && m.contains(rd[i]);
      if (!all) continue;
      dates.push_back(rd[i]);
      returns.push_back(rv[i]);
      for (size_t m = 0; m < model_count; ++m) model_variances[m].push_back(by_date[m].at(rd[i]));
    }
    if (dates.empty()) {
      throw garchre::Error(garchre::ErrorKind::insufficient_data, "no daily return date is covered by every volatility file");
    }
    const garchre::ReturnSeries aligned(std::move(dates), std::move(returns));
    const auto curve = garchre::signature_curve(ticks->series, calendar->calendar, d, &aligned);
    const auto form = literal_rmspe ? garchre::RmspeForm::literal : garchre::RmspeForm::mean;
    const auto points = garchre::rmspe_curve(curve, aligned, model_variances, form);
    auto out = open_output(out_path);
    garchre::write_rmspe_csv(out, points, names, split_lines(provenance));
    close_output(out, out_path);
  });
}

void garchre_sim_spec_init(garchre_sim_spec* spec) {
  if (spec == nullptr) return;
  const garchre::MarketSpec d;
  spec->model = GARCHRE_MODEL_RE;
  spec->omega = d.params.omega;
  spec->alpha = d.params.alpha;
  spec->beta = d.params.beta;
  spec->a = d.params.shape;
  spec->days = d.days;
  spec->steps_per_day = d.steps_per_day;
  spec->noise_variance = d.noise.variance;
  spec->overnight_fraction = d.overnight_fraction;
  spec->initial_price = d.initial_price;
}

garchre_status garchre_simulate(const garchre_sim_spec* spec, const garchre_calendar* calendar, uint64_t seed,
                                const char* out_dir, const char* provenance) {
  return guarded([&] {
    require(spec, "spec");
    require(out_dir, "out_dir");
    to_model(spec->model);
    garchre::MarketSpec m;
    m.params = spec->model == GARCHRE_MODEL_N ? garchre::GarchParams::normal(spec->omega, spec->alpha, spec->beta)
                                              : garchre::GarchParams::rational(spec->omega, spec->alpha, spec->beta,
                                                                               spec->a);
    m.days = spec->days;
    m.steps_per_day = spec->steps_per_day;
    m.noise.variance = spec->noise_variance;
    m.overnight_fraction = spec->overnight_fraction;
    m.initial_price = spec->initial_price;
    if (calendar) m.calendar = calendar->calendar;
    const auto sim = garchre::simulate_market(m, seed);

    auto lines = split_lines(provenance);
    using garchre::detail::format_double;
    lines.push_back("seed=" + std::to_string(seed));
    lines.push_back(std::string("model=") + garchre_model_name(spec->model));
    lines.push_back("omega=" + format_double(spec->omega));
    lines.push_back("alpha=" + format_double(spec->alpha));
    lines.push_back("beta=" + format_double(spec->beta));
    if (spec->model == GARCHRE_MODEL_RE) lines.push_back("a=" + format_double(spec->a));
    lines.push_back("days=" + std::to_string(spec->days));
    lines.push_back("steps_per_day=" + std::to_string(spec->steps_per_day));
    lines.push_back("noise_variance=" + format_double(spec->noise_variance));
    lines.push_back("overnight_fraction=" + format_double(spec->overnight_fraction));
    lines.push_back("initial_price=" + format_double(spec->initial_price));

    const std::filesystem::path dir(out_dir);
    {
      const auto path = join(dir, "daily.csv");
      auto out = open_output(path);
      garchre::write_daily_prices(out, sim.intraday.daily, lines);
      close_output(out, path);
    }
    if (spec->steps_per_day > 0) {
      const auto path = join(dir, "ticks.csv");
      auto out = open_output(path);
      garchre::write_ticks(out, sim.intraday.ticks, lines);
      close_output(out, path);
    }
    {
      const auto path = join(dir, "truth.csv");
      auto out = open_output(path);
      garchre::write_truth_csv(out, sim, lines);
      close_output(out, path);
    }
  });
}

}  // extern "C"
