// garchre-cli: batch front end over the garchre C library.

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "garchre/garchre.h"

namespace {

namespace fs = std::filesystem;

// Exit codes.
constexpr int kOk = 0;
constexpr int kFailed = 1;  // numerical or adaptation failure
constexpr int kUsage = 2;   // usage or input error

struct Failure {
  int code;
  std::string message;
};

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Returns = std::unique_ptr<garchre_returns, Deleter<garchre_returns, garchre_returns_free>>;
using Ticks = std::unique_ptr<garchre_ticks, Deleter<garchre_ticks, garchre_ticks_free>>;
using Calendar = std::unique_ptr<garchre_calendar, Deleter<garchre_calendar, garchre_calendar_free>>;
using Chain = std::unique_ptr<garchre_chain, Deleter<garchre_chain, garchre_chain_free>>;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { garchre_string_free(p); }
  [[nodiscard]] std::string str() const { return p ? std::string(p) : std::string(); }
};

void check(garchre_status s) {
  if (s == GARCHRE_OK) return;
  const bool failed = s == GARCHRE_ERR_NUMERICAL || s == GARCHRE_ERR_ADAPTATION || s == GARCHRE_ERR_INTERNAL;
  throw Failure{failed ? kFailed : kUsage, garchre_last_error()};
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw Failure{kUsage, "no such file: " + path};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw Failure{kUsage, "cannot write " + path.string()};
}

std::string read_text(const std::string& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  if (!in) throw Failure{kUsage, "cannot read " + path};
  return s.str();
}

std::string shortest(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

// Resolved settings recorded at the top of every artifact.
class Provenance {
 public:
  explicit Provenance(std::string command) { lines_.push_back("garchre-cli " + std::move(command)); }
  void add(const std::string& key, const std::string& value) { lines_.push_back(key + "=" + value); }
  void add(const std::string& key, double value) { add(key, shortest(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  [[nodiscard]] std::string text() const {
    std::string s;
    for (const auto& l : lines_) s += l + "\n";
    return s;
  }

 private:
  std::vector<std::string> lines_;
};

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

garchre_model model_of(const std::string& name) {
  garchre_model m{};
  check(garchre_parse_model(name.c_str(), &m));
  return m;
}

Returns load_prices(const std::string& path) {
  require_file(path);
  garchre_returns* r = nullptr;
  check(garchre_returns_load_prices(path.c_str(), &r));
  return Returns(r);
}

Calendar load_calendar(const std::string& path) {
  garchre_calendar* c = nullptr;
  if (path.empty()) {
    check(garchre_calendar_tokyo(&c));
  } else {
    require_file(path);
    check(garchre_calendar_load(path.c_str(), &c));
  }
  return Calendar(c);
}

Ticks load_ticks(const std::string& path) {
  require_file(path);
  garchre_ticks* t = nullptr;
  check(garchre_ticks_load(path.c_str(), &t));
  return Ticks(t);
}

// Daily returns from --data when given, else from the last tick of each day.
Returns daily_returns(const std::string& data, const garchre_ticks* ticks, const garchre_calendar* cal) {
  if (!data.empty()) return load_prices(data);
  garchre_returns* r = nullptr;
  check(garchre_ticks_daily_returns(ticks, cal, &r));
  return Returns(r);
}

struct ChainOptions {
  std::size_t burn_in = 6000;
  std::size_t samples = 50000;
  std::size_t adapt_interval = 500;
  double nu = 10.0;
  std::uint64_t seed = 1;
  double init_variance = 0.0;  // 0: sample variance
  bool literal_aic = false;

  void attach(CLI::App* app) {
    app->add_option("--burn-in", burn_in, "Burn-in steps")->capture_default_str();
    app->add_option("--samples", samples, "Retained samples")->capture_default_str();
    app->add_option("--adapt-interval", adapt_interval, "Proposal refit interval during burn-in")
        ->capture_default_str();
    app->add_option("--nu", nu, "Student-t proposal degrees of freedom")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--init-variance", init_variance, "sigma^2 at the first observation (default: sample variance)");
    app->add_flag("--literal-aic", literal_aic, "Report AIC as -lnL - 2k");
  }

  [[nodiscard]] garchre_chain_config config() const {
    garchre_chain_config c;
    garchre_chain_config_init(&c);
    c.burn_in = burn_in;
    c.samples = samples;
    c.adapt_interval = adapt_interval;
    c.nu = nu;
    c.seed = seed;
    c.has_init_variance = init_variance > 0.0 ? 1 : 0;
    c.init_variance = init_variance;
    return c;
  }

  void record(Provenance& p) const {
    p.add("burn_in", static_cast<std::uint64_t>(burn_in));
    p.add("samples", static_cast<std::uint64_t>(samples));
    p.add("adapt_interval", static_cast<std::uint64_t>(adapt_interval));
    p.add("nu", nu);
    p.add("seed", seed);
    p.add("init_variance", init_variance > 0.0 ? shortest(init_variance) : std::string("sample"));
    p.add("aic", literal_aic ? std::string("literal") : std::string("standard"));
  }
};

// Fits one model and writes <model>_chain.csv, <model>_summary.json and
// <model>_volatility.csv. Returns the summary JSON.
std::string fit_one(const std::string& model, const std::string& data, const garchre_returns* returns,
                    const ChainOptions& opt, const fs::path& out_dir) {
  const auto m = model_of(model);
  Provenance p("fit");
  p.add("model", model);
  p.add("data", data);
  opt.record(p);
  const auto cfg = opt.config();

  garchre_chain* raw = nullptr;
  check(garchre_chain_run(m, returns, &cfg, &raw));
  Chain chain(raw);

  fs::create_directories(out_dir);
  const auto prov = p.text();
  check(garchre_chain_write_samples(chain.get(), (out_dir / (model + "_chain.csv")).string().c_str(), prov.c_str()));
  check(garchre_chain_write_volatility(chain.get(), returns, (out_dir / (model + "_volatility.csv")).string().c_str(),
                                       prov.c_str()));
  OwnedString json;
  check(garchre_chain_summary_json(chain.get(), returns, opt.literal_aic ? 1 : 0, prov.c_str(), &json.p));
  write_text(out_dir / (model + "_summary.json"), json.str());
  OwnedString table;
  check(garchre_chain_table(chain.get(), &table.p));
  std::cout << table.str();
  return json.str();
}

const std::vector<std::int64_t> kDefaultDeltas{5, 10, 15, 30, 60, 120, 300, 600, 900, 1800, 3600};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GARCH with rational or normal errors: Bayesian fits, model comparison, realized volatility"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(garchre_version()));

  std::string out_dir = ".";
  std::string data, ticks_path, calendar_path;
  ChainOptions chain_opts;

  // fit
  std::string fit_model;
  auto* fit = app.add_subcommand("fit", "Sample the posterior of one model on daily prices");
  fit->add_option("--model", fit_model, "garch-n or garch-re")->required();
  fit->add_option("--data", data, "Daily price CSV (date,close)")->required();
  fit->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  chain_opts.attach(fit);

  // compare
  std::vector<std::string> summaries;
  std::vector<std::string> compare_models{"garch-n", "garch-re"};
  auto* cmp = app.add_subcommand("compare", "Compare two fits by AIC and DIC");
  cmp->add_option("--summary", summaries, "Two summary JSON files from fit")->expected(2);
  cmp->add_option("--data", data, "Daily price CSV: fit the models in place instead of reading summaries");
  cmp->add_option("--model", compare_models, "Models to fit in place")->expected(2)->capture_default_str();
  cmp->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();
  chain_opts.attach(cmp);

  // rv
  std::vector<std::int64_t> deltas = kDefaultDeltas;
  auto* rv = app.add_subcommand("rv", "Realized variance, signature curve and HL factor per sampling period");
  rv->add_option("--ticks", ticks_path, "Tick CSV (timestamp,price)")->required();
  rv->add_option("--calendar", calendar_path, "Session calendar JSON (default: Tokyo sessions)");
  rv->add_option("--data", data, "Daily price CSV for the HL factor (default: daily closes of the ticks)");
  rv->add_option("--delta-list", deltas, "Sampling periods in seconds")->delimiter(',')->capture_default_str();
  rv->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  // rmspe
  std::vector<std::string> vols;
  bool literal_rmspe = false;
  auto* rm = app.add_subcommand("rmspe", "RMSPE of model volatilities against HL-adjusted RV per sampling period");
  rm->add_option("--ticks", ticks_path, "Tick CSV (timestamp,price)")->required();
  rm->add_option("--calendar", calendar_path, "Session calendar JSON (default: Tokyo sessions)");
  rm->add_option("--data", data, "Daily price CSV (default: daily closes of the ticks)");
  rm->add_option("--vols", vols, "Volatility CSVs from fit, as label=path or path")->required();
  rm->add_option("--delta-list", deltas, "Sampling periods in seconds")->delimiter(',')->capture_default_str();
  rm->add_flag("--literal-rmspe", literal_rmspe, "Omit the 1/N inside the square root");
  rm->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  // simulate
  garchre_sim_spec sim;
  garchre_sim_spec_init(&sim);
  std::string sim_model = "garch-re";
  std::uint64_t sim_seed = 1;
  auto* sm = app.add_subcommand("simulate", "Synthetic daily prices, ticks and the true variances");
  sm->add_option("--model", sim_model, "garch-n or garch-re")->capture_default_str();
  sm->add_option("--omega", sim.omega)->capture_default_str();
  sm->add_option("--alpha", sim.alpha)->capture_default_str();
  sm->add_option("--beta", sim.beta)->capture_default_str();
  sm->add_option("--a", sim.a, "Rational-law shape")->capture_default_str();
  sm->add_option("--days", sim.days)->capture_default_str();
  sm->add_option("--steps-per-day", sim.steps_per_day, "Intraday steps per trading day; 0 for daily prices only")
      ->capture_default_str();
  sm->add_option("--noise-variance", sim.noise_variance, "Variance of the log-price observation noise")
      ->capture_default_str();
  sm->add_option("--overnight-fraction", sim.overnight_fraction, "Share of daily variance realized overnight")
      ->capture_default_str();
  sm->add_option("--initial-price", sim.initial_price)->capture_default_str();
  sm->add_option("--calendar", calendar_path, "Session calendar JSON (default: Tokyo sessions)");
  sm->add_option("--seed", sim_seed, "Random seed")->capture_default_str();
  sm->add_option("--out-dir", out_dir, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const fs::path dir(out_dir);
    if (fit->parsed()) {
      auto returns = load_prices(data);
      fit_one(fit_model, data, returns.get(), chain_opts, dir);
    } else if (cmp->parsed()) {
      std::string first, second;
      if (!summaries.empty()) {
        first = read_text(summaries[0]);
        second = read_text(summaries[1]);
      } else if (!data.empty()) {
        auto returns = load_prices(data);
        first = fit_one(compare_models[0], data, returns.get(), chain_opts, dir);
        second = fit_one(compare_models[1], data, returns.get(), chain_opts, dir);
      } else {
        throw Failure{kUsage, "compare needs --summary A --summary B or --data"};
      }
      OwnedString json, table;
      check(garchre_compare_summaries(first.c_str(), second.c_str(), chain_opts.literal_aic ? 1 : 0, &json.p,
                                      &table.p));
      write_text(dir / "comparison.json", json.str());
      std::cout << table.str();
    } else if (rv->parsed()) {
      auto cal = load_calendar(calendar_path);
      auto ticks = load_ticks(ticks_path);
      auto daily = daily_returns(data, ticks.get(), cal.get());
      Provenance p("rv");
      p.add("ticks", ticks_path);
      p.add("calendar", calendar_path.empty() ? std::string("tokyo") : calendar_path);
      p.add("data", data.empty() ? std::string("tick closes") : data);
      p.add("delta_list", join(deltas));
      const auto prov = p.text();
      check(garchre_rv_run(ticks.get(), cal.get(), daily.get(), deltas.data(), deltas.size(), out_dir.c_str(),
                           prov.c_str()));
      std::cout << "wrote " << (dir / "signature.csv").string() << ", " << (dir / "hl_factor.csv").string() << " and "
                << deltas.size() << " RV series\n";
    } else if (rm->parsed()) {
      auto cal = load_calendar(calendar_path);
      auto ticks = load_ticks(ticks_path);
      auto daily = daily_returns(data, ticks.get(), cal.get());
      std::vector<std::string> labels, paths;
      for (const auto& v : vols) {
        const auto eq = v.find('=');
        std::string label, path;
        if (eq == std::string::npos) {
          path = v;
          label = fs::path(v).stem().string();
          const std::string suffix = "_volatility";
          if (label.size() > suffix.size() && label.ends_with(suffix)) label.resize(label.size() - suffix.size());
        } else {
          label = v.substr(0, eq);
          path = v.substr(eq + 1);
        }
        require_file(path);
        labels.push_back(label);
        paths.push_back(path);
      }
      std::vector<const char*> label_ptrs, path_ptrs;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        label_ptrs.push_back(labels[i].c_str());
        path_ptrs.push_back(paths[i].c_str());
      }
      Provenance p("rmspe");
      p.add("ticks", ticks_path);
      p.add("calendar", calendar_path.empty() ? std::string("tokyo") : calendar_path);
      p.add("data", data.empty() ? std::string("tick closes") : data);
      for (std::size_t i = 0; i < labels.size(); ++i) p.add("vols", labels[i] + "=" + paths[i]);
      p.add("delta_list", join(deltas));
      p.add("rmspe", literal_rmspe ? std::string("literal") : std::string("mean"));
      const auto prov = p.text();
      const auto out = (dir / "rmspe.csv").string();
      check(garchre_rmspe_run(ticks.get(), cal.get(), daily.get(), path_ptrs.data(), label_ptrs.data(), labels.size(),
                              deltas.data(), deltas.size(), literal_rmspe ? 1 : 0, out.c_str(), prov.c_str()));
      std::cout << "wrote " << out << "\n";
    } else if (sm->parsed()) {
      sim.model = model_of(sim_model);
      Calendar cal;
      if (!calendar_path.empty()) cal = load_calendar(calendar_path);
      Provenance p("simulate");
      p.add("calendar", calendar_path.empty() ? std::string("tokyo") : calendar_path);
      const auto prov = p.text();
      check(garchre_simulate(&sim, cal.get(), sim_seed, out_dir.c_str(), prov.c_str()));
      std::cout << "wrote daily.csv" << (sim.steps_per_day > 0 ? ", ticks.csv" : "") << " and truth.csv to "
                << dir.string() << "\n";
    }
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
