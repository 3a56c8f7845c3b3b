#include "garchre/selection.hpp"

#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "garchre/error.hpp"

namespace garchre {

double aic(double lnL_at_mean, std::size_t k, AicForm form) {
  if (k == 0) throw Error(ErrorKind::invalid_argument, "AIC needs at least one parameter");
  const double kk = static_cast<double>(k);
  return form == AicForm::standard ? -2.0 * lnL_at_mean + 2.0 * kk : -lnL_at_mean - 2.0 * kk;
}

double dic(double lnL_at_mean, double mean_lnL) { return 2.0 * (lnL_at_mean - 2.0 * mean_lnL); }

FitScore score_chain(const PosteriorChain& chain, std::span<const double> returns, AicForm form) {
  if (chain.log_likelihood.empty()) throw Error(ErrorKind::insufficient_data, "chain has no samples");
  FitScore s;
  s.model = std::string(model_name(chain.model));
  s.k = parameter_count(chain.model);
  s.lnL_at_mean = log_likelihood(chain.mean_params(), returns, chain.init_variance);
  s.mean_lnL = std::accumulate(chain.log_likelihood.begin(), chain.log_likelihood.end(), 0.0) /
               static_cast<double>(chain.log_likelihood.size());
  s.aic_form = form;
  s.aic = aic(s.lnL_at_mean, s.k, form);
  s.dic = dic(s.lnL_at_mean, s.mean_lnL);
  return s;
}

namespace {

Preference smaller(double a, double b) {
  if (a < b) return Preference::first;
  if (b < a) return Preference::second;
  return Preference::tie;
}

const char* preference_name(Preference p) {
  switch (p) {
    case Preference::first: return "first";
    case Preference::second: return "second";
    case Preference::tie: return "tie";
  }
  return "tie";
}

nlohmann::ordered_json score_json(const FitScore& s) {
  nlohmann::ordered_json j;
  j["model"] = s.model;
  j["k"] = s.k;
  j["lnL_at_mean"] = s.lnL_at_mean;
  j["mean_lnL"] = s.mean_lnL;
  j["aic"] = s.aic;
  j["aic_form"] = s.aic_form == AicForm::standard ? "standard" : "literal";
  j["dic"] = s.dic;
  return j;
}

std::string winner_label(const Comparison& c, Preference p) {
  if (p == Preference::tie) return "tie";
  return p == Preference::first ? c.first.model : c.second.model;
}

}  // namespace

Comparison compare(const FitScore& first, const FitScore& second) {
  Comparison c{first, second, smaller(first.aic, second.aic), smaller(first.dic, second.dic), false};
  c.disagreement = c.aic != Preference::tie && c.dic != Preference::tie && c.aic != c.dic;
  return c;
}

std::string comparison_json(const Comparison& c) {
  nlohmann::ordered_json j;
  j["first"] = score_json(c.first);
  j["second"] = score_json(c.second);
  j["aic_preference"] = preference_name(c.aic);
  j["aic_winner"] = winner_label(c, c.aic);
  j["dic_preference"] = preference_name(c.dic);
  j["dic_winner"] = winner_label(c, c.dic);
  j["disagreement"] = c.disagreement;
  return j.dump(2);
}

std::string comparison_table(const Comparison& c) {
  char line[256];
  std::string out;
  std::snprintf(line, sizeof line, "%-8s | %16s | %16s\n", "", c.first.model.c_str(), c.second.model.c_str());
  out += line;
  out += std::string(46, '-') + "\n";
  std::snprintf(line, sizeof line, "%-8s | %16.2f | %16.2f\n", "AIC", c.first.aic, c.second.aic);
  out += line;
  std::snprintf(line, sizeof line, "%-8s | %16.2f | %16.2f\n", "DIC", c.first.dic, c.second.dic);
  out += line;
  out += std::string(46, '-') + "\n";
  out += "AIC prefers: " + winner_label(c, c.aic) + "\n";
  out += "DIC prefers: " + winner_label(c, c.dic) + "\n";
  if (c.disagreement) out += "criteria disagree\n";
  return out;
}

}  // namespace garchre
