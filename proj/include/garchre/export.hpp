#pragma once

// Plot-ready CSV and JSON artifacts. Every writer takes provenance lines that
// are emitted as leading '#' comments (CSV) or a "provenance" array (JSON);
// the readers in this library skip them.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "garchre/mcmc.hpp"
#include "garchre/realized.hpp"
#include "garchre/selection.hpp"
#include "garchre/simulate.hpp"

namespace garchre {

/// FNV-1a over the bit patterns of the values; identifies a dataset in summaries.
std::string data_fingerprint(std::span<const double> values);

/// "0.132(38)": value with its one-sigma uncertainty on the last two digits;
/// small or large magnitudes get an exponent suffix, e.g. "2.8(12)e-05".
std::string format_with_uncertainty(double value, double sd);

/// Header of parameter names, then one row per retained sample (natural space).
void write_chain_csv(std::ostream& out, const PosteriorChain& chain, std::span<const std::string> provenance);

/// Per-parameter mean, sd, tau_int, acceptance rate, ln L at the mean, the
/// chain's mean ln L, k and the information criteria.
std::string summary_json(const PosteriorChain& chain, std::span<const double> returns, AicForm form,
                         std::span<const std::string> provenance);

/// Parameter rows formatted as value(uncertainty) and tau_int.
std::string summary_table(const PosteriorChain& chain);

struct SummaryRecord {
  FitScore score;
  std::string fingerprint;
  std::size_t observations = 0;
};

/// Reads the fit score and dataset identity back from summary_json output,
/// recomputing AIC in the requested form.
SummaryRecord parse_summary(const std::string& json, AicForm form);

void write_volatility_csv(std::ostream& out, std::span<const Date> dates, std::span<const double> variance,
                          std::span<const std::string> provenance);

VolSeries load_volatility_csv(std::istream& in);
VolSeries load_volatility_csv_file(const std::string& path);

/// `date,rv,c_adjusted_rv`; the last column is empty without an HL factor.
void write_rv_csv(std::ostream& out, const RvSeries& rv, std::span<const std::string> provenance);

/// `delta_seconds,avg_rv,hl_factor`
void write_signature_csv(std::ostream& out, const SignatureCurve& curve, std::span<const std::string> provenance);

/// `delta_seconds,hl_factor,rmspe_<model>...`
void write_rmspe_csv(std::ostream& out, std::span<const RmspePoint> points, std::span<const std::string> models,
                     std::span<const std::string> provenance);

/// `date,return,garch_variance,integrated_variance`
void write_truth_csv(std::ostream& out, const MarketSimulation& sim, std::span<const std::string> provenance);

}  // namespace garchre
