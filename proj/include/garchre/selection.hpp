#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "garchre/mcmc.hpp"

namespace garchre {

enum class AicForm {
  standard,       ///< -2 ln L(theta_bar) + 2k
  literal,  ///< -ln L(theta_bar) - 2k, kept for reproducing the printed expression
};

double aic(double lnL_at_mean, std::size_t k, AicForm form = AicForm::standard);

/// 2 (ln L(theta_bar) - 2 E[ln L(theta)]); equivalently -2 ln L(theta_bar) + 2 p_D.
double dic(double lnL_at_mean, double mean_lnL);

struct FitScore {
  std::string model;
  double aic = 0.0;
  double dic = 0.0;
  std::size_t k = 0;
  double lnL_at_mean = 0.0;
  double mean_lnL = 0.0;
  AicForm aic_form = AicForm::standard;
};

/// Scores a chain against the returns it was fitted to. lnL is evaluated at
/// the posterior mean with the chain's initial variance.
FitScore score_chain(const PosteriorChain& chain, std::span<const double> returns,
                     AicForm form = AicForm::standard);

enum class Preference { first, second, tie };

struct Comparison {
  FitScore first;
  FitScore second;
  Preference aic = Preference::tie;
  Preference dic = Preference::tie;
  /// Both criteria name a winner and they differ.
  bool disagreement = false;
};

/// The smaller value wins each criterion; equal values tie.
Comparison compare(const FitScore& first, const FitScore& second);

std::string comparison_json(const Comparison& c);
/// Two-column text table: AIC and DIC rows, one column per model, plus the verdict.
std::string comparison_table(const Comparison& c);

}  // namespace garchre
