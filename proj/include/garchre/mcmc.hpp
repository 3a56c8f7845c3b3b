#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "garchre/garch.hpp"
#include "garchre/random.hpp"

namespace garchre {

enum class Model { garch_n, garch_re };

std::string_view model_name(Model model);
Model parse_model(std::string_view name);
std::size_t parameter_count(Model model);
/// "omega", "alpha", "beta" and, for GARCH-RE, "a".
std::vector<std::string> parameter_names(Model model);
GarchParams to_params(Model model, std::span<const double> natural);

struct ParameterBounds {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
};

/// Uniform prior on a box inside the positive orthant. The default (0, inf)
/// per parameter is the flat prior on the positivity-constrained space.
struct Prior {
  std::vector<ParameterBounds> bounds;

  static Prior flat(Model model);
  [[nodiscard]] bool contains(std::span<const double> natural) const;
  /// 0 inside the support (the flat density is left unnormalized), -inf outside.
  [[nodiscard]] double log_density(std::span<const double> natural) const;
};

/// log L(theta) + log prior(theta) in natural coordinates; -inf outside the support.
double log_posterior(Model model, std::span<const double> natural, std::span<const double> returns,
                     const Prior& prior, double init_variance);

// ---------------------------------------------------------------------------
// Proposal

/// Multivariate Student-t with location, scale matrix and dof nu > 2.
class StudentTProposal {
 public:
  StudentTProposal(Eigen::VectorXd location, Eigen::MatrixXd scale, double nu);

  [[nodiscard]] std::size_t dimension() const { return static_cast<std::size_t>(location_.size()); }
  [[nodiscard]] const Eigen::VectorXd& location() const { return location_; }
  [[nodiscard]] const Eigen::MatrixXd& scale() const { return scale_; }
  [[nodiscard]] double nu() const { return nu_; }
  /// scale * nu / (nu - 2)
  [[nodiscard]] Eigen::MatrixXd covariance() const { return scale_ * (nu_ / (nu_ - 2.0)); }

  [[nodiscard]] double log_density(const Eigen::VectorXd& x) const;
  Eigen::VectorXd draw(Rng& rng) const;

 private:
  Eigen::VectorXd location_;
  Eigen::MatrixXd scale_;
  Eigen::MatrixXd chol_;  // lower factor of scale_
  double nu_;
  double log_norm_;
};

inline constexpr double kCovarianceJitter = 1e-10;

/// Refit a Student-t proposal to a sample history (rows are draws): location is
/// the sample mean, scale the sample covariance times (nu - 2) / nu so the
/// proposal covariance equals the sample covariance. A near-singular
/// covariance gets kCovarianceJitter added to its diagonal.
StudentTProposal adapt_proposal(const Eigen::MatrixXd& history, double nu);

// ---------------------------------------------------------------------------
// Independence Metropolis-Hastings

using LogTarget = std::function<double(const Eigen::VectorXd&)>;

struct ChainState {
  Eigen::VectorXd point;
  double log_target = -std::numeric_limits<double>::infinity();
  double log_proposal = 0.0;  ///< proposal log-density at `point`
};

/// min{1, [pi(cand) q(cur)] / [pi(cur) q(cand)]} from log values.
double acceptance_probability(double current_log_target, double current_log_proposal,
                              double candidate_log_target, double candidate_log_proposal);

/// One independence-chain step. Returns true when the candidate was accepted;
/// on rejection `state` is unchanged.
bool mh_step(ChainState& state, const StudentTProposal& proposal, const LogTarget& target, Rng& rng);

struct SamplerConfig {
  std::size_t burn_in = 6000;
  std::size_t samples = 50000;
  std::size_t adapt_interval = 500;
  double nu = 10.0;
};

struct SamplerRun {
  Eigen::MatrixXd samples;          ///< retained draws, one per row
  std::vector<double> log_target;   ///< per retained draw
  std::size_t accepted = 0;         ///< accepted moves after burn-in
  double acceptance_rate = 0.0;     ///< after burn-in
  std::size_t adaptations = 0;
  StudentTProposal proposal;        ///< frozen proposal used after burn-in
};

/// MHAS: during burn-in the proposal is refitted to the accumulated burn-in
/// history every `adapt_interval` steps; afterwards it is frozen and
/// `samples` draws are retained.
SamplerRun run_mhas(const LogTarget& target, const StudentTProposal& initial, const Eigen::VectorXd& start,
                    const SamplerConfig& config, Rng& rng);

// ---------------------------------------------------------------------------
// GARCH posterior chains

struct ChainConfig {
  std::size_t burn_in = 6000;
  std::size_t samples = 50000;
  std::size_t adapt_interval = 500;
  double nu = 10.0;
  std::uint64_t seed = 1;
  std::optional<Prior> prior;           ///< flat when absent
  std::optional<double> init_variance;  ///< sample variance of the returns when absent

  /// Throws invalid_argument on inconsistent settings.
  void validate(Model model) const;
};

struct ParameterSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double tau_int = 0.0;
};

struct PosteriorChain {
  Model model = Model::garch_n;
  ChainConfig config;
  double init_variance = 0.0;
  std::size_t burn_in = 0;
  Eigen::MatrixXd transformed;  ///< log-coordinates, one row per retained sample
  Eigen::MatrixXd natural;      ///< exp(transformed)
  std::vector<double> log_posterior;
  std::vector<double> log_likelihood;
  double acceptance_rate = 0.0;
  std::vector<ParameterSummary> summary;
  Eigen::VectorXd mode_estimate;  ///< start point of the chain (log-coordinates)

  [[nodiscard]] std::vector<double> mean_natural() const;
  [[nodiscard]] GarchParams mean_params() const { return to_params(model, mean_natural()); }
  /// Row with the largest log-posterior.
  [[nodiscard]] std::vector<double> modal_sample() const;
};

/// Independence MHAS on (ln omega, ln alpha, ln beta[, ln a]) with the
/// log-Jacobian included. The chain starts at the posterior mode, with an
/// initial proposal from the curvature there, then adapts during burn-in.
/// Throws an adaptation error when fewer than 1% of post-burn-in moves are accepted.
PosteriorChain run_chain(Model model, const ReturnSeries& returns, const ChainConfig& config);
PosteriorChain run_chain(Model model, std::span<const double> returns, const ChainConfig& config);

/// `count` independent chains with seeds config.seed, config.seed + 1, ...,
/// run on worker threads.
std::vector<PosteriorChain> run_chains(Model model, std::span<const double> returns, const ChainConfig& config,
                                       std::size_t count);

/// sigma2_t averaged over up to `max_draws` evenly spaced posterior samples.
std::vector<double> posterior_mean_variance(const PosteriorChain& chain, std::span<const double> returns,
                                            std::size_t max_draws = 2000);

// ---------------------------------------------------------------------------
// Diagnostics

struct AcfDiagnostics {
  std::vector<double> acf;
  double tau_int = 1.0;
  std::size_t window = 0;
};

/// Biased (1/N) autocorrelations for lags 0..max_lag. Throws when the series
/// has zero variance.
std::vector<double> acf(std::span<const double> series, std::size_t max_lag);

/// tau_int = 1 + 2 sum_{t=1..W} acf(t), W the smallest window with W >= 5 tau_int(W).
/// `acf` in the result holds lags 0..W.
AcfDiagnostics integrated_autocorr_time(std::span<const double> series);

}  // namespace garchre
