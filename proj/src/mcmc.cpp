#include "garchre/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <thread>

#include <unsupported/Eigen/FFT>

#include "garchre/error.hpp"

namespace garchre {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::string_view model_name(Model model) { return model == Model::garch_n ? "garch-n" : "garch-re"; }

Model parse_model(std::string_view name) {
  if (name == "garch-n") return Model::garch_n;
  if (name == "garch-re") return Model::garch_re;
  throw Error(ErrorKind::invalid_argument, "unknown model '" + std::string(name) + "' (expected garch-n or garch-re)");
}

std::size_t parameter_count(Model model) { return model == Model::garch_n ? 3 : 4; }

std::vector<std::string> parameter_names(Model model) {
  std::vector<std::string> names{"omega", "alpha", "beta"};
  if (model == Model::garch_re) names.emplace_back("a");
  return names;
}

GarchParams to_params(Model model, std::span<const double> natural) {
  if (natural.size() != parameter_count(model)) {
    throw Error(ErrorKind::invalid_argument, "parameter vector has the wrong dimension");
  }
  if (model == Model::garch_n) return GarchParams::normal(natural[0], natural[1], natural[2]);
  return GarchParams::rational(natural[0], natural[1], natural[2], natural[3]);
}

Prior Prior::flat(Model model) { return Prior{std::vector<ParameterBounds>(parameter_count(model))}; }

bool Prior::contains(std::span<const double> natural) const {
  if (natural.size() != bounds.size()) return false;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(natural[i] > bounds[i].lower && natural[i] < bounds[i].upper)) return false;
  }
  return true;
}

double Prior::log_density(std::span<const double> natural) const { return contains(natural) ? 0.0 : kNegInf; }

double log_posterior(Model model, std::span<const double> natural, std::span<const double> returns,
                     const Prior& prior, double init_variance) {
  const double lp = prior.log_density(natural);
  if (lp == kNegInf) return kNegInf;
  return lp + detail::log_likelihood_or_neg_inf(to_params(model, natural), returns, init_variance);
}

// ---------------------------------------------------------------------------

StudentTProposal::StudentTProposal(Eigen::VectorXd location, Eigen::MatrixXd scale, double nu)
    : location_(std::move(location)), scale_(std::move(scale)), nu_(nu) {
  const auto d = location_.size();
  if (d == 0 || scale_.rows() != d || scale_.cols() != d) {
    throw Error(ErrorKind::invalid_argument, "proposal location and scale dimensions disagree");
  }
  if (!(nu_ > 2.0) || !std::isfinite(nu_)) {
    throw Error(ErrorKind::invalid_argument, "proposal degrees of freedom must exceed 2");
  }
  if (!scale_.isApprox(scale_.transpose(), 1e-12)) {
    throw Error(ErrorKind::invalid_argument, "proposal scale matrix is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(scale_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "proposal scale matrix is not positive definite");
  }
  chol_ = llt.matrixL();
  const double dd = static_cast<double>(d);
  const double log_det = 2.0 * chol_.diagonal().array().log().sum();
  log_norm_ = std::lgamma(0.5 * (nu_ + dd)) - std::lgamma(0.5 * nu_) - 0.5 * dd * std::log(nu_ * M_PI) -
              0.5 * log_det;
}

double StudentTProposal::log_density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd white = chol_.triangularView<Eigen::Lower>().solve(x - location_);
  const double d = static_cast<double>(location_.size());
  return log_norm_ - 0.5 * (nu_ + d) * std::log1p(white.squaredNorm() / nu_);
}

Eigen::VectorXd StudentTProposal::draw(Rng& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> chi2(0.5 * nu_, 2.0);
  Eigen::VectorXd g(location_.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = normal(rng);
  const double w = chi2(rng);
  return location_ + chol_ * g * std::sqrt(nu_ / w);
}

StudentTProposal adapt_proposal(const Eigen::MatrixXd& history, double nu) {
  const auto n = history.rows();
  const auto d = history.cols();
  if (n < d + 2) {
    throw Error(ErrorKind::insufficient_data, "proposal adaptation needs at least dimension + 2 history rows");
  }
  const Eigen::VectorXd mean = history.colwise().mean().transpose();
  const Eigen::MatrixXd centered = history.rowwise() - mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
  cov = 0.5 * (cov + cov.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < kCovarianceJitter) {
    cov.diagonal().array() += kCovarianceJitter;
  }
  return StudentTProposal(mean, cov * ((nu - 2.0) / nu), nu);
}

// ---------------------------------------------------------------------------

double acceptance_probability(double current_log_target, double current_log_proposal,
                              double candidate_log_target, double candidate_log_proposal) {
  if (candidate_log_target == kNegInf || std::isnan(candidate_log_target)) return 0.0;
  if (current_log_target == kNegInf) return 1.0;
  const double log_ratio =
      (candidate_log_target - candidate_log_proposal) - (current_log_target - current_log_proposal);
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

bool mh_step(ChainState& state, const StudentTProposal& proposal, const LogTarget& target, Rng& rng) {
  Eigen::VectorXd candidate = proposal.draw(rng);
  const double cand_target = target(candidate);
  const double cand_q = proposal.log_density(candidate);
  const double u = open_uniform(rng);
  if (u >= acceptance_probability(state.log_target, state.log_proposal, cand_target, cand_q)) return false;
  state.point = std::move(candidate);
  state.log_target = cand_target;
  state.log_proposal = cand_q;
  return true;
}

SamplerRun run_mhas(const LogTarget& target, const StudentTProposal& initial, const Eigen::VectorXd& start,
                    const SamplerConfig& config, Rng& rng) {
  const auto d = start.size();
  if (config.samples == 0) throw Error(ErrorKind::invalid_argument, "samples must be positive");
  if (config.adapt_interval == 0) throw Error(ErrorKind::invalid_argument, "adapt_interval must be positive");

  SamplerRun out{Eigen::MatrixXd(static_cast<Eigen::Index>(config.samples), d), {}, 0, 0.0, 0, initial};
  out.log_target.reserve(config.samples);

  ChainState state{start, target(start), initial.log_density(start)};
  if (state.log_target == kNegInf) {
    throw Error(ErrorKind::domain, "sampler start point lies outside the target support");
  }

  Eigen::MatrixXd history(static_cast<Eigen::Index>(config.burn_in), d);
  for (std::size_t i = 0; i < config.burn_in; ++i) {
    mh_step(state, out.proposal, target, rng);
    history.row(static_cast<Eigen::Index>(i)) = state.point.transpose();
    const std::size_t filled = i + 1;
    if (filled % config.adapt_interval == 0 && static_cast<Eigen::Index>(filled) >= d + 2) {
      out.proposal = adapt_proposal(history.topRows(static_cast<Eigen::Index>(filled)), config.nu);
      state.log_proposal = out.proposal.log_density(state.point);
      ++out.adaptations;
    }
  }

  for (std::size_t i = 0; i < config.samples; ++i) {
    if (mh_step(state, out.proposal, target, rng)) ++out.accepted;
    out.samples.row(static_cast<Eigen::Index>(i)) = state.point.transpose();
    out.log_target.push_back(state.log_target);
  }
  out.acceptance_rate = static_cast<double>(out.accepted) / static_cast<double>(config.samples);
  return out;
}

// ---------------------------------------------------------------------------

void ChainConfig::validate(Model model) const {
  const auto d = parameter_count(model);
  if (samples == 0) throw Error(ErrorKind::invalid_argument, "samples must be positive");
  if (adapt_interval < d + 2) {
    throw Error(ErrorKind::invalid_argument, "adapt_interval must be at least the parameter count + 2");
  }
  if (burn_in < adapt_interval) throw Error(ErrorKind::invalid_argument, "burn_in must be >= adapt_interval");
  if (!(nu > 2.0) || !std::isfinite(nu)) throw Error(ErrorKind::invalid_argument, "nu must exceed 2");
  if (prior && prior->bounds.size() != d) throw Error(ErrorKind::invalid_argument, "prior has the wrong dimension");
  if (init_variance && !(*init_variance > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "init_variance must be positive");
  }
}

std::vector<double> PosteriorChain::mean_natural() const {
  std::vector<double> m(static_cast<std::size_t>(natural.cols()));
  for (Eigen::Index j = 0; j < natural.cols(); ++j) m[static_cast<std::size_t>(j)] = natural.col(j).mean();
  return m;
}

std::vector<double> PosteriorChain::modal_sample() const {
  const auto it = std::max_element(log_posterior.begin(), log_posterior.end());
  const auto row = static_cast<Eigen::Index>(it - log_posterior.begin());
  std::vector<double> out(static_cast<std::size_t>(natural.cols()));
  for (Eigen::Index j = 0; j < natural.cols(); ++j) out[static_cast<std::size_t>(j)] = natural(row, j);
  return out;
}

namespace {

// Nelder-Mead maximization of f starting from x0 with per-coordinate step.
Eigen::VectorXd nelder_mead_max(const LogTarget& f, const Eigen::VectorXd& x0, double step, int max_evals) {
  const auto n = x0.size();
  std::vector<Eigen::VectorXd> simplex{x0};
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd v = x0;
    v[i] += step;
    simplex.push_back(v);
  }
  // Minimize g = -f; -inf targets become +inf.
  auto g = [&](const Eigen::VectorXd& x) {
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : -v;
  };
  std::vector<double> values;
  for (const auto& v : simplex) values.push_back(g(v));
  int evals = static_cast<int>(values.size());

  std::vector<std::size_t> order(simplex.size());
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::isfinite(values[worst]) && std::abs(values[worst] - values[best]) < 1e-10 * (1.0 + std::abs(values[best]))) {
      double spread = 0.0;
      for (const auto& v : simplex) spread = std::max(spread, (v - simplex[best]).cwiseAbs().maxCoeff());
      if (spread < 1e-7) break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i != worst) centroid += simplex[i];
    }
    centroid /= static_cast<double>(n);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    const double fr = g(reflected);
    ++evals;
    if (fr < values[best]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      const double fe = g(expanded);
      ++evals;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const Eigen::VectorXd contracted =
        outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
    const double fc = g(contracted);
    ++evals;
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best) continue;
      simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
      values[i] = g(simplex[i]);
      ++evals;
    }
  }
  const auto it = std::min_element(values.begin(), values.end());
  return simplex[static_cast<std::size_t>(it - values.begin())];
}

// Covariance from the negative inverse Hessian at x (central differences);
// falls back to a diagonal guess when the curvature is not negative definite.
Eigen::MatrixXd laplace_covariance(const LogTarget& f, const Eigen::VectorXd& x) {
  const auto n = x.size();
  const double h = 1e-3;
  const double f0 = f(x);
  Eigen::MatrixXd hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    hess(i, i) = (f(xp) - 2.0 * f0 + f(xm)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      Eigen::VectorXd pp = x, pm = x, mp = x, mm = x;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      hess(i, j) = hess(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * h * h);
    }
  }
  const Eigen::MatrixXd precision = -hess;
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (!precision.allFinite() || llt.info() != Eigen::Success) {
    return Eigen::MatrixXd::Identity(n, n) * 0.05;
  }
  Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

PosteriorChain run_chain(Model model, std::span<const double> returns, const ChainConfig& config) {
  config.validate(model);
  if (returns.size() < 30) {
    throw Error(ErrorKind::insufficient_data, "at least 30 returns are needed to fit a GARCH model");
  }
  const auto d = static_cast<Eigen::Index>(parameter_count(model));
  const Prior prior = config.prior ? *config.prior : Prior::flat(model);
  const double init = config.init_variance ? *config.init_variance : default_init_variance(returns);

  std::vector<double> natural(static_cast<std::size_t>(d));
  // Target in log-coordinates z = ln(theta): log posterior plus log-Jacobian sum(z).
  const LogTarget target = [&](const Eigen::VectorXd& z) {
    for (Eigen::Index i = 0; i < d; ++i) natural[static_cast<std::size_t>(i)] = std::exp(z[i]);
    const double lp = log_posterior(model, natural, returns, prior, init);
    return lp == kNegInf ? kNegInf : lp + z.sum();
  };

  // Start from a persistent, moderately reactive guess matched to the sample variance.
  Eigen::VectorXd z0(d);
  z0[0] = std::log(init * 0.05);
  z0[1] = std::log(0.10);
  z0[2] = std::log(0.85);
  if (model == Model::garch_re) z0[3] = std::log(1.5);
  for (Eigen::Index i = 0; i < d; ++i) {
    // Keep the start inside a bounded prior.
    const auto& b = prior.bounds[static_cast<std::size_t>(i)];
    double v = std::exp(z0[i]);
    if (!(v > b.lower && v < b.upper)) {
      v = std::isfinite(b.upper) ? 0.5 * (b.lower + b.upper) : b.lower * 2.0 + 1e-8;
      z0[i] = std::log(v);
    }
  }

  const Eigen::VectorXd mode = nelder_mead_max(target, z0, 0.5, 4000);
  const Eigen::MatrixXd laplace = laplace_covariance(target, mode);
  // Widen the curvature-based guess so the first proposal covers the posterior.
  const StudentTProposal initial(mode, 1.5 * laplace * ((config.nu - 2.0) / config.nu), config.nu);

  Rng rng(config.seed);
  const SamplerConfig sc{config.burn_in, config.samples, config.adapt_interval, config.nu};
  SamplerRun run = run_mhas(target, initial, mode, sc, rng);

  if (run.acceptance_rate < 0.01) {
    throw Error(ErrorKind::adaptation,
                "adaptation failed: acceptance rate " + std::to_string(run.acceptance_rate) +
                    " after burn-in; try a wider prior or a longer burn-in");
  }

  PosteriorChain chain;
  chain.model = model;
  chain.config = config;
  chain.init_variance = init;
  chain.burn_in = config.burn_in;
  chain.mode_estimate = mode;
  chain.acceptance_rate = run.acceptance_rate;
  chain.transformed = std::move(run.samples);
  chain.natural = chain.transformed.array().exp().matrix();
  chain.log_posterior.resize(config.samples);
  chain.log_likelihood.resize(config.samples);
  for (std::size_t i = 0; i < config.samples; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const double lp = run.log_target[i] - chain.transformed.row(row).sum();
    chain.log_posterior[i] = lp;
    chain.log_likelihood[i] = lp;  // the uniform prior's log-density is 0 on its support
  }

  const auto names = parameter_names(model);
  for (Eigen::Index j = 0; j < d; ++j) {
    ParameterSummary s;
    s.name = names[static_cast<std::size_t>(j)];
    const auto col = chain.natural.col(j);
    s.mean = col.mean();
    const double n = static_cast<double>(col.size());
    s.sd = n > 1 ? std::sqrt((col.array() - s.mean).square().sum() / (n - 1.0)) : 0.0;
    std::vector<double> series(col.data(), col.data() + col.size());
    try {
      s.tau_int = integrated_autocorr_time(series).tau_int;
    } catch (const Error&) {
      s.tau_int = std::numeric_limits<double>::quiet_NaN();
    }
    chain.summary.push_back(std::move(s));
  }
  return chain;
}

PosteriorChain run_chain(Model model, const ReturnSeries& returns, const ChainConfig& config) {
  return run_chain(model, returns.values(), config);
}

std::vector<PosteriorChain> run_chains(Model model, std::span<const double> returns, const ChainConfig& config,
                                       std::size_t count) {
  std::vector<std::optional<PosteriorChain>> results(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        ChainConfig c = config;
        c.seed = config.seed + i;
        try {
          results[i] = run_chain(model, returns, c);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<PosteriorChain> out;
  out.reserve(count);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

std::vector<double> posterior_mean_variance(const PosteriorChain& chain, std::span<const double> returns,
                                            std::size_t max_draws) {
  const auto rows = static_cast<std::size_t>(chain.natural.rows());
  if (rows == 0 || max_draws == 0) throw Error(ErrorKind::insufficient_data, "empty posterior chain");
  const std::size_t stride = std::max<std::size_t>(1, rows / max_draws);
  std::vector<double> acc(returns.size(), 0.0);
  std::size_t used = 0;
  std::vector<double> theta(static_cast<std::size_t>(chain.natural.cols()));
  for (std::size_t r = 0; r < rows && used < max_draws; r += stride) {
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = chain.natural(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
    const auto path = variance_path(to_params(chain.model, theta), returns, chain.init_variance);
    for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += path[t];
    ++used;
  }
  for (double& v : acc) v /= static_cast<double>(used);
  return acc;
}

// ---------------------------------------------------------------------------

namespace {

// Biased autocovariances for every lag via zero-padded FFT.
std::vector<double> autocovariance(std::span<const double> series) {
  const std::size_t n = series.size();
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  std::size_t size = 1;
  while (size < 2 * n) size <<= 1;
  std::vector<double> padded(size, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = series[i] - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (auto& c : spectrum) c = std::complex<double>(std::norm(c), 0.0);
  std::vector<double> back;
  fft.inv(back, spectrum);
  back.resize(n);
  for (double& v : back) v /= static_cast<double>(n);
  return back;
}

}  // namespace

std::vector<double> acf(std::span<const double> series, std::size_t max_lag) {
  if (series.size() <= max_lag) throw Error(ErrorKind::insufficient_data, "series must be longer than max_lag");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(series.size());
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  if (!(c0 > 0.0)) throw Error(ErrorKind::domain, "autocorrelation undefined for a zero-variance series");

  std::vector<double> out(max_lag + 1);
  out[0] = 1.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < series.size(); ++t) ck += (series[t] - mean) * (series[t + k] - mean);
    out[k] = ck / c0;
  }
  return out;
}

AcfDiagnostics integrated_autocorr_time(std::span<const double> series) {
  if (series.size() < 2) throw Error(ErrorKind::insufficient_data, "at least two values are needed for tau_int");
  const auto cov = autocovariance(series);
  if (!(cov[0] > 0.0)) throw Error(ErrorKind::domain, "autocorrelation undefined for a zero-variance series");

  AcfDiagnostics out;
  out.acf.push_back(1.0);
  double tau = 1.0;
  std::size_t w = 1;
  for (; w < series.size(); ++w) {
    out.acf.push_back(cov[w] / cov[0]);
    tau += 2.0 * out.acf.back();
    if (static_cast<double>(w) >= 5.0 * tau) break;
  }
  out.tau_int = tau;
  out.window = std::min(w, series.size() - 1);
  return out;
}

}  // namespace garchre
