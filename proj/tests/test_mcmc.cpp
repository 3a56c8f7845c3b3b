#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "garchre/error.hpp"
#include "garchre/mcmc.hpp"
#include "garchre/simulate.hpp"

using namespace garchre;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> x(n);
  double v = 0.0;
  for (std::size_t i = 0; i < 1000; ++i) v = phi * v + z(rng);
  for (auto& e : x) e = v = phi * v + z(rng);
  return x;
}

double mean_of(const std::vector<double>& x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Standard error of the mean by non-overlapping batch means.
double batch_se(const std::vector<double>& x, std::size_t batches) {
  const std::size_t len = x.size() / batches;
  std::vector<double> m(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    m[b] = std::accumulate(x.begin() + static_cast<long>(b * len), x.begin() + static_cast<long>((b + 1) * len), 0.0) /
           static_cast<double>(len);
  }
  const double mu = mean_of(m);
  double ss = 0.0;
  for (double v : m) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

std::vector<double> garch_returns(const GarchParams& p, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  const auto path = simulate_garch(p, n, rng);
  return {path.returns.values().begin(), path.returns.values().end()};
}

}  // namespace

TEST_CASE("model names and parameter layout") {
  CHECK(parse_model("garch-n") == Model::garch_n);
  CHECK(parse_model("garch-re") == Model::garch_re);
  CHECK_THROWS_AS(parse_model("garch-t"), Error);
  CHECK(parameter_count(Model::garch_n) == 3);
  CHECK(parameter_count(Model::garch_re) == 4);
  CHECK(parameter_names(Model::garch_re).back() == "a");
}

TEST_CASE("flat prior: posterior minus likelihood is constant") {
  const auto y = garch_returns(GarchParams::normal(1e-5, 0.1, 0.85), 200, 4);
  const double init = default_init_variance(y);
  const auto prior = Prior::flat(Model::garch_re);
  for (const auto& theta : {std::vector<double>{1e-5, 0.1, 0.85, 1.5}, std::vector<double>{3e-5, 0.2, 0.6, 0.9},
                            std::vector<double>{1e-6, 0.01, 0.99, 4.0}}) {
    const double diff =
        log_posterior(Model::garch_re, theta, y, prior, init) - log_likelihood(to_params(Model::garch_re, theta), y, init);
    CHECK(diff == 0.0);
  }
  const std::vector<double> negative{-1e-5, 0.1, 0.85};
  CHECK(log_posterior(Model::garch_n, negative, y, Prior::flat(Model::garch_n), init) == kNegInf);

  Prior box{{{0.0, 1.0}, {0.0, 0.5}, {0.0, 1.0}}};
  const std::vector<double> outside{1e-5, 0.6, 0.3};
  CHECK(log_posterior(Model::garch_n, outside, y, box, init) == kNegInf);
}

TEST_CASE("acceptance probability") {
  CHECK(acceptance_probability(-3.0, -1.0, -2.0, 0.0) == 1.0);  // pi' q = pi q'
  CHECK(acceptance_probability(-1.0, 0.0, kNegInf, 0.0) == 0.0);
  CHECK(acceptance_probability(-1.0, 0.0, -2.0, 0.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(acceptance_probability(-1.0, -5.0, -1.0, -3.0) == doctest::Approx(std::exp(-2.0)));
  CHECK(acceptance_probability(kNegInf, 0.0, -100.0, 0.0) == 1.0);
}

TEST_CASE("mh_step never accepts outside the support") {
  const StudentTProposal q(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1), 10.0);
  const LogTarget target = [](const Eigen::VectorXd&) { return kNegInf; };
  ChainState s{Eigen::VectorXd::Zero(1), 0.0, q.log_density(Eigen::VectorXd::Zero(1))};
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) CHECK_FALSE(mh_step(s, q, target, rng));
  CHECK(s.point[0] == 0.0);
}

TEST_CASE("Student-t proposal") {
  CHECK_THROWS_AS(StudentTProposal(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), 2.0), Error);
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(StudentTProposal(Eigen::VectorXd::Zero(2), bad, 10.0), Error);

  // Large nu approaches the normal density.
  Eigen::MatrixXd cov(2, 2);
  cov << 1.0, 0.3, 0.3, 0.5;
  Eigen::VectorXd mu(2);
  mu << 0.2, -1.0;
  const StudentTProposal t(mu, cov, 1e6);
  const double normal_at_mode = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(cov.determinant());
  CHECK(std::fabs(std::exp(t.log_density(mu) - normal_at_mode) - 1.0) < 1e-3);

  // One-dimensional density integrates to one (trapezoid on a wide grid).
  const StudentTProposal one(Eigen::VectorXd::Constant(1, 0.5), Eigen::MatrixXd::Constant(1, 1, 2.0), 10.0);
  double integral = 0.0;
  const double h = 1e-3;
  for (double x = -80.0; x <= 80.0; x += h) integral += std::exp(one.log_density(Eigen::VectorXd::Constant(1, x))) * h;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-5));

  // Draws have covariance scale * nu / (nu - 2).
  Rng rng(11);
  const int n = 200000;
  Eigen::MatrixXd draws(n, 2);
  const StudentTProposal q(mu, cov, 10.0);
  for (int i = 0; i < n; ++i) draws.row(i) = q.draw(rng).transpose();
  const Eigen::RowVectorXd m = draws.colwise().mean();
  const Eigen::MatrixXd c = (draws.rowwise() - m).transpose() * (draws.rowwise() - m) / (n - 1);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(c(i, j) == doctest::Approx(q.covariance()(i, j)).epsilon(0.03));
  }
}

TEST_CASE("adapt_proposal") {
  SUBCASE("too little history") {
    CHECK_THROWS_AS(adapt_proposal(Eigen::MatrixXd::Zero(3, 2), 10.0), Error);
  }
  SUBCASE("identical rows get the jitter floor") {
    const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(10, 3);
    const auto q = adapt_proposal(h, 10.0);
    for (int i = 0; i < 3; ++i) CHECK(q.covariance()(i, i) == doctest::Approx(kCovarianceJitter).epsilon(1e-6));
    CHECK(q.location()[0] == 1.0);
  }
  SUBCASE("recovers the covariance of normal history") {
    Eigen::MatrixXd sigma(2, 2);
    sigma << 1.0, 0.5, 0.5, 2.0;
    const Eigen::MatrixXd l = sigma.llt().matrixL();
    Eigen::Vector2d mu(3.0, -2.0);
    Rng rng(2);
    std::normal_distribution<double> z(0.0, 1.0);
    Eigen::MatrixXd h(10000, 2);
    for (int i = 0; i < h.rows(); ++i) {
      const Eigen::Vector2d e(z(rng), z(rng));
      h.row(i) = (mu + l * e).transpose();
    }
    const auto q = adapt_proposal(h, 10.0);
    for (int i = 0; i < 2; ++i) {
      CHECK(q.location()[i] == doctest::Approx(mu[i]).epsilon(0.02));
      for (int j = 0; j < 2; ++j) CHECK(q.covariance()(i, j) == doctest::Approx(sigma(i, j)).epsilon(0.10));
    }
  }
}

TEST_CASE("independence sampler on a standard normal target") {
  const LogTarget target = [](const Eigen::VectorXd& x) { return -0.5 * x.squaredNorm(); };
  const double nu = 10.0;
  const StudentTProposal q(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, (nu - 2.0) / nu), nu);
  Rng rng(101);
  ChainState s{Eigen::VectorXd::Zero(1), target(Eigen::VectorXd::Zero(1)), q.log_density(Eigen::VectorXd::Zero(1))};
  std::vector<double> x(100000);
  for (auto& v : x) {
    mh_step(s, q, target, rng);
    v = s.point[0];
  }
  const double m = mean_of(x);
  double var = 0.0;
  for (double v : x) var += (v - m) * (v - m);
  var /= static_cast<double>(x.size());
  CHECK(std::fabs(m) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.05);
}

TEST_CASE("frozen proposal on a correlated 2-D normal target") {
  Eigen::Matrix2d sigma;
  sigma << 1.0, 0.8, 0.8, 2.0;
  const Eigen::Matrix2d precision = sigma.inverse();
  const Eigen::Vector2d mu(1.0, -1.0);
  const LogTarget target = [&](const Eigen::VectorXd& x) {
    const Eigen::Vector2d d = x - mu;
    return -0.5 * d.dot(precision * d);
  };
  // Deliberately mismatched initial proposal; MHAS adapts it during burn-in.
  const StudentTProposal initial(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2) * 3.0, 10.0);
  Rng rng(7);
  const auto run = run_mhas(target, initial, Eigen::VectorXd::Zero(2), SamplerConfig{5000, 60000, 500, 10.0}, rng);
  CHECK(run.adaptations == 10);
  CHECK(run.samples.rows() == 60000);
  CHECK(run.acceptance_rate > 0.5);

  std::vector<double> x0(60000), x1(60000), x00(60000), x01(60000), x11(60000);
  for (int i = 0; i < 60000; ++i) {
    const double a = run.samples(i, 0), b = run.samples(i, 1);
    x0[i] = a;
    x1[i] = b;
    x00[i] = (a - mu[0]) * (a - mu[0]);
    x01[i] = (a - mu[0]) * (b - mu[1]);
    x11[i] = (b - mu[1]) * (b - mu[1]);
  }
  auto within = [](const std::vector<double>& v, double expected) {
    const double se = batch_se(v, 50);
    CAPTURE(expected);
    CAPTURE(se);
    CHECK(std::fabs(mean_of(v) - expected) < 3.0 * se);
  };
  within(x0, mu[0]);
  within(x1, mu[1]);
  within(x00, sigma(0, 0));
  within(x01, sigma(0, 1));
  within(x11, sigma(1, 1));
}

TEST_CASE("acceptance is one when the proposal equals the target") {
  Eigen::MatrixXd scale(2, 2);
  scale << 0.7, 0.2, 0.2, 1.1;
  const StudentTProposal q(Eigen::VectorXd::Constant(2, 0.3), scale, 10.0);
  const LogTarget target = [&](const Eigen::VectorXd& x) { return q.log_density(x) + 12.5; };
  Rng rng(3);
  ChainState s{q.location(), target(q.location()), q.log_density(q.location())};
  int accepted = 0;
  for (int i = 0; i < 20000; ++i) accepted += mh_step(s, q, target, rng) ? 1 : 0;
  CHECK(accepted == 20000);
}

TEST_CASE("acf and tau_int") {
  SUBCASE("lag zero") {
    const auto x = ar1(0.3, 1000, 1);
    CHECK(acf(x, 0)[0] == 1.0);
    CHECK(integrated_autocorr_time(x).acf[0] == 1.0);
  }
  SUBCASE("alternating series") {
    std::vector<double> x(10000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 == 0 ? 1.0 : -1.0;
    CHECK(acf(x, 1)[1] == doctest::Approx(-1.0).epsilon(1e-3));
  }
  SUBCASE("AR(1) with coefficient 0.5") {
    const auto x = ar1(0.5, 100000, 42);
    const auto r = acf(x, 5);
    for (std::size_t k = 0; k <= 5; ++k) CHECK(std::fabs(r[k] - std::pow(0.5, static_cast<double>(k))) < 0.01);
    const auto d = integrated_autocorr_time(x);
    CHECK(d.tau_int == doctest::Approx(3.0).epsilon(0.10));
    CHECK(static_cast<double>(d.window) >= 5.0 * d.tau_int);
    // FFT and direct estimators agree.
    for (std::size_t k = 1; k < d.acf.size() && k <= 5; ++k) CHECK(d.acf[k] == doctest::Approx(r[k]).epsilon(1e-9));
  }
  SUBCASE("iid") {
    Rng rng(9);
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(100000);
    for (auto& v : x) v = z(rng);
    CHECK(std::fabs(integrated_autocorr_time(x).tau_int - 1.0) < 0.05);
  }
  SUBCASE("constant plus tiny noise") {
    auto x = ar1(0.999, 5000, 8);
    for (auto& v : x) v = 1.0 + 1e-9 * v;
    const auto d = integrated_autocorr_time(x);
    CHECK(std::isfinite(d.tau_int));
    CHECK(d.tau_int > 20.0);
  }
  SUBCASE("zero variance") {
    const std::vector<double> x(100, 2.0);
    CHECK_THROWS_AS(acf(x, 3), Error);
    CHECK_THROWS_AS(integrated_autocorr_time(x), Error);
  }
}

TEST_CASE("chain configuration is validated") {
  ChainConfig c;
  c.burn_in = 100;
  c.adapt_interval = 500;
  CHECK_THROWS_AS(c.validate(Model::garch_n), Error);
  c = ChainConfig{};
  c.samples = 0;
  CHECK_THROWS_AS(c.validate(Model::garch_n), Error);
  c = ChainConfig{};
  c.nu = 2.0;
  CHECK_THROWS_AS(c.validate(Model::garch_n), Error);
  const std::vector<double> short_series(10, 0.01);
  CHECK_THROWS_AS(run_chain(Model::garch_n, short_series, ChainConfig{}), Error);
}

TEST_CASE("run_chain is reproducible and summarizes its samples") {
  const auto y = garch_returns(GarchParams::normal(1.3e-5, 0.148, 0.836), 500, 21);
  ChainConfig c;
  c.burn_in = 2000;
  c.samples = 5000;
  c.seed = 5;
  const auto a = run_chain(Model::garch_n, y, c);
  const auto b = run_chain(Model::garch_n, y, c);
  CHECK(a.natural == b.natural);
  CHECK(a.log_posterior == b.log_posterior);
  CHECK(a.natural.rows() == 5000);
  CHECK(a.acceptance_rate >= 0.0);
  CHECK(a.acceptance_rate <= 1.0);
  for (Eigen::Index j = 0; j < 3; ++j) {
    CHECK(a.summary[static_cast<std::size_t>(j)].mean == doctest::Approx(a.natural.col(j).mean()).epsilon(1e-14));
  }
  const double max_lnl = *std::max_element(a.log_likelihood.begin(), a.log_likelihood.end());
  CHECK(mean_of(a.log_likelihood) <= max_lnl);

  c.seed = 6;
  CHECK(run_chain(Model::garch_n, y, c).natural != a.natural);

  const auto chains = run_chains(Model::garch_n, y, c, 2);
  REQUIRE(chains.size() == 2);
  CHECK(chains[0].config.seed == 6);
  CHECK(chains[1].config.seed == 7);
  CHECK(chains[0].natural == run_chain(Model::garch_n, y, c).natural);
}

TEST_CASE("modal sample agrees with a brute-force grid maximum") {
  const auto y = garch_returns(GarchParams::normal(2e-4, 0.2, 0.5), 100, 1234);
  ChainConfig c;
  c.seed = 99;
  const auto chain = run_chain(Model::garch_n, y, c);
  const auto modal = chain.modal_sample();
  const auto prior = Prior::flat(Model::garch_n);

  // Grid spanning the central 99% of each marginal.
  std::array<std::vector<double>, 3> axes;
  std::array<double, 3> cell{};
  for (int j = 0; j < 3; ++j) {
    std::vector<double> col(chain.natural.col(j).data(), chain.natural.col(j).data() + chain.natural.rows());
    std::sort(col.begin(), col.end());
    const double lo = col[col.size() / 200];
    const double hi = col[col.size() - 1 - col.size() / 200];
    cell[j] = (hi - lo) / 19.0;
    for (int i = 0; i < 20; ++i) axes[j].push_back(lo + cell[j] * i);
  }
  double best = kNegInf;
  std::array<double, 3> arg{};
  for (double w : axes[0]) {
    for (double al : axes[1]) {
      for (double be : axes[2]) {
        const std::vector<double> theta{w, al, be};
        const double lp = log_posterior(Model::garch_n, theta, y, prior, chain.init_variance);
        if (lp > best) {
          best = lp;
          arg = {w, al, be};
        }
      }
    }
  }
  for (int j = 0; j < 3; ++j) {
    CAPTURE(j);
    CAPTURE(modal[j]);
    CAPTURE(arg[j]);
    CHECK(std::fabs(modal[j] - arg[j]) <= cell[j]);
  }
}

TEST_CASE("posterior recovers GARCH-N and GARCH-RE parameters") {
  const std::vector<double> n_truth{1.3e-5, 0.148, 0.836};
  const auto yn = garch_returns(GarchParams::normal(1.3e-5, 0.148, 0.836), 3000, 501);
  ChainConfig c;
  c.seed = 17;
  const auto n_chain = run_chain(Model::garch_n, yn, c);
  for (std::size_t j = 0; j < 3; ++j) {
    CAPTURE(j);
    CHECK(std::fabs(n_chain.summary[j].mean - n_truth[j]) < 3.0 * n_chain.summary[j].sd);
  }

  const auto yr = garch_returns(GarchParams::rational(1.3e-5, 0.148, 0.836, 1.57), 3000, 502);
  const auto r_chain = run_chain(Model::garch_re, yr, c);
  CHECK(std::fabs(r_chain.summary[3].mean - 1.57) < 3.0 * r_chain.summary[3].sd);

  const auto v = posterior_mean_variance(r_chain, yr, 500);
  CHECK(v.size() == yr.size());
  for (double s : v) CHECK(s > 0.0);
}
