#include "ckis/models.hpp"

#include <cmath>
#include <stdexcept>

#include "ckis/quadrature.hpp"

namespace ckis {

GaussianDensity::GaussianDensity(Eigen::VectorXd mu, Eigen::MatrixXd cov)
    : mean(std::move(mu)), covariance(std::move(cov)) {
  if (covariance.rows() != covariance.cols() || covariance.rows() != mean.size())
    throw std::invalid_argument("GaussianDensity: covariance shape mismatch");
  chol_.compute(covariance);
  if (chol_.info() != Eigen::Success)
    throw std::invalid_argument("GaussianDensity: covariance is not SPD");
  const double log_det = 2.0 * chol_.matrixL().toDenseMatrix().diagonal().array().log().sum();
  log_norm_const_ = -0.5 * (mean.size() * std::log(2.0 * M_PI) + log_det);
}

GaussianDensity GaussianDensity::scalar(double mu, double variance) {
  Eigen::VectorXd m(1);
  m << mu;
  Eigen::MatrixXd c(1, 1);
  c << variance;
  return GaussianDensity(std::move(m), std::move(c));
}

double GaussianDensity::density(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd d = x - mean;
  const double maha = d.dot(chol_.solve(d));
  return std::exp(log_norm_const_ - 0.5 * maha);
}

Eigen::VectorXd GaussianDensity::sample(Rng& rng) const {
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
  return mean + chol_.matrixL() * z;
}

ProblemSpec direct_is_spec() {
  ProblemSpec spec;
  spec.dim = 1;
  spec.target_unnorm = [](const Eigen::VectorXd& x) {
    return std::exp(-0.5 * (x(0) - 1.0) * (x(0) - 1.0)) / std::sqrt(2.0 * M_PI);
  };
  spec.proposal.density = [](const Eigen::VectorXd& x) {
    return std::exp(-0.25 * (x(0) - 1.0) * (x(0) - 1.0)) / std::sqrt(4.0 * M_PI);
  };
  spec.proposal.sample = [](Rng& rng) {
    Eigen::VectorXd x(1);
    x(0) = 1.0 + std::sqrt(2.0) * rng.normal();
    return x;
  };
  spec.test_fn = [](const Eigen::VectorXd& x) { return 2.0 * std::sin(M_PI / (1.5 * x(0))); };
  return spec;
}

IndirectProblem indirect_is_spec(std::uint64_t seed) {
  constexpr int kObs = 10;
  constexpr double kBias = 5.0;
  constexpr double kNoiseSd = 0.1;
  constexpr double kSigma1 = 0.4;
  constexpr double kSigma2 = 1.6;

  IndirectProblem problem;
  problem.true_location = 5.0;

  Rng data_rng(seed);
  Eigen::VectorXd y(kObs);
  for (int k = 0; k < kObs; ++k)
    y(k) = kBias + std::sin(2.0 * M_PI * problem.true_location) + kNoiseSd * data_rng.normal();

  problem.posterior.observations = y;
  problem.posterior.likelihood = [](const Eigen::VectorXd& obs, const Eigen::VectorXd& x) {
    const double norm = std::pow(2.0 * M_PI * kSigma1 * kSigma1, -0.5 * obs.size());
    const double ss = (obs.array() - x(0)).square().sum();
    return norm * std::exp(-ss / (2.0 * kSigma1 * kSigma1));
  };
  // Prior written exactly as the measurement model states it; the leading
  // constant is not the Gaussian normalizer, which only rescales Z.
  problem.posterior.prior = [](const Eigen::VectorXd& x) {
    return std::exp(-x(0) * x(0) / (2.0 * kSigma2 * kSigma2)) / (2.0 * M_PI * kSigma2 * kSigma2);
  };

  ProblemSpec& spec = problem.spec;
  spec.dim = 1;
  const BayesPosteriorSpec posterior = problem.posterior;
  spec.target_unnorm = [posterior](const Eigen::VectorXd& x) { return posterior.target_unnorm(x); };
  spec.proposal.density = [](const Eigen::VectorXd& x) {
    return (x(0) >= 3.0 && x(0) <= 7.0) ? 0.25 : 0.0;
  };
  spec.proposal.sample = [](Rng& rng) {
    Eigen::VectorXd x(1);
    x(0) = rng.uniform(3.0, 7.0);
    return x;
  };
  spec.test_fn = [](const Eigen::VectorXd& x) { return x(0); };
  return problem;
}

double LocalizationSpec::range_model(const Eigen::VectorXd& x, int sensor) const {
  double r = (x - sensor_positions.col(sensor)).norm();
  if (r < 1e-12) {
    r = 1e-12;
    if (clamp_warnings) ++(*clamp_warnings);
  }
  const double lr = log_base == LogBase::E ? std::log(r) : std::log10(r);
  return -20.0 * lr;
}

double LocalizationSpec::likelihood(const Eigen::VectorXd& x) const {
  double log_lik = 0.0;
  for (int i = 0; i < 6; ++i) {
    const double resid = measurements(i) - range_model(x, i);
    log_lik += -0.5 * resid * resid / (noise_sd * noise_sd);
  }
  const double norm = std::pow(2.0 * M_PI * noise_sd * noise_sd, -3.0);
  return norm * std::exp(log_lik);
}

LocalizationProblem localization_spec(std::uint64_t seed, int coordinate, LogBase log_base) {
  if (coordinate < 0 || coordinate > 1)
    throw std::invalid_argument("localization_spec: coordinate must be 0 or 1");

  Eigen::Matrix<double, 2, 6> sensors;
  sensors << 1, 8, -15, -8, 10, 0,
             -8, 10, -17, 1, 0, 10;

  Eigen::Vector2d truth(3.5, 3.5);
  LocalizationProblem problem{LocalizationSpec(GaussianDensity(truth, Eigen::Matrix2d::Identity()))};
  problem.true_location = truth;
  problem.model.sensor_positions = sensors;
  problem.model.noise_sd = 1.0;
  problem.model.log_base = log_base;
  problem.model.clamp_warnings = std::make_shared<long>(0);

  Rng data_rng(seed);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i)
    y(i) = problem.model.range_model(truth, i) + problem.model.noise_sd * data_rng.normal();
  problem.model.measurements = y;

  const LocalizationSpec model = problem.model;
  ProblemSpec& spec = problem.spec;
  spec.dim = 2;
  // Proposal = prior, so the weight reduces to the likelihood.
  spec.target_unnorm = [model](const Eigen::VectorXd& x) {
    return model.likelihood(x) * model.prior.density(x);
  };
  const GaussianDensity prior = problem.model.prior;
  spec.proposal.density = [prior](const Eigen::VectorXd& x) { return prior.density(x); };
  spec.proposal.sample = [prior](Rng& rng) { return prior.sample(rng); };
  spec.test_fn = [coordinate](const Eigen::VectorXd& x) { return x(coordinate); };
  return problem;
}

double indirect_reference_mean(const IndirectProblem& problem) {
  const auto& q = problem.spec.target_unnorm;
  Eigen::VectorXd x(1);
  const auto qt = [&](double v) {
    Eigen::VectorXd p(1);
    p(0) = v;
    return q(p);
  };
  const double z = integrate([&](double v) { return qt(v); }, 3.0, 7.0, 1e-14);
  const double mean = integrate([&](double v) { return v * qt(v); }, 3.0, 7.0, 1e-14);
  return mean / z;
}

}  // namespace ckis
