#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <cstdint>
#include <memory>
#include <vector>

#include "ckis/rng.hpp"
#include "ckis/sampling.hpp"

namespace ckis {

/// Normalized multivariate Gaussian density with sampler.
struct GaussianDensity {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  GaussianDensity(Eigen::VectorXd mu, Eigen::MatrixXd cov);
  static GaussianDensity scalar(double mu, double variance);

  double density(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample(Rng& rng) const;
  int dim() const { return static_cast<int>(mean.size()); }

 private:
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double log_norm_const_;
};

/// Unnormalized Bayes posterior q~(x) = likelihood(y, x) * prior(x).
struct BayesPosteriorSpec {
  std::function<double(const Eigen::VectorXd& obs, const Eigen::VectorXd& x)> likelihood;
  std::function<double(const Eigen::VectorXd& x)> prior;
  Eigen::VectorXd observations;

  double target_unnorm(const Eigen::VectorXd& x) const {
    return likelihood(observations, x) * prior(x);
  }
};

enum class LogBase { E, Ten };

/// Range measurement model of the source-localization experiment: six fixed
/// sensors, y_i = -20 log||x - h_i|| + noise.
struct LocalizationSpec {
  Eigen::Matrix<double, 2, 6> sensor_positions;
  Eigen::VectorXd measurements;  // one range reading per sensor
  double noise_sd = 1.0;
  GaussianDensity prior;
  LogBase log_base = LogBase::E;
  std::shared_ptr<long> clamp_warnings;  // count of ||x - h|| clamps at 1e-12

  explicit LocalizationSpec(GaussianDensity prior_density) : prior(std::move(prior_density)) {}

  double range_model(const Eigen::VectorXd& x, int sensor) const;
  double likelihood(const Eigen::VectorXd& x) const;
};

/// Direct sampling problem: phi(x) = 2 sin(pi/(1.5 x)), target N(1, 1),
/// proposal N(1, 2).
ProblemSpec direct_is_spec();

struct IndirectProblem {
  ProblemSpec spec;
  BayesPosteriorSpec posterior;
  double true_location = 5.0;
};

/// Scalar Bayes problem: K=10 observations y_k = b + sin(2 pi x) + noise at
/// x = 5 with b = 5, sigma = 0.1; Gaussian likelihood (sigma_1 = 0.4) and
/// prior (sigma_2 = 1.6) written exactly as in the measurement model;
/// proposal U[3, 7]; phi(x) = x.
IndirectProblem indirect_is_spec(std::uint64_t seed);

struct LocalizationProblem {
  ProblemSpec spec;
  LocalizationSpec model;
  Eigen::Vector2d true_location{3.5, 3.5};

  explicit LocalizationProblem(LocalizationSpec m) : model(std::move(m)) {}
};

/// Two-dimensional source localization; the prior doubles as the proposal and
/// phi selects one coordinate.
LocalizationProblem localization_spec(std::uint64_t seed, int coordinate = 0,
                                      LogBase log_base = LogBase::E);

/// Posterior-mean reference for the indirect problem via quadrature of
/// x q~(x) / int q~ over the proposal support [3, 7].
double indirect_reference_mean(const IndirectProblem& problem);

}  // namespace ckis
