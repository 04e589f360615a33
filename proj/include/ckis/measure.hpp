#pragma once

#include <Eigen/Core>

namespace ckis {

/// Weighted Dirac measure sum_u g(u) delta_{x_u}. Weights are the unnormalized
/// importance weights; after a compression refit they may carry either sign.
struct ParticleMeasure {
  Eigen::MatrixXd points;   // p x M, columns are atoms
  Eigen::VectorXd weights;  // M unnormalized weights

  ParticleMeasure() = default;
  ParticleMeasure(Eigen::MatrixXd pts, Eigen::VectorXd w)
      : points(std::move(pts)), weights(std::move(w)) {}

  Eigen::Index size() const { return weights.size(); }
  double weight_sum() const { return weights.sum(); }
};

}  // namespace ckis
