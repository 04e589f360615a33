#pragma once

#include <Eigen/Core>

#include "ckis/kernel.hpp"
#include "ckis/measure.hpp"

namespace ckis {

/// Kernel mean embedding beta = sum_u g(u) kappa(d_u, .) of a weighted Dirac
/// measure. An empty embedding (M = 0) is legal and has norm 0. The model
/// order is exactly the dictionary length; pruning is the compression
/// module's job.
struct Embedding {
  PointMatrix points;           // p x M dictionary
  Eigen::VectorXd coefficients; // M signed coefficients
  Kernel kernel;

  explicit Embedding(const Kernel& k)
      : points(k.dim, 0), coefficients(0), kernel(k) {}
  Embedding(PointMatrix pts, Eigen::VectorXd g, const Kernel& k)
      : points(std::move(pts)), coefficients(std::move(g)), kernel(k) {}

  Eigen::Index order() const { return coefficients.size(); }
};

/// Lift a particle measure into the RKHS: same dictionary, same coefficients.
Embedding embed(const ParticleMeasure& mu, const Kernel& k);

/// <a, b>_H = a.g' K_ab b.g. Throws std::invalid_argument on kernel mismatch.
double rkhs_inner(const Embedding& a, const Embedding& b);

double squared_norm(const Embedding& a);

/// ||a - b||_H = sqrt(max(0, <a,a> - 2<a,b> + <b,b>)); the clamp absorbs
/// roundoff, the quadratic form is nonnegative mathematically.
double mmd(const Embedding& a, const Embedding& b);

/// beta + w kappa(x, .): dictionary [D; x], coefficients [g; w].
Embedding append(const Embedding& beta, const Eigen::VectorXd& x, double w);

/// Dirac pre-image: closed form, same dictionary and coefficients.
ParticleMeasure preimage(const Embedding& beta);

}  // namespace ckis
