#include "ckis/embedding.hpp"

#include <cmath>
#include <stdexcept>

namespace ckis {

namespace {

void check_same_kernel(const Embedding& a, const Embedding& b) {
  if (!(a.kernel == b.kernel))
    throw std::invalid_argument("embedding: kernel mismatch (bandwidth or dimension differ)");
}

}  // namespace

Embedding embed(const ParticleMeasure& mu, const Kernel& k) {
  if (mu.size() > 0 && mu.points.rows() != k.dim)
    throw std::invalid_argument("embed: measure dimension does not match kernel");
  if (mu.size() > 0 && (!mu.points.allFinite() || !mu.weights.allFinite()))
    throw std::invalid_argument("embed: non-finite measure");
  return Embedding(mu.points, mu.weights, k);
}

double rkhs_inner(const Embedding& a, const Embedding& b) {
  check_same_kernel(a, b);
  if (a.order() == 0 || b.order() == 0) return 0.0;
  const Eigen::MatrixXd k_ab = cross_gram(a.kernel, a.points, b.points);
  return a.coefficients.dot(k_ab * b.coefficients);
}

double squared_norm(const Embedding& a) { return rkhs_inner(a, a); }

double mmd(const Embedding& a, const Embedding& b) {
  check_same_kernel(a, b);
  const double q = rkhs_inner(a, a) - 2.0 * rkhs_inner(a, b) + rkhs_inner(b, b);
  return std::sqrt(std::max(q, 0.0));
}

Embedding append(const Embedding& beta, const Eigen::VectorXd& x, double w) {
  if (x.size() != beta.kernel.dim) throw std::invalid_argument("append: point dimension mismatch");
  if (!x.allFinite() || !std::isfinite(w)) throw std::invalid_argument("append: non-finite input");
  const Eigen::Index m = beta.order();
  PointMatrix pts(beta.kernel.dim, m + 1);
  pts.leftCols(m) = beta.points;
  pts.col(m) = x;
  Eigen::VectorXd g(m + 1);
  g.head(m) = beta.coefficients;
  g(m) = w;
  return Embedding(std::move(pts), std::move(g), beta.kernel);
}

ParticleMeasure preimage(const Embedding& beta) {
  return ParticleMeasure(beta.points, beta.coefficients);
}

}  // namespace ckis
