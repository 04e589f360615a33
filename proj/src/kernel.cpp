#include "ckis/kernel.hpp"

#include <stdexcept>

#include "ckis/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ckis {

namespace {

void check_points(const Kernel& k, const PointMatrix& points, const char* who) {
  if (points.cols() < 1) throw std::invalid_argument(std::string(who) + ": empty dictionary");
  if (points.rows() != k.dim) throw std::invalid_argument(std::string(who) + ": point dimension mismatch");
  if (!points.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite point");
}

}  // namespace

namespace serial {

GramMatrix gram(const Kernel& k, const PointMatrix& points) {
  const Eigen::Index m = points.cols();
  GramMatrix out(m, m);
  for (Eigen::Index u = 0; u < m; ++u)
    for (Eigen::Index s = 0; s < m; ++s)
      out(s, u) = k.eval_unchecked(points.col(s), points.col(u));
  return out;
}

Eigen::MatrixXd cross_gram(const Kernel& k, const PointMatrix& a, const PointMatrix& b) {
  Eigen::MatrixXd out(a.cols(), b.cols());
  for (Eigen::Index u = 0; u < b.cols(); ++u)
    for (Eigen::Index s = 0; s < a.cols(); ++s)
      out(s, u) = k.eval_unchecked(a.col(s), b.col(u));
  return out;
}

}  // namespace serial

GramMatrix gram(const Kernel& k, const PointMatrix& points, Exec exec) {
  check_points(k, points, "gram");
  if (exec == Exec::Serial) return serial::gram(k, points);
  const Eigen::Index m = points.cols();
  GramMatrix out(m, m);
#pragma omp parallel for schedule(static)
  for (Eigen::Index u = 0; u < m; ++u)
    for (Eigen::Index s = 0; s < m; ++s)
      out(s, u) = k.eval_unchecked(points.col(s), points.col(u));
  return out;
}

Eigen::MatrixXd cross_gram(const Kernel& k, const PointMatrix& a, const PointMatrix& b, Exec exec) {
  check_points(k, a, "cross_gram");
  check_points(k, b, "cross_gram");
  if (exec == Exec::Serial) return serial::cross_gram(k, a, b);
  Eigen::MatrixXd out(a.cols(), b.cols());
#pragma omp parallel for schedule(static)
  for (Eigen::Index u = 0; u < b.cols(); ++u)
    for (Eigen::Index s = 0; s < a.cols(); ++s)
      out(s, u) = k.eval_unchecked(a.col(s), b.col(u));
  return out;
}

PdFactor pd_factor(const GramMatrix& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("pd_factor: matrix not square");
  const Eigen::Index m = g.rows();
  const double scale = g.trace() / static_cast<double>(m);
  // Escalate only on factorization failure; the applied value is reported.
  const double levels[] = {0.0, 1e-12, 1e-10, 1e-8};
  PdFactor f;
  for (double level : levels) {
    const double lambda = level * scale;
    if (lambda == 0.0) {
      f.llt.compute(g);
    } else {
      f.llt.compute(g + lambda * Eigen::MatrixXd::Identity(m, m));
    }
    if (f.llt.info() == Eigen::Success) {
      f.jitter = lambda;
      return f;
    }
  }
  throw SingularSystemError("pd_factor: Cholesky failed at maximum jitter");
}

PdSolveResult pd_solve(const GramMatrix& g, const Eigen::MatrixXd& rhs) {
  if (g.rows() != rhs.rows()) throw std::invalid_argument("pd_solve: shape mismatch");
  PdFactor f = pd_factor(g);
  Eigen::MatrixXd x = f.llt.solve(rhs);
  // One refinement pass against G itself tightens the residual on
  // ill-conditioned systems.
  x += f.llt.solve(rhs - g * x);
  return {std::move(x), f.jitter};
}

}  // namespace ckis
