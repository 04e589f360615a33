#pragma once

#include <Eigen/Core>
#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "ckis/exec.hpp"

namespace ckis {

/// Dictionaries are stored column-wise: a p x M matrix holds M points of
/// dimension p.
using PointMatrix = Eigen::MatrixXd;
using GramMatrix = Eigen::MatrixXd;

/// Unit-peak Gaussian RBF kernel kappa(x, y) = exp(-|x-y|^2 / (2 h^2)).
/// kappa(x, x) = 1 and 0 < kappa(x, y) <= 1 for finite inputs.
struct Kernel {
  double bandwidth;  // h > 0, in the length units of the particle space
  int dim;           // p >= 1

  Kernel(double h, int p) : bandwidth(h), dim(p) {
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("Kernel: bandwidth must be positive and finite");
    if (p < 1) throw std::invalid_argument("Kernel: dimension must be >= 1");
  }

  bool operator==(const Kernel& other) const {
    return bandwidth == other.bandwidth && dim == other.dim;
  }

  /// kappa(x, y). Throws std::invalid_argument on non-finite or mis-sized input.
  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    if (x.size() != dim || y.size() != dim) throw std::invalid_argument("Kernel::eval: point dimension mismatch");
    if (!x.allFinite() || !y.allFinite()) throw std::invalid_argument("Kernel::eval: non-finite input");
    return eval_unchecked(x, y);
  }

  double eval_unchecked(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    const double d2 = (x - y).squaredNorm();
    const double e = d2 / (2.0 * bandwidth * bandwidth);
    // Far-field truncation: beyond 12.6 bandwidths the kernel is under
    // 2e-35 and rounds to zero. Products of such values inside the solver
    // kernels would otherwise fall into the subnormal range, where the
    // hardware stalls.
    return e > 80.0 ? 0.0 : std::exp(-e);
  }
};

/// Gram matrix K with K(s,u) = kappa(d_s, d_u). Symmetric, unit diagonal.
GramMatrix gram(const Kernel& k, const PointMatrix& points, Exec exec = Exec::Parallel);

/// Cross-Gram K(s,u) = kappa(a_s, b_u) between two dictionaries.
Eigen::MatrixXd cross_gram(const Kernel& k, const PointMatrix& a, const PointMatrix& b,
                           Exec exec = Exec::Parallel);

struct PdSolveResult {
  Eigen::MatrixXd solution;
  double jitter;  // diagonal shift that was actually applied (0 when none)
};

/// Cholesky factorization of G + lambda I with escalating jitter
/// lambda in {0, 1e-12, 1e-10, 1e-8} * trace(G)/M, trying larger values only
/// on factorization failure.
struct PdFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter;
};

PdFactor pd_factor(const GramMatrix& g);

/// Solve (G + lambda I) X = B via pd_factor, with one step of iterative
/// refinement against G itself. Throws SingularSystemError when factorization
/// fails at the maximum jitter.
PdSolveResult pd_solve(const GramMatrix& g, const Eigen::MatrixXd& rhs);

namespace serial {
/// Reference implementations used by the tests and the benchmark to pin down
/// the OpenMP variants (results must match bit for bit).
GramMatrix gram(const Kernel& k, const PointMatrix& points);
Eigen::MatrixXd cross_gram(const Kernel& k, const PointMatrix& a, const PointMatrix& b);
}  // namespace serial

}  // namespace ckis
