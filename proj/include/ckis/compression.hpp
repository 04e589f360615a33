#pragma once

#include <Eigen/Core>
#include <vector>

#include "ckis/embedding.hpp"
#include "ckis/exec.hpp"

namespace ckis {

struct CompressionReport {
  int initial_order = 0;
  int final_order = 0;
  std::vector<int> removed_indices;  // indices into the input dictionary
  double achieved_mmd = 0.0;         // ||result - target||_H, <= budget at return
  double jitter_used = 0.0;          // largest diagonal jitter any solve needed
};

struct RefitResult {
  Eigen::VectorXd coefficients;
  double jitter;
};

/// Least-squares projection of `target` onto span{kappa(d, .) : d in dict}:
/// g = (K_DD)^-1 K_DT g_T. The dictionary need not be a subset of the
/// target's. Normal-equation residual satisfies
/// ||K_DD g - K_DT g_T||_inf <= 1e-8 ||K_DT g_T||_inf on solvable systems.
RefitResult refit(const Embedding& target, const PointMatrix& dict);

struct CompressionResult {
  Embedding embedding;
  CompressionReport report;
};

/// Destructive MMD orthogonal matching pursuit.
///
/// Repeatedly evaluates, for every remaining atom j, the post-refit residual
/// gamma_j = mmd(target, projection of target onto D \ {d_j}), removes the
/// argmin (ties break to the lowest index) while gamma stays within `budget`,
/// and refits the survivors. Never prunes below one atom. Exact duplicate
/// atoms (pairwise distance < 1e-12) are merged up front by summing
/// coefficients.
///
/// The returned embedding satisfies mmd(target, result) <= budget (+1e-9
/// roundoff slack, asserted); with budget 0 the input comes back unchanged.
CompressionResult mmd_omp(const Embedding& target, double budget, Exec exec = Exec::Parallel);

/// RKHS distance of kappa(x, .) to span{kappa(d_u, .)}:
/// sqrt(max(0, kappa(x,x) - k_D(x)' K_DD^-1 k_D(x))). Diagnostic behind the
/// model-order saturation checks.
double subspace_distance(const Kernel& k, const Eigen::VectorXd& x, const PointMatrix& dict);

namespace detail {
/// One candidate sweep: gamma_j^2 for every index in `kept` (positions refer
/// to `kept`), computed from a single factorization of the kept-atom Gram.
/// K_tt is the Gram of the target dictionary, b_full = K_tt * g_target,
/// c = g_target' K_tt g_target. Returns the applied jitter.
double candidate_errors(const GramMatrix& K_tt, const Eigen::VectorXd& b_full, double c,
                        const std::vector<int>& kept, Eigen::VectorXd& gamma_sq, Exec exec);
}  // namespace detail

}  // namespace ckis
