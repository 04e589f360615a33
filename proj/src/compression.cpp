#include "ckis/compression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ckis/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ckis {

namespace detail {

namespace {

// One sweep over the kept atoms: factor the kept Gram once, invert its
// Cholesky factor, and read every single-removal residual off the diagonal
// of the inverse. gamma_j^2 = r_full^2 + y_j^2 / (K^-1)_jj: dropping atom j
// raises the projection residual by exactly the Schur term.
struct Sweep {
  Eigen::MatrixXd k_cur;   // kept Gram (no jitter)
  Eigen::VectorXd b_cur;   // kept slice of K_tt g_target
  Eigen::MatrixXd linv;    // inverse Cholesky factor of the jittered kept Gram
  Eigen::VectorXd y;       // (K + lambda I)^-1 b_cur
  Eigen::VectorXd diag_inv;
  Eigen::VectorXd gamma_sq;
  double r2_full = 0.0;
  double jitter = 0.0;
};

Sweep run_sweep(const GramMatrix& k_tt, const Eigen::VectorXd& b_full, double c,
                const std::vector<int>& kept, Exec exec) {
  const int m = static_cast<int>(kept.size());
  Sweep sw;
  sw.k_cur.resize(m, m);
  sw.b_cur.resize(m);
  for (int col = 0; col < m; ++col) {
    sw.b_cur(col) = b_full(kept[col]);
    for (int row = 0; row < m; ++row) sw.k_cur(row, col) = k_tt(kept[row], kept[col]);
  }
  const PdFactor f = pd_factor(sw.k_cur);
  sw.jitter = f.jitter;

  // L^-1 in fixed 64-column panels so the serial and parallel paths perform
  // identical arithmetic.
  sw.linv = Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd& packed = f.llt.matrixLLT();
  const auto lower = packed.triangularView<Eigen::Lower>();
  const int panel = 64;
  const int n_panels = (m + panel - 1) / panel;
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int pnl = 0; pnl < n_panels; ++pnl) {
      const int lo = pnl * panel;
      auto block = sw.linv.middleCols(lo, std::min(panel, m - lo));
      lower.solveInPlace(block);
    }
  } else {
    for (int pnl = 0; pnl < n_panels; ++pnl) {
      const int lo = pnl * panel;
      auto block = sw.linv.middleCols(lo, std::min(panel, m - lo));
      lower.solveInPlace(block);
    }
  }

  sw.y.noalias() = sw.linv.transpose() * (sw.linv * sw.b_cur);
  sw.r2_full = std::max(c - sw.b_cur.dot(sw.y), 0.0);
  sw.diag_inv = sw.linv.colwise().squaredNorm();
  sw.gamma_sq = sw.r2_full + (sw.y.array().square() / sw.diag_inv.array()).array();
  return sw;
}

}  // namespace

double candidate_errors(const GramMatrix& k_tt, const Eigen::VectorXd& b_full, double c,
                        const std::vector<int>& kept, Eigen::VectorXd& gamma_sq, Exec exec) {
  Sweep sw = run_sweep(k_tt, b_full, c, kept, exec);
  gamma_sq = std::move(sw.gamma_sq);
  return sw.jitter;
}

}  // namespace detail

namespace {

struct MergedTarget {
  PointMatrix points;
  Eigen::VectorXd coefficients;
  std::vector<int> original_index;  // column in the input dictionary
  std::vector<int> merged_away;     // duplicate input columns folded in
};

// Fold atoms with pairwise distance < 1e-12 into their earliest occurrence,
// summing coefficients.
MergedTarget merge_duplicates(const Embedding& target) {
  const Eigen::Index mt = target.order();
  std::vector<int> rep(mt, -1);
  std::vector<int> keepers;
  MergedTarget out;
  for (Eigen::Index i = 0; i < mt; ++i) {
    if (rep[i] >= 0) continue;
    rep[i] = static_cast<int>(keepers.size());
    keepers.push_back(static_cast<int>(i));
    for (Eigen::Index j = i + 1; j < mt; ++j) {
      if (rep[j] >= 0) continue;
      if ((target.points.col(i) - target.points.col(j)).norm() < 1e-12) {
        rep[j] = rep[i];
        out.merged_away.push_back(static_cast<int>(j));
      }
    }
  }
  const int m = static_cast<int>(keepers.size());
  out.points.resize(target.points.rows(), m);
  out.coefficients = Eigen::VectorXd::Zero(m);
  out.original_index = keepers;
  for (int col = 0; col < m; ++col) out.points.col(col) = target.points.col(keepers[col]);
  for (Eigen::Index i = 0; i < mt; ++i) out.coefficients(rep[i]) += target.coefficients(i);
  std::sort(out.merged_away.begin(), out.merged_away.end());
  return out;
}

}  // namespace

RefitResult refit(const Embedding& target, const PointMatrix& dict) {
  if (dict.cols() < 1) throw std::invalid_argument("refit: empty dictionary");
  const GramMatrix k_dd = gram(target.kernel, dict);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dict.cols());
  if (target.order() > 0)
    b = cross_gram(target.kernel, dict, target.points) * target.coefficients;
  PdSolveResult sol = pd_solve(k_dd, b);
  return {std::move(sol.solution), sol.jitter};
}

CompressionResult mmd_omp(const Embedding& target, double budget, Exec exec) {
  if (!(budget >= 0.0)) throw std::invalid_argument("mmd_omp: budget must be >= 0");
  if (target.order() < 1) throw std::invalid_argument("mmd_omp: target must have at least one atom");

  CompressionReport report;
  report.initial_order = static_cast<int>(target.order());

  MergedTarget merged = merge_duplicates(target);
  report.removed_indices = merged.merged_away;

  const GramMatrix k_tt = gram(target.kernel, merged.points, exec);
  const Eigen::VectorXd b_full = k_tt * merged.coefficients;
  const double c = merged.coefficients.dot(b_full);

  std::vector<int> kept(merged.original_index.size());
  for (size_t i = 0; i < kept.size(); ++i) kept[i] = static_cast<int>(i);

  detail::Sweep sweep;          // last evaluated sweep
  int last_removed_local = -1;  // position in the sweep the removal erased
  while (kept.size() > 1) {
    sweep = detail::run_sweep(k_tt, b_full, c, kept, exec);
    report.jitter_used = std::max(report.jitter_used, sweep.jitter);
    last_removed_local = -1;
    int j_star = 0;
    double best = sweep.gamma_sq(0);
    double second = std::numeric_limits<double>::infinity();
    for (int j = 1; j < sweep.gamma_sq.size(); ++j) {
      if (sweep.gamma_sq(j) < best) {
        second = best;
        best = sweep.gamma_sq(j);
        j_star = j;
      } else if (sweep.gamma_sq(j) < second) {
        second = sweep.gamma_sq(j);
      }
    }
    if (std::sqrt(std::max(best, 0.0)) > budget) break;
    report.removed_indices.push_back(merged.original_index[kept[j_star]]);
    kept.erase(kept.begin() + j_star);
    last_removed_local = j_star;
    // Removing more atoms projects onto an even smaller span, so the next
    // sweep's minimum cannot fall below this sweep's runner-up; when that
    // already exceeds the budget the loop is done.
    if (std::sqrt(std::max(second, 0.0)) > budget) break;
  }

  std::sort(report.removed_indices.begin(), report.removed_indices.end());
  report.final_order = report.initial_order - static_cast<int>(report.removed_indices.size());

  CompressionResult result{Embedding(target.kernel), report};
  if (report.removed_indices.empty()) {
    // Untouched input: return it exactly, no solver wobble.
    result.embedding = target;
    result.report.achieved_mmd = 0.0;
    return result;
  }

  const int m = static_cast<int>(kept.size());
  Eigen::VectorXd g_final;
  if (sweep.y.size() == 0) {
    // No sweep ran: everything merged into a single atom. Solve 1x1 directly.
    g_final = Eigen::VectorXd::Constant(1, b_full(kept[0]) / k_tt(kept[0], kept[0]));
  } else if (last_removed_local < 0) {
    // Loop stopped on a sweep of exactly the surviving atoms: its projection
    // coefficients are the refit.
    g_final = sweep.y;
  } else {
    // The last sweep factored the pre-removal Gram; the refit on the pruned
    // dictionary follows from the same factorization:
    //   A^-1 b_1 = y_1 - (K^-1 e_j)_1 * y_j / (K^-1)_jj.
    const int j = last_removed_local;
    const Eigen::VectorXd kinv_col = sweep.linv.transpose() * sweep.linv.col(j);
    const Eigen::VectorXd downdated =
        sweep.y - kinv_col * (sweep.y(j) / sweep.diag_inv(j));
    g_final.resize(m);
    for (int i = 0, src = 0; src < downdated.size(); ++src) {
      if (src == j) continue;
      g_final(i++) = downdated(src);
    }
  }

  PointMatrix d_final(target.points.rows(), m);
  Eigen::MatrixXd k_fin(m, m);
  Eigen::VectorXd b_fin(m);
  for (int col = 0; col < m; ++col) {
    d_final.col(col) = merged.points.col(kept[col]);
    b_fin(col) = b_full(kept[col]);
    for (int row = 0; row < m; ++row) k_fin(row, col) = k_tt(kept[row], kept[col]);
  }
  const double achieved_sq = c - 2.0 * g_final.dot(b_fin) + g_final.dot(k_fin * g_final);
  result.report.achieved_mmd = std::sqrt(std::max(achieved_sq, 0.0));
  if (result.report.achieved_mmd > budget + 1e-9)
    throw std::logic_error("mmd_omp: achieved error exceeds the budget contract");
  result.embedding = Embedding(std::move(d_final), std::move(g_final), target.kernel);
  return result;
}

double subspace_distance(const Kernel& k, const Eigen::VectorXd& x, const PointMatrix& dict) {
  if (dict.cols() < 1) throw std::invalid_argument("subspace_distance: empty dictionary");
  const GramMatrix k_dd = gram(k, dict);
  Eigen::VectorXd kv(dict.cols());
  for (Eigen::Index u = 0; u < dict.cols(); ++u) kv(u) = k(dict.col(u), x);
  const PdSolveResult sol = pd_solve(k_dd, kv);
  const double q = k(x, x) - kv.dot(sol.solution.col(0));
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace ckis
