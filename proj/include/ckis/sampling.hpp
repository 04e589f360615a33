#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <vector>

#include "ckis/compression.hpp"
#include "ckis/embedding.hpp"
#include "ckis/errors.hpp"
#include "ckis/measure.hpp"
#include "ckis/rng.hpp"

namespace ckis {

/// Per-step compression budget: either a constant eps_n = eps or the
/// geometric decay eps_n = alpha^n (n is 1-based).
struct BudgetSchedule {
  enum class Kind { Constant, Geometric };
  Kind kind;
  double value;

  static BudgetSchedule constant(double eps);
  static BudgetSchedule geometric(double alpha);

  double epsilon_at(long n) const;
  /// sum_{m=1..n} eps_m (closed form for the geometric case).
  double cumulative(long n) const;
  /// Limit of the cumulative budget: alpha/(1-alpha), or +inf for constant.
  double cumulative_limit() const;
};

struct Proposal {
  std::function<Eigen::VectorXd(Rng&)> sample;
  std::function<double(const Eigen::VectorXd&)> density;
};

/// Target (unnormalized density), proposal, and test function of one problem.
/// The proposal must cover the support of the target.
struct ProblemSpec {
  std::function<double(const Eigen::VectorXd&)> target_unnorm;
  Proposal proposal;
  std::function<double(const Eigen::VectorXd&)> test_fn;
  int dim = 1;
};

struct Particle {
  Eigen::VectorXd point;
  double weight;  // g = q~(x)/pi(x)
};

struct Diagnostics {
  std::vector<int> model_order;        // per step
  std::vector<double> achieved_mmd;    // per step (0 on steps without compression)
  double cumulative_budget = 0.0;      // sum of budgets handed to the compressor
  std::vector<double> weight_history;  // every g ever drawn, in order
  double historical_weight_sum = 0.0;  // sum of weight_history
  double historical_weight_sq_sum = 0.0;
  double max_jitter = 0.0;
};

/// Streaming estimator state shared by the uncompressed (IS) and compressed
/// (CKIS) loops. measure and embedding hold the same dictionary and
/// coefficients after every step.
struct EstimatorState {
  long step = 0;
  ParticleMeasure measure;
  Embedding embedding;
  BudgetSchedule schedule;
  Kernel kernel;
  Rng rng;
  Diagnostics diagnostics;

  EstimatorState(const Kernel& k, const BudgetSchedule& sched, std::uint64_t seed)
      : measure(Eigen::MatrixXd(k.dim, 0), Eigen::VectorXd(0)),
        embedding(k),
        schedule(sched),
        kernel(k),
        rng(seed) {}
};

/// Draw x ~ pi and compute g = q~(x)/pi(x). Throws AbsoluteContinuityError
/// when pi(x) = 0 at the drawn sample, NonFiniteValueError when the weight
/// comes out non-finite.
Particle draw_particle(EstimatorState& state, const ProblemSpec& spec);

/// Advance the uncompressed estimator (one streaming IS step) with a
/// pre-drawn particle. Used directly by paired-stream runners.
void is_append(EstimatorState& state, const Particle& particle);

/// Advance the compressed estimator: append to the embedding, compress with
/// budget eps_n, take the pre-image. `compress` lets a mini-batching caller
/// defer compression; the budget is spent only when compression runs.
void ckis_append(EstimatorState& state, const Particle& particle, bool compress = true,
                 Exec exec = Exec::Parallel);

/// Algorithm-1 step: draw + is_append.
EstimatorState& is_step(EstimatorState& state, const ProblemSpec& spec);

/// Algorithm-2 step: draw + ckis_append.
EstimatorState& ckis_step(EstimatorState& state, const ProblemSpec& spec,
                          Exec exec = Exec::Parallel);

/// Self-normalized estimate sum_u w(u) phi(d_u) / sum_u w(u) over the current
/// dictionary. Throws DegenerateNormalizerError when |sum w| < 1e-300,
/// NonFiniteValueError when phi is non-finite at a retained atom.
double estimate(const EstimatorState& state, const std::function<double(const Eigen::VectorXd&)>& phi);

/// Z-hat = (current coefficient sum) / n. For the uncompressed path this
/// equals the historical mean of g; the historical sum stays available in
/// diagnostics either way.
double estimate_normalizer(const EstimatorState& state);

/// Plug-in estimate of rho = pi(g^2)/pi(g)^2: (n sum g^2)/(sum g)^2, i.e.
/// n/ESS. Needs >= 2 samples.
double estimate_rho(const std::vector<double>& weights);

}  // namespace ckis
