#include "ckis/sampling.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace ckis {

BudgetSchedule BudgetSchedule::constant(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw std::invalid_argument("BudgetSchedule: constant budget needs eps >= 0");
  return {Kind::Constant, eps};
}

BudgetSchedule BudgetSchedule::geometric(double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("BudgetSchedule: geometric budget needs alpha in (0,1)");
  return {Kind::Geometric, alpha};
}

double BudgetSchedule::epsilon_at(long n) const {
  if (n < 1) throw std::invalid_argument("BudgetSchedule: step index is 1-based");
  return kind == Kind::Constant ? value : std::pow(value, static_cast<double>(n));
}

double BudgetSchedule::cumulative(long n) const {
  if (n < 0) throw std::invalid_argument("BudgetSchedule: negative step count");
  if (kind == Kind::Constant) return value * static_cast<double>(n);
  const double a = value;
  return a * (1.0 - std::pow(a, static_cast<double>(n))) / (1.0 - a);
}

double BudgetSchedule::cumulative_limit() const {
  if (kind == Kind::Constant)
    return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return value / (1.0 - value);
}

Particle draw_particle(EstimatorState& state, const ProblemSpec& spec) {
  Eigen::VectorXd x = spec.proposal.sample(state.rng);
  if (x.size() != spec.dim || !x.allFinite())
    throw NonFiniteValueError("draw_particle: proposal produced an invalid sample");
  const double pi_x = spec.proposal.density(x);
  const double q_x = spec.target_unnorm(x);
  if (!std::isfinite(pi_x) || !std::isfinite(q_x) || q_x < 0.0)
    throw NonFiniteValueError("draw_particle: density evaluation failed at a drawn sample");
  if (pi_x <= 0.0)
    throw AbsoluteContinuityError("draw_particle: proposal density is zero at a drawn sample");
  const double g = q_x / pi_x;
  if (!std::isfinite(g)) throw NonFiniteValueError("draw_particle: non-finite importance weight");
  return {std::move(x), g};
}

namespace {

void record_draw(EstimatorState& state, const Particle& particle) {
  state.step += 1;
  state.diagnostics.weight_history.push_back(particle.weight);
  state.diagnostics.historical_weight_sum += particle.weight;
  state.diagnostics.historical_weight_sq_sum += particle.weight * particle.weight;
}

void sync_measure(EstimatorState& state) { state.measure = preimage(state.embedding); }

}  // namespace

void is_append(EstimatorState& state, const Particle& particle) {
  record_draw(state, particle);
  state.embedding = append(state.embedding, particle.point, particle.weight);
  sync_measure(state);
  state.diagnostics.model_order.push_back(static_cast<int>(state.embedding.order()));
  state.diagnostics.achieved_mmd.push_back(0.0);
}

void ckis_append(EstimatorState& state, const Particle& particle, bool compress, Exec exec) {
  record_draw(state, particle);
  state.embedding = append(state.embedding, particle.point, particle.weight);
  double achieved = 0.0;
  if (compress) {
    const double eps = state.schedule.epsilon_at(state.step);
    CompressionResult compressed = mmd_omp(state.embedding, eps, exec);
    state.embedding = std::move(compressed.embedding);
    achieved = compressed.report.achieved_mmd;
    state.diagnostics.cumulative_budget += eps;
    state.diagnostics.max_jitter = std::max(state.diagnostics.max_jitter, compressed.report.jitter_used);
  }
  sync_measure(state);
  state.diagnostics.model_order.push_back(static_cast<int>(state.embedding.order()));
  state.diagnostics.achieved_mmd.push_back(achieved);
}

EstimatorState& is_step(EstimatorState& state, const ProblemSpec& spec) {
  is_append(state, draw_particle(state, spec));
  return state;
}

EstimatorState& ckis_step(EstimatorState& state, const ProblemSpec& spec, Exec exec) {
  ckis_append(state, draw_particle(state, spec), true, exec);
  return state;
}

double estimate(const EstimatorState& state,
                const std::function<double(const Eigen::VectorXd&)>& phi) {
  const Eigen::Index m = state.measure.size();
  if (m < 1) throw std::invalid_argument("estimate: no atoms");
  double acc = 0.0, z = 0.0;
  for (Eigen::Index u = 0; u < m; ++u) {
    const double v = phi(state.measure.points.col(u));
    if (!std::isfinite(v))
      throw NonFiniteValueError("estimate: test function returned a non-finite value");
    acc += state.measure.weights(u) * v;
    z += state.measure.weights(u);
  }
  if (std::abs(z) < 1e-300)
    throw DegenerateNormalizerError("estimate: weight sum is numerically zero");
  return acc / z;
}

double estimate_normalizer(const EstimatorState& state) {
  if (state.step < 1) throw std::invalid_argument("estimate_normalizer: no steps taken");
  return state.measure.weight_sum() / static_cast<double>(state.step);
}

double estimate_rho(const std::vector<double>& weights) {
  if (weights.size() < 2) throw std::invalid_argument("estimate_rho: need at least 2 samples");
  double s = 0.0, s2 = 0.0;
  for (double g : weights) {
    s += g;
    s2 += g * g;
  }
  if (std::abs(s) < 1e-300) throw DegenerateNormalizerError("estimate_rho: weight sum is zero");
  return static_cast<double>(weights.size()) * s2 / (s * s);
}

}  // namespace ckis
