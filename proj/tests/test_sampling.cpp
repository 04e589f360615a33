#include <doctest.h>

#include <cmath>

#include "ckis/errors.hpp"
#include "ckis/models.hpp"
#include "ckis/quadrature.hpp"
#include "ckis/sampling.hpp"
#include "oracles.hpp"

using namespace ckis;

namespace {

// target == proposal: every weight is exactly 1
ProblemSpec self_proposal_spec(double scale = 1.0) {
  ProblemSpec spec;
  spec.dim = 1;
  GaussianDensity g = GaussianDensity::scalar(0.0, 1.0);
  spec.target_unnorm = [g, scale](const Eigen::VectorXd& x) { return scale * g.density(x); };
  spec.proposal.density = [g](const Eigen::VectorXd& x) { return g.density(x); };
  spec.proposal.sample = [g](Rng& rng) { return g.sample(rng); };
  spec.test_fn = [](const Eigen::VectorXd& x) { return x(0); };
  return spec;
}

}  // namespace

TEST_CASE("budget schedule: validation and values") {
  CHECK_THROWS_AS(BudgetSchedule::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(BudgetSchedule::geometric(0.0), std::invalid_argument);
  CHECK_THROWS_AS(BudgetSchedule::geometric(1.0), std::invalid_argument);

  BudgetSchedule c = BudgetSchedule::constant(0.25);
  CHECK(c.epsilon_at(1) == 0.25);
  CHECK(c.epsilon_at(1000) == 0.25);
  CHECK(c.cumulative(4) == doctest::Approx(1.0));

  BudgetSchedule g = BudgetSchedule::geometric(0.9);
  CHECK(g.epsilon_at(1) == doctest::Approx(0.9));
  CHECK(g.epsilon_at(3) == doctest::Approx(0.729));
  // partial sums stay below the geometric cap alpha/(1-alpha)
  double acc = 0.0;
  for (long n = 1; n <= 200; ++n) {
    acc += g.epsilon_at(n);
    CHECK(acc <= g.cumulative_limit() + 1e-12);
    CHECK(g.cumulative(n) == doctest::Approx(acc).epsilon(1e-12));
  }
  CHECK(g.cumulative_limit() == doctest::Approx(9.0));
}

TEST_CASE("is_step: self-proposal gives unit weights and the sample mean") {
  ProblemSpec spec = self_proposal_spec();
  Kernel k(0.5, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 123);
  double sum_phi = 0.0;
  for (int n = 1; n <= 50; ++n) {
    is_step(state, spec);
    CHECK(state.measure.weights(n - 1) == doctest::Approx(1.0).epsilon(1e-14));
    sum_phi += spec.test_fn(state.measure.points.col(n - 1));
    CHECK(estimate(state, spec.test_fn) == doctest::Approx(sum_phi / n).epsilon(1e-13));
  }
}

TEST_CASE("is_step: constant test function is self-normalized away") {
  ProblemSpec spec = direct_is_spec();
  spec.test_fn = [](const Eigen::VectorXd&) { return 3.25; };
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 7);
  for (int n = 0; n < 25; ++n) {
    is_step(state, spec);
    CHECK(estimate(state, spec.test_fn) == doctest::Approx(3.25).epsilon(1e-14));
  }
}

TEST_CASE("is_step: direct problem converges to the quadrature value") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 404);
  const long n_draws = 100000;
  for (long n = 0; n < n_draws; ++n) is_step(state, spec);
  const double est = estimate(state, spec.test_fn);

  // weighted standard error via the normalized weights
  double se2 = 0.0;
  const double z = state.measure.weight_sum();
  for (long u = 0; u < n_draws; ++u) {
    const double wb = state.measure.weights(u) / z;
    const double d = spec.test_fn(state.measure.points.col(u)) - est;
    se2 += wb * wb * d * d;
  }
  const double reference = direct_reference_integral();
  CHECK(std::abs(est - reference) <= 3.0 * std::sqrt(se2));
}

TEST_CASE("ckis_step: zero budget matches the uncompressed stream") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState c_state(k, BudgetSchedule::constant(0.0), 99);
  EstimatorState u_state(k, BudgetSchedule::constant(0.0), 99);
  for (int n = 0; n < 120; ++n) {
    Particle p = draw_particle(c_state, spec);
    ckis_append(c_state, p);
    is_append(u_state, p);
    CHECK(c_state.measure.points == u_state.measure.points);
    CHECK((c_state.measure.weights - u_state.measure.weights).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("ckis_step: first step has one atom and estimate phi(x1)") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.475), 31);
  ckis_step(state, spec);
  CHECK(state.measure.size() == 1);
  CHECK(estimate(state, spec.test_fn) ==
        doctest::Approx(spec.test_fn(state.measure.points.col(0))).epsilon(1e-14));
}

TEST_CASE("ckis_step: state invariants along a compressed run") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.475), 5);
  double prev_budget = 0.0;
  for (int n = 1; n <= 150; ++n) {
    ckis_step(state, spec);
    // preimage consistency: measure and embedding share dictionary/coefficients
    CHECK(state.measure.points == state.embedding.points);
    CHECK(state.measure.weights == state.embedding.coefficients);
    CHECK(state.diagnostics.model_order.back() <= n);
    CHECK(state.diagnostics.achieved_mmd.back() <=
          state.schedule.epsilon_at(n) + 1e-9);
    CHECK(state.diagnostics.cumulative_budget >= prev_budget);
    prev_budget = state.diagnostics.cumulative_budget;
  }
}

TEST_CASE("drift bound: compressed stays within the summed budgets of the shadow") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::geometric(0.9), 77);
  EstimatorState shadow(k, BudgetSchedule::constant(0.0), 77);
  for (int n = 1; n <= 120; ++n) {
    Particle p = draw_particle(state, spec);
    ckis_append(state, p);
    is_append(shadow, p);
    const double drift = mmd(state.embedding, shadow.embedding);
    CHECK(drift <= state.schedule.cumulative(n) + 1e-9 * n);
  }
}

TEST_CASE("estimate: normalization, single atom, degenerate weights") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 3);
  for (int n = 0; n < 10; ++n) is_step(state, spec);
  CHECK(estimate(state, [](const Eigen::VectorXd&) { return 1.0; }) == 1.0);

  EstimatorState one(k, BudgetSchedule::constant(0.0), 4);
  is_step(one, spec);
  CHECK(estimate(one, spec.test_fn) == spec.test_fn(one.measure.points.col(0)));

  // signed coefficients that cancel exactly
  EstimatorState degenerate(k, BudgetSchedule::constant(0.0), 5);
  PointMatrix pts(1, 2);
  pts << 0.5, 1.0;
  Eigen::VectorXd w(2);
  w << 0.75, -0.75;
  degenerate.measure = ParticleMeasure(pts, w);
  degenerate.step = 2;
  CHECK_THROWS_AS(estimate(degenerate, spec.test_fn), DegenerateNormalizerError);
}

TEST_CASE("estimate: non-finite test function is caught") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 6);
  is_step(state, spec);
  CHECK_THROWS_AS(estimate(state, [](const Eigen::VectorXd&) {
    return std::numeric_limits<double>::quiet_NaN();
  }),
                  NonFiniteValueError);
}

TEST_CASE("estimate_normalizer: constant-ratio target recovers the constant") {
  const double c = 2.5;
  ProblemSpec spec = self_proposal_spec(c);
  Kernel k(0.5, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 8);
  for (int n = 1; n <= 30; ++n) {
    is_step(state, spec);
    CHECK(estimate_normalizer(state) == doctest::Approx(c).epsilon(1e-13));
  }
}

TEST_CASE("estimate_normalizer: first step equals the first weight") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 12);
  is_step(state, spec);
  CHECK(estimate_normalizer(state) == state.measure.weights(0));
}

TEST_CASE("estimate_normalizer: direct problem approaches Z=1 at CLT width") {
  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 21);
  const long n = 10000;
  for (long i = 0; i < n; ++i) is_step(state, spec);
  CHECK(std::abs(estimate_normalizer(state) - 1.0) <= 3.0 / std::sqrt(double(n)));
}

TEST_CASE("estimate_rho: pinned values and closed form for the direct pair") {
  CHECK(estimate_rho({1.0, 1.0, 1.0, 1.0}) == 1.0);
  CHECK(estimate_rho({1.0, 3.0}) == 1.25);
  CHECK_THROWS_AS(estimate_rho({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(estimate_rho({1.0, -1.0}), DegenerateNormalizerError);

  ProblemSpec spec = direct_is_spec();
  Kernel k(0.01, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 40);
  for (long i = 0; i < 10000; ++i) is_step(state, spec);
  // pi(g^2)/pi(g)^2 = 2/sqrt(3) for N(1,1) over N(1,2)
  const double rho_exact = 2.0 / std::sqrt(3.0);
  CHECK(estimate_rho(state.diagnostics.weight_history) ==
        doctest::Approx(rho_exact).epsilon(0.10));
}

TEST_CASE("draw_particle: zero-density proposal sample raises absolute-continuity") {
  ProblemSpec spec;
  spec.dim = 1;
  spec.target_unnorm = [](const Eigen::VectorXd&) { return 1.0; };
  spec.proposal.density = [](const Eigen::VectorXd&) { return 0.0; };
  spec.proposal.sample = [](Rng&) { return Eigen::VectorXd::Zero(1); };
  Kernel k(1.0, 1);
  EstimatorState state(k, BudgetSchedule::constant(0.0), 2);
  CHECK_THROWS_AS(draw_particle(state, spec), AbsoluteContinuityError);
}
