#include <doctest.h>

#include <cmath>

#include "ckis/embedding.hpp"
#include "ckis/rng.hpp"
#include "oracles.hpp"

using namespace ckis;

namespace {
Eigen::VectorXd pt(double v) {
  Eigen::VectorXd x(1);
  x << v;
  return x;
}
}  // namespace

TEST_CASE("embed: empty measure, single atom, brute-force norm") {
  Kernel k(0.5, 1);
  ParticleMeasure empty(Eigen::MatrixXd(1, 0), Eigen::VectorXd(0));
  Embedding be = embed(empty, k);
  CHECK(be.order() == 0);
  CHECK(squared_norm(be) == 0.0);

  ParticleMeasure one(pt(1.3), Eigen::VectorXd::Constant(1, 0.8));
  Embedding b1 = embed(one, k);
  CHECK(std::sqrt(squared_norm(b1)) == doctest::Approx(0.8).epsilon(1e-14));

  Rng rng(9);
  PointMatrix pts(1, 3);
  Eigen::VectorXd w(3);
  for (int i = 0; i < 3; ++i) {
    pts(0, i) = rng.uniform(-2, 2);
    w(i) = rng.uniform(-1, 2);
  }
  Embedding b3 = embed(ParticleMeasure(pts, w), k);
  CHECK(squared_norm(b3) ==
        doctest::Approx(oracles::norm_sq_double_sum(b3)).epsilon(1e-12));
}

TEST_CASE("rkhs_inner: empty, self atom, random vs double-sum oracle") {
  Kernel k(0.6, 1);
  Embedding empty(k);
  ParticleMeasure one(pt(0.2), Eigen::VectorXd::Constant(1, 1.7));
  Embedding b1 = embed(one, k);
  CHECK(rkhs_inner(b1, empty) == 0.0);
  CHECK(rkhs_inner(b1, b1) == doctest::Approx(1.7 * 1.7).epsilon(1e-14));

  Rng rng(21);
  Embedding a = oracles::random_embedding(rng, 4, 1, 0.6);
  Embedding b = oracles::random_embedding(rng, 3, 1, 0.6);
  CHECK(rkhs_inner(a, b) == doctest::Approx(oracles::inner_double_sum(a, b)).epsilon(1e-12));
}

TEST_CASE("rkhs_inner: kernel mismatch rejected") {
  Rng rng(2);
  Embedding a = oracles::random_embedding(rng, 2, 1, 0.5);
  Embedding b = oracles::random_embedding(rng, 2, 1, 0.9);
  CHECK_THROWS_AS(rkhs_inner(a, b), std::invalid_argument);
  CHECK_THROWS_AS(mmd(a, b), std::invalid_argument);
}

TEST_CASE("mmd: identity, two-atom closed form, triangle inequality") {
  Kernel k(1.0, 1);
  Rng rng(33);
  Embedding b = oracles::random_embedding(rng, 5, 1, 1.0);
  CHECK(mmd(b, b) == 0.0);

  const double x = 0.3, y = 1.1;
  Embedding ax(pt(x), Eigen::VectorXd::Constant(1, 1.0), k);
  Embedding ay(pt(y), Eigen::VectorXd::Constant(1, 1.0), k);
  const double kxy = k(pt(x), pt(y));
  CHECK(mmd(ax, ay) == doctest::Approx(std::sqrt(2.0 - 2.0 * kxy)).epsilon(1e-13));

  for (int t = 0; t < 100; ++t) {
    Embedding p = oracles::random_embedding(rng, 4, 1, 1.0);
    Embedding q = oracles::random_embedding(rng, 3, 1, 1.0);
    Embedding r = oracles::random_embedding(rng, 5, 1, 1.0);
    CHECK(mmd(p, r) <= mmd(p, q) + mmd(q, r) + 1e-9);
  }
}

TEST_CASE("mmd: pseudometric axioms on random instances") {
  Rng rng(55);
  for (int t = 0; t < 200; ++t) {
    Embedding a = oracles::random_embedding(rng, 1 + (t % 6), 1, 0.8);
    Embedding b = oracles::random_embedding(rng, 1 + ((t + 3) % 6), 1, 0.8);
    const double d_ab = mmd(a, b);
    CHECK(d_ab >= 0.0);
    CHECK(std::abs(d_ab - mmd(b, a)) <= 1e-9);
    CHECK(mmd(a, a) == 0.0);
  }
}

TEST_CASE("append: empty, far atom, zero weight") {
  Kernel k(0.01, 1);
  Embedding empty(k);
  Embedding one = append(empty, pt(0.5), 1.2);
  CHECK(one.order() == 1);
  CHECK(one.coefficients(0) == 1.2);

  Rng rng(4);
  Embedding base = oracles::random_embedding(rng, 3, 1, 0.01, 0.4);
  // new atom 100 bandwidths away from everything
  const double far = 5.0;
  Embedding grown = append(base, pt(far), -0.9);
  CHECK(mmd(grown, base) == doctest::Approx(0.9).epsilon(1e-6));

  Embedding same = append(base, pt(0.1), 0.0);
  CHECK(mmd(same, base) == 0.0);
}

TEST_CASE("append: equals embedding of the concatenated measure exactly") {
  Kernel k(0.3, 1);
  Rng rng(6);
  PointMatrix pts(1, 4);
  Eigen::VectorXd w(4);
  for (int i = 0; i < 4; ++i) {
    pts(0, i) = rng.uniform(-1, 1);
    w(i) = rng.uniform(-1, 1);
  }
  ParticleMeasure mu(pts.leftCols(3), w.head(3));
  Embedding via_append = append(embed(mu, k), pts.col(3), w(3));
  Embedding via_concat = embed(ParticleMeasure(pts, w), k);
  CHECK(via_append.points == via_concat.points);
  CHECK(via_append.coefficients == via_concat.coefficients);
}

TEST_CASE("append: non-finite input rejected") {
  Kernel k(1.0, 1);
  Embedding e(k);
  CHECK_THROWS_AS(append(e, pt(0.0), std::numeric_limits<double>::quiet_NaN()),
                  std::invalid_argument);
  CHECK_THROWS_AS(append(e, pt(std::numeric_limits<double>::infinity()), 1.0),
                  std::invalid_argument);
}

TEST_CASE("preimage: round trip is the identity") {
  Kernel k(0.4, 2);
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const int m = t % 7;
    PointMatrix pts(2, m);
    Eigen::VectorXd w(m);
    for (int i = 0; i < m; ++i) {
      pts(0, i) = rng.uniform(-2, 2);
      pts(1, i) = rng.uniform(-2, 2);
      w(i) = rng.uniform(-2, 2);
    }
    ParticleMeasure mu(pts, w);
    ParticleMeasure back = preimage(embed(mu, k));
    CHECK(back.points == mu.points);
    CHECK(back.weights == mu.weights);
  }
  Embedding empty(k);
  CHECK(preimage(empty).size() == 0);
}
