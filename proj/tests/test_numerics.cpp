#include <doctest.h>

#include <cmath>
#include <limits>

#include "microdl/error.hpp"
#include "microdl/numerics.hpp"
#include "microdl/rng.hpp"

using namespace microdl;

TEST_CASE("sigmoid values") {
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(std::abs(sigmoid(50.0) - 1.0) < 1e-15);
  CHECK(sigmoid(std::log(3.0)) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800.0)));
}

TEST_CASE("sigmoid_map is monotone and bounded") {
  Matrix x(1, 201);
  for (int i = 0; i < 201; ++i) x(0, i) = -20.0 + 0.2 * i;
  const Matrix y = sigmoid_map(x);
  for (int i = 0; i < 201; ++i) {
    CHECK(y(0, i) > 0.0);
    CHECK(y(0, i) < 1.0);
    if (i > 0) CHECK(y(0, i) > y(0, i - 1));
  }
}

TEST_CASE("clamp_prob") {
  RowVector p(3);
  p << 0.0, 0.5, 1.0;
  const RowVector c = clamp_prob(p);
  CHECK(c[0] == kProbClamp);
  CHECK(c[1] == 0.5);
  CHECK(c[2] == 1.0 - kProbClamp);
}

TEST_CASE("kl_divergence examples") {
  RowVector p(2), q(2);
  p << 0.3, 0.7;
  CHECK(kl_divergence(p, p) == 0.0);
  p << 0.5, 0.5;
  q << 0.25, 0.75;
  // Independent evaluation: 0.5 ln 2 + 0.5 ln(2/3).
  CHECK(kl_divergence(p, q) == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  CHECK(kl_divergence(p, q) == doctest::Approx(0.143841036225890).epsilon(1e-12));
  p << 0.9, 0.1;
  q << 0.1, 0.9;
  CHECK(kl_divergence(p, q) > 0.0);
  RowVector r(3);
  r << 0.1, 0.2, 0.3;
  CHECK_THROWS_AS(kl_divergence(p, r), DimensionError);
}

TEST_CASE("kl_divergence of a clamped vector with itself is exactly zero") {
  RngStream rng(11);
  for (int t = 0; t < 100; ++t) {
    RowVector p(5);
    for (int i = 0; i < 5; ++i) p[i] = rng.uniform();
    p[0] = 0.0;
    CHECK(kl_divergence(p, p) == 0.0);
  }
}

TEST_CASE("kl_divergence is non-negative for proper distributions") {
  RngStream rng(12);
  for (int t = 0; t < 200; ++t) {
    RowVector p(4), q(4);
    for (int i = 0; i < 4; ++i) {
      p[i] = rng.uniform();
      q[i] = rng.uniform();
    }
    p /= p.sum();
    q /= q.sum();
    CHECK(kl_divergence(p, q) >= -1e-15);
  }
}

TEST_CASE("kl_divergence can be negative for on-probability vectors") {
  RowVector p(1), q(1);
  p << 0.2;
  q << 0.9;
  CHECK(kl_divergence(p, q) < 0.0);
}

TEST_CASE("bernoulli_sample") {
  RngStream rng(13);
  Matrix p(1, 3);
  p << 0.0, 1.0, 0.5;
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const Matrix s = bernoulli_sample(p, rng);
    REQUIRE(s(0, 0) == 0.0);
    REQUIRE(s(0, 1) == 1.0);
    sum += s(0, 2);
  }
  CHECK(std::abs(sum / n - 0.5) < 0.01);
  Matrix bad(1, 1);
  bad << 1.5;
  CHECK_THROWS_AS(bernoulli_sample(bad, rng), ParameterError);
}

TEST_CASE("gaussian_sample moments and determinism") {
  RngStream rng(14);
  Matrix mean = Matrix::Zero(1000, 100);
  const Matrix s = gaussian_sample(mean, 1.0, rng);
  const double m = s.mean();
  const double var = (s.array() - m).square().mean();
  CHECK(std::abs(m) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.05);

  Matrix shifted = Matrix::Constant(1000, 100, 3.0);
  RngStream r2(15);
  const Matrix t = gaussian_sample(shifted, 1.0, r2);
  const double tm = t.mean();
  CHECK(std::abs((t.array() - tm).square().mean() - 1.0) < 0.05);

  RngStream a(16), b(16);
  CHECK(gaussian_sample(mean.topRows(3), 2.0, a) == gaussian_sample(mean.topRows(3), 2.0, b));
  CHECK_THROWS_AS(gaussian_sample(mean, 0.0, a), ParameterError);
  CHECK_THROWS_AS(gaussian_sample(mean, -1.0, a), ParameterError);
}

TEST_CASE("require_finite") {
  Matrix m = Matrix::Zero(2, 2);
  CHECK_NOTHROW(require_finite(m, "m"));
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(require_finite(m, "m"), NumericError);
  RowVector v = RowVector::Zero(3);
  v[2] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(require_finite(v, "v"), NumericError);
}
