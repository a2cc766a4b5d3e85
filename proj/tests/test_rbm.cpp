#include <doctest.h>

#include <cmath>
#include <sstream>

#include "microdl/error.hpp"
#include "microdl/rbm.hpp"
#include "microdl/rng.hpp"
#include "oracles.hpp"

using namespace microdl;

namespace {

RbmParams zero_params(Eigen::Index n, Eigen::Index m, VisibleKind kind) {
  RbmParams p;
  p.weights = Matrix::Zero(n, m);
  p.hidden_bias = RowVector::Zero(m);
  p.visible_bias = RowVector::Zero(n);
  p.visible_kind = kind;
  return p;
}

RbmParams random_params(Eigen::Index n, Eigen::Index m, VisibleKind kind, std::uint64_t seed) {
  RngStream rng(seed);
  RbmParams p = init_params(n, m, kind, rng, 0.5);
  for (Eigen::Index j = 0; j < m; ++j) p.hidden_bias[j] = rng.normal() * 0.3;
  for (Eigen::Index i = 0; i < n; ++i) p.visible_bias[i] = rng.normal() * 0.3;
  return p;
}

// Bernoulli mixture: each row copies one of two prototypes with 10% flips.
Matrix bernoulli_mixture(int rows, int n, RngStream& rng) {
  Matrix v(rows, n);
  for (int r = 0; r < rows; ++r) {
    const int proto = r % 2;
    for (int i = 0; i < n; ++i) {
      double bit = ((i < n / 2) == (proto == 0)) ? 1.0 : 0.0;
      if (rng.uniform() < 0.1) bit = 1.0 - bit;
      v(r, i) = bit;
    }
  }
  return v;
}

}  // namespace

TEST_CASE("hidden_given_visible examples") {
  RbmParams p = zero_params(3, 2, VisibleKind::kBinary);
  Matrix v = Matrix::Ones(4, 3);
  CHECK((hidden_given_visible(p, v).array() == 0.5).all());
  p.hidden_bias[1] = std::log(3.0);
  const Matrix h = hidden_given_visible(p, v);
  for (int r = 0; r < 4; ++r) CHECK(h(r, 1) == doctest::Approx(0.75));

  RbmParams one = zero_params(1, 1, VisibleKind::kBinary);
  one.weights(0, 0) = 2.0;
  one.hidden_bias[0] = -1.0;
  Matrix v1(1, 1);
  v1 << 1.0;
  CHECK(hidden_given_visible(one, v1)(0, 0) == doctest::Approx(0.7310585786300049));
  CHECK_THROWS_AS(hidden_given_visible(one, Matrix::Ones(1, 2)), DimensionError);
}

TEST_CASE("hidden_given_visible matches the loop oracle") {
  const RbmParams p = random_params(5, 4, VisibleKind::kGaussian, 3);
  RngStream rng(4);
  Matrix v(6, 5);
  for (int r = 0; r < 6; ++r)
    for (int i = 0; i < 5; ++i) v(r, i) = rng.normal();
  const Matrix h = hidden_given_visible(p, v);
  std::vector<double> w(p.weights.data(), p.weights.data() + 20);
  std::vector<double> b(p.hidden_bias.data(), p.hidden_bias.data() + 4);
  for (int r = 0; r < 6; ++r) {
    std::vector<double> row(v.row(r).data(), v.row(r).data() + 5);
    const auto ref = oracle::hidden(w, b, row, 5, 4);
    for (int j = 0; j < 4; ++j) CHECK(h(r, j) == doctest::Approx(ref[j]).epsilon(1e-14));
  }
}

TEST_CASE("visible_given_hidden_binary examples") {
  RbmParams p = zero_params(2, 3, VisibleKind::kBinary);
  CHECK((visible_given_hidden_binary(p, Matrix::Ones(2, 3)).array() == 0.5).all());
  p.visible_bias << -1.0, 2.0;
  const Matrix v = visible_given_hidden_binary(p, Matrix::Zero(1, 3));
  CHECK(v(0, 0) == doctest::Approx(sigmoid(-1.0)));
  CHECK(v(0, 1) == doctest::Approx(sigmoid(2.0)));

  RbmParams one = zero_params(1, 1, VisibleKind::kBinary);
  one.weights(0, 0) = -1.0;
  CHECK(visible_given_hidden_binary(one, Matrix::Ones(1, 1))(0, 0) ==
        doctest::Approx(0.2689414213699951));
  const RbmParams g = zero_params(1, 1, VisibleKind::kGaussian);
  CHECK_THROWS_AS(visible_given_hidden_binary(g, Matrix::Ones(1, 1)), KindError);
}

TEST_CASE("binary conditionals stay inside (0,1)") {
  const RbmParams p = random_params(6, 5, VisibleKind::kBinary, 8);
  RngStream rng(9);
  const Matrix v = bernoulli_mixture(20, 6, rng);
  const Matrix h = hidden_given_visible(p, v);
  CHECK((h.array() > 0.0).all());
  CHECK((h.array() < 1.0).all());
  const Matrix r = visible_given_hidden_binary(p, h);
  CHECK((r.array() > 0.0).all());
  CHECK((r.array() < 1.0).all());
}

TEST_CASE("visible_given_hidden_gaussian examples") {
  RngStream rng(1);
  RbmParams p = zero_params(3, 3, VisibleKind::kGaussian);
  p.visible_bias << 0.5, -1.0, 2.0;
  const Matrix m = visible_given_hidden_gaussian(p, Matrix::Zero(2, 3), rng, false);
  for (int r = 0; r < 2; ++r) CHECK(m.row(r) == p.visible_bias);

  RbmParams id = zero_params(3, 3, VisibleKind::kGaussian);
  id.weights = Matrix::Identity(3, 3);
  Matrix e = Matrix::Zero(1, 3);
  e(0, 1) = 1.0;
  CHECK(visible_given_hidden_gaussian(id, e, rng, false) == e);

  // Monte Carlo: noisy reconstructions average to the mean.
  Matrix h = Matrix::Zero(100000, 3);
  h.col(1).setOnes();
  const Matrix s = visible_given_hidden_gaussian(p, h, rng, true);
  const RowVector mean = s.colwise().mean();
  CHECK(std::abs(mean[0] - 0.5) < 0.02);
  CHECK(std::abs(mean[1] - (-1.0)) < 0.02);
  CHECK(std::abs(mean[2] - 2.0) < 0.02);

  const RbmParams b = zero_params(1, 1, VisibleKind::kBinary);
  CHECK_THROWS_AS(visible_given_hidden_gaussian(b, Matrix::Zero(1, 1), rng, false), KindError);
}

TEST_CASE("gaussian reconstruction mean is affine in h") {
  RbmParams p = random_params(4, 3, VisibleKind::kGaussian, 21);
  RngStream rng(2);
  Matrix h1(1, 3), h2(1, 3);
  h1 << 0.2, 0.7, 0.1;
  h2 << 0.5, 0.3, 0.9;
  const Matrix a = reconstruct_mean(p, h1 + h2);
  const Matrix b = reconstruct_mean(p, h1) + reconstruct_mean(p, h2);
  const Matrix c = p.visible_bias;
  CHECK((a - (b - c)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("cd1_step on the 1x1 zero model") {
  RbmParams p = zero_params(1, 1, VisibleKind::kBinary);
  RngStream rng(5);
  Matrix v0(1, 1);
  v0 << 1.0;
  const Cd1Stats s = cd1_step(p, v0, rng);
  CHECK(s.vh_data(0, 0) == 0.5);
  CHECK(s.h_data[0] == 0.5);
  CHECK(s.v_data[0] == 1.0);
  CHECK(s.v_recon[0] == 0.5);
  CHECK(s.h_recon[0] == 0.5);
  CHECK(s.vh_recon(0, 0) == 0.25);
}

TEST_CASE("cd1_step is deterministic and averages over the batch") {
  const RbmParams p = random_params(4, 3, VisibleKind::kBinary, 6);
  RngStream data_rng(7);
  const Matrix v = bernoulli_mixture(10, 4, data_rng);
  RngStream a(99), b(99);
  const Cd1Stats s1 = cd1_step(p, v, a);
  const Cd1Stats s2 = cd1_step(p, v, b);
  CHECK(s1.vh_recon == s2.vh_recon);
  CHECK(s1.h_recon == s2.h_recon);
  const Matrix h = hidden_given_visible(p, v);
  CHECK((s1.vh_data - v.transpose() * h / 10.0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((s1.v_data - v.colwise().mean()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(cd1_step(p, Matrix(0, 4), a), DataError);
}

TEST_CASE("cd1_update formula") {
  const RbmParams p = random_params(2, 2, VisibleKind::kBinary, 10);
  Cd1Stats s;
  s.vh_data = Matrix::Constant(2, 2, 0.75);
  s.vh_recon = Matrix::Constant(2, 2, 0.25);
  s.h_data = RowVector::Constant(2, 0.4);
  s.h_recon = RowVector::Constant(2, 0.2);
  s.v_data = RowVector::Constant(2, 1.0);
  s.v_recon = RowVector::Constant(2, 0.5);
  const RbmParams q = cd1_update(p, s, 0.1);
  CHECK(((q.weights - p.weights).array() - 0.05).abs().maxCoeff() < 1e-15);
  CHECK(((q.hidden_bias - p.hidden_bias).array() - 0.02).abs().maxCoeff() < 1e-15);
  CHECK(((q.visible_bias - p.visible_bias).array() - 0.05).abs().maxCoeff() < 1e-15);

  Cd1Stats same = s;
  same.vh_recon = s.vh_data;
  same.h_recon = s.h_data;
  same.v_recon = s.v_data;
  CHECK(cd1_update(p, same, 0.1) == p);

  CHECK_THROWS_AS(cd1_update(p, s, 0.0), ParameterError);
  Cd1Stats bad = s;
  bad.vh_data(0, 0) = std::nan("");
  CHECK_THROWS_AS(cd1_update(p, bad, 0.1), NumericError);
}

TEST_CASE("perfect reconstruction gives equal statistics") {
  // Saturated binary model: hidden copies the visible bits and back.
  RbmParams p = zero_params(2, 2, VisibleKind::kBinary);
  p.weights = Matrix::Identity(2, 2) * 60.0;
  p.hidden_bias = RowVector::Constant(2, -30.0);
  p.visible_bias = RowVector::Constant(2, -30.0);
  Matrix v(2, 2);
  v << 1, 0, 0, 1;
  RngStream rng(3);
  const Cd1Stats s = cd1_step(p, v, rng);
  CHECK((s.vh_data - s.vh_recon).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("CD-1 lowers reconstruction error on a Bernoulli mixture") {
  RngStream data_rng(17);
  const Matrix v = bernoulli_mixture(200, 4, data_rng);
  RngStream rng(18);
  RbmParams p = init_params(4, 2, VisibleKind::kBinary, rng);
  std::vector<double> errors;
  for (int epoch = 0; epoch < 200; ++epoch) {
    const Cd1Stats s = cd1_step(p, v, rng);
    p = cd1_update(p, s, 0.1);
    errors.push_back(reconstruction_error(p, v));
  }
  CHECK(oracle::slope(errors) < 0.0);
}

TEST_CASE("checkpoint round trip is exact") {
  for (VisibleKind kind : {VisibleKind::kBinary, VisibleKind::kGaussian}) {
    RbmParams p = random_params(5, 3, kind, 30);
    p.weights(0, 0) = 1.0 / 3.0;
    p.weights(1, 1) = -1e-300;
    std::stringstream ss;
    write_checkpoint(ss, p);
    const RbmParams q = read_checkpoint(ss);
    CHECK(q == p);
    CHECK(q.visible_kind == kind);
  }
}

TEST_CASE("checkpoint rejects malformed input") {
  std::stringstream bad("not a checkpoint\n");
  CHECK_THROWS_AS(read_checkpoint(bad), DataError);
  RbmParams p = random_params(2, 2, VisibleKind::kBinary, 1);
  std::stringstream ss;
  write_checkpoint(ss, p);
  std::string text = ss.str();
  text = text.substr(0, text.size() / 2);
  std::stringstream truncated(text);
  CHECK_THROWS_AS(read_checkpoint(truncated), DataError);
}

TEST_CASE("visible kind strings") {
  CHECK(to_string(VisibleKind::kBinary) == "binary");
  CHECK(visible_kind_from_string("gaussian") == VisibleKind::kGaussian);
  CHECK_THROWS_AS(visible_kind_from_string("poisson"), ConfigError);
}

TEST_CASE("format_double round trips") {
  RngStream rng(40);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(std::stod(format_double(x)) == x);
  }
}

TEST_CASE("checkpoint with a non-finite value is a data error") {
  std::istringstream in(
      "microdl-rbm 1\nvisible_kind binary\ngaussian_sigma 1\ndims 1 1\nweights\ninf\n"
      "hidden_bias\n0\nvisible_bias\n0\nend\n");
  CHECK_THROWS_AS(read_checkpoint(in), DataError);
}
