#include "microdl/rbm.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "microdl/error.hpp"

namespace microdl {

std::string to_string(VisibleKind kind) {
  return kind == VisibleKind::kBinary ? "binary" : "gaussian";
}

VisibleKind visible_kind_from_string(const std::string& s) {
  if (s == "binary") return VisibleKind::kBinary;
  if (s == "gaussian") return VisibleKind::kGaussian;
  throw ConfigError("unknown visible kind '" + s + "'");
}

void RbmParams::validate() const {
  if (hidden_bias.size() != weights.cols() || visible_bias.size() != weights.rows()) {
    throw DimensionError("RbmParams: weights " + std::to_string(weights.rows()) + "x" +
                         std::to_string(weights.cols()) + ", hidden bias " +
                         std::to_string(hidden_bias.size()) + ", visible bias " +
                         std::to_string(visible_bias.size()));
  }
  require_finite(weights, "weights");
  require_finite(hidden_bias, "hidden bias");
  require_finite(visible_bias, "visible bias");
  if (!(gaussian_sigma > 0.0)) throw ParameterError("gaussian_sigma must be > 0");
}

bool RbmParams::operator==(const RbmParams& other) const {
  return visible_kind == other.visible_kind && gaussian_sigma == other.gaussian_sigma &&
         weights.rows() == other.weights.rows() && weights.cols() == other.weights.cols() &&
         weights == other.weights && hidden_bias == other.hidden_bias &&
         visible_bias == other.visible_bias;
}

RbmParams init_params(Eigen::Index visible_dim, Eigen::Index hidden_dim, VisibleKind kind,
                      RngStream& rng, double init_std) {
  if (visible_dim < 1 || hidden_dim < 1) throw DimensionError("init_params: empty layer");
  RbmParams p;
  p.visible_kind = kind;
  p.weights = gaussian_sample(Matrix::Zero(visible_dim, hidden_dim), init_std, rng);
  p.hidden_bias = RowVector::Zero(hidden_dim);
  p.visible_bias = RowVector::Zero(visible_dim);
  return p;
}

Matrix hidden_given_visible(const RbmParams& params, const Matrix& v) {
  if (v.cols() != params.visible_dim()) {
    throw DimensionError("hidden_given_visible: data has " + std::to_string(v.cols()) +
                         " columns, model expects " + std::to_string(params.visible_dim()));
  }
  Matrix act = v * params.weights;
  act.rowwise() += params.hidden_bias;
  return sigmoid_map(act);
}

namespace {

Matrix visible_activation(const RbmParams& params, const Matrix& h) {
  if (h.cols() != params.hidden_dim()) {
    throw DimensionError("visible reconstruction: hidden data has " + std::to_string(h.cols()) +
                         " columns, model expects " + std::to_string(params.hidden_dim()));
  }
  Matrix act = h * params.weights.transpose();
  act.rowwise() += params.visible_bias;
  return act;
}

}  // namespace

Matrix visible_given_hidden_binary(const RbmParams& params, const Matrix& h) {
  if (params.visible_kind != VisibleKind::kBinary) {
    throw KindError("visible_given_hidden_binary called on a gaussian-visible model");
  }
  return sigmoid_map(visible_activation(params, h));
}

Matrix visible_given_hidden_gaussian(const RbmParams& params, const Matrix& h, RngStream& rng,
                                     bool sample) {
  if (params.visible_kind != VisibleKind::kGaussian) {
    throw KindError("visible_given_hidden_gaussian called on a binary-visible model");
  }
  Matrix mean = visible_activation(params, h);
  if (!sample) return mean;
  return gaussian_sample(mean, params.gaussian_sigma, rng);
}

Matrix reconstruct_mean(const RbmParams& params, const Matrix& h) {
  Matrix act = visible_activation(params, h);
  if (params.visible_kind == VisibleKind::kBinary) return sigmoid_map(act);
  return act;
}

Cd1Stats cd1_step(const RbmParams& params, const Matrix& v0, RngStream& rng,
                  bool gaussian_noise) {
  if (v0.rows() == 0) throw DataError("cd1_step: empty batch");
  const Matrix h0 = hidden_given_visible(params, v0);
  const Matrix h0_sample = bernoulli_sample(h0, rng);
  Matrix v1 = params.visible_kind == VisibleKind::kBinary
                  ? visible_given_hidden_binary(params, h0_sample)
                  : visible_given_hidden_gaussian(params, h0_sample, rng, gaussian_noise);
  const Matrix h1 = hidden_given_visible(params, v1);

  const double inv = 1.0 / static_cast<double>(v0.rows());
  Cd1Stats s;
  s.vh_data = (v0.transpose() * h0) * inv;
  s.vh_recon = (v1.transpose() * h1) * inv;
  s.h_data = h0.colwise().mean();
  s.h_recon = h1.colwise().mean();
  s.v_data = v0.colwise().mean();
  s.v_recon = v1.colwise().mean();
  return s;
}

RbmParams cd1_update(const RbmParams& params, const Cd1Stats& stats, double eps) {
  if (!(eps > 0.0)) throw ParameterError("cd1_update: learning rate must be > 0");
  if (stats.vh_data.rows() != params.visible_dim() ||
      stats.vh_data.cols() != params.hidden_dim() ||
      stats.vh_recon.rows() != params.visible_dim() ||
      stats.vh_recon.cols() != params.hidden_dim() ||
      stats.h_data.size() != params.hidden_dim() || stats.h_recon.size() != params.hidden_dim() ||
      stats.v_data.size() != params.visible_dim() || stats.v_recon.size() != params.visible_dim()) {
    throw DimensionError("cd1_update: statistics do not match the model");
  }
  require_finite(stats.vh_data, "CD statistics <vh>_0");
  require_finite(stats.vh_recon, "CD statistics <vh>_1");
  require_finite(stats.h_data, "CD statistics <h>_0");
  require_finite(stats.h_recon, "CD statistics <h>_1");
  require_finite(stats.v_data, "CD statistics <v>_0");
  require_finite(stats.v_recon, "CD statistics <v>_1");

  RbmParams next = params;
  next.weights += eps * (stats.vh_data - stats.vh_recon);
  next.hidden_bias += eps * (stats.h_data - stats.h_recon);
  next.visible_bias += eps * (stats.v_data - stats.v_recon);
  require_finite(next.weights, "weights after CD update");
  require_finite(next.hidden_bias, "hidden bias after CD update");
  require_finite(next.visible_bias, "visible bias after CD update");
  return next;
}

double reconstruction_error(const RbmParams& params, const Matrix& v) {
  if (v.rows() == 0) return 0.0;
  const Matrix recon = reconstruct_mean(params, hidden_given_visible(params, v));
  return (recon - v).squaredNorm() / static_cast<double>(v.size());
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

void write_row(std::ostream& out, const double* data, Eigen::Index count) {
  for (Eigen::Index j = 0; j < count; ++j) {
    if (j) out << ' ';
    out << format_double(data[j]);
  }
  out << '\n';
}

void expect_token(std::istream& in, const std::string& token) {
  std::string got;
  if (!(in >> got) || got != token) {
    throw DataError("checkpoint: expected '" + token + "', found '" + got + "'");
  }
}

double read_double(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw DataError("checkpoint: truncated numeric data");
  double v = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw DataError("checkpoint: bad number '" + tok + "'");
  }
  return v;
}

}  // namespace

void write_checkpoint(std::ostream& out, const RbmParams& params) {
  params.validate();
  out << "microdl-rbm 1\n";
  out << "visible_kind " << to_string(params.visible_kind) << '\n';
  out << "gaussian_sigma " << format_double(params.gaussian_sigma) << '\n';
  out << "dims " << params.visible_dim() << ' ' << params.hidden_dim() << '\n';
  out << "weights\n";
  for (Eigen::Index i = 0; i < params.visible_dim(); ++i) {
    write_row(out, params.weights.row(i).data(), params.hidden_dim());
  }
  out << "hidden_bias\n";
  write_row(out, params.hidden_bias.data(), params.hidden_dim());
  out << "visible_bias\n";
  write_row(out, params.visible_bias.data(), params.visible_dim());
  out << "end\n";
}

RbmParams read_checkpoint(std::istream& in) {
  expect_token(in, "microdl-rbm");
  int version = 0;
  if (!(in >> version) || version != 1) {
    throw DataError("checkpoint: unsupported version " + std::to_string(version));
  }
  RbmParams p;
  std::string kind;
  expect_token(in, "visible_kind");
  in >> kind;
  p.visible_kind = visible_kind_from_string(kind);
  expect_token(in, "gaussian_sigma");
  p.gaussian_sigma = read_double(in);
  expect_token(in, "dims");
  Eigen::Index n = 0, m = 0;
  if (!(in >> n >> m) || n < 1 || m < 1) throw DataError("checkpoint: bad dims");
  p.weights.resize(n, m);
  p.hidden_bias.resize(m);
  p.visible_bias.resize(n);
  expect_token(in, "weights");
  for (Eigen::Index i = 0; i < n * m; ++i) p.weights.data()[i] = read_double(in);
  expect_token(in, "hidden_bias");
  for (Eigen::Index j = 0; j < m; ++j) p.hidden_bias[j] = read_double(in);
  expect_token(in, "visible_bias");
  for (Eigen::Index i = 0; i < n; ++i) p.visible_bias[i] = read_double(in);
  expect_token(in, "end");
  p.validate();
  return p;
}

}  // namespace microdl
