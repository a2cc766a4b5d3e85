#include "microdl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "microdl/error.hpp"

namespace microdl {

double sigmoid(double x) {
  // Split on sign so exp never overflows.
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix sigmoid_map(const Matrix& x) { return x.unaryExpr([](double v) { return sigmoid(v); }); }

Matrix clamp_prob(const Matrix& p) {
  return p.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
}

RowVector clamp_prob(const RowVector& p) {
  return p.cwiseMax(kProbClamp).cwiseMin(1.0 - kProbClamp);
}

double kl_divergence(const Eigen::Ref<const RowVector>& p, const Eigen::Ref<const RowVector>& q) {
  if (p.size() != q.size()) {
    throw DimensionError("kl_divergence: lengths " + std::to_string(p.size()) + " and " +
                         std::to_string(q.size()));
  }
  double sum = 0.0;
  for (Eigen::Index x = 0; x < p.size(); ++x) {
    const double px = std::clamp(p[x], kProbClamp, 1.0 - kProbClamp);
    const double qx = std::clamp(q[x], kProbClamp, 1.0 - kProbClamp);
    sum += px * (std::log(px) - std::log(qx));
  }
  return sum;
}

Matrix bernoulli_sample(const Matrix& p, RngStream& rng) {
  Matrix out(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p.data()[i];
    if (!(pi >= 0.0 && pi <= 1.0)) {
      throw ParameterError("bernoulli_sample: probability outside [0,1]");
    }
    out.data()[i] = rng.uniform() < pi ? 1.0 : 0.0;
  }
  return out;
}

Matrix gaussian_sample(const Matrix& mean, double sigma, RngStream& rng) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_sample: sigma must be > 0");
  Matrix out(mean.rows(), mean.cols());
  for (Eigen::Index i = 0; i < mean.size(); ++i) {
    out.data()[i] = mean.data()[i] + sigma * rng.normal();
  }
  return out;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericError(std::string("non-finite values in ") + what);
}

void require_finite(const RowVector& v, const char* what) {
  if (!v.allFinite()) throw NumericError(std::string("non-finite values in ") + what);
}

}  // namespace microdl
