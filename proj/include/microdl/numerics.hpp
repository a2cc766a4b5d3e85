#pragma once

#include <Eigen/Dense>

#include "microdl/rng.hpp"

namespace microdl {

// Row-major so that one sample is one contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

// Lower/upper probability clamp. Keeps log-probabilities finite.
inline constexpr double kProbClamp = 1e-7;

Matrix sigmoid_map(const Matrix& x);
double sigmoid(double x);

// Clips every entry into [kProbClamp, 1 - kProbClamp].
Matrix clamp_prob(const Matrix& p);
RowVector clamp_prob(const RowVector& p);

// Sum_x p(x) ln(p(x)/q(x)) over the given entries (natural log). Inputs are
// clamped first. This is a sum over "on" probabilities only and is not a full
// Bernoulli-vector divergence, so it can be negative when p and q are not
// proper distributions.
double kl_divergence(const Eigen::Ref<const RowVector>& p, const Eigen::Ref<const RowVector>& q);

// 0/1 draws with P(1) = p entrywise. Entries outside [0,1] are a ParameterError.
Matrix bernoulli_sample(const Matrix& p, RngStream& rng);

// Entrywise N(mean, sigma^2) draws; sigma must be > 0.
Matrix gaussian_sample(const Matrix& mean, double sigma, RngStream& rng);

// Throws NumericError naming `what` if any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);
void require_finite(const RowVector& v, const char* what);

}  // namespace microdl
