#pragma once

#include <iosfwd>
#include <string>

#include "microdl/numerics.hpp"

namespace microdl {

enum class VisibleKind { kBinary, kGaussian };

std::string to_string(VisibleKind kind);
VisibleKind visible_kind_from_string(const std::string& s);

// Parameters of a bipartite RBM with n visible and m hidden units.
// weights is n x m, hidden_bias has m entries, visible_bias has n entries.
struct RbmParams {
  Matrix weights;
  RowVector hidden_bias;
  RowVector visible_bias;
  VisibleKind visible_kind = VisibleKind::kBinary;
  // Standard deviation of the Gaussian visible units; fixed at 1.
  double gaussian_sigma = 1.0;

  Eigen::Index visible_dim() const { return weights.rows(); }
  Eigen::Index hidden_dim() const { return weights.cols(); }

  // Throws DimensionError / NumericError when the invariants are broken.
  void validate() const;

  bool operator==(const RbmParams& other) const;
};

// Zero biases, weights drawn from N(0, init_std^2).
RbmParams init_params(Eigen::Index visible_dim, Eigen::Index hidden_dim, VisibleKind kind,
                      RngStream& rng, double init_std = 0.01);

// Batch averages of one CD-1 Gibbs step: <.>_0 over the data, <.>_1 over the
// reconstruction.
struct Cd1Stats {
  Matrix vh_data;
  Matrix vh_recon;
  RowVector h_data;
  RowVector h_recon;
  RowVector v_data;
  RowVector v_recon;
};

// p(h_j = 1 | v) = sigmoid(b_j + sum_i v_i w_ij), one row per sample.
Matrix hidden_given_visible(const RbmParams& params, const Matrix& v);

// p(v_i = 1 | h) = sigmoid(c_i + sum_j h_j w_ij). Binary visible units only.
Matrix visible_given_hidden_binary(const RbmParams& params, const Matrix& h);

// Mean h W^T + c of the Gaussian visible units, plus N(0, sigma^2) noise when
// `sample` is set.
Matrix visible_given_hidden_gaussian(const RbmParams& params, const Matrix& h, RngStream& rng,
                                     bool sample);

// Deterministic reconstruction: probabilities (binary) or means (Gaussian).
Matrix reconstruct_mean(const RbmParams& params, const Matrix& h);

// One CD-1 step. h0 is sampled to drive the reconstruction; the statistics use
// probabilities for h0 and h1, and the probability / mean for v1.
// With `gaussian_noise` the Gaussian reconstruction is sampled instead.
Cd1Stats cd1_step(const RbmParams& params, const Matrix& v0, RngStream& rng,
                  bool gaussian_noise = false);

// w += eps (<vh>_0 - <vh>_1), b += eps (<h>_0 - <h>_1), c += eps (<v>_0 - <v>_1).
RbmParams cd1_update(const RbmParams& params, const Cd1Stats& stats, double eps);

// Mean squared error between v and its deterministic one-step reconstruction.
double reconstruction_error(const RbmParams& params, const Matrix& v);

// Checkpoint I/O. Text format, see README "Checkpoint format".
void write_checkpoint(std::ostream& out, const RbmParams& params);
RbmParams read_checkpoint(std::istream& in);

// Shortest round-trip decimal representation of a double.
std::string format_double(double x);

}  // namespace microdl
