#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "microdl/rbm.hpp"

namespace microdl {

// Source of class labels, modelled as an annotator. The trainer asks it for
// candidate members of each class and then reads the labels of the chosen
// samples only, so label() is the single point where supervision is consumed.
class LabelSource {
 public:
  virtual ~LabelSource() = default;
  virtual std::size_t size() const = 0;
  // Classes are 0 .. class_count()-1.
  virtual int class_count() const = 0;
  virtual std::size_t class_size(int cls) const = 0;
  // The rank-th member of class `cls`, in dataset order.
  virtual std::size_t member(int cls, std::size_t rank) const = 0;
  virtual int label(std::size_t sample) const = 0;
};

// LabelSource over a dense label vector (values 0..K-1).
class VectorLabels final : public LabelSource {
 public:
  explicit VectorLabels(std::span<const int> labels);

  std::size_t size() const override { return labels_.size(); }
  int class_count() const override { return static_cast<int>(members_.size()); }
  std::size_t class_size(int cls) const override;
  std::size_t member(int cls, std::size_t rank) const override;
  int label(std::size_t sample) const override;

 private:
  std::vector<int> labels_;
  std::vector<std::vector<std::size_t>> members_;
};

struct SamplePair {
  std::size_t first = 0;
  std::size_t second = 0;
  bool operator==(const SamplePair&) const = default;
};

// Micro-supervision: same-class pairs (SFD, one per class, ordered by class)
// and cross-class pairs (DFD).
struct DisturbancePairs {
  std::vector<SamplePair> sfd;
  std::vector<SamplePair> dfd;
  // Labels of the selected representatives only.
  std::map<std::size_t, int> class_of;

  std::size_t ks() const { return sfd.size(); }
  std::size_t kd() const { return dfd.size(); }
  // Throws DataError if an index is out of range or a pair violates its
  // same-class / cross-class rule.
  void validate(std::size_t sample_count) const;
  bool operator==(const DisturbancePairs&) const = default;
};

enum class GradientMode {
  kDerived,       // exact derivative of the per-pair divergence
  kPaperLiteral,  // closed form with "+ln h_g" and the h_g(1-h_g) subtrahend
};

enum class SpiScaling {
  kObjective,     // descent on the mixed objective, eps applied to SPI terms
  kPaperLiteral,  // SPI terms added without eps, SFD term with a "+" sign
};

std::string to_string(GradientMode mode);
std::string to_string(SpiScaling scaling);
GradientMode gradient_mode_from_string(const std::string& s);
SpiScaling spi_scaling_from_string(const std::string& s);

struct TrainingConfig {
  // Weight of the SPI term. Must lie in [0,1); 0 disables the disturbance.
  double alpha = 0.3;
  double eps = 0.01;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  GradientMode gradient_mode = GradientMode::kDerived;
  SpiScaling spi_scaling = SpiScaling::kObjective;
  std::uint64_t seed = 1;
  // Sample the Gaussian reconstruction instead of using its mean.
  bool gaussian_noise = false;
  double init_std = 0.01;

  void validate() const;
};

// Two distinct, uniformly drawn members of every class, then build_dfd.
DisturbancePairs select_representatives(const LabelSource& labels, RngStream& rng);

// One pair per unordered class pair (a < b), using each class's first
// representative; classes in ascending order. Fewer than two classes yields an
// empty DFD set and a warning.
DisturbancePairs build_dfd(DisturbancePairs pairs);

struct SpiKl {
  double sfd = 0.0;  // mean KL over SFD pairs (0 if none)
  double dfd = 0.0;  // mean KL over DFD pairs (0 if none)
  double value() const { return sfd - dfd; }
};

// Per-pair divergences of hidden "on" probabilities, averaged per set.
SpiKl spi_kl_parts(const RbmParams& params, const Matrix& data, const DisturbancePairs& pairs);
double spi_kl_term(const RbmParams& params, const Matrix& data, const DisturbancePairs& pairs);

// Gradients of KL(h_f || h_g) for one pair w.r.t. W (n x m), b (m) and c (n).
Matrix spi_grad_w(const RbmParams& params, const RowVector& v_f, const RowVector& v_g,
                  GradientMode mode);
RowVector spi_grad_b(const RbmParams& params, const RowVector& v_f, const RowVector& v_g,
                     GradientMode mode);
RowVector spi_grad_c(const RbmParams& params);

// CD-1 update mixed with the SPI gradients. With alpha == 0 the result equals
// cd1_update(params, stats, eps) exactly.
RbmParams micro_update(const RbmParams& params, const Cd1Stats& stats, const Matrix& data,
                       const DisturbancePairs& pairs, const TrainingConfig& cfg);

struct EpochLog {
  std::size_t epoch = 0;
  double reconstruction_error = 0.0;
  double spi_sfd_kl = 0.0;
  double spi_dfd_kl = 0.0;
  // (1 - alpha) * reconstruction_error + alpha * (sfd - dfd)
  double objective_proxy = 0.0;
};

struct TrainResult {
  RbmParams params;
  // Row 0 describes the initialization; row e the state after epoch e.
  std::vector<EpochLog> log;
  DisturbancePairs pairs;
};

// Trains one layer with a caller-owned stream. `pairs` may be null (plain
// CD-1); with alpha > 0 it must hold non-empty SFD and DFD sets.
// hidden_dim == 0 means "same as the visible dimension".
TrainResult train_layer(const Matrix& data, VisibleKind kind, Eigen::Index hidden_dim,
                        const DisturbancePairs* pairs, const TrainingConfig& cfg, RngStream rng);

// Micro-DRBM: binary visible units; data entries must lie in [0,1].
TrainResult train_micro_drbm(const Matrix& data, const LabelSource& labels,
                             const TrainingConfig& cfg, Eigen::Index hidden_dim = 0);
// Micro-DGRBM: Gaussian visible units on standardized real data.
TrainResult train_micro_dgrbm(const Matrix& data, const LabelSource& labels,
                              const TrainingConfig& cfg, Eigen::Index hidden_dim = 0);

// Stream indices under RngStream(cfg.seed) used by the trainers.
inline constexpr std::uint64_t kSelectStream = 1;
inline constexpr std::uint64_t kTrainStream = 2;

void write_log_csv(std::ostream& out, const std::vector<EpochLog>& log);

}  // namespace microdl
