#pragma once

#include <iosfwd>
#include <vector>

#include "microdl/micro.hpp"

namespace microdl {

// Greedy layer-wise stack: a Gaussian-visible first layer followed by
// binary-visible layers. With micro_enabled == false every layer is plain CD-1
// (the unsupervised twin of the micro-supervised stack).
struct StackSpec {
  std::size_t layer_count = 3;
  // Hidden size per layer; empty means every layer keeps the input dimension.
  std::vector<Eigen::Index> hidden_dims;
  // Either one config shared by all layers or exactly layer_count configs.
  // The per-layer seed field is ignored; streams derive from `seed`.
  std::vector<TrainingConfig> layer_configs{TrainingConfig{}};
  bool micro_enabled = true;
  std::uint64_t seed = 1;

  const TrainingConfig& config_for(std::size_t layer) const;
  // Resolved hidden sizes for an input of `input_dim` columns.
  std::vector<Eigen::Index> resolved_dims(Eigen::Index input_dim) const;
  // Checks depth, per-layer configs and the dimension chain.
  void validate(Eigen::Index input_dim) const;
};

struct TrainedStack {
  std::vector<RbmParams> layers;
  std::vector<std::vector<EpochLog>> logs;
  // Representatives shared by every layer (empty when micro is disabled).
  DisturbancePairs pairs;

  Eigen::Index input_dim() const { return layers.empty() ? 0 : layers.front().visible_dim(); }
  Eigen::Index output_dim() const { return layers.empty() ? 0 : layers.back().hidden_dim(); }
};

// `labels` may be null when spec.micro_enabled is false.
TrainedStack train_stack(const Matrix& data, const LabelSource* labels, const StackSpec& spec);

// Deterministic forward pass of hidden probabilities through all layers.
Matrix encode(const TrainedStack& stack, const Matrix& data);

// Hidden probabilities after every layer: result[i] is the output of layer i.
std::vector<Matrix> encode_all(const TrainedStack& stack, const Matrix& data);

// Mean SFD divergence of the representatives' hidden probabilities at each
// layer output.
std::vector<double> layer_sfd_kl(const TrainedStack& stack, const Matrix& data,
                                 const DisturbancePairs& pairs);

void write_stack(std::ostream& out, const TrainedStack& stack);
TrainedStack read_stack(std::istream& in);

}  // namespace microdl
