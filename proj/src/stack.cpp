#include "microdl/stack.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "microdl/error.hpp"
#include "microdl/log.hpp"

namespace microdl {

const TrainingConfig& StackSpec::config_for(std::size_t layer) const {
  return layer_configs.size() == 1 ? layer_configs.front() : layer_configs.at(layer);
}

std::vector<Eigen::Index> StackSpec::resolved_dims(Eigen::Index input_dim) const {
  if (!hidden_dims.empty()) return hidden_dims;
  return std::vector<Eigen::Index>(layer_count, input_dim);
}

void StackSpec::validate(Eigen::Index input_dim) const {
  if (layer_count < 1) throw ConfigError("stack needs at least one layer");
  if (layer_configs.size() != 1 && layer_configs.size() != layer_count) {
    throw ConfigError("stack has " + std::to_string(layer_count) + " layers but " +
                      std::to_string(layer_configs.size()) + " layer configs");
  }
  if (!hidden_dims.empty() && hidden_dims.size() != layer_count) {
    throw ConfigError("stack has " + std::to_string(layer_count) + " layers but " +
                      std::to_string(hidden_dims.size()) + " hidden sizes");
  }
  if (input_dim < 1) throw DimensionError("stack input has no features");
  for (Eigen::Index d : resolved_dims(input_dim)) {
    if (d < 1) throw ConfigError("hidden layer size must be >= 1");
  }
  for (std::size_t i = 0; i < layer_count; ++i) config_for(i).validate();
}

TrainedStack train_stack(const Matrix& data, const LabelSource* labels, const StackSpec& spec) {
  spec.validate(data.cols());
  const std::vector<Eigen::Index> dims = spec.resolved_dims(data.cols());
  const RngStream root(spec.seed);

  TrainedStack stack;
  const DisturbancePairs* pairs = nullptr;
  if (spec.micro_enabled) {
    if (labels == nullptr) throw ConfigError("micro-supervised stack needs labels");
    if (labels->size() != static_cast<std::size_t>(data.rows())) {
      throw DimensionError("label source size does not match the data");
    }
    RngStream select_rng = root.child(kSelectStream);
    stack.pairs = select_representatives(*labels, select_rng);
    pairs = &stack.pairs;
  }

  const RngStream train_root = root.child(kTrainStream);
  Matrix input = data;
  for (std::size_t layer = 0; layer < spec.layer_count; ++layer) {
    const VisibleKind kind = layer == 0 ? VisibleKind::kGaussian : VisibleKind::kBinary;
    const RngStream layer_rng = train_root.child(layer);
    log_info("train_stack: layer " + std::to_string(layer) + " stream " +
             std::to_string(layer_rng.stream_id()));
    TrainResult r =
        train_layer(input, kind, dims[layer], pairs, spec.config_for(layer), layer_rng);
    input = hidden_given_visible(r.params, input);
    stack.layers.push_back(std::move(r.params));
    stack.logs.push_back(std::move(r.log));
  }
  return stack;
}

std::vector<Matrix> encode_all(const TrainedStack& stack, const Matrix& data) {
  if (stack.layers.empty()) throw ConfigError("encode: empty stack");
  if (data.cols() != stack.input_dim()) {
    throw DimensionError("encode: data has " + std::to_string(data.cols()) +
                         " columns, stack expects " + std::to_string(stack.input_dim()));
  }
  std::vector<Matrix> out;
  out.reserve(stack.layers.size());
  const Matrix* input = &data;
  for (const auto& layer : stack.layers) {
    out.push_back(hidden_given_visible(layer, *input));
    input = &out.back();
  }
  return out;
}

Matrix encode(const TrainedStack& stack, const Matrix& data) {
  return std::move(encode_all(stack, data).back());
}

std::vector<double> layer_sfd_kl(const TrainedStack& stack, const Matrix& data,
                                 const DisturbancePairs& pairs) {
  std::vector<double> out;
  const Matrix* input = &data;
  Matrix next;
  for (const auto& layer : stack.layers) {
    out.push_back(spi_kl_parts(layer, *input, pairs).sfd);
    next = hidden_given_visible(layer, *input);
    input = &next;
  }
  return out;
}

void write_stack(std::ostream& out, const TrainedStack& stack) {
  out << "microdl-stack 1\n";
  out << "layers " << stack.layers.size() << '\n';
  for (const auto& layer : stack.layers) write_checkpoint(out, layer);
}

TrainedStack read_stack(std::istream& in) {
  std::string tok;
  int version = 0;
  if (!(in >> tok >> version) || tok != "microdl-stack" || version != 1) {
    throw DataError("stack checkpoint: bad header");
  }
  std::size_t count = 0;
  if (!(in >> tok >> count) || tok != "layers" || count < 1) {
    throw DataError("stack checkpoint: bad layer count");
  }
  TrainedStack stack;
  for (std::size_t i = 0; i < count; ++i) {
    stack.layers.push_back(read_checkpoint(in));
    if (i > 0 && stack.layers[i].visible_dim() != stack.layers[i - 1].hidden_dim()) {
      throw DataError("stack checkpoint: layer " + std::to_string(i) +
                      " does not chain with the previous layer");
    }
  }
  return stack;
}

}  // namespace microdl
