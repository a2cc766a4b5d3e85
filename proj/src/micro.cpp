#include "microdl/micro.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "microdl/error.hpp"
#include "microdl/log.hpp"

namespace microdl {

VectorLabels::VectorLabels(std::span<const int> labels) : labels_(labels.begin(), labels.end()) {
  int k = 0;
  for (int l : labels_) {
    if (l < 0) throw DataError("negative class label " + std::to_string(l));
    k = std::max(k, l + 1);
  }
  members_.resize(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    members_[static_cast<std::size_t>(labels_[i])].push_back(i);
  }
}

std::size_t VectorLabels::class_size(int cls) const {
  return members_.at(static_cast<std::size_t>(cls)).size();
}

std::size_t VectorLabels::member(int cls, std::size_t rank) const {
  return members_.at(static_cast<std::size_t>(cls)).at(rank);
}

int VectorLabels::label(std::size_t sample) const { return labels_.at(sample); }

void DisturbancePairs::validate(std::size_t sample_count) const {
  auto cls = [&](std::size_t i) {
    if (i >= sample_count) {
      throw DataError("representative index " + std::to_string(i) + " out of range");
    }
    auto it = class_of.find(i);
    if (it == class_of.end()) {
      throw DataError("representative " + std::to_string(i) + " has no label");
    }
    return it->second;
  };
  for (const auto& p : sfd) {
    if (cls(p.first) != cls(p.second)) throw DataError("SFD pair spans two classes");
  }
  for (const auto& p : dfd) {
    if (cls(p.first) == cls(p.second)) throw DataError("DFD pair within one class");
  }
}

std::string to_string(GradientMode mode) {
  return mode == GradientMode::kDerived ? "derived" : "paper-literal";
}

std::string to_string(SpiScaling scaling) {
  return scaling == SpiScaling::kObjective ? "objective" : "paper-literal";
}

GradientMode gradient_mode_from_string(const std::string& s) {
  if (s == "derived") return GradientMode::kDerived;
  if (s == "paper-literal") return GradientMode::kPaperLiteral;
  throw ConfigError("unknown gradient mode '" + s + "' (expected derived|paper-literal)");
}

SpiScaling spi_scaling_from_string(const std::string& s) {
  if (s == "objective" || s == "objective-consistent") return SpiScaling::kObjective;
  if (s == "paper-literal") return SpiScaling::kPaperLiteral;
  throw ConfigError("unknown SPI scaling '" + s + "' (expected objective|paper-literal)");
}

void TrainingConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in [0,1), got " + format_double(alpha));
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("learning rate must be > 0");
  if (batch_size == 0) throw ConfigError("batch size must be >= 1");
  if (!(init_std > 0.0)) throw ConfigError("init_std must be > 0");
}

DisturbancePairs select_representatives(const LabelSource& labels, RngStream& rng) {
  DisturbancePairs pairs;
  for (int c = 0; c < labels.class_count(); ++c) {
    const std::size_t n = labels.class_size(c);
    if (n < 2) {
      throw DataError("class " + std::to_string(c) + " has " + std::to_string(n) +
                      " samples; at least 2 are needed (class with <2 samples)");
    }
    const std::size_t r1 = static_cast<std::size_t>(rng.below(n));
    std::size_t r2 = static_cast<std::size_t>(rng.below(n - 1));
    if (r2 >= r1) ++r2;
    const SamplePair p{labels.member(c, r1), labels.member(c, r2)};
    pairs.sfd.push_back(p);
    pairs.class_of[p.first] = labels.label(p.first);
    pairs.class_of[p.second] = labels.label(p.second);
    if (pairs.class_of[p.first] != c || pairs.class_of[p.second] != c) {
      throw DataError("label source returned a member outside class " + std::to_string(c));
    }
  }
  return build_dfd(std::move(pairs));
}

DisturbancePairs build_dfd(DisturbancePairs pairs) {
  // First representative of each class, classes ascending.
  std::map<int, std::size_t> first_rep;
  for (const auto& p : pairs.sfd) {
    const int c = pairs.class_of.at(p.first);
    first_rep.try_emplace(c, p.first);
  }
  pairs.dfd.clear();
  if (first_rep.size() < 2) {
    log_warning("build_dfd: fewer than two classes among representatives; DFD set is empty");
    return pairs;
  }
  for (auto a = first_rep.begin(); a != first_rep.end(); ++a) {
    for (auto b = std::next(a); b != first_rep.end(); ++b) {
      pairs.dfd.push_back({a->second, b->second});
    }
  }
  return pairs;
}

SpiKl spi_kl_parts(const RbmParams& params, const Matrix& data, const DisturbancePairs& pairs) {
  pairs.validate(static_cast<std::size_t>(data.rows()));
  auto mean_kl = [&](const std::vector<SamplePair>& set) {
    if (set.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& p : set) {
      const Matrix hf = hidden_given_visible(params, data.row(static_cast<Eigen::Index>(p.first)));
      const Matrix hg =
          hidden_given_visible(params, data.row(static_cast<Eigen::Index>(p.second)));
      sum += kl_divergence(hf.row(0), hg.row(0));
    }
    return sum / static_cast<double>(set.size());
  };
  return {mean_kl(pairs.sfd), mean_kl(pairs.dfd)};
}

double spi_kl_term(const RbmParams& params, const Matrix& data, const DisturbancePairs& pairs) {
  return spi_kl_parts(params, data, pairs).value();
}

namespace {

struct PairGrad {
  Matrix w;
  RowVector b;
};

// Both gradients of one pair share the hidden probabilities; compute once.
PairGrad pair_gradient(const RbmParams& params, const RowVector& v_f, const RowVector& v_g,
                       GradientMode mode) {
  if (v_f.size() != params.visible_dim() || v_g.size() != params.visible_dim()) {
    throw DimensionError("SPI gradient: sample length does not match the visible layer");
  }
  const RowVector hf = clamp_prob(RowVector(hidden_given_visible(params, v_f).row(0)));
  const RowVector hg = clamp_prob(RowVector(hidden_given_visible(params, v_g).row(0)));
  const RowVector log_hf = hf.array().log();
  const RowVector log_hg = hg.array().log();
  const RowVector dfj = hf.array() * (1.0 - hf.array());

  RowVector lead, tail;
  if (mode == GradientMode::kDerived) {
    lead = dfj.array() * (log_hf.array() - log_hg.array() + 1.0);
    tail = hf.array() * (1.0 - hg.array());
  } else {
    lead = dfj.array() * (log_hf.array() + log_hg.array() + 1.0);
    tail = hg.array() * (1.0 - hg.array());
  }
  PairGrad g;
  g.w = v_f.transpose() * lead - v_g.transpose() * tail;
  g.b = lead - tail;
  return g;
}

}  // namespace

Matrix spi_grad_w(const RbmParams& params, const RowVector& v_f, const RowVector& v_g,
                  GradientMode mode) {
  return pair_gradient(params, v_f, v_g, mode).w;
}

RowVector spi_grad_b(const RbmParams& params, const RowVector& v_f, const RowVector& v_g,
                     GradientMode mode) {
  return pair_gradient(params, v_f, v_g, mode).b;
}

RowVector spi_grad_c(const RbmParams& params) { return RowVector::Zero(params.visible_dim()); }

RbmParams micro_update(const RbmParams& params, const Cd1Stats& stats, const Matrix& data,
                       const DisturbancePairs& pairs, const TrainingConfig& cfg) {
  cfg.validate();
  RbmParams next = cd1_update(params, stats, (1.0 - cfg.alpha) * cfg.eps);
  if (cfg.alpha == 0.0) return next;

  if (pairs.sfd.empty() || pairs.dfd.empty()) {
    throw ConfigError("alpha > 0 requires non-empty SFD and DFD sets (K_S=" +
                      std::to_string(pairs.ks()) + ", K_D=" + std::to_string(pairs.kd()) + ")");
  }
  pairs.validate(static_cast<std::size_t>(data.rows()));

  // Average gradient over each set, evaluated at the current parameters.
  auto set_mean = [&](const std::vector<SamplePair>& set) {
    PairGrad acc{Matrix::Zero(params.visible_dim(), params.hidden_dim()),
                 RowVector::Zero(params.hidden_dim())};
    for (const auto& p : set) {
      const PairGrad g =
          pair_gradient(params, data.row(static_cast<Eigen::Index>(p.first)),
                        data.row(static_cast<Eigen::Index>(p.second)), cfg.gradient_mode);
      acc.w += g.w;
      acc.b += g.b;
    }
    const double inv = 1.0 / static_cast<double>(set.size());
    acc.w *= inv;
    acc.b *= inv;
    return acc;
  };
  const PairGrad sfd = set_mean(pairs.sfd);
  const PairGrad dfd = set_mean(pairs.dfd);
  const RowVector gc = spi_grad_c(params);

  if (cfg.spi_scaling == SpiScaling::kObjective) {
    const double step = cfg.alpha * cfg.eps;
    next.weights -= step * (sfd.w - dfd.w);
    next.hidden_bias -= step * (sfd.b - dfd.b);
    next.visible_bias -= step * gc;
  } else {
    next.weights += cfg.alpha * sfd.w - cfg.alpha * dfd.w;
    next.hidden_bias += cfg.alpha * sfd.b - cfg.alpha * dfd.b;
  }
  require_finite(next.weights, "weights after micro update");
  require_finite(next.hidden_bias, "hidden bias after micro update");
  require_finite(next.visible_bias, "visible bias after micro update");
  return next;
}

namespace {

EpochLog make_log_row(std::size_t epoch, const RbmParams& params, const Matrix& data,
                      const DisturbancePairs* pairs, double alpha) {
  EpochLog row;
  row.epoch = epoch;
  row.reconstruction_error = reconstruction_error(params, data);
  if (!std::isfinite(row.reconstruction_error)) {
    throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                       ": reconstruction error is not finite (unscaled input or step too large)");
  }
  if (pairs != nullptr) {
    const SpiKl kl = spi_kl_parts(params, data, *pairs);
    row.spi_sfd_kl = kl.sfd;
    row.spi_dfd_kl = kl.dfd;
  }
  row.objective_proxy =
      (1.0 - alpha) * row.reconstruction_error + alpha * (row.spi_sfd_kl - row.spi_dfd_kl);
  return row;
}

}  // namespace

TrainResult train_layer(const Matrix& data, VisibleKind kind, Eigen::Index hidden_dim,
                        const DisturbancePairs* pairs, const TrainingConfig& cfg, RngStream rng) {
  cfg.validate();
  if (data.rows() == 0 || data.cols() == 0) throw DataError("training data is empty");
  require_finite(data, "training data");
  if (kind == VisibleKind::kBinary && (data.minCoeff() < 0.0 || data.maxCoeff() > 1.0)) {
    throw DataError("binary-visible layer needs data in [0,1]");
  }
  if (hidden_dim == 0) hidden_dim = data.cols();
  const bool micro = pairs != nullptr && cfg.alpha > 0.0;
  if (micro && (pairs->sfd.empty() || pairs->dfd.empty())) {
    throw ConfigError("alpha > 0 requires non-empty SFD and DFD sets");
  }
  if (pairs != nullptr) pairs->validate(static_cast<std::size_t>(data.rows()));

  RngStream init_rng = rng.child(0);
  RngStream loop_rng = rng.child(1);

  TrainResult result;
  if (pairs != nullptr) result.pairs = *pairs;
  result.params = init_params(data.cols(), hidden_dim, kind, init_rng, cfg.init_std);
  result.log.push_back(make_log_row(0, result.params, data, pairs, cfg.alpha));

  const auto rows = static_cast<std::size_t>(data.rows());
  Matrix batch;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = loop_rng.permutation(rows);
    for (std::size_t start = 0; start < rows; start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, rows - start);
      batch.resize(static_cast<Eigen::Index>(len), data.cols());
      for (std::size_t r = 0; r < len; ++r) {
        batch.row(static_cast<Eigen::Index>(r)) = data.row(static_cast<Eigen::Index>(order[start + r]));
      }
      const Cd1Stats stats = cd1_step(result.params, batch, loop_rng, cfg.gaussian_noise);
      result.params = micro ? micro_update(result.params, stats, data, *pairs, cfg)
                            : cd1_update(result.params, stats, cfg.eps);
    }
    result.log.push_back(make_log_row(epoch, result.params, data, pairs, cfg.alpha));
  }
  return result;
}

namespace {

TrainResult train_micro(const Matrix& data, const LabelSource& labels, const TrainingConfig& cfg,
                        Eigen::Index hidden_dim, VisibleKind kind) {
  cfg.validate();
  if (labels.size() != static_cast<std::size_t>(data.rows())) {
    throw DimensionError("label source has " + std::to_string(labels.size()) +
                         " samples, data has " + std::to_string(data.rows()));
  }
  const RngStream root(cfg.seed);
  RngStream select_rng = root.child(kSelectStream);
  const DisturbancePairs pairs = select_representatives(labels, select_rng);
  return train_layer(data, kind, hidden_dim, &pairs, cfg, root.child(kTrainStream).child(0));
}

}  // namespace

TrainResult train_micro_drbm(const Matrix& data, const LabelSource& labels,
                             const TrainingConfig& cfg, Eigen::Index hidden_dim) {
  return train_micro(data, labels, cfg, hidden_dim, VisibleKind::kBinary);
}

TrainResult train_micro_dgrbm(const Matrix& data, const LabelSource& labels,
                              const TrainingConfig& cfg, Eigen::Index hidden_dim) {
  return train_micro(data, labels, cfg, hidden_dim, VisibleKind::kGaussian);
}

void write_log_csv(std::ostream& out, const std::vector<EpochLog>& log) {
  out << "epoch,reconstruction_error,spi_sfd_kl,spi_dfd_kl,objective_proxy\n";
  for (const auto& r : log) {
    out << r.epoch << ',' << format_double(r.reconstruction_error) << ','
        << format_double(r.spi_sfd_kl) << ',' << format_double(r.spi_dfd_kl) << ','
        << format_double(r.objective_proxy) << '\n';
  }
}

}  // namespace microdl
