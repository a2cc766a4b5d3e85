#include "microdl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "microdl/error.hpp"

namespace microdl {

namespace {

void check_lengths(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw DimensionError("label vectors differ in length (" + std::to_string(truth.size()) +
                         " vs " + std::to_string(pred.size()) + ")");
  }
}

std::uint64_t choose2(std::uint64_t n) { return n * (n - (n > 0 ? 1 : 0)) / 2; }

// Dense re-indexing of arbitrary label values, in first-appearance order.
std::vector<int> densify(std::span<const int> labels, int& count) {
  std::map<int, int> ids;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
  count = static_cast<int>(ids.size());
  return out;
}

}  // namespace

PairCounts pair_counts(std::span<const int> truth, std::span<const int> pred) {
  check_lengths(truth, pred);
  if (truth.size() < 2) throw DataError("pair counting needs at least two samples");
  int kt = 0, kp = 0;
  const auto t = densify(truth, kt);
  const auto p = densify(pred, kp);
  std::vector<std::uint64_t> cont(static_cast<std::size_t>(kt * kp), 0), rows(kt, 0), cols(kp, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    ++cont[static_cast<std::size_t>(t[i] * kp + p[i])];
    ++rows[static_cast<std::size_t>(t[i])];
    ++cols[static_cast<std::size_t>(p[i])];
  }
  std::uint64_t together_both = 0, together_truth = 0, together_pred = 0;
  for (auto n : cont) together_both += choose2(n);
  for (auto n : rows) together_truth += choose2(n);
  for (auto n : cols) together_pred += choose2(n);

  PairCounts c;
  c.tp = together_both;
  c.fn = together_truth - together_both;
  c.fp = together_pred - together_both;
  c.tn = choose2(t.size()) - c.tp - c.fn - c.fp;
  return c;
}

double jaccard_index(const PairCounts& c) {
  const std::uint64_t denom = c.tp + c.fp + c.fn;
  // No pair is together anywhere: both partitions are all-singletons.
  if (denom == 0) return 1.0;
  return static_cast<double>(c.tp) / static_cast<double>(denom);
}

double fm_index(const PairCounts& c) {
  if (c.tp == 0) return (c.fp == 0 && c.fn == 0) ? 1.0 : 0.0;
  const double precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  const double recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  return std::sqrt(precision * recall);
}

double rand_index(const PairCounts& c) {
  if (c.total() == 0) return 1.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const int n = static_cast<int>(weight.size());
  if (n == 0) return {};
  for (const auto& row : weight) {
    if (static_cast<int>(row.size()) != n) throw DimensionError("assignment matrix not square");
  }
  // Shortest augmenting path formulation on cost = -weight, 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] != 0) assignment[match[j] - 1] = j - 1;
  }
  return assignment;
}

double clustering_accuracy(std::span<const int> truth, std::span<const int> pred) {
  check_lengths(truth, pred);
  if (truth.empty()) throw DataError("accuracy of an empty labeling");
  int kt = 0, kp = 0;
  const auto t = densify(truth, kt);
  const auto p = densify(pred, kp);
  const int n = std::max(kt, kp);
  std::vector<std::vector<double>> cont(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < t.size(); ++i) cont[p[i]][t[i]] += 1.0;
  const auto map = max_weight_assignment(cont);
  double matched = 0.0;
  for (int r = 0; r < n; ++r) matched += cont[r][map[r]];
  return matched / static_cast<double>(truth.size());
}

MetricSet evaluate_clustering(std::span<const int> truth, std::span<const int> pred) {
  const PairCounts c = pair_counts(truth, pred);
  return {clustering_accuracy(truth, pred), jaccard_index(c), fm_index(c), rand_index(c)};
}

}  // namespace microdl
