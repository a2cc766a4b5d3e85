#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace microdl {

// Pair-counting confusion over all unordered sample pairs.
struct PairCounts {
  std::uint64_t tp = 0;  // same class, same cluster
  std::uint64_t fp = 0;  // different class, same cluster
  std::uint64_t fn = 0;  // same class, different cluster
  std::uint64_t tn = 0;  // different class, different cluster

  std::uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const PairCounts&) const = default;
};

PairCounts pair_counts(std::span<const int> truth, std::span<const int> pred);

// Fraction of samples matched under the best one-to-one cluster -> class map.
double clustering_accuracy(std::span<const int> truth, std::span<const int> pred);

double jaccard_index(const PairCounts& c);  // TP / (TP + FP + FN)
double fm_index(const PairCounts& c);       // sqrt(TP/(TP+FP) * TP/(TP+FN))
double rand_index(const PairCounts& c);     // (TP + TN) / total

// Maximum-weight perfect matching on a square matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight);

struct MetricSet {
  double accuracy = 0.0;
  double jaccard = 0.0;
  double fm = 0.0;
  double rand = 0.0;
};

MetricSet evaluate_clustering(std::span<const int> truth, std::span<const int> pred);

}  // namespace microdl
