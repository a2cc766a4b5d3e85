#include <doctest.h>

#include <cmath>

#include "microdl/error.hpp"
#include "microdl/metrics.hpp"
#include "microdl/rng.hpp"
#include "oracles.hpp"

using namespace microdl;

namespace {

std::vector<int> random_labels(RngStream& rng, std::size_t n, int k) {
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(k)));
  return v;
}

}  // namespace

TEST_CASE("pair counts of the worked example") {
  const std::vector<int> truth{1, 1, 2, 2}, pred{1, 1, 1, 2};
  const PairCounts c = pair_counts(truth, pred);
  CHECK(c == PairCounts{1, 2, 1, 2});
  CHECK(jaccard_index(c) == doctest::Approx(0.25));
  CHECK(fm_index(c) == doctest::Approx(std::sqrt(1.0 / 3.0 * 0.5)));
  CHECK(std::abs(fm_index(c) - 0.40825) < 1e-5);
  CHECK(rand_index(c) == doctest::Approx(0.5));
}

TEST_CASE("pair counts edge examples") {
  const std::vector<int> a{0, 1, 1, 2, 0};
  const PairCounts same = pair_counts(a, a);
  CHECK(same.fp == 0);
  CHECK(same.fn == 0);
  const PairCounts s = pair_counts(std::vector<int>{0, 0, 0}, std::vector<int>{0, 1, 2});
  CHECK(s.tp == 0);
  CHECK(s.fn == 3);
  const PairCounts dis = pair_counts(std::vector<int>{0, 0}, std::vector<int>{0, 1});
  CHECK(rand_index(dis) == 0.0);
  CHECK(jaccard_index(dis) == 0.0);
  CHECK(fm_index(dis) == 0.0);
  CHECK_THROWS(pair_counts(std::vector<int>{0, 1}, std::vector<int>{0}));
  CHECK_THROWS(pair_counts(std::vector<int>{0}, std::vector<int>{0}));
}

TEST_CASE("pair counts agree with brute force on random labelings") {
  RngStream rng(1);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(11);
    const auto truth = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
    const auto pred = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
    const PairCounts c = pair_counts(truth, pred);
    const auto o = oracle::pair_counts(truth, pred);
    CHECK(static_cast<long>(c.tp) == o[0]);
    CHECK(static_cast<long>(c.fp) == o[1]);
    CHECK(static_cast<long>(c.fn) == o[2]);
    CHECK(static_cast<long>(c.tn) == o[3]);
    CHECK(c.total() == n * (n - 1) / 2);
  }
}

TEST_CASE("accuracy examples") {
  CHECK(clustering_accuracy(std::vector<int>{0, 0, 1, 1, 2}, std::vector<int>{1, 1, 0, 2, 2}) ==
        doctest::Approx(0.8));
  CHECK(clustering_accuracy(std::vector<int>{0, 0, 1, 1, 2}, std::vector<int>{2, 2, 0, 0, 1}) == 1.0);
  std::vector<int> balanced{0, 0, 0, 0, 0, 1, 1, 1, 1, 1};
  CHECK(clustering_accuracy(balanced, std::vector<int>(10, 0)) == doctest::Approx(0.5));
  CHECK_THROWS(clustering_accuracy(balanced, std::vector<int>(9, 0)));
}

TEST_CASE("accuracy agrees with brute force over renamings") {
  RngStream rng(2);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.below(11);
    const auto truth = random_labels(rng, n, 1 + static_cast<int>(rng.below(4)));
    const auto pred = random_labels(rng, n, 1 + static_cast<int>(rng.below(5)));
    CHECK(clustering_accuracy(truth, pred) == doctest::Approx(oracle::accuracy(truth, pred)));
  }
}

TEST_CASE("metrics are invariant to renaming predicted clusters") {
  RngStream rng(3);
  for (int t = 0; t < 50; ++t) {
    const auto truth = random_labels(rng, 12, 3);
    const auto pred = random_labels(rng, 12, 4);
    const auto perm = rng.permutation(4);
    std::vector<int> renamed(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) renamed[i] = static_cast<int>(perm[pred[i]]);
    const MetricSet a = evaluate_clustering(truth, pred);
    const MetricSet b = evaluate_clustering(truth, renamed);
    CHECK(a.accuracy == b.accuracy);
    CHECK(a.jaccard == b.jaccard);
    CHECK(a.fm == b.fm);
    CHECK(a.rand == b.rand);
  }
}

TEST_CASE("all four metrics are 1 exactly for identical partitions") {
  RngStream rng(4);
  for (int t = 0; t < 200; ++t) {
    const auto truth = random_labels(rng, 8, 3);
    const auto pred = random_labels(rng, 8, 3);
    const MetricSet m = evaluate_clustering(truth, pred);
    const bool same = oracle::same_partition(truth, pred);
    CHECK((m.accuracy == 1.0) == same);
    CHECK((m.jaccard == 1.0) == same);
    CHECK((m.fm == 1.0) == same);
    CHECK((m.rand == 1.0) == same);
  }
}

TEST_CASE("all-singleton partitions on both sides") {
  const std::vector<int> a{0, 1, 2}, b{2, 0, 1};
  const MetricSet m = evaluate_clustering(a, b);
  CHECK(m.accuracy == 1.0);
  CHECK(m.rand == 1.0);
  CHECK(m.jaccard == 1.0);
  CHECK(m.fm == 1.0);
}

TEST_CASE("max weight assignment") {
  const std::vector<std::vector<double>> w{{1, 5, 3}, {4, 2, 6}, {7, 1, 1}};
  const auto a = max_weight_assignment(w);
  CHECK(a == std::vector<int>{1, 2, 0});
}
