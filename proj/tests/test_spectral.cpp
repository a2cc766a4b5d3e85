#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "microdl/dataset.hpp"
#include "microdl/error.hpp"
#include "microdl/rng.hpp"
#include "microdl/spectral.hpp"
#include "oracles.hpp"

using namespace microdl;

TEST_CASE("affinity examples") {
  Matrix x(3, 2);
  x << 0, 0, 0, 0, std::sqrt(2.0), 0;
  const Matrix a = gaussian_affinity(x, 1.0);
  CHECK(a(0, 1) == 1.0);
  CHECK(a(0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(std::abs(a(0, 2) - 0.36788) < 1e-5);
  for (int i = 0; i < 3; ++i) CHECK(a(i, i) == 0.0);
  CHECK_THROWS_AS(gaussian_affinity(x, 0.0), ParameterError);
  CHECK_THROWS_AS(gaussian_affinity(x, -1.0), ParameterError);
  CHECK_THROWS(gaussian_affinity(Matrix::Zero(1, 2)));
}

TEST_CASE("median pairwise distance") {
  Matrix x(3, 1);
  x << 0, 1, 3;  // distances 1, 3, 2
  CHECK(median_pairwise_distance(x) == doctest::Approx(2.0));
  Matrix y(4, 1);
  y << 0, 1, 3, 6;  // 1 3 6 2 5 3 -> sorted 1 2 3 3 5 6
  CHECK(median_pairwise_distance(y) == doctest::Approx(3.0));
}

TEST_CASE("affinity and Laplacian properties on random data") {
  RngStream rng(3);
  for (int t = 0; t < 5; ++t) {
    Matrix x(20, 3);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal() * (1 + t);
    const Matrix a = gaussian_affinity(x);
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= 1.0);
    const Matrix l = normalized_laplacian(a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(l);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    CHECK(es.eigenvalues().maxCoeff() <= 2.0 + 1e-8);
  }
}

TEST_CASE("isolated point keeps the Laplacian finite") {
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = a(1, 0) = 1.0;
  const Matrix l = normalized_laplacian(a);
  CHECK(l.allFinite());
}

TEST_CASE("well-separated blobs are recovered exactly") {
  const Dataset d = generate_blobs(3, 40, 5, 10.0, 17);
  const ClusterAssignment c = spectral_cluster(d.features, 3, 1);
  CHECK(c.k == 3);
  CHECK(oracle::same_partition(c.labels, d.labels));
}

TEST_CASE("k equal to the sample count gives singletons") {
  Matrix x(5, 2);
  x << 0, 0, 1, 0, 0, 1, 3, 3, -2, 1;
  const ClusterAssignment c = spectral_cluster(x, 5, 2);
  std::vector<int> sorted = c.labels;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<int>{0, 1, 2, 3, 4});
  CHECK_THROWS(spectral_cluster(x, 6, 2));
}

TEST_CASE("spectral clustering is deterministic and permutation-equivariant") {
  const Dataset d = generate_blobs(3, 25, 4, 3.0, 8);
  const ClusterAssignment a = spectral_cluster(d.features, 3, 9);
  CHECK(a.labels == spectral_cluster(d.features, 3, 9).labels);

  RngStream rng(4);
  const auto perm = rng.permutation(d.features.rows());
  Matrix shuffled(d.features.rows(), d.features.cols());
  for (Eigen::Index i = 0; i < shuffled.rows(); ++i) shuffled.row(i) = d.features.row(perm[i]);
  const ClusterAssignment b = spectral_cluster(shuffled, 3, 9);
  std::vector<int> back(a.labels.size());
  for (std::size_t i = 0; i < perm.size(); ++i) back[perm[i]] = b.labels[i];
  CHECK(oracle::pair_counts(a.labels, d.labels) == oracle::pair_counts(back, d.labels));
}

TEST_CASE("kmeans examples") {
  Matrix two(2, 1);
  two << 0, 5;
  const ClusterAssignment a = kmeans(two, 2, 1);
  CHECK(a.labels[0] != a.labels[1]);
  CHECK(a.inertia == 0.0);

  Matrix line(4, 1);
  line << 0, 1, 10, 11;
  const ClusterAssignment b = kmeans(line, 2, 3);
  CHECK(oracle::same_partition(b.labels, {0, 0, 1, 1}));
  CHECK(b.inertia == doctest::Approx(1.0));

  // Every 2-partition of the line, by enumeration.
  double best = 1e300;
  for (int mask = 1; mask < 7; ++mask) {
    double inertia = 0.0;
    for (int side = 0; side < 2; ++side) {
      double sum = 0.0, n = 0.0;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == side) sum += line(i, 0), n += 1;
      for (int i = 0; i < 4; ++i)
        if (((mask >> i) & 1) == side) inertia += std::pow(line(i, 0) - sum / n, 2);
    }
    best = std::min(best, inertia);
  }
  CHECK(b.inertia == doctest::Approx(best));
}

TEST_CASE("kmeans with duplicate rows") {
  Matrix x(6, 2);
  x << 1, 1, 1, 1, 1, 1, 5, 5, 5, 5, 5, 5;
  const ClusterAssignment a = kmeans(x, 3, 2);
  CHECK(a.labels.size() == 6);
  for (int l : a.labels) CHECK((l >= 0 && l < 3));
  CHECK(a.labels == kmeans(x, 3, 2).labels);
  const ClusterAssignment s = spectral_cluster(x, 2, 2);
  CHECK(oracle::same_partition(s.labels, {0, 0, 0, 1, 1, 1}));
}

TEST_CASE("kmeans determinism and restarts") {
  const Dataset d = generate_blobs(4, 20, 3, 2.0, 5);
  const ClusterAssignment a = kmeans(d.features, 4, 11);
  const ClusterAssignment b = kmeans(d.features, 4, 11);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
  KMeansOptions one;
  one.restarts = 1;
  CHECK(a.inertia <= kmeans(d.features, 4, 11, one).inertia + 1e-12);
  CHECK_THROWS(kmeans(d.features, 0, 1));
  CHECK_THROWS(kmeans(d.features, 81, 1));
}
