#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "microdl/numerics.hpp"

namespace microdl {

struct ClusterAssignment {
  std::vector<int> labels;  // one id in [0, k) per sample
  int k = 1;
  double inertia = 0.0;     // k-means objective of the winning restart
};

// Gaussian kernel A_ij = exp(-|x_i - x_j|^2 / (2 sigma^2)) with zero diagonal.
// Without sigma, the median pairwise distance is used.
Matrix gaussian_affinity(const Matrix& x, std::optional<double> sigma = std::nullopt);

// Median of the pairwise Euclidean distances (i < j).
double median_pairwise_distance(const Matrix& x);

// I - D^{-1/2} A D^{-1/2}; degrees get +1e-12 so isolated points stay finite.
Matrix normalized_laplacian(const Matrix& affinity);

struct KMeansOptions {
  int restarts = 20;
  int max_iterations = 300;
  double tolerance = 1e-9;
};

// Lloyd iterations from k-means++ seeds; best restart by inertia, ties go to
// the lowest restart index. Empty clusters are re-seeded at the point farthest
// from its centroid.
ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                         const KMeansOptions& options = {});

struct SpectralOptions {
  std::optional<double> sigma;
  KMeansOptions kmeans;
};

// Ng-Jordan-Weiss: k smallest eigenvectors of the symmetric normalized
// Laplacian, rows normalized to unit length, clustered with k-means.
ClusterAssignment spectral_cluster(const Matrix& x, int k, std::uint64_t seed,
                                   const SpectralOptions& options = {});

}  // namespace microdl
