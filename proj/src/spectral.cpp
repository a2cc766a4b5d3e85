#include "microdl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "microdl/error.hpp"
#include "microdl/rng.hpp"

namespace microdl {

namespace {

Matrix squared_distances(const Matrix& x) {
  const Eigen::Index m = x.rows();
  Matrix d(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double s = (x.row(i) - x.row(j)).squaredNorm();
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

}  // namespace

double median_pairwise_distance(const Matrix& x) {
  const Eigen::Index m = x.rows();
  if (m < 2) throw DataError("median distance needs at least two points");
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) dist.push_back((x.row(i) - x.row(j)).norm());
  }
  const std::size_t mid = dist.size() / 2;
  std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid), dist.end());
  double med = dist[mid];
  if (dist.size() % 2 == 0) {
    const double lower = *std::max_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + lower);
  }
  return med;
}

Matrix gaussian_affinity(const Matrix& x, std::optional<double> sigma) {
  if (x.rows() < 2) throw DataError("affinity needs at least two points");
  require_finite(x, "affinity input");
  double s = 0.0;
  if (sigma) {
    if (!(*sigma > 0.0)) throw ParameterError("affinity sigma must be > 0");
    s = *sigma;
  } else {
    s = median_pairwise_distance(x);
    // All points identical: any width gives A = 1 off the diagonal.
    if (!(s > 0.0)) s = 1.0;
  }
  const double denom = 2.0 * s * s;
  Matrix a = squared_distances(x).unaryExpr([denom](double d2) { return std::exp(-d2 / denom); });
  a.diagonal().setZero();
  return a;
}

Matrix normalized_laplacian(const Matrix& affinity) {
  const Eigen::Index m = affinity.rows();
  if (affinity.cols() != m) throw DimensionError("affinity must be square");
  Eigen::VectorXd inv_sqrt = affinity.rowwise().sum();
  for (Eigen::Index i = 0; i < m; ++i) inv_sqrt[i] = 1.0 / std::sqrt(inv_sqrt[i] + 1e-12);
  Matrix l = -(inv_sqrt.asDiagonal() * affinity * inv_sqrt.asDiagonal());
  l.diagonal().array() += 1.0;
  // Symmetrize away rounding so the eigen-solver sees an exactly symmetric input.
  return 0.5 * (l + l.transpose());
}

namespace {

struct RunResult {
  std::vector<int> labels;
  double inertia = 0.0;
};

std::vector<Eigen::Index> kmeanspp_seeds(const Matrix& pts, int k, RngStream& rng) {
  const Eigen::Index m = pts.rows();
  std::vector<Eigen::Index> seeds;
  seeds.push_back(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m))));
  Eigen::VectorXd d2(m);
  for (Eigen::Index i = 0; i < m; ++i) d2[i] = (pts.row(i) - pts.row(seeds[0])).squaredNorm();
  while (static_cast<int>(seeds.size()) < k) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = m - 1;
      for (Eigen::Index i = 0; i < m; ++i) {
        target -= d2[i];
        if (target < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
      // Rounding can leave `pick` on an already-chosen point; step to a fresh one.
      if (d2[pick] == 0.0) {
        for (Eigen::Index i = m - 1; i >= 0; --i) {
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(m)));
    }
    seeds.push_back(pick);
    for (Eigen::Index i = 0; i < m; ++i) {
      d2[i] = std::min(d2[i], (pts.row(i) - pts.row(pick)).squaredNorm());
    }
  }
  return seeds;
}

RunResult lloyd(const Matrix& pts, int k, RngStream& rng, const KMeansOptions& opt) {
  const Eigen::Index m = pts.rows();
  Matrix centroids(k, pts.cols());
  const auto seeds = kmeanspp_seeds(pts, k, rng);
  for (int c = 0; c < k; ++c) centroids.row(c) = pts.row(seeds[static_cast<std::size_t>(c)]);

  std::vector<int> labels(static_cast<std::size_t>(m), 0);
  Eigen::VectorXd best_d2(m);
  auto assign = [&]() {
    for (Eigen::Index i = 0; i < m; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < k; ++c) {
        const double d = (pts.row(i) - centroids.row(c)).squaredNorm();
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      labels[static_cast<std::size_t>(i)] = arg;
      best_d2[i] = best;
    }
  };

  assign();
  for (int it = 0; it < opt.max_iterations; ++it) {
    Matrix next = Matrix::Zero(k, pts.cols());
    std::vector<Eigen::Index> count(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < m; ++i) {
      next.row(labels[static_cast<std::size_t>(i)]) += pts.row(i);
      ++count[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    }
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    for (int c = 0; c < k; ++c) {
      if (count[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= static_cast<double>(count[static_cast<std::size_t>(c)]);
        continue;
      }
      // Empty cluster: move it onto the point farthest from its centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (!taken[static_cast<std::size_t>(i)] && best_d2[i] > far_d) {
          far_d = best_d2[i];
          far = i;
        }
      }
      taken[static_cast<std::size_t>(far)] = true;
      next.row(c) = pts.row(far);
    }
    const double shift = (next - centroids).rowwise().squaredNorm().maxCoeff();
    centroids = std::move(next);
    assign();
    if (shift <= opt.tolerance * opt.tolerance) break;
  }
  return {labels, best_d2.sum()};
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, int k, std::uint64_t seed,
                         const KMeansOptions& options) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (points.rows() < k) {
    throw ParameterError("k = " + std::to_string(k) + " exceeds the number of points " +
                         std::to_string(points.rows()));
  }
  if (options.restarts < 1) throw ParameterError("k-means needs at least one restart");
  require_finite(points, "k-means input");
  const RngStream root(seed);
  ClusterAssignment best;
  best.k = k;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    RngStream rng = root.child(static_cast<std::uint64_t>(r));
    RunResult run = lloyd(points, k, rng, options);
    if (run.inertia < best.inertia) {
      best.inertia = run.inertia;
      best.labels = std::move(run.labels);
    }
  }
  return best;
}

ClusterAssignment spectral_cluster(const Matrix& x, int k, std::uint64_t seed,
                                   const SpectralOptions& options) {
  if (k < 1) throw ParameterError("k must be >= 1");
  if (x.rows() < k) throw ParameterError("k exceeds the number of samples");
  if (x.rows() < 2) {
    ClusterAssignment one;
    one.labels.assign(static_cast<std::size_t>(x.rows()), 0);
    return one;
  }
  const Matrix lap = normalized_laplacian(gaussian_affinity(x, options.sigma));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw NumericError("Laplacian eigendecomposition failed");
  Matrix embed = solver.eigenvectors().leftCols(k);
  for (Eigen::Index i = 0; i < embed.rows(); ++i) {
    const double norm = embed.row(i).norm();
    if (norm > 0.0) embed.row(i) /= norm;
  }
  return kmeans(embed, k, seed, options.kmeans);
}

}  // namespace microdl
