#pragma once

#include <vector>

#include "microdl/numerics.hpp"

namespace microdl {

// Friedman aligned-ranks result for m datasets (rows) x n algorithms (cols).
struct RankTable {
  Matrix aligned;            // observation minus its dataset (row) mean
  Matrix ranks;              // joint ranks 1..nm of `aligned`, midranks for ties
  RowVector column_totals;   // per algorithm
  Eigen::VectorXd row_totals;  // per dataset
  Matrix within_ranks;       // classic per-dataset ranks 1..n (midranks), for post-hoc tests
  double statistic = 0.0;    // T
  double p_value = 1.0;      // chi-square survival with n-1 degrees of freedom

  Eigen::Index datasets() const { return aligned.rows(); }
  Eigen::Index algorithms() const { return aligned.cols(); }
};

// `values` holds performances; larger is better and receives the smaller rank.
RankTable friedman_aligned_ranks(const Matrix& values);

// Midranks (average rank for ties), rank 1 for the largest value. Neighbours
// in sorted order closer than `tie_tolerance` are tied.
std::vector<double> descending_midranks(const std::vector<double>& values,
                                        double tie_tolerance = 0.0);

// Pairwise Nemenyi p-values from the average per-dataset ranks; symmetric with
// a unit diagonal.
Matrix nemenyi_posthoc(const RankTable& table);

// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

// Upper tail of the studentized range distribution with k groups and infinite
// degrees of freedom.
double studentized_range_sf(double q, int k);

}  // namespace microdl
