#include "microdl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "microdl/error.hpp"

namespace microdl {

std::vector<double> descending_midranks(const std::vector<double>& values, double tie_tolerance) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j]] - values[order[j + 1]] <= tie_tolerance) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

RankTable friedman_aligned_ranks(const Matrix& values) {
  const Eigen::Index m = values.rows();
  const Eigen::Index n = values.cols();
  if (n < 2) throw ParameterError("Friedman test needs at least two algorithms");
  if (m < 2) throw ParameterError("Friedman test needs at least two datasets");
  if (values.hasNaN()) throw DataError("performance table contains NaN");
  require_finite(values, "performance table");

  RankTable t;
  t.aligned = values;
  for (Eigen::Index i = 0; i < m; ++i) t.aligned.row(i).array() -= values.row(i).mean();

  // Alignment leaves rounding residue; values this close count as ties.
  const double tol = 1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff());
  std::vector<double> flat(t.aligned.data(), t.aligned.data() + t.aligned.size());
  const std::vector<double> joint = descending_midranks(flat, tol);
  t.ranks = Eigen::Map<const Matrix>(joint.data(), m, n);
  t.column_totals = t.ranks.colwise().sum();
  t.row_totals = t.ranks.rowwise().sum();

  t.within_ranks.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    std::vector<double> row(t.aligned.row(i).data(), t.aligned.row(i).data() + n);
    const auto r = descending_midranks(row, tol);
    for (Eigen::Index j = 0; j < n; ++j) t.within_ranks(i, j) = r[static_cast<std::size_t>(j)];
  }

  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  const double nm = dn * dm;
  const double numer =
      (dn - 1.0) * (t.column_totals.squaredNorm() - dn * dm * dm * (nm + 1.0) * (nm + 1.0) / 4.0);
  const double denom = nm * (nm + 1.0) * (2.0 * nm + 1.0) / 6.0 - t.row_totals.squaredNorm() / dn;
  // Every aligned value tied: no between-algorithm signal at all.
  t.statistic = denom > 0.0 ? std::max(0.0, numer / denom) : 0.0;
  t.p_value = chi_square_sf(t.statistic, dn - 1.0);
  return t;
}

double chi_square_sf(double x, double dof) {
  if (!(dof > 0.0)) throw ParameterError("chi-square degrees of freedom must be > 0");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

}  // namespace

double studentized_range_sf(double q, int k) {
  if (k < 2) throw ParameterError("studentized range needs k >= 2");
  if (q <= 0.0) return 1.0;
  // P(Q > q) = 1 - k * int phi(z) [Phi(z) - Phi(z - q)]^(k-1) dz. The complement
  // is integrated directly to keep relative accuracy in the far tail:
  // 1 - P(Q <= q) = k * int phi(z) (Phi(z)^(k-1) - [Phi(z) - Phi(z-q)]^(k-1)) dz.
  const double km1 = static_cast<double>(k - 1);
  auto integrand = [&](double z) {
    const double a = normal_cdf(z);
    const double b = a - normal_cdf(z - q);
    return normal_pdf(z) * (std::pow(a, km1) - std::pow(b, km1));
  };
  using boost::math::quadrature::gauss_kronrod;
  const double lo = -9.0;
  const double hi = 9.0 + q;
  const double mid = 0.5 * q;
  double err = 0.0;
  const double left = gauss_kronrod<double, 61>::integrate(integrand, lo, mid, 15, 1e-14, &err);
  const double right = gauss_kronrod<double, 61>::integrate(integrand, mid, hi, 15, 1e-14, &err);
  return std::clamp(static_cast<double>(k) * (left + right), 0.0, 1.0);
}

Matrix nemenyi_posthoc(const RankTable& table) {
  const Eigen::Index n = table.algorithms();
  const Eigen::Index m = table.datasets();
  if (n < 2) throw ParameterError("Nemenyi test needs at least two algorithms");
  const RowVector avg = table.within_ranks.colwise().mean();
  const double se = std::sqrt(static_cast<double>(n * (n + 1)) / (6.0 * static_cast<double>(m)));
  Matrix p = Matrix::Ones(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double q = std::abs(avg[i] - avg[j]) / se * std::numbers::sqrt2;
      p(i, j) = p(j, i) = studentized_range_sf(q, static_cast<int>(n));
    }
  }
  return p;
}

}  // namespace microdl
