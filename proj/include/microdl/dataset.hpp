#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "microdl/numerics.hpp"

namespace microdl {

struct Dataset {
  std::string name;
  Matrix features;                        // M x n
  std::vector<int> labels;                // dense, 0..class_count-1
  int class_count = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;   // original label text per class id

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

// Reads a CSV with a header row. A column whose first data cell parses as a
// number is numeric and every later cell must parse too; other columns are
// categorical and ordinal-encoded by first appearance. The label column is
// re-indexed densely by first appearance.
Dataset load_csv(const std::string& path, const std::string& label_column);
Dataset parse_csv(std::istream& in, const std::string& label_column,
                  const std::string& name = "csv");

struct StandardizeReport {
  std::vector<std::string> dropped;  // zero-variance features removed
};

// Per-feature zero mean and unit population standard deviation. Constant
// features are dropped with a warning.
Dataset standardize(const Dataset& d, StandardizeReport* report = nullptr);

// K spherical unit-variance Gaussian clusters whose centers are pairwise at
// least `separation` apart.
Dataset generate_blobs(int k, std::size_t per_cluster, Eigen::Index dim, double separation,
                       std::uint64_t seed);

// Seeded reservoir sample of n rows (all rows when n >= size); row order kept.
Dataset sample_rows(const Dataset& d, std::size_t n, std::uint64_t seed);

// Numeric matrix CSV (header "f0,f1,..."), used for features and assignments.
void write_matrix_csv(std::ostream& out, const Matrix& m, const std::string& prefix = "f");
Matrix read_matrix_csv(std::istream& in);

void write_labels_csv(std::ostream& out, const std::vector<int>& labels,
                      const std::string& column = "label");
std::vector<int> read_labels_csv(std::istream& in, const std::string& column = "label");

// One CSV record split on commas; double quotes group, "" escapes a quote.
// Fields are whitespace-trimmed.
std::vector<std::string> split_csv_record(const std::string& line);
// Quotes a field when it contains a comma, quote or newline.
std::string csv_escape(const std::string& field);

}  // namespace microdl
