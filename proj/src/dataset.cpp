#include "microdl/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "microdl/error.hpp"
#include "microdl/log.hpp"
#include "microdl/rbm.hpp"
#include "microdl/rng.hpp"

namespace microdl {

void Dataset::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DimensionError("dataset '" + name + "': " + std::to_string(features.rows()) +
                         " feature rows but " + std::to_string(labels.size()) + " labels");
  }
  require_finite(features, "dataset features");
  std::vector<bool> seen(static_cast<std::size_t>(class_count), false);
  for (int l : labels) {
    if (l < 0 || l >= class_count) {
      throw DataError("dataset '" + name + "': label " + std::to_string(l) + " out of range");
    }
    seen[static_cast<std::size_t>(l)] = true;
  }
  for (int c = 0; c < class_count; ++c) {
    if (!seen[static_cast<std::size_t>(c)]) {
      throw DataError("dataset '" + name + "': class " + std::to_string(c) + " has no samples");
    }
  }
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> split_csv_record(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (*b == '+') ++b;
  auto res = std::from_chars(b, e, v);
  return res.ec == std::errc() && res.ptr == e && std::isfinite(v);
}

bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    fields = split_csv_record(line);
    return true;
  }
  return false;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& label_column, const std::string& name) {
  std::vector<std::string> header;
  std::size_t line_no = 0;
  if (!read_record(in, header, line_no)) throw DataError("'" + name + "': empty CSV file");
  std::size_t label_idx = header.size();
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == label_column) label_idx = j;
  }
  if (label_idx == header.size()) {
    throw ConfigError("'" + name + "': no label column named '" + label_column + "' in header");
  }

  const std::size_t cols = header.size();
  std::vector<bool> numeric(cols, false);
  std::vector<std::map<std::string, int>> categories(cols);
  std::vector<std::vector<double>> rows;
  std::map<std::string, int> label_ids;
  Dataset d;
  d.name = name;

  std::vector<std::string> fields;
  std::size_t data_row = 0;
  while (read_record(in, fields, line_no)) {
    if (fields.size() != cols) {
      throw DataError("'" + name + "' line " + std::to_string(line_no) + ": expected " +
                      std::to_string(cols) + " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(cols - 1);
    for (std::size_t j = 0; j < cols; ++j) {
      const std::string& cell = fields[j];
      if (cell.empty()) {
        throw DataError("'" + name + "' row " + std::to_string(data_row + 1) + ", column '" +
                        header[j] + "': missing value");
      }
      if (j == label_idx) {
        auto [it, inserted] = label_ids.try_emplace(cell, static_cast<int>(label_ids.size()));
        if (inserted) d.class_names.push_back(cell);
        d.labels.push_back(it->second);
        continue;
      }
      double v = 0.0;
      const bool is_num = parse_number(cell, v);
      if (data_row == 0) numeric[j] = is_num;
      if (numeric[j]) {
        if (!is_num) {
          throw DataError("'" + name + "' row " + std::to_string(data_row + 1) + ", column '" +
                          header[j] + "': cannot parse '" + cell + "' as a number");
        }
        row.push_back(v);
      } else {
        auto& cats = categories[j];
        row.push_back(cats.try_emplace(cell, static_cast<int>(cats.size())).first->second);
      }
    }
    rows.push_back(std::move(row));
    ++data_row;
  }
  if (rows.empty()) throw DataError("'" + name + "': no data rows");

  d.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      d.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    if (j != label_idx) d.feature_names.push_back(header[j]);
  }
  d.class_count = static_cast<int>(label_ids.size());
  d.validate();
  return d;
}

Dataset load_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return parse_csv(in, label_column, path);
}

Dataset standardize(const Dataset& d, StandardizeReport* report) {
  const Eigen::Index m = d.features.rows();
  if (m == 0) throw DataError("standardize: empty dataset");
  std::vector<Eigen::Index> keep;
  std::vector<double> means, stds;
  for (Eigen::Index j = 0; j < d.features.cols(); ++j) {
    const double mean = d.features.col(j).mean();
    const double var = (d.features.col(j).array() - mean).square().mean();
    const std::string fname = j < static_cast<Eigen::Index>(d.feature_names.size())
                                  ? d.feature_names[static_cast<std::size_t>(j)]
                                  : "f" + std::to_string(j);
    if (!(var > 0.0)) {
      log_warning("standardize: dropping constant feature '" + fname + "'");
      if (report) report->dropped.push_back(fname);
      continue;
    }
    keep.push_back(j);
    means.push_back(mean);
    stds.push_back(std::sqrt(var));
  }
  if (keep.empty()) throw DataError("standardize: every feature is constant");
  Dataset out = d;
  out.features.resize(m, static_cast<Eigen::Index>(keep.size()));
  out.feature_names.clear();
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.features.col(static_cast<Eigen::Index>(k)) =
        (d.features.col(keep[k]).array() - means[k]) / stds[k];
    if (keep[k] < static_cast<Eigen::Index>(d.feature_names.size())) {
      out.feature_names.push_back(d.feature_names[static_cast<std::size_t>(keep[k])]);
    }
  }
  return out;
}

Dataset generate_blobs(int k, std::size_t per_cluster, Eigen::Index dim, double separation,
                       std::uint64_t seed) {
  if (k < 2) throw ParameterError("generate_blobs needs K >= 2");
  if (dim < 1) throw ParameterError("generate_blobs needs dim >= 1");
  if (per_cluster < 1) throw ParameterError("generate_blobs needs per_cluster >= 1");
  if (!(separation >= 0.0)) throw ParameterError("separation must be >= 0");
  const RngStream root(seed);

  Matrix centers(k, dim);
  if (k <= dim) {
    // Scaled axis vectors under a random rotation-free signed permutation:
    // pairwise distance is exactly `separation`.
    RngStream rng = root.child(0);
    const auto axes = rng.permutation(static_cast<std::size_t>(dim));
    centers.setZero();
    for (int c = 0; c < k; ++c) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      centers(c, static_cast<Eigen::Index>(axes[static_cast<std::size_t>(c)])) =
          sign * separation / std::sqrt(2.0);
    }
  } else {
    // Rejection sampling in a cube wide enough to fit K separated points.
    RngStream rng = root.child(0);
    double side = std::max(1.0, separation) * static_cast<double>(k);
    int placed = 0;
    int attempts = 0;
    while (placed < k) {
      RowVector cand(dim);
      for (Eigen::Index j = 0; j < dim; ++j) cand[j] = (rng.uniform() - 0.5) * side;
      bool ok = true;
      for (int c = 0; c < placed && ok; ++c) ok = (centers.row(c) - cand).norm() >= separation;
      if (ok) {
        centers.row(placed++) = cand;
      } else if (++attempts % 1000 == 0) {
        side *= 1.5;
      }
    }
  }

  Dataset d;
  d.name = "blobs";
  d.class_count = k;
  const auto total = static_cast<Eigen::Index>(per_cluster) * k;
  d.features.resize(total, dim);
  RngStream noise = root.child(1);
  Eigen::Index r = 0;
  for (int c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per_cluster; ++i, ++r) {
      for (Eigen::Index j = 0; j < dim; ++j) d.features(r, j) = centers(c, j) + noise.normal();
      d.labels.push_back(c);
    }
    d.class_names.push_back(std::to_string(c));
  }
  for (Eigen::Index j = 0; j < dim; ++j) d.feature_names.push_back("x" + std::to_string(j));
  return d;
}

Dataset sample_rows(const Dataset& d, std::size_t n, std::uint64_t seed) {
  if (n >= d.size()) return d;
  RngStream rng(seed);
  std::vector<std::size_t> reservoir(n);
  for (std::size_t i = 0; i < n; ++i) reservoir[i] = i;
  for (std::size_t i = n; i < d.size(); ++i) {
    const auto j = static_cast<std::size_t>(rng.below(i + 1));
    if (j < n) reservoir[j] = i;
  }
  std::sort(reservoir.begin(), reservoir.end());

  Dataset out;
  out.name = d.name;
  out.feature_names = d.feature_names;
  out.features.resize(static_cast<Eigen::Index>(n), d.features.cols());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < n; ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = d.features.row(static_cast<Eigen::Index>(reservoir[i]));
    const int old = d.labels[reservoir[i]];
    auto [it, inserted] = remap.try_emplace(old, static_cast<int>(remap.size()));
    if (inserted) {
      out.class_names.push_back(static_cast<std::size_t>(old) < d.class_names.size()
                                    ? d.class_names[static_cast<std::size_t>(old)]
                                    : std::to_string(old));
    }
    out.labels.push_back(it->second);
  }
  out.class_count = static_cast<int>(remap.size());
  return out;
}

void write_matrix_csv(std::ostream& out, const Matrix& m, const std::string& prefix) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << prefix << j;
  out << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!read_record(in, fields, line_no)) throw DataError("matrix CSV is empty");
  const std::size_t cols = fields.size();
  std::vector<double> values;
  std::size_t rows = 0;
  while (read_record(in, fields, line_no)) {
    if (fields.size() != cols) {
      throw DataError("matrix CSV line " + std::to_string(line_no) + ": wrong field count");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      double v = 0.0;
      if (!parse_number(fields[j], v)) {
        throw DataError("matrix CSV row " + std::to_string(rows + 1) + ", column " +
                        std::to_string(j + 1) + ": cannot parse '" + fields[j] + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  return Eigen::Map<const Matrix>(values.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(cols));
}

void write_labels_csv(std::ostream& out, const std::vector<int>& labels,
                      const std::string& column) {
  out << column << '\n';
  for (int l : labels) out << l << '\n';
}

std::vector<int> read_labels_csv(std::istream& in, const std::string& column) {
  std::vector<std::string> fields;
  std::size_t line_no = 0;
  if (!read_record(in, fields, line_no)) throw DataError("label CSV is empty");
  std::size_t idx = fields.size();
  for (std::size_t j = 0; j < fields.size(); ++j) {
    if (fields[j] == column) idx = j;
  }
  if (idx == fields.size()) throw ConfigError("no column named '" + column + "'");
  const std::size_t cols = fields.size();
  std::map<std::string, int> ids;
  std::vector<int> out;
  while (read_record(in, fields, line_no)) {
    if (fields.size() != cols) {
      throw DataError("label CSV line " + std::to_string(line_no) + ": wrong field count");
    }
    out.push_back(ids.try_emplace(fields[idx], static_cast<int>(ids.size())).first->second);
  }
  return out;
}

}  // namespace microdl
