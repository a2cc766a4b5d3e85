#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "microdl/config.hpp"
#include "microdl/dataset.hpp"
#include "microdl/metrics.hpp"
#include "microdl/stats.hpp"

namespace microdl {

// One (dataset, method, alpha, repeat) cell.
struct ResultRow {
  std::string dataset;
  std::string group = "main";  // "main" or "sweep"
  std::string algorithm;
  double alpha = 0.0;          // 0 for methods without the disturbance term
  std::size_t repeat = 0;
  std::uint64_t seed = 0;      // seed of the cell's stack and clustering
  std::uint64_t stream_id = 0; // id of the cell's RNG stream
  MetricSet metrics;
  std::string status = "ok";   // "ok" or "error"
  std::string error;

  bool ok() const { return status == "ok"; }
  bool operator==(const ResultRow& o) const;
};

struct ResultSummary {
  std::string dataset;
  std::string group;
  std::string algorithm;
  double alpha = 0.0;
  std::size_t runs = 0;  // successful repeats
  MetricSet mean;
  MetricSet stddev;      // population standard deviation across repeats
};

struct FriedmanReport {
  std::vector<std::string> algorithms;  // columns
  std::vector<std::string> datasets;    // rows
  Matrix accuracy;                      // mean accuracy per (dataset, algorithm)
  double statistic = 0.0;
  double p_value = 1.0;
  RowVector rank_totals;
  Matrix nemenyi;                       // pairwise p-values
};

struct ResultsTable {
  std::vector<ResultRow> rows;
  std::optional<FriedmanReport> friedman;

  bool empty() const { return rows.empty(); }
  // Grouped by (dataset, group, algorithm, alpha) in first-appearance order.
  std::vector<ResultSummary> summarize() const;
};

// Materializes a configured dataset (generation or CSV ingestion, optional
// subsampling and standardization).
Dataset prepare_dataset(const DatasetSpec& spec, std::uint64_t master_seed);

// Scores one method on one prepared dataset with the given cell seed.
MetricSet run_cell(const Dataset& data, const ExperimentConfig& cfg, const std::string& method,
                   double alpha, std::uint64_t seed);

ResultsTable run_experiment(const ExperimentConfig& cfg);

// Friedman aligned-ranks test over the "main" summaries (accuracy), datasets
// as rows and algorithms as columns. Needs >= 2 of each.
FriedmanReport friedman_report(const ResultsTable& table);

// CSV columns, in order:
// dataset,group,algorithm,alpha,repeat,seed,stream_id,accuracy,jaccard,fm,rand,status,error
inline constexpr const char* kResultsCsvHeader =
    "dataset,group,algorithm,alpha,repeat,seed,stream_id,accuracy,jaccard,fm,rand,status,error";

void write_results_csv(std::ostream& out, const ResultsTable& table);
ResultsTable read_results_csv(std::istream& in);
void write_results_json(std::ostream& out, const ResultsTable& table);
ResultsTable read_results_json(std::istream& in);
void write_summary_csv(std::ostream& out, const ResultsTable& table);

// Writes to `path` in "csv" or "json" format.
void export_results(const ResultsTable& table, const std::string& path, const std::string& format);

}  // namespace microdl
