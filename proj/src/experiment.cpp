#include "microdl/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "microdl/error.hpp"
#include "microdl/log.hpp"
#include "microdl/rng.hpp"
#include "microdl/spectral.hpp"
#include "microdl/stack.hpp"

namespace microdl {

namespace {

bool same_metrics(const MetricSet& a, const MetricSet& b) {
  return a.accuracy == b.accuracy && a.jaccard == b.jaccard && a.fm == b.fm && a.rand == b.rand;
}

double parse_double_field(const std::string& s, const std::string& what) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("results: cannot parse " + what + " '" + s + "'");
  }
  return x;
}

std::uint64_t parse_uint_field(const std::string& s, const std::string& what) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("results: cannot parse " + what + " '" + s + "'");
  }
  return x;
}

}  // namespace

bool ResultRow::operator==(const ResultRow& o) const {
  return dataset == o.dataset && group == o.group && algorithm == o.algorithm &&
         alpha == o.alpha && repeat == o.repeat && seed == o.seed && stream_id == o.stream_id &&
         same_metrics(metrics, o.metrics) && status == o.status && error == o.error;
}

std::vector<ResultSummary> ResultsTable::summarize() const {
  using Key = std::tuple<std::string, std::string, std::string, double>;
  std::vector<Key> order;
  std::map<Key, std::vector<MetricSet>> runs;
  for (const auto& r : rows) {
    const Key key{r.dataset, r.group, r.algorithm, r.alpha};
    auto [it, inserted] = runs.try_emplace(key);
    if (inserted) order.push_back(key);
    if (r.ok()) it->second.push_back(r.metrics);
  }
  std::vector<ResultSummary> out;
  for (const auto& key : order) {
    ResultSummary s;
    std::tie(s.dataset, s.group, s.algorithm, s.alpha) = key;
    const auto& v = runs.at(key);
    s.runs = v.size();
    if (!v.empty()) {
      auto stat = [&](double MetricSet::*field, double& mean, double& sd) {
        double sum = 0.0;
        for (const auto& m : v) sum += m.*field;
        mean = sum / static_cast<double>(v.size());
        double ss = 0.0;
        for (const auto& m : v) ss += (m.*field - mean) * (m.*field - mean);
        sd = std::sqrt(ss / static_cast<double>(v.size()));
      };
      stat(&MetricSet::accuracy, s.mean.accuracy, s.stddev.accuracy);
      stat(&MetricSet::jaccard, s.mean.jaccard, s.stddev.jaccard);
      stat(&MetricSet::fm, s.mean.fm, s.stddev.fm);
      stat(&MetricSet::rand, s.mean.rand, s.stddev.rand);
    }
    out.push_back(s);
  }
  return out;
}

Dataset prepare_dataset(const DatasetSpec& spec, std::uint64_t master_seed) {
  const std::uint64_t seed = spec.seed.value_or(master_seed);
  Dataset d;
  if (spec.source == "blobs") {
    d = generate_blobs(spec.k, spec.per_cluster, spec.dim, spec.separation, seed);
  } else if (spec.source.rfind("csv:", 0) == 0) {
    d = load_csv(spec.source.substr(4), spec.label_column);
  } else {
    throw ConfigError("dataset '" + spec.name + "': unknown source '" + spec.source + "'");
  }
  d.name = spec.name;
  if (spec.sample_n > 0) d = sample_rows(d, spec.sample_n, seed);
  if (spec.standardize) d = standardize(d);
  d.validate();
  return d;
}

MetricSet run_cell(const Dataset& data, const ExperimentConfig& cfg, const std::string& method,
                   double alpha, std::uint64_t seed) {
  SpectralOptions opts;
  opts.sigma = cfg.sigma;
  opts.kmeans.restarts = cfg.kmeans_restarts;
  Matrix features;
  if (method == kRawMethod) {
    features = data.features;
  } else if (method == kMicroMethod || method == kPlainMethod) {
    const bool micro = method == kMicroMethod;
    ExperimentConfig local = cfg;
    local.training.alpha = micro ? alpha : 0.0;
    const StackSpec spec = local.stack_spec(micro, seed);
    const VectorLabels labels(data.labels);
    const TrainedStack stack = train_stack(data.features, micro ? &labels : nullptr, spec);
    features = encode(stack, data.features);
  } else {
    throw ConfigError("unknown method '" + method + "'");
  }
  const ClusterAssignment a = spectral_cluster(features, data.class_count, seed, opts);
  return evaluate_clustering(data.labels, a.labels);
}

ResultsTable run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  ResultsTable table;
  const RngStream root(cfg.seed);
  for (std::size_t di = 0; di < cfg.datasets.size(); ++di) {
    const DatasetSpec& spec = cfg.datasets[di];
    std::optional<Dataset> data;
    std::string data_error;
    try {
      data = prepare_dataset(spec, cfg.seed);
    } catch (const std::exception& e) {
      data_error = e.what();
      log_warning("dataset '" + spec.name + "' failed: " + data_error);
    }

    struct Job {
      std::string group;
      std::string method;
      double alpha;
    };
    std::vector<Job> jobs;
    for (const auto& m : cfg.methods) {
      jobs.push_back({"main", m, m == kMicroMethod ? cfg.training.alpha : 0.0});
    }
    for (double a : cfg.alpha_sweep) jobs.push_back({"sweep", kMicroMethod, a});

    const RngStream data_stream = root.child(di);
    for (std::size_t r = 0; r < cfg.repeats; ++r) {
      // Every method of a repeat shares the seed, so the compared stacks start
      // from the same initialization and see the same mini-batch order.
      RngStream cell = data_stream.child(r);
      const std::uint64_t seed = cell.next_u64();
      for (const auto& job : jobs) {
        ResultRow row;
        row.dataset = spec.name;
        row.group = job.group;
        row.algorithm = job.method;
        row.alpha = job.alpha;
        row.repeat = r;
        row.seed = seed;
        row.stream_id = cell.stream_id();
        log_info("cell " + spec.name + "/" + job.group + "/" + job.method + " alpha=" +
                 format_double(job.alpha) + " repeat=" + std::to_string(r) +
                 " stream=" + std::to_string(cell.stream_id()) + " seed=" + std::to_string(seed));
        if (!data) {
          row.status = "error";
          row.error = data_error;
        } else {
          try {
            row.metrics = run_cell(*data, cfg, job.method, job.alpha, seed);
          } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
            log_warning("cell " + spec.name + "/" + job.method + " failed: " + row.error);
          }
        }
        table.rows.push_back(std::move(row));
      }
    }
  }
  if (cfg.friedman) {
    try {
      table.friedman = friedman_report(table);
    } catch (const Error& e) {
      log_warning(std::string("Friedman test skipped: ") + e.what());
    }
  }
  return table;
}

FriedmanReport friedman_report(const ResultsTable& table) {
  FriedmanReport rep;
  std::map<std::pair<std::string, std::string>, double> acc;
  for (const auto& s : table.summarize()) {
    if (s.group != "main") continue;
    if (std::find(rep.datasets.begin(), rep.datasets.end(), s.dataset) == rep.datasets.end()) {
      rep.datasets.push_back(s.dataset);
    }
    if (std::find(rep.algorithms.begin(), rep.algorithms.end(), s.algorithm) ==
        rep.algorithms.end()) {
      rep.algorithms.push_back(s.algorithm);
    }
    if (s.runs > 0) acc[{s.dataset, s.algorithm}] = s.mean.accuracy;
  }
  const auto m = static_cast<Eigen::Index>(rep.datasets.size());
  const auto n = static_cast<Eigen::Index>(rep.algorithms.size());
  rep.accuracy.resize(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto it = acc.find({rep.datasets[static_cast<std::size_t>(i)],
                                rep.algorithms[static_cast<std::size_t>(j)]});
      if (it == acc.end()) {
        throw DataError("Friedman test: no successful run for " +
                        rep.algorithms[static_cast<std::size_t>(j)] + " on " +
                        rep.datasets[static_cast<std::size_t>(i)]);
      }
      rep.accuracy(i, j) = it->second;
    }
  }
  const RankTable t = friedman_aligned_ranks(rep.accuracy);
  rep.statistic = t.statistic;
  rep.p_value = t.p_value;
  rep.rank_totals = t.column_totals;
  rep.nemenyi = nemenyi_posthoc(t);
  return rep;
}

void write_results_csv(std::ostream& out, const ResultsTable& table) {
  out << kResultsCsvHeader << '\n';
  for (const auto& r : table.rows) {
    out << csv_escape(r.dataset) << ',' << r.group << ',' << csv_escape(r.algorithm) << ','
        << format_double(r.alpha) << ',' << r.repeat << ',' << r.seed << ',' << r.stream_id
        << ',' << format_double(r.metrics.accuracy) << ',' << format_double(r.metrics.jaccard)
        << ',' << format_double(r.metrics.fm) << ',' << format_double(r.metrics.rand) << ','
        << r.status << ',' << csv_escape(r.error) << '\n';
  }
}

ResultsTable read_results_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("results CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kResultsCsvHeader) throw DataError("results CSV has an unexpected header");
  ResultsTable t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_record(line);
    if (f.size() != 13) throw DataError("results CSV row with " + std::to_string(f.size()) + " fields");
    ResultRow r;
    r.dataset = f[0];
    r.group = f[1];
    r.algorithm = f[2];
    r.alpha = parse_double_field(f[3], "alpha");
    r.repeat = parse_uint_field(f[4], "repeat");
    r.seed = parse_uint_field(f[5], "seed");
    r.stream_id = parse_uint_field(f[6], "stream_id");
    r.metrics.accuracy = parse_double_field(f[7], "accuracy");
    r.metrics.jaccard = parse_double_field(f[8], "jaccard");
    r.metrics.fm = parse_double_field(f[9], "fm");
    r.metrics.rand = parse_double_field(f[10], "rand");
    r.status = f[11];
    r.error = f[12];
    t.rows.push_back(std::move(r));
  }
  return t;
}

namespace {

using nlohmann::ordered_json;

ordered_json metrics_json(const MetricSet& m) {
  return {{"accuracy", m.accuracy}, {"jaccard", m.jaccard}, {"fm", m.fm}, {"rand", m.rand}};
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const ordered_json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != cols) throw DataError("ragged matrix in results");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

void write_results_json(std::ostream& out, const ResultsTable& table) {
  ordered_json doc;
  doc["format"] = "microdl-results";
  doc["version"] = 1;
  ordered_json rows = ordered_json::array();
  for (const auto& r : table.rows) {
    ordered_json j;
    j["dataset"] = r.dataset;
    j["group"] = r.group;
    j["algorithm"] = r.algorithm;
    j["alpha"] = r.alpha;
    j["repeat"] = r.repeat;
    j["seed"] = r.seed;
    j["stream_id"] = r.stream_id;
    j["accuracy"] = r.metrics.accuracy;
    j["jaccard"] = r.metrics.jaccard;
    j["fm"] = r.metrics.fm;
    j["rand"] = r.metrics.rand;
    j["status"] = r.status;
    j["error"] = r.error;
    rows.push_back(j);
  }
  doc["rows"] = rows;
  ordered_json summary = ordered_json::array();
  for (const auto& s : table.summarize()) {
    summary.push_back({{"dataset", s.dataset},
                       {"group", s.group},
                       {"algorithm", s.algorithm},
                       {"alpha", s.alpha},
                       {"runs", s.runs},
                       {"mean", metrics_json(s.mean)},
                       {"std", metrics_json(s.stddev)}});
  }
  doc["summary"] = summary;
  if (table.friedman) {
    const FriedmanReport& f = *table.friedman;
    ordered_json totals = ordered_json::array();
    for (Eigen::Index j = 0; j < f.rank_totals.size(); ++j) totals.push_back(f.rank_totals[j]);
    doc["friedman"] = {{"algorithms", f.algorithms},
                       {"datasets", f.datasets},
                       {"accuracy", matrix_json(f.accuracy)},
                       {"statistic", f.statistic},
                       {"p_value", f.p_value},
                       {"rank_totals", totals},
                       {"nemenyi", matrix_json(f.nemenyi)}};
  } else {
    doc["friedman"] = nullptr;
  }
  out << doc.dump(2) << '\n';
}

ResultsTable read_results_json(std::istream& in) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("results JSON: ") + e.what());
  }
  try {
    if (doc.at("format") != "microdl-results") throw DataError("not a microdl results file");
    ResultsTable t;
    for (const auto& j : doc.at("rows")) {
      ResultRow r;
      r.dataset = j.at("dataset").get<std::string>();
      r.group = j.at("group").get<std::string>();
      r.algorithm = j.at("algorithm").get<std::string>();
      r.alpha = j.at("alpha").get<double>();
      r.repeat = j.at("repeat").get<std::size_t>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.stream_id = j.at("stream_id").get<std::uint64_t>();
      r.metrics.accuracy = j.at("accuracy").get<double>();
      r.metrics.jaccard = j.at("jaccard").get<double>();
      r.metrics.fm = j.at("fm").get<double>();
      r.metrics.rand = j.at("rand").get<double>();
      r.status = j.at("status").get<std::string>();
      r.error = j.at("error").get<std::string>();
      t.rows.push_back(std::move(r));
    }
    if (doc.contains("friedman") && !doc["friedman"].is_null()) {
      const auto& j = doc["friedman"];
      FriedmanReport f;
      f.algorithms = j.at("algorithms").get<std::vector<std::string>>();
      f.datasets = j.at("datasets").get<std::vector<std::string>>();
      f.accuracy = matrix_from_json(j.at("accuracy"));
      f.statistic = j.at("statistic").get<double>();
      f.p_value = j.at("p_value").get<double>();
      const auto totals = j.at("rank_totals").get<std::vector<double>>();
      f.rank_totals = Eigen::Map<const RowVector>(totals.data(), static_cast<Eigen::Index>(totals.size()));
      f.nemenyi = matrix_from_json(j.at("nemenyi"));
      t.friedman = std::move(f);
    }
    return t;
  } catch (const ordered_json::exception& e) {
    throw DataError(std::string("results JSON: ") + e.what());
  }
}

void write_summary_csv(std::ostream& out, const ResultsTable& table) {
  out << "dataset,group,algorithm,alpha,runs,accuracy_mean,accuracy_std,jaccard_mean,"
         "jaccard_std,fm_mean,fm_std,rand_mean,rand_std\n";
  for (const auto& s : table.summarize()) {
    out << csv_escape(s.dataset) << ',' << s.group << ',' << csv_escape(s.algorithm) << ','
        << format_double(s.alpha) << ',' << s.runs << ',' << format_double(s.mean.accuracy) << ','
        << format_double(s.stddev.accuracy) << ',' << format_double(s.mean.jaccard) << ','
        << format_double(s.stddev.jaccard) << ',' << format_double(s.mean.fm) << ','
        << format_double(s.stddev.fm) << ',' << format_double(s.mean.rand) << ','
        << format_double(s.stddev.rand) << '\n';
  }
}

void export_results(const ResultsTable& table, const std::string& path, const std::string& format) {
  if (format != "csv" && format != "json") {
    throw ConfigError("unknown results format '" + format + "' (expected csv or json)");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  if (format == "csv") {
    write_results_csv(out, table);
  } else {
    write_results_json(out, table);
  }
  if (!out) throw DataError("write to '" + path + "' failed");
}

}  // namespace microdl
