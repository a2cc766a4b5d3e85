// Command-line front end: train, encode, cluster, eval, experiment,
// sweep-alpha and plot.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "microdl/config.hpp"
#include "microdl/dataset.hpp"
#include "microdl/error.hpp"
#include "microdl/experiment.hpp"
#include "microdl/log.hpp"
#include "microdl/metrics.hpp"
#include "microdl/plot.hpp"
#include "microdl/spectral.hpp"
#include "microdl/stack.hpp"

namespace fs = std::filesystem;
using namespace microdl;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> alpha;
  std::optional<std::string> mode;
  std::optional<std::string> scaling;
  std::optional<std::size_t> layers;
  std::optional<std::size_t> sample_n;

  void add_to(CLI::App* app) {
    app->add_option("--seed", seed, "master seed");
    app->add_option("--alpha", alpha, "weight of the disturbance term in [0,1)");
    app->add_option("--mode", mode, "gradient mode: derived | paper-literal");
    app->add_option("--scaling", scaling, "update scaling: objective | paper-literal");
    app->add_option("--layers", layers, "stack depth");
    app->add_option("--sample-n", sample_n, "seeded reservoir subsample of every dataset (0 = all rows)");
  }

  void apply(ExperimentConfig& cfg) const {
    if (seed) cfg.seed = *seed;
    if (alpha) set_config_value(cfg, "alpha", *alpha);
    if (mode) set_config_value(cfg, "mode", *mode);
    if (scaling) set_config_value(cfg, "scaling", *scaling);
    if (layers) {
      cfg.layers = *layers;
      if (!cfg.hidden_dims.empty() && cfg.hidden_dims.size() != *layers) cfg.hidden_dims.clear();
    }
    if (sample_n) {
      for (auto& d : cfg.datasets) d.sample_n = *sample_n;
    }
  }
};

// Config keys that describe training only; dataset keys are ignored.
ExperimentConfig training_config(const std::string& path) {
  ExperimentConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  auto kv = parse_key_values(in, path);
  if (auto it = kv.find("preset"); it != kv.end()) {
    apply_preset(cfg, it->second);
    kv.erase(it);
  }
  for (const auto& [k, v] : kv) {
    if (k.rfind("dataset.", 0) != 0) set_config_value(cfg, k, v);
  }
  return cfg;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

Dataset load_input(const std::string& path, const std::string& label_column, bool raw) {
  Dataset d = load_csv(path, label_column);
  return raw ? d : standardize(d);
}

void write_outputs(const ResultsTable& table, const fs::path& dir) {
  fs::create_directories(dir);
  export_results(table, (dir / "results.csv").string(), "csv");
  export_results(table, (dir / "results.json").string(), "json");
  {
    auto out = open_out((dir / "summary.csv").string());
    write_summary_csv(out, table);
  }
  bool any_main = false, any_sweep = false;
  for (const auto& r : table.rows) {
    if (!r.ok()) continue;
    (r.group == "main" ? any_main : any_sweep) = true;
  }
  if (any_main) render_plots(table, PlotKind::kGroupedBars, (dir / "bars.svg").string());
  if (any_sweep) render_plots(table, PlotKind::kAlphaCurve, (dir / "alpha.svg").string());
}

void print_summary(const ResultsTable& table) {
  for (const auto& s : table.summarize()) {
    std::cout << s.dataset << '\t' << s.group << '\t' << s.algorithm << "\talpha="
              << format_double(s.alpha) << "\truns=" << s.runs
              << "\tacc=" << format_double(s.mean.accuracy) << "+-"
              << format_double(s.stddev.accuracy) << '\n';
  }
  if (table.friedman) {
    std::cout << "friedman T=" << format_double(table.friedman->statistic)
              << " p=" << format_double(table.friedman->p_value) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Micro-supervised deep belief features and spectral clustering"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "log progress and RNG stream ids to stderr");

  // train
  auto* train = app.add_subcommand("train", "train a feature stack on a labelled CSV");
  std::string train_data, train_label = "label", train_config, train_out, train_log;
  std::optional<std::size_t> train_epochs;
  std::optional<std::string> train_eps;
  bool train_plain = false, train_raw = false;
  Overrides train_ov;
  train->add_option("--data", train_data, "input CSV")->required();
  train->add_option("--label-column", train_label, "label column name");
  train->add_option("--config", train_config, "config file (training keys)");
  train->add_option("--out", train_out, "output stack checkpoint")->required();
  train->add_option("--log", train_log, "per-epoch training log CSV");
  train->add_option("--epochs", train_epochs, "epochs per layer");
  train->add_option("--eps", train_eps, "learning rate");
  train->add_flag("--no-micro", train_plain, "plain CD-1 stack without representative pairs");
  train->add_flag("--no-standardize", train_raw, "use features as read");
  train_ov.add_to(train);

  // encode
  auto* enc = app.add_subcommand("encode", "map a CSV through a trained stack");
  std::string enc_model, enc_data, enc_label = "label", enc_out;
  bool enc_raw = false;
  enc->add_option("--model", enc_model, "stack checkpoint")->required();
  enc->add_option("--data", enc_data, "input CSV")->required();
  enc->add_option("--label-column", enc_label, "label column name (excluded from features)");
  enc->add_option("--out", enc_out, "output feature CSV")->required();
  enc->add_flag("--no-standardize", enc_raw, "use features as read");

  // cluster
  auto* clu = app.add_subcommand("cluster", "spectral clustering of a numeric feature CSV");
  std::string clu_data, clu_out;
  int clu_k = 0;
  std::uint64_t clu_seed = 1;
  std::optional<double> clu_sigma;
  clu->add_option("--data", clu_data, "numeric feature CSV with header")->required();
  clu->add_option("--k", clu_k, "number of clusters")->required();
  clu->add_option("--seed", clu_seed, "k-means seed");
  clu->add_option("--sigma", clu_sigma, "affinity width (default: median distance)");
  clu->add_option("--out", clu_out, "output assignment CSV (column 'cluster')")->required();

  // eval
  auto* ev = app.add_subcommand("eval", "score an assignment against ground truth");
  std::string ev_truth, ev_truth_col = "label", ev_pred, ev_pred_col = "cluster", ev_out;
  ev->add_option("--truth", ev_truth, "CSV with true labels")->required();
  ev->add_option("--truth-column", ev_truth_col, "true label column");
  ev->add_option("--pred", ev_pred, "CSV with cluster ids")->required();
  ev->add_option("--pred-column", ev_pred_col, "cluster id column");
  ev->add_option("--out", ev_out, "write metrics as JSON");

  // experiment
  auto* exp = app.add_subcommand("experiment", "run the configured comparison");
  std::string exp_config, exp_out = "results";
  Overrides exp_ov;
  exp->add_option("--config", exp_config, "config file")->required();
  exp->add_option("--out", exp_out, "output directory");
  exp_ov.add_to(exp);

  // sweep-alpha
  auto* sw = app.add_subcommand("sweep-alpha", "accuracy against the disturbance weight");
  std::string sw_config, sw_out = "sweep", sw_alphas = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  Overrides sw_ov;
  sw->add_option("--config", sw_config, "config file")->required();
  sw->add_option("--alphas", sw_alphas, "comma-separated values in (0,1)");
  sw->add_option("--out", sw_out, "output directory");
  sw_ov.add_to(sw);

  // plot
  auto* pl = app.add_subcommand("plot", "render an SVG from a results JSON file");
  std::string pl_results, pl_kind = "grouped-bars", pl_out;
  pl->add_option("--results", pl_results, "results.json")->required();
  pl->add_option("--kind", pl_kind, "grouped-bars | alpha-curve");
  pl->add_option("--out", pl_out, "output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ErrorKind::kConfig);
  }
  set_verbose(verbose);

  try {
    if (*train) {
      ExperimentConfig cfg = training_config(train_config);
      train_ov.apply(cfg);
      if (train_epochs) cfg.training.epochs = *train_epochs;
      if (train_eps) set_config_value(cfg, "eps", *train_eps);
      const Dataset d = load_input(train_data, train_label, train_raw);
      const StackSpec spec = cfg.stack_spec(!train_plain, cfg.seed);
      const VectorLabels labels(d.labels);
      const TrainedStack stack = train_stack(d.features, train_plain ? nullptr : &labels, spec);
      auto out = open_out(train_out);
      write_stack(out, stack);
      if (!train_log.empty()) {
        auto log = open_out(train_log);
        log << "layer,epoch,reconstruction_error,spi_sfd_kl,spi_dfd_kl,objective_proxy\n";
        for (std::size_t i = 0; i < stack.logs.size(); ++i) {
          for (const auto& e : stack.logs[i]) {
            log << i << ',' << e.epoch << ',' << format_double(e.reconstruction_error) << ','
                << format_double(e.spi_sfd_kl) << ',' << format_double(e.spi_dfd_kl) << ','
                << format_double(e.objective_proxy) << '\n';
          }
        }
      }
      std::cout << "trained " << stack.layers.size() << " layers, output dim "
                << stack.output_dim() << '\n';
    } else if (*enc) {
      auto in = open_in(enc_model);
      const TrainedStack stack = read_stack(in);
      const Dataset d = load_input(enc_data, enc_label, enc_raw);
      auto out = open_out(enc_out);
      write_matrix_csv(out, encode(stack, d.features), "h");
    } else if (*clu) {
      auto in = open_in(clu_data);
      const Matrix x = read_matrix_csv(in);
      SpectralOptions opts;
      opts.sigma = clu_sigma;
      const ClusterAssignment a = spectral_cluster(x, clu_k, clu_seed, opts);
      auto out = open_out(clu_out);
      write_labels_csv(out, a.labels, "cluster");
    } else if (*ev) {
      auto tin = open_in(ev_truth);
      auto pin = open_in(ev_pred);
      const auto truth = read_labels_csv(tin, ev_truth_col);
      const auto pred = read_labels_csv(pin, ev_pred_col);
      const MetricSet m = evaluate_clustering(truth, pred);
      nlohmann::ordered_json j = {
          {"accuracy", m.accuracy}, {"jaccard", m.jaccard}, {"fm", m.fm}, {"rand", m.rand}};
      std::cout << j.dump(2) << '\n';
      if (!ev_out.empty()) {
        auto out = open_out(ev_out);
        out << j.dump(2) << '\n';
      }
    } else if (*exp) {
      ExperimentConfig cfg = load_config(exp_config);
      exp_ov.apply(cfg);
      const ResultsTable table = run_experiment(cfg);
      write_outputs(table, exp_out);
      print_summary(table);
    } else if (*sw) {
      ExperimentConfig cfg = load_config(sw_config);
      sw_ov.apply(cfg);
      cfg.methods.clear();
      set_config_value(cfg, "alpha_sweep", sw_alphas);
      cfg.friedman = false;
      const ResultsTable table = run_experiment(cfg);
      write_outputs(table, sw_out);
      print_summary(table);
    } else if (*pl) {
      auto in = open_in(pl_results);
      const ResultsTable table = read_results_json(in);
      render_plots(table, plot_kind_from_string(pl_kind), pl_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
