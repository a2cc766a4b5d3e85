#include <doctest.h>

#include <sstream>

#include "microdl/config.hpp"
#include "microdl/error.hpp"

using namespace microdl;

namespace {

// Adds a dataset when the text has none, so validation reaches other keys.
ExperimentConfig parse(const std::string& text) {
  const bool has_data = text.find("dataset.") != std::string::npos;
  std::istringstream in(has_data ? text : text + "dataset.0.name = d\n");
  return parse_config(in, "test.conf");
}

std::string dump(const ExperimentConfig& cfg) {
  std::ostringstream out;
  write_config(out, cfg);
  return out.str();
}

}  // namespace

TEST_CASE("presets") {
  ExperimentConfig cfg;
  apply_preset(cfg, "image");
  CHECK(cfg.layers == 17);
  CHECK(cfg.training.eps == 1e-4);
  CHECK(cfg.training.alpha == 0.3);
  apply_preset(cfg, "tabular");
  CHECK(cfg.layers == 6);
  CHECK(cfg.training.eps == 1e-8);
  apply_preset(cfg, "synthetic");
  CHECK(cfg.layers == 3);
  CHECK(cfg.hidden_dims.empty());
  CHECK_THROWS_AS(apply_preset(cfg, "other"), ConfigError);
}

TEST_CASE("parse a full config") {
  const ExperimentConfig cfg = parse(
      "\xEF\xBB\xBF# comment line\n"
      "layers = 6   # overridden below by nothing\n"
      "preset = tabular\n"
      "eps = 0.01\n"
      "seed = 42\n"
      "repeats = 4\n"
      "methods = Micro-DL, raw-features\n"
      "alpha_sweep = 0.1,0.5\n"
      "friedman = true\n"
      "sigma = 1.5\n"
      "mode = paper-literal\n"
      "scaling = paper-literal\n"
      "dataset.0.name = iris\n"
      "dataset.0.source = csv:data/iris.csv\n"
      "dataset.0.label_column = species\n"
      "dataset.0.sample_n = 50\n"
      "dataset.1.name = blobs\n"
      "dataset.1.k = 4\n"
      "dataset.1.seed = 9\n"
      "dataset.1.standardize = false\n");
  CHECK(cfg.layers == 6);
  CHECK(cfg.training.eps == 0.01);
  CHECK(cfg.seed == 42);
  CHECK(cfg.repeats == 4);
  CHECK(cfg.methods == std::vector<std::string>{"Micro-DL", "raw-features"});
  CHECK(cfg.alpha_sweep == std::vector<double>{0.1, 0.5});
  CHECK(cfg.friedman);
  CHECK(cfg.sigma == 1.5);
  CHECK(cfg.training.gradient_mode == GradientMode::kPaperLiteral);
  CHECK(cfg.training.spi_scaling == SpiScaling::kPaperLiteral);
  REQUIRE(cfg.datasets.size() == 2);
  CHECK(cfg.datasets[0].source == "csv:data/iris.csv");
  CHECK(cfg.datasets[0].label_column == "species");
  CHECK(cfg.datasets[0].sample_n == 50);
  CHECK(cfg.datasets[1].k == 4);
  CHECK(cfg.datasets[1].seed == 9u);
  CHECK(!cfg.datasets[1].standardize);
}

TEST_CASE("preset applies before other keys regardless of order") {
  const ExperimentConfig cfg = parse("eps = 0.5\npreset = image\n");
  CHECK(cfg.training.eps == 0.5);
  CHECK(cfg.layers == 17);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("seed = 1\nseed = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse("no equals sign\n"), ConfigError);
  CHECK_THROWS_AS(parse("alpha = 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse("alpha_sweep = 0.0,0.5\n"), ConfigError);
  CHECK_THROWS_AS(parse("repeats = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse("methods = Micro-DL,kmeans\n"), ConfigError);
  CHECK_THROWS_AS(parse("layers = three\n"), ConfigError);
  CHECK_THROWS_AS(parse("mode = sideways\n"), ConfigError);
  CHECK_THROWS_AS(parse("dataset.x.name = a\n"), ConfigError);
  try {
    parse("seed = 1\n\nseed = 2\n");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("test.conf:3") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/nonexistent/file.conf"), ConfigError);
  std::istringstream empty("seed = 1\n");
  CHECK_THROWS_AS(parse_config(empty), ConfigError);
}

TEST_CASE("write_config round-trips") {
  ExperimentConfig cfg = parse(
      "preset = synthetic\nseed = 7\nrepeats = 2\nalpha = 0.45\nhidden_dims = 8,4,2\n"
      "alpha_sweep = 0.2,0.4\nsigma = auto\nkmeans_restarts = 5\ninit_std = 0.02\n"
      "gaussian_noise = true\n"
      "dataset.0.name = a\ndataset.0.separation = 2.5\ndataset.0.dim = 3\n"
      "dataset.1.name = b\ndataset.1.source = csv:x.csv\n");
  const std::string text = dump(cfg);
  const ExperimentConfig back = parse(text);
  CHECK(dump(back) == text);
  CHECK(back.training.alpha == 0.45);
  CHECK(back.hidden_dims == std::vector<Eigen::Index>{8, 4, 2});
  CHECK(!back.sigma.has_value());
  CHECK(back.kmeans_restarts == 5);
  CHECK(back.datasets[0].separation == 2.5);
}

TEST_CASE("stack spec follows the config") {
  ExperimentConfig cfg = parse("preset = synthetic\nlayers = 4\n");
  const StackSpec micro = cfg.stack_spec(true, 11);
  CHECK(micro.layer_count == 4);
  CHECK(micro.micro_enabled);
  CHECK(micro.seed == 11);
  CHECK(micro.layer_configs.at(0).alpha == 0.3);
  const StackSpec plain = cfg.stack_spec(false, 11);
  CHECK(!plain.micro_enabled);
}
