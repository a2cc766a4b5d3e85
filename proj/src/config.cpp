#include "microdl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "microdl/error.hpp"

namespace microdl {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a number");
  }
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("key '" + key + "': '" + v + "' is not a non-negative integer");
  }
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + v + "' is not a boolean");
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? "," : "") + items[i];
  return out;
}

template <typename F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

void set_dataset_value(ExperimentConfig& cfg, const std::string& key, const std::string& v) {
  // dataset.<index>.<field>
  const auto dot = key.find('.', 8);
  if (dot == std::string::npos) throw ConfigError("malformed dataset key '" + key + "'");
  const std::size_t idx = to_uint(key, key.substr(8, dot - 8));
  if (idx > 1000) throw ConfigError("dataset index too large in '" + key + "'");
  if (cfg.datasets.size() <= idx) cfg.datasets.resize(idx + 1);
  DatasetSpec& d = cfg.datasets[idx];
  const std::string field = key.substr(dot + 1);
  if (field == "name") {
    d.name = v;
  } else if (field == "source") {
    if (v != "blobs" && v.rfind("csv:", 0) != 0) {
      throw ConfigError("key '" + key + "': source must be 'blobs' or 'csv:<path>'");
    }
    d.source = v;
  } else if (field == "label_column") {
    d.label_column = v;
  } else if (field == "k") {
    d.k = static_cast<int>(to_uint(key, v));
  } else if (field == "per_cluster") {
    d.per_cluster = to_uint(key, v);
  } else if (field == "dim") {
    d.dim = static_cast<Eigen::Index>(to_uint(key, v));
  } else if (field == "separation") {
    d.separation = to_double(key, v);
  } else if (field == "seed") {
    d.seed = to_uint(key, v);
  } else if (field == "sample_n") {
    d.sample_n = to_uint(key, v);
  } else if (field == "standardize") {
    d.standardize = to_bool(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace

StackSpec ExperimentConfig::stack_spec(bool micro, std::uint64_t stack_seed) const {
  StackSpec s;
  s.layer_count = layers;
  s.hidden_dims = hidden_dims;
  s.layer_configs = {training};
  s.micro_enabled = micro;
  s.seed = stack_seed;
  return s;
}

void ExperimentConfig::validate() const {
  if (datasets.empty()) throw ConfigError("no datasets configured");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const DatasetSpec& d = datasets[i];
    const std::string where = "dataset." + std::to_string(i);
    if (d.name.empty()) throw ConfigError(where + ".name is missing");
    if (d.source == "blobs") {
      if (d.k < 2) throw ConfigError(where + ".k must be >= 2");
      if (d.dim < 1) throw ConfigError(where + ".dim must be >= 1");
      if (d.per_cluster < 1) throw ConfigError(where + ".per_cluster must be >= 1");
    }
  }
  if (methods.empty() && alpha_sweep.empty()) throw ConfigError("nothing to run: no methods");
  for (const auto& m : methods) {
    if (m != kMicroMethod && m != kPlainMethod && m != kRawMethod) {
      throw ConfigError("unknown method '" + m + "'");
    }
  }
  if (layers < 1) throw ConfigError("layers must be >= 1");
  if (!hidden_dims.empty() && hidden_dims.size() != layers) {
    throw ConfigError("hidden_dims needs one entry per layer");
  }
  if (repeats < 1) throw ConfigError("repeats must be >= 1");
  for (double a : alpha_sweep) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha_sweep values must lie in (0,1)");
  }
  if (sigma && !(*sigma > 0.0)) throw ConfigError("sigma must be > 0");
  if (kmeans_restarts < 1) throw ConfigError("kmeans_restarts must be >= 1");
  wrap("training", [&] {
    training.validate();
    return 0;
  });
}

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  cfg.training.alpha = 0.3;
  cfg.hidden_dims.clear();
  if (name == "synthetic") {
    cfg.layers = 3;
    cfg.training.eps = 0.2;
    cfg.training.epochs = 100;
    cfg.training.batch_size = 16;
  } else if (name == "image") {
    cfg.layers = 17;
    cfg.training.eps = 1e-4;
  } else if (name == "tabular") {
    cfg.layers = 6;
    cfg.training.eps = 1e-8;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected synthetic, image or tabular)");
  }
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& v) {
  TrainingConfig& t = cfg.training;
  if (key.rfind("dataset.", 0) == 0) {
    set_dataset_value(cfg, key, v);
  } else if (key == "preset") {
    apply_preset(cfg, v);
  } else if (key == "methods") {
    cfg.methods = split_list(v);
  } else if (key == "layers") {
    cfg.layers = to_uint(key, v);
  } else if (key == "hidden_dims") {
    cfg.hidden_dims.clear();
    for (const auto& item : split_list(v)) {
      cfg.hidden_dims.push_back(static_cast<Eigen::Index>(to_uint(key, item)));
    }
  } else if (key == "alpha") {
    t.alpha = to_double(key, v);
  } else if (key == "eps") {
    t.eps = to_double(key, v);
  } else if (key == "epochs") {
    t.epochs = to_uint(key, v);
  } else if (key == "batch_size") {
    t.batch_size = to_uint(key, v);
  } else if (key == "mode") {
    t.gradient_mode = wrap(key, [&] { return gradient_mode_from_string(v); });
  } else if (key == "scaling") {
    t.spi_scaling = wrap(key, [&] { return spi_scaling_from_string(v); });
  } else if (key == "gaussian_noise") {
    t.gaussian_noise = to_bool(key, v);
  } else if (key == "init_std") {
    t.init_std = to_double(key, v);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, v);
  } else if (key == "repeats") {
    cfg.repeats = to_uint(key, v);
  } else if (key == "alpha_sweep") {
    cfg.alpha_sweep.clear();
    for (const auto& item : split_list(v)) cfg.alpha_sweep.push_back(to_double(key, item));
  } else if (key == "friedman") {
    cfg.friedman = to_bool(key, v);
  } else if (key == "sigma") {
    if (v == "auto") {
      cfg.sigma.reset();
    } else {
      cfg.sigma = to_double(key, v);
    }
  } else if (key == "kmeans_restarts") {
    cfg.kmeans_restarts = static_cast<int>(to_uint(key, v));
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::string& origin) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = origin + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (!kv.emplace(key, value).second) throw ConfigError(where + ": repeated key '" + key + "'");
  }
  return kv;
}

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
  auto kv = parse_key_values(in, origin);
  ExperimentConfig cfg;
  // The preset only supplies defaults, so it goes first regardless of position.
  if (auto it = kv.find("preset"); it != kv.end()) {
    apply_preset(cfg, it->second);
    kv.erase(it);
  }
  for (const auto& [key, value] : kv) set_config_value(cfg, key, value);
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

void write_config(std::ostream& out, const ExperimentConfig& cfg) {
  const TrainingConfig& t = cfg.training;
  out << "seed = " << cfg.seed << '\n';
  out << "repeats = " << cfg.repeats << '\n';
  out << "methods = " << join(cfg.methods) << '\n';
  out << "layers = " << cfg.layers << '\n';
  std::vector<std::string> dims;
  for (auto d : cfg.hidden_dims) dims.push_back(std::to_string(d));
  out << "hidden_dims = " << join(dims) << '\n';
  out << "alpha = " << format_double(t.alpha) << '\n';
  out << "eps = " << format_double(t.eps) << '\n';
  out << "epochs = " << t.epochs << '\n';
  out << "batch_size = " << t.batch_size << '\n';
  out << "mode = " << to_string(t.gradient_mode) << '\n';
  out << "scaling = " << to_string(t.spi_scaling) << '\n';
  out << "gaussian_noise = " << (t.gaussian_noise ? "true" : "false") << '\n';
  out << "init_std = " << format_double(t.init_std) << '\n';
  std::vector<std::string> sweep;
  for (double a : cfg.alpha_sweep) sweep.push_back(format_double(a));
  out << "alpha_sweep = " << join(sweep) << '\n';
  out << "friedman = " << (cfg.friedman ? "true" : "false") << '\n';
  out << "sigma = " << (cfg.sigma ? format_double(*cfg.sigma) : std::string("auto")) << '\n';
  out << "kmeans_restarts = " << cfg.kmeans_restarts << '\n';
  for (std::size_t i = 0; i < cfg.datasets.size(); ++i) {
    const DatasetSpec& d = cfg.datasets[i];
    const std::string p = "dataset." + std::to_string(i) + ".";
    out << p << "name = " << d.name << '\n';
    out << p << "source = " << d.source << '\n';
    out << p << "label_column = " << d.label_column << '\n';
    out << p << "k = " << d.k << '\n';
    out << p << "per_cluster = " << d.per_cluster << '\n';
    out << p << "dim = " << d.dim << '\n';
    out << p << "separation = " << format_double(d.separation) << '\n';
    if (d.seed) out << p << "seed = " << *d.seed << '\n';
    out << p << "sample_n = " << d.sample_n << '\n';
    out << p << "standardize = " << (d.standardize ? "true" : "false") << '\n';
  }
}

}  // namespace microdl
