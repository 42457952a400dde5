#include "gsbm/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <regex>
#include <set>
#include <sstream>

#include "CLI11.hpp"

namespace gsbm {

namespace {

const std::set<std::string, std::less<>> kHyperKeys = {
    "beta_a", "beta_b", "gamma_shape", "gamma_rate",
    "mu_mean", "mu_sd", "prec_shape", "prec_rate"};

const std::set<std::string, std::less<>> kRunKeys = {
    "model", "gamma", "delta", "sigma_u", "rw_sd", "nu", "iterations", "burn_in",
    "chains", "seed", "network", "directed", "self_loops", "init", "out_dir", "k_max"};

const std::set<std::string, std::less<>> kGenerateKeys = {"sizes", "theta"};

std::string scalar(const ConfigMap& cfg, std::string_view key) {
  const auto it = cfg.find(key);
  if (it->second.size() != 1)
    throw ConfigError("'" + std::string(key) + "' must be a single value");
  return it->second.front();
}

double number(const ConfigMap& cfg, std::string_view key) {
  const std::string s = scalar(cfg, key);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("'" + std::string(key) + "' must be a finite number, got '" + s + "'");
  return v;
}

std::uint64_t count(std::string_view key, const std::string& s) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ConfigError("'" + std::string(key) + "' must be a non-negative integer, got '" +
                      s + "'");
  return v;
}

std::uint64_t count(const ConfigMap& cfg, std::string_view key) {
  return count(key, scalar(cfg, key));
}

bool boolean(const ConfigMap& cfg, std::string_view key) {
  const std::string s = scalar(cfg, key);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("'" + std::string(key) + "' must be true or false, got '" + s + "'");
}

bool has(const ConfigMap& cfg, std::string_view key) { return cfg.contains(key); }

void require(const ConfigMap& cfg, std::string_view key) {
  if (!has(cfg, key)) throw ConfigError("missing required key '" + std::string(key) + "'");
}

void reject_unknown(const ConfigMap& cfg) {
  for (const auto& [key, _] : cfg)
    if (!kHyperKeys.contains(key) && !kRunKeys.contains(key) && !kGenerateKeys.contains(key))
      throw ConfigError("unknown configuration key '" + key + "'");
}

Hyperparameters hyper_from(const ConfigMap& cfg) {
  Hyperparameters h;
  for (const auto& key : kHyperKeys)
    if (has(cfg, key)) h[key] = number(cfg, key);
  return h;
}

void check_model(const std::string& name, const Hyperparameters& hyper) {
  try {
    (void)make_edge_model(name, hyper);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

ConfigMap parse_config(std::istream& in) {
  const std::string text(std::istreambuf_iterator<char>(in), {});
  // The TOML reader folds a repeated key into one array; catch it first.
  static const std::regex key_line(R"(^\s*([A-Za-z0-9_\-]+)\s*=)");
  std::set<std::string> seen;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    std::smatch m;
    if (std::regex_search(line, m, key_line) && !seen.insert(m[1]).second)
      throw ConfigError("duplicate configuration key '" + m[1].str() + "'");
  }
  std::istringstream body(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(body);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("cannot parse configuration: ") + e.what());
  }
  ConfigMap out;
  for (const auto& item : items) {
    // Section open/close markers.
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty())
      throw ConfigError("configuration sections are not supported ('" + item.fullname() + "')");
    if (!out.emplace(item.name, item.inputs).second)
      throw ConfigError("duplicate configuration key '" + item.name + "'");
  }
  return out;
}

ConfigMap read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file " + path.string());
  return parse_config(in);
}

void RunConfig::validate() const {
  check_model(model, hyper);
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (chains == 0) throw ConfigError("chains must be at least 1");
  if (init.empty()) throw ConfigError("init needs at least one mode");
  try {
    sampler.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig run_config_from(const ConfigMap& cfg) {
  reject_unknown(cfg);
  for (auto key : {"model", "gamma", "delta"}) require(cfg, key);
  RunConfig rc;
  rc.model = scalar(cfg, "model");
  rc.hyper = hyper_from(cfg);
  rc.gamma = number(cfg, "gamma");
  rc.delta = number(cfg, "delta");
  if (has(cfg, "sigma_u")) rc.sampler.sigma_u = number(cfg, "sigma_u");
  if (has(cfg, "rw_sd")) rc.sampler.rw_sd = number(cfg, "rw_sd");
  if (has(cfg, "nu")) rc.sampler.nu = number(cfg, "nu");
  if (has(cfg, "iterations")) rc.sampler.iterations = count(cfg, "iterations");
  if (has(cfg, "burn_in")) rc.sampler.burn_in = count(cfg, "burn_in");
  else rc.sampler.burn_in = rc.sampler.iterations / 2;
  if (has(cfg, "seed")) rc.sampler.seed = count(cfg, "seed");
  if (has(cfg, "chains")) rc.chains = count(cfg, "chains");
  if (has(cfg, "network")) rc.network = scalar(cfg, "network");
  if (has(cfg, "directed")) rc.directed = boolean(cfg, "directed");
  if (has(cfg, "self_loops")) rc.self_loops = boolean(cfg, "self_loops");
  if (has(cfg, "init")) {
    rc.init.clear();
    for (const auto& s : cfg.find("init")->second) {
      try {
        rc.init.push_back(init_mode_from_string(s));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (has(cfg, "out_dir")) rc.out_dir = scalar(cfg, "out_dir");
  if (has(cfg, "k_max")) rc.k_max = count(cfg, "k_max");
  rc.validate();
  return rc;
}

GenerateSpec generate_spec_from(const ConfigMap& cfg) {
  reject_unknown(cfg);
  for (auto key : {"model", "sizes", "theta"}) require(cfg, key);
  GenerateSpec spec;
  spec.model = scalar(cfg, "model");
  spec.hyper = hyper_from(cfg);
  check_model(spec.model, spec.hyper);
  for (const auto& s : cfg.find("sizes")->second) {
    spec.sizes.push_back(count("sizes", s));
    if (spec.sizes.back() == 0) throw ConfigError("block sizes must be positive");
  }
  if (spec.sizes.empty()) throw ConfigError("sizes needs at least one block");

  const std::size_t p = make_edge_model(spec.model, spec.hyper)->dim();
  const auto& flat = cfg.find("theta")->second;
  if (flat.size() != (spec.sizes.size() + 1) * p)
    throw ConfigError("theta needs " + std::to_string((spec.sizes.size() + 1) * p) +
                      " values (theta0 then one row per block), got " +
                      std::to_string(flat.size()));
  for (std::size_t r = 0; r <= spec.sizes.size(); ++r) {
    ParamVec row;
    for (std::size_t c = 0; c < p; ++c) {
      const ConfigMap one{{"theta", {flat[r * p + c]}}};
      row.push_back(number(one, "theta"));
    }
    spec.theta.push_back(std::move(row));
  }
  if (has(cfg, "directed")) spec.directed = boolean(cfg, "directed");
  if (has(cfg, "self_loops")) spec.self_loops = boolean(cfg, "self_loops");
  if (has(cfg, "seed")) spec.seed = count(cfg, "seed");
  return spec;
}

}  // namespace gsbm
