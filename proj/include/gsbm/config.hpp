#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gsbm/edge_model.hpp"
#include "gsbm/sampler.hpp"

namespace gsbm {

/// Raised for missing, unknown or out-of-range configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key = value settings. Arrays are written `[a, b, c]`.
using ConfigMap = std::map<std::string, std::vector<std::string>, std::less<>>;

ConfigMap parse_config(std::istream& in);
ConfigMap read_config(const std::filesystem::path& path);

struct RunConfig {
  std::string model;
  Hyperparameters hyper;
  double gamma = 1.0;
  double delta = 1.0;
  SamplerConfig sampler;
  std::size_t chains = 1;
  std::optional<std::filesystem::path> network;
  std::optional<bool> directed;
  std::optional<bool> self_loops;
  /// Chain c starts from init[c % init.size()].
  std::vector<InitMode> init{InitMode::prior};
  std::filesystem::path out_dir = ".";
  /// Largest K enumerated by the exact oracle; 0 means N.
  std::size_t k_max = 0;

  /// Throws ConfigError on out-of-range settings or an unknown model.
  void validate() const;
};

/// Requires `model`, `gamma` and `delta`; everything else has a default.
/// Keys that belong to `generate` are accepted and ignored.
RunConfig run_config_from(const ConfigMap& cfg);

/// Synthetic network recipe. theta[0] is theta0, theta[k] the k-th block.
struct GenerateSpec {
  std::string model;
  Hyperparameters hyper;
  std::vector<std::size_t> sizes;
  std::vector<ParamVec> theta;
  bool directed = false;
  bool self_loops = false;
  std::uint64_t seed = 1;
};

/// Requires `model`, `sizes` and `theta` (rows flattened, theta0 first).
GenerateSpec generate_spec_from(const ConfigMap& cfg);

}  // namespace gsbm
