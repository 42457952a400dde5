#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "gsbm/edge_model.hpp"
#include "gsbm/network.hpp"

namespace gsbm::testing {

// One-parameter model with identity matching and a constant density, so the
// data carry no information. The prior is Normal(0, 1), or flat (log
// density 0) when `flat_prior` is set.
class FlatModel : public EdgeModel {
 public:
  explicit FlatModel(bool flat_prior = false)
      : flat_(flat_prior), mf_({Transform::identity}) {}

  std::string_view name() const override { return "flat"; }
  const MatchingFunction& matching() const override { return mf_; }
  std::vector<std::string> component_names() const override { return {"x"}; }
  bool discrete() const override { return false; }
  Hyperparameters hyperparameters() const override { return {}; }
  bool in_space(std::span<const double> t) const override {
    return t.size() == 1 && std::isfinite(t[0]);
  }
  double log_density(double, std::span<const double> t) const override {
    require_space(t);
    return 0.0;
  }
  double sample(std::span<const double>, Rng&) const override { return 0.0; }
  double prior_log_density(std::span<const double> t) const override {
    if (flat_) return 0.0;
    return -0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * t[0] * t[0];
  }
  ParamVec prior_sample(Rng& rng) const override {
    return {std::normal_distribution<double>(0.0, 1.0)(rng)};
  }

 private:
  bool flat_;
  MatchingFunction mf_;
};

// Probabilities whose logit exceeds this in magnitude sit so close to 0 or 1
// that a double no longer carries them through a split/merge round trip to
// 1e-12 (the error grows like 1e-16 e^|logit|).
constexpr double kLogitConditioned = 8.0;

inline bool conditioned(const MatchingFunction& mf, std::span<const double> theta) {
  for (std::size_t c = 0; c < theta.size(); ++c)
    if (mf.components()[c] == Transform::logit &&
        std::abs(match_value(Transform::logit, theta[c])) > kLogitConditioned)
      return false;
  return true;
}

inline Network from_edges(std::size_t n,
                          std::initializer_list<std::pair<std::size_t, std::size_t>> edges,
                          bool directed = false, bool self_loops = false) {
  Network net = Network::zeros(n, directed, self_loops);
  for (auto [i, j] : edges) net.set_weight(i, j, 1.0);
  return net;
}

inline BlockParams params(ParamVec theta0, std::vector<ParamVec> theta) {
  return BlockParams{std::move(theta0), std::move(theta)};
}

}  // namespace gsbm::testing
