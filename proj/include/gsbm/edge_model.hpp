#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsbm/network.hpp"

namespace gsbm {

/// Componentwise bijection from a constrained parameter space onto the real
/// line, used to keep merged and split parameters in-space.
enum class Transform { identity, log, logit };

double match_value(Transform t, double x);
double unmatch_value(Transform t, double y);
/// log m'(x); m' is strictly positive on the interior of the domain.
double log_derivative_value(Transform t, double x);
/// True when x lies strictly inside the domain of t.
bool interior(Transform t, double x);

class MatchingFunction {
 public:
  MatchingFunction() = default;
  explicit MatchingFunction(std::vector<Transform> components)
      : components_(std::move(components)) {}

  std::size_t dim() const { return components_.size(); }
  const std::vector<Transform>& components() const { return components_; }

  ParamVec match(std::span<const double> theta) const;
  ParamVec unmatch(std::span<const double> y) const;
  /// Sum over components of log m'(theta_c).
  double log_derivative(std::span<const double> theta) const;
  bool interior(std::span<const double> theta) const;

 private:
  std::vector<Transform> components_;
};

using Hyperparameters = std::map<std::string, double, std::less<>>;

/// Edge-weight family G together with its parameter prior G0 and matching
/// function. Instances are immutable and safe to share between chains.
class EdgeModel {
 public:
  virtual ~EdgeModel() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t dim() const { return matching().dim(); }
  virtual const MatchingFunction& matching() const = 0;
  virtual std::vector<std::string> component_names() const = 0;
  virtual bool discrete() const = 0;
  virtual Hyperparameters hyperparameters() const = 0;

  /// True when theta is a legal parameter (boundaries included where the
  /// family allows them, e.g. Bernoulli p in [0, 1]).
  virtual bool in_space(std::span<const double> theta) const = 0;

  /// log g(w | theta). Returns -inf for weights outside the support and
  /// throws std::domain_error for theta outside the parameter space.
  virtual double log_density(double w, std::span<const double> theta) const = 0;
  virtual double sample(std::span<const double> theta, Rng& rng) const = 0;

  /// log G0(theta); -inf outside the parameter space.
  virtual double prior_log_density(std::span<const double> theta) const = 0;
  virtual ParamVec prior_sample(Rng& rng) const = 0;

 protected:
  void require_space(std::span<const double> theta) const;
};

/// Known names: "bernoulli", "poisson", "negbin", "normal". Hyperparameter
/// keys: beta_a, beta_b (probabilities); gamma_shape, gamma_rate (rates and
/// the negbin r); mu_mean, mu_sd, prec_shape, prec_rate (normal). Missing
/// keys fall back to 1 (0 for mu_mean, 10 for mu_sd).
std::unique_ptr<EdgeModel> make_edge_model(std::string_view name,
                                           const Hyperparameters& hyper = {});

std::unique_ptr<EdgeModel> make_bernoulli(double beta_a = 1.0,
                                          double beta_b = 1.0);
std::unique_ptr<EdgeModel> make_poisson(double gamma_shape = 1.0,
                                        double gamma_rate = 1.0);
std::unique_ptr<EdgeModel> make_negbin(double beta_a = 1.0, double beta_b = 1.0,
                                       double gamma_shape = 1.0,
                                       double gamma_rate = 1.0);
std::unique_ptr<EdgeModel> make_normal(double mu_mean = 0.0, double mu_sd = 10.0,
                                       double prec_shape = 1.0,
                                       double prec_rate = 1.0);

// Likelihood evaluations -------------------------------------------------

double log_likelihood(const Network& net, const BlockAssignment& z,
                      const BlockParams& params, const EdgeModel& model);

/// Sum of log-densities over the modelled edges incident to node i, with i
/// placed in candidate_block and every other node where z puts it.
double log_likelihood_node(const Network& net, const BlockAssignment& z,
                           const BlockParams& params, const EdgeModel& model,
                           std::size_t i, std::size_t candidate_block);

/// Edges with both ends in `members`, all under theta.
double within_block_log_likelihood(const Network& net,
                                   std::span<const std::size_t> members,
                                   std::span<const double> theta,
                                   const EdgeModel& model);

/// Edges whose ends sit in different blocks, all under theta0.
double between_block_log_likelihood(const Network& net, const BlockAssignment& z,
                                    std::span<const double> theta0,
                                    const EdgeModel& model);

/// Edges with at least one end flagged in `touched`, under z and params.
double touching_log_likelihood(const Network& net, const BlockAssignment& z,
                               const BlockParams& params, const EdgeModel& model,
                               const std::vector<char>& touched);

}  // namespace gsbm
