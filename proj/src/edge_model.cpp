#include "gsbm/edge_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gsbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// x * log(y) with the 0 * log(0) = 0 convention.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }
double xlog1py(double x, double y) { return x == 0.0 ? 0.0 : x * std::log1p(y); }

double beta_log_density(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0)) return kNegInf;
  return xlogy(a - 1.0, x) + xlog1py(b - 1.0, -x) + std::lgamma(a + b) -
         std::lgamma(a) - std::lgamma(b);
}

double gamma_log_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) -
         rate * x;
}

double draw_gamma(double shape, double rate, Rng& rng) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double draw_beta(double a, double b, Rng& rng) {
  const double x = draw_gamma(a, 1.0, rng);
  const double y = draw_gamma(b, 1.0, rng);
  return x / (x + y);
}

bool is_count(double w) { return w >= 0.0 && w == std::floor(w); }

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("hyperparameter ") + what +
                                " must be positive");
}

double lookup(const Hyperparameters& h, std::string_view key, double fallback) {
  auto it = h.find(key);
  return it == h.end() ? fallback : it->second;
}

class BernoulliModel final : public EdgeModel {
 public:
  BernoulliModel(double a, double b)
      : a_(a), b_(b), mf_({Transform::logit}) {
    require_positive(a, "beta_a");
    require_positive(b, "beta_b");
  }
  std::string_view name() const override { return "bernoulli"; }
  const MatchingFunction& matching() const override { return mf_; }
  std::vector<std::string> component_names() const override { return {"p"}; }
  bool discrete() const override { return true; }
  Hyperparameters hyperparameters() const override {
    return {{"beta_a", a_}, {"beta_b", b_}};
  }
  bool in_space(std::span<const double> t) const override {
    return t.size() == 1 && t[0] >= 0.0 && t[0] <= 1.0;
  }
  double log_density(double w, std::span<const double> t) const override {
    require_space(t);
    if (w == 1.0) return std::log(t[0]);
    if (w == 0.0) return std::log1p(-t[0]);
    return kNegInf;
  }
  double sample(std::span<const double> t, Rng& rng) const override {
    require_space(t);
    return std::bernoulli_distribution(t[0])(rng) ? 1.0 : 0.0;
  }
  double prior_log_density(std::span<const double> t) const override {
    if (!in_space(t)) return kNegInf;
    return beta_log_density(t[0], a_, b_);
  }
  ParamVec prior_sample(Rng& rng) const override { return {draw_beta(a_, b_, rng)}; }

 private:
  double a_, b_;
  MatchingFunction mf_;
};

class PoissonModel final : public EdgeModel {
 public:
  PoissonModel(double shape, double rate)
      : shape_(shape), rate_(rate), mf_({Transform::log}) {
    require_positive(shape, "gamma_shape");
    require_positive(rate, "gamma_rate");
  }
  std::string_view name() const override { return "poisson"; }
  const MatchingFunction& matching() const override { return mf_; }
  std::vector<std::string> component_names() const override { return {"lambda"}; }
  bool discrete() const override { return true; }
  Hyperparameters hyperparameters() const override {
    return {{"gamma_shape", shape_}, {"gamma_rate", rate_}};
  }
  bool in_space(std::span<const double> t) const override {
    return t.size() == 1 && t[0] >= 0.0 && std::isfinite(t[0]);
  }
  double log_density(double w, std::span<const double> t) const override {
    require_space(t);
    if (!is_count(w)) return kNegInf;
    return xlogy(w, t[0]) - t[0] - std::lgamma(w + 1.0);
  }
  double sample(std::span<const double> t, Rng& rng) const override {
    require_space(t);
    if (t[0] == 0.0) return 0.0;
    return static_cast<double>(std::poisson_distribution<long long>(t[0])(rng));
  }
  double prior_log_density(std::span<const double> t) const override {
    if (!in_space(t)) return kNegInf;
    return gamma_log_density(t[0], shape_, rate_);
  }
  ParamVec prior_sample(Rng& rng) const override {
    return {draw_gamma(shape_, rate_, rng)};
  }

 private:
  double shape_, rate_;
  MatchingFunction mf_;
};

// Generalised negative binomial with real-valued r:
//   P(X = x) = Gamma(x + r) / (Gamma(r) x!) p^r (1 - p)^x.
class NegBinModel final : public EdgeModel {
 public:
  NegBinModel(double a, double b, double shape, double rate)
      : a_(a), b_(b), shape_(shape), rate_(rate),
        mf_({Transform::logit, Transform::log}) {
    require_positive(a, "beta_a");
    require_positive(b, "beta_b");
    require_positive(shape, "gamma_shape");
    require_positive(rate, "gamma_rate");
  }
  std::string_view name() const override { return "negbin"; }
  const MatchingFunction& matching() const override { return mf_; }
  std::vector<std::string> component_names() const override { return {"p", "r"}; }
  bool discrete() const override { return true; }
  Hyperparameters hyperparameters() const override {
    return {{"beta_a", a_}, {"beta_b", b_}, {"gamma_shape", shape_},
            {"gamma_rate", rate_}};
  }
  bool in_space(std::span<const double> t) const override {
    return t.size() == 2 && t[0] > 0.0 && t[0] <= 1.0 && t[1] > 0.0 &&
           std::isfinite(t[1]);
  }
  double log_density(double w, std::span<const double> t) const override {
    require_space(t);
    if (!is_count(w)) return kNegInf;
    const double p = t[0], r = t[1];
    return std::lgamma(w + r) - std::lgamma(r) - std::lgamma(w + 1.0) +
           r * std::log(p) + xlog1py(w, -p);
  }
  double sample(std::span<const double> t, Rng& rng) const override {
    require_space(t);
    const double p = t[0], r = t[1];
    if (p == 1.0) return 0.0;
    // Gamma-Poisson mixture handles non-integer r.
    const double lambda = draw_gamma(r, p / (1.0 - p), rng);
    if (lambda <= 0.0) return 0.0;
    return static_cast<double>(std::poisson_distribution<long long>(lambda)(rng));
  }
  double prior_log_density(std::span<const double> t) const override {
    if (!in_space(t)) return kNegInf;
    return beta_log_density(t[0], a_, b_) + gamma_log_density(t[1], shape_, rate_);
  }
  ParamVec prior_sample(Rng& rng) const override {
    const double p = draw_beta(a_, b_, rng);
    const double r = draw_gamma(shape_, rate_, rng);
    return {p, r};
  }

 private:
  double a_, b_, shape_, rate_;
  MatchingFunction mf_;
};

// theta = (mu, sigma); mu ~ Normal(mu_mean, mu_sd^2), 1/sigma^2 ~ Gamma.
class NormalModel final : public EdgeModel {
 public:
  NormalModel(double mu_mean, double mu_sd, double prec_shape, double prec_rate)
      : mu_mean_(mu_mean), mu_sd_(mu_sd), prec_shape_(prec_shape),
        prec_rate_(prec_rate), mf_({Transform::identity, Transform::log}) {
    if (!std::isfinite(mu_mean)) throw std::invalid_argument("mu_mean must be finite");
    require_positive(mu_sd, "mu_sd");
    require_positive(prec_shape, "prec_shape");
    require_positive(prec_rate, "prec_rate");
  }
  std::string_view name() const override { return "normal"; }
  const MatchingFunction& matching() const override { return mf_; }
  std::vector<std::string> component_names() const override {
    return {"mu", "sigma"};
  }
  bool discrete() const override { return false; }
  Hyperparameters hyperparameters() const override {
    return {{"mu_mean", mu_mean_}, {"mu_sd", mu_sd_}, {"prec_shape", prec_shape_},
            {"prec_rate", prec_rate_}};
  }
  bool in_space(std::span<const double> t) const override {
    return t.size() == 2 && std::isfinite(t[0]) && t[1] > 0.0 &&
           std::isfinite(t[1]);
  }
  double log_density(double w, std::span<const double> t) const override {
    require_space(t);
    const double z = (w - t[0]) / t[1];
    return -0.5 * std::log(2.0 * std::numbers::pi) - std::log(t[1]) - 0.5 * z * z;
  }
  double sample(std::span<const double> t, Rng& rng) const override {
    require_space(t);
    return std::normal_distribution<double>(t[0], t[1])(rng);
  }
  double prior_log_density(std::span<const double> t) const override {
    if (!in_space(t)) return kNegInf;
    const double z = (t[0] - mu_mean_) / mu_sd_;
    const double lp_mu =
        -0.5 * std::log(2.0 * std::numbers::pi) - std::log(mu_sd_) - 0.5 * z * z;
    // Density of sigma induced by tau = sigma^-2 ~ Gamma(shape, rate).
    const double s = t[1];
    const double tau = 1.0 / (s * s);
    const double lp_sigma = prec_shape_ * std::log(prec_rate_) -
                            std::lgamma(prec_shape_) -
                            (2.0 * prec_shape_ + 1.0) * std::log(s) -
                            prec_rate_ * tau + std::log(2.0);
    return lp_mu + lp_sigma;
  }
  ParamVec prior_sample(Rng& rng) const override {
    const double mu = std::normal_distribution<double>(mu_mean_, mu_sd_)(rng);
    const double tau = draw_gamma(prec_shape_, prec_rate_, rng);
    return {mu, 1.0 / std::sqrt(tau)};
  }

 private:
  double mu_mean_, mu_sd_, prec_shape_, prec_rate_;
  MatchingFunction mf_;
};

}  // namespace

// Matching -----------------------------------------------------------------

bool interior(Transform t, double x) {
  switch (t) {
    case Transform::identity: return std::isfinite(x);
    case Transform::log: return x > 0.0 && std::isfinite(x);
    case Transform::logit: return x > 0.0 && x < 1.0;
  }
  return false;
}

double match_value(Transform t, double x) {
  if (!interior(t, x)) throw std::domain_error("matching function: value on or outside domain boundary");
  switch (t) {
    case Transform::identity: return x;
    case Transform::log: return std::log(x);
    case Transform::logit: return std::log(x) - std::log1p(-x);
  }
  return x;
}

double unmatch_value(Transform t, double y) {
  switch (t) {
    case Transform::identity: return y;
    case Transform::log: return std::exp(y);
    case Transform::logit:
      if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
      {
        const double e = std::exp(y);
        return e / (1.0 + e);
      }
  }
  return y;
}

double log_derivative_value(Transform t, double x) {
  if (!interior(t, x)) throw std::domain_error("matching derivative: value on or outside domain boundary");
  switch (t) {
    case Transform::identity: return 0.0;
    case Transform::log: return -std::log(x);
    case Transform::logit: return -std::log(x) - std::log1p(-x);
  }
  return 0.0;
}

ParamVec MatchingFunction::match(std::span<const double> theta) const {
  if (theta.size() != dim()) throw std::invalid_argument("matching: dimension mismatch");
  ParamVec out(dim());
  for (std::size_t c = 0; c < dim(); ++c) out[c] = match_value(components_[c], theta[c]);
  return out;
}

ParamVec MatchingFunction::unmatch(std::span<const double> y) const {
  if (y.size() != dim()) throw std::invalid_argument("matching: dimension mismatch");
  ParamVec out(dim());
  for (std::size_t c = 0; c < dim(); ++c) out[c] = unmatch_value(components_[c], y[c]);
  return out;
}

double MatchingFunction::log_derivative(std::span<const double> theta) const {
  if (theta.size() != dim()) throw std::invalid_argument("matching: dimension mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < dim(); ++c)
    s += log_derivative_value(components_[c], theta[c]);
  return s;
}

bool MatchingFunction::interior(std::span<const double> theta) const {
  if (theta.size() != dim()) return false;
  for (std::size_t c = 0; c < dim(); ++c)
    if (!gsbm::interior(components_[c], theta[c])) return false;
  return true;
}

void EdgeModel::require_space(std::span<const double> theta) const {
  if (!in_space(theta))
    throw std::domain_error(std::string(name()) + ": parameter outside its space");
}

// Factories ----------------------------------------------------------------

std::unique_ptr<EdgeModel> make_bernoulli(double a, double b) {
  return std::make_unique<BernoulliModel>(a, b);
}
std::unique_ptr<EdgeModel> make_poisson(double shape, double rate) {
  return std::make_unique<PoissonModel>(shape, rate);
}
std::unique_ptr<EdgeModel> make_negbin(double a, double b, double shape,
                                       double rate) {
  return std::make_unique<NegBinModel>(a, b, shape, rate);
}
std::unique_ptr<EdgeModel> make_normal(double mu_mean, double mu_sd,
                                       double prec_shape, double prec_rate) {
  return std::make_unique<NormalModel>(mu_mean, mu_sd, prec_shape, prec_rate);
}

std::unique_ptr<EdgeModel> make_edge_model(std::string_view name,
                                           const Hyperparameters& h) {
  if (name == "bernoulli")
    return make_bernoulli(lookup(h, "beta_a", 1.0), lookup(h, "beta_b", 1.0));
  if (name == "poisson")
    return make_poisson(lookup(h, "gamma_shape", 1.0), lookup(h, "gamma_rate", 1.0));
  if (name == "negbin")
    return make_negbin(lookup(h, "beta_a", 1.0), lookup(h, "beta_b", 1.0),
                       lookup(h, "gamma_shape", 1.0), lookup(h, "gamma_rate", 1.0));
  if (name == "normal")
    return make_normal(lookup(h, "mu_mean", 0.0), lookup(h, "mu_sd", 10.0),
                       lookup(h, "prec_shape", 1.0), lookup(h, "prec_rate", 1.0));
  throw std::invalid_argument("unknown edge model '" + std::string(name) + "'");
}

// Likelihoods --------------------------------------------------------------

double log_likelihood(const Network& net, const BlockAssignment& z,
                      const BlockParams& params, const EdgeModel& model) {
  double total = 0.0;
  for_each_edge(net, [&](std::size_t i, std::size_t j, double w) {
    total += model.log_density(w, theta_for_edge(z, params, i, j));
  });
  return total;
}

double log_likelihood_node(const Network& net, const BlockAssignment& z,
                           const BlockParams& params, const EdgeModel& model,
                           std::size_t i, std::size_t candidate) {
  const std::size_t n = net.size();
  std::span<const double> own = params.theta.at(candidate);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (j == i) continue;
    std::span<const double> t = z.label(j) == candidate ? own : std::span<const double>(params.theta0);
    total += model.log_density(net.weight(i, j), t);
    if (net.directed()) total += model.log_density(net.weight(j, i), t);
  }
  if (net.self_loops()) total += model.log_density(net.weight(i, i), own);
  return total;
}

double within_block_log_likelihood(const Network& net,
                                   std::span<const std::size_t> members,
                                   std::span<const double> theta,
                                   const EdgeModel& model) {
  double total = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) {
    const std::size_t i = members[a];
    if (net.self_loops()) total += model.log_density(net.weight(i, i), theta);
    for (std::size_t b = a + 1; b < members.size(); ++b) {
      const std::size_t j = members[b];
      total += model.log_density(net.weight(i, j), theta);
      if (net.directed()) total += model.log_density(net.weight(j, i), theta);
    }
  }
  return total;
}

double between_block_log_likelihood(const Network& net, const BlockAssignment& z,
                                    std::span<const double> theta0,
                                    const EdgeModel& model) {
  double total = 0.0;
  for_each_edge(net, [&](std::size_t i, std::size_t j, double w) {
    if (z.label(i) != z.label(j)) total += model.log_density(w, theta0);
  });
  return total;
}

double touching_log_likelihood(const Network& net, const BlockAssignment& z,
                               const BlockParams& params, const EdgeModel& model,
                               const std::vector<char>& touched) {
  double total = 0.0;
  for_each_edge(net, [&](std::size_t i, std::size_t j, double w) {
    if (touched[i] || touched[j])
      total += model.log_density(w, theta_for_edge(z, params, i, j));
  });
  return total;
}

}  // namespace gsbm
