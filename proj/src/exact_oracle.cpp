#include "gsbm/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace gsbm {

namespace {

struct EdgeStats {
  double count = 0.0;
  double sum = 0.0;
  double log_fact = 0.0;  // sum of lgamma(w + 1), Poisson only
};

double log_marginal(const ConjugateModel& m, const EdgeStats& s) {
  if (s.count == 0.0) return 0.0;
  if (m.family == ConjugateFamily::bernoulli_beta) {
    const double succ = s.sum, fail = s.count - s.sum;
    return std::lgamma(m.a + succ) + std::lgamma(m.b + fail) -
           std::lgamma(m.a + m.b + s.count) - std::lgamma(m.a) - std::lgamma(m.b) +
           std::lgamma(m.a + m.b);
  }
  return m.a * std::log(m.b) - std::lgamma(m.a) + std::lgamma(m.a + s.sum) -
         (m.a + s.sum) * std::log(m.b + s.count) - s.log_fact;
}

// Shifted-Poisson K prior plus symmetric Dirichlet-multinomial Z prior,
// written out independently of DmaPrior.
double log_dma(double gamma, double delta, std::size_t k,
               const std::vector<std::size_t>& sizes, std::size_t n) {
  const double kk = static_cast<double>(k);
  double lp = static_cast<double>(k - 1) * std::log(delta) - delta -
              std::lgamma(static_cast<double>(k));
  lp += std::lgamma(kk * gamma) - std::lgamma(kk * gamma + static_cast<double>(n));
  for (std::size_t s : sizes) lp += std::lgamma(gamma + static_cast<double>(s)) - std::lgamma(gamma);
  return lp;
}

void check_support(const Network& net, const ConjugateModel& m) {
  for_each_edge(net, [&](std::size_t, std::size_t, double w) {
    const bool ok = m.family == ConjugateFamily::bernoulli_beta
                        ? (w == 0.0 || w == 1.0)
                        : (w >= 0.0 && w == std::floor(w));
    if (!ok) throw DataError("edge weight outside the support of the oracle model");
  });
}

}  // namespace

std::vector<double> ExactPosterior::k_marginal() const {
  std::vector<double> out(k_max, 0.0);
  for (const auto& e : entries) out[e.k - 1] += e.probability;
  return out;
}

double PairMatrix::max_abs_diff(const PairMatrix& other) const {
  if (other.n != n) throw std::invalid_argument("pair matrices differ in size");
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, std::abs(p[i] - other.p[i]));
  return m;
}

ExactPosterior enumerate_posterior(const Network& net, const ConjugateModel& model,
                                   const DmaPrior& prior, std::size_t k_max) {
  const std::size_t n = net.size();
  if (n > kOracleMaxNodes)
    throw std::invalid_argument("exact enumeration refused for N=" + std::to_string(n) +
                                " (limit " + std::to_string(kOracleMaxNodes) + ")");
  if (k_max == 0) k_max = n;
  if (k_max > n) throw std::invalid_argument("k_max must not exceed N");
  if (!(model.a > 0.0) || !(model.b > 0.0))
    throw std::invalid_argument("conjugate hyperparameters must be positive");
  check_support(net, model);

  const auto edges = edge_set(net);
  std::map<std::pair<std::size_t, std::vector<std::size_t>>, double> log_mass;
  double global_max = -std::numeric_limits<double>::infinity();

  std::vector<std::size_t> labels(n), canon(n), remap;
  std::vector<EdgeStats> within;
  std::vector<std::size_t> sizes;
  for (std::size_t k = 1; k <= k_max; ++k) {
    std::fill(labels.begin(), labels.end(), 0);
    while (true) {
      sizes.assign(k, 0);
      for (std::size_t l : labels) ++sizes[l];
      within.assign(k, EdgeStats{});
      EdgeStats between;
      for (auto [i, j] : edges) {
        const double w = net.weight(i, j);
        EdgeStats& s = labels[i] == labels[j] ? within[labels[i]] : between;
        s.count += 1.0;
        s.sum += w;
        if (model.family == ConjugateFamily::poisson_gamma) s.log_fact += std::lgamma(w + 1.0);
      }
      double lw = log_dma(prior.gamma(), prior.delta(), k, sizes, n) +
                  log_marginal(model, between);
      for (const auto& s : within) lw += log_marginal(model, s);

      remap.assign(k, n);
      std::size_t next = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (remap[labels[i]] == n) remap[labels[i]] = next++;
        canon[i] = remap[labels[i]];
      }
      auto [it, fresh] = log_mass.try_emplace({k, canon}, lw);
      if (!fresh) {
        const double m = std::max(it->second, lw);
        it->second = m + std::log(std::exp(it->second - m) + std::exp(lw - m));
      }
      global_max = std::max(global_max, it->second);

      // Advance the base-k counter.
      std::size_t pos = 0;
      while (pos < n && ++labels[pos] == k) labels[pos++] = 0;
      if (pos == n) break;
    }
  }

  double total = 0.0;
  for (const auto& [key, lm] : log_mass) total += std::exp(lm - global_max);
  ExactPosterior out;
  out.n_nodes = n;
  out.k_max = k_max;
  out.entries.reserve(log_mass.size());
  for (const auto& [key, lm] : log_mass)
    out.entries.push_back({key.first, key.second, std::exp(lm - global_max) / total});
  return out;
}

PairMatrix exact_pair_matrix(const ExactPosterior& posterior) {
  const std::size_t n = posterior.n_nodes;
  PairMatrix p(n);
  for (const auto& e : posterior.entries)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (e.partition[i] == e.partition[j]) p(i, j) += e.probability;
  for (std::size_t i = 0; i < n; ++i) p(i, i) = 1.0;
  return p;
}

}  // namespace gsbm
