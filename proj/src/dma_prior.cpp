#include "gsbm/dma_prior.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace gsbm {

DmaPrior::DmaPrior(double gamma, double delta) : gamma_(gamma), delta_(delta) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("DMA gamma must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("DMA delta must be positive");
}

double DmaPrior::log_prior_k(std::size_t k) const {
  if (k < 1) throw std::domain_error("number of blocks must be at least 1");
  const double m = static_cast<double>(k - 1);
  return m * std::log(delta_) - delta_ - std::lgamma(m + 1.0);
}

double DmaPrior::log_prior_z(std::span<const std::size_t> sizes) const {
  const double k = static_cast<double>(sizes.size());
  const double n = static_cast<double>(
      std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  double s = std::lgamma(k * gamma_) - k * std::lgamma(gamma_) -
             std::lgamma(k * gamma_ + n);
  for (std::size_t nk : sizes) s += std::lgamma(gamma_ + static_cast<double>(nk));
  return s;
}

double DmaPrior::conditional_log_prob(const BlockAssignment& z, std::size_t i,
                                      std::size_t target) const {
  if (target >= z.k()) throw std::out_of_range("target block out of range");
  double others = static_cast<double>(z.block_size(target));
  if (z.label(i) == target) others -= 1.0;
  const double k = static_cast<double>(z.k());
  const double n = static_cast<double>(z.size());
  return std::log(gamma_ + others) - std::log(k * gamma_ + n - 1.0);
}

BlockAssignment DmaPrior::sample(std::size_t n_nodes, Rng& rng) const {
  const std::size_t k =
      1 + static_cast<std::size_t>(std::poisson_distribution<long long>(delta_)(rng));
  std::gamma_distribution<double> g(gamma_, 1.0);
  std::vector<double> rho(k);
  for (auto& r : rho) r = g(rng);
  std::discrete_distribution<std::size_t> pick(rho.begin(), rho.end());
  std::vector<std::size_t> labels(n_nodes);
  for (auto& l : labels) l = pick(rng);
  return BlockAssignment(std::move(labels), k);
}

}  // namespace gsbm
