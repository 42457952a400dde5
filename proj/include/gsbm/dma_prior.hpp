#pragma once

#include <span>

#include "gsbm/network.hpp"

namespace gsbm {

/// Dirichlet-multinomial allocation prior on (K, Z):
///   K - 1 ~ Poisson(delta),  Z | K ~ Dirichlet-Multinomial(gamma, K).
/// The block-weight vector is integrated out; only the marginal is evaluated.
class DmaPrior {
 public:
  DmaPrior(double gamma, double delta);

  double gamma() const { return gamma_; }
  double delta() const { return delta_; }

  double log_prior_k(std::size_t k) const;

  /// ln[ G(K g) / G(g)^K * prod_k G(g + N_k) / G(K g + N) ]; empty blocks
  /// contribute G(g) factors like any other block.
  double log_prior_z(std::span<const std::size_t> sizes) const;
  double log_prior_z(const BlockAssignment& z) const {
    return log_prior_z(z.sizes());
  }

  /// ln[(g + N_target^{-i}) / (K g + N - 1)].
  double conditional_log_prob(const BlockAssignment& z, std::size_t i,
                              std::size_t target_block) const;

  double log_joint_prior(std::span<const std::size_t> sizes) const {
    return log_prior_k(sizes.size()) + log_prior_z(sizes);
  }
  double log_joint_prior(const BlockAssignment& z) const {
    return log_joint_prior(z.sizes());
  }

  /// Draws (K, Z) from the prior for n nodes.
  BlockAssignment sample(std::size_t n_nodes, Rng& rng) const;

 private:
  double gamma_;
  double delta_;
};

}  // namespace gsbm
