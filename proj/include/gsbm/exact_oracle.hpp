#pragma once

#include <vector>

#include "gsbm/dma_prior.hpp"
#include "gsbm/network.hpp"
#include "gsbm/pair_matrix.hpp"

namespace gsbm {

/// Conjugate edge families whose block parameters integrate out in closed
/// form. Hyperparameters are Beta(a, b) or Gamma(shape a, rate b).
enum class ConjugateFamily { bernoulli_beta, poisson_gamma };

struct ConjugateModel {
  ConjugateFamily family = ConjugateFamily::bernoulli_beta;
  double a = 1.0;
  double b = 1.0;
};

struct PosteriorEntry {
  std::size_t k = 1;
  /// Canonical labels: blocks numbered by their smallest member, 0-based.
  std::vector<std::size_t> partition;
  double probability = 0.0;
};

struct ExactPosterior {
  std::size_t n_nodes = 0;
  std::size_t k_max = 0;
  std::vector<PosteriorEntry> entries;

  /// P(K = k) at index k - 1, for k = 1..k_max.
  std::vector<double> k_marginal() const;
};

constexpr std::size_t kOracleMaxNodes = 8;

/// Brute-force posterior over (K, Z) for K = 1..k_max (0 means N), summing
/// over every label vector in K^N with the block parameters integrated out.
/// Throws std::invalid_argument for N > kOracleMaxNodes or k_max > N.
ExactPosterior enumerate_posterior(const Network& net, const ConjugateModel& model,
                                   const DmaPrior& prior, std::size_t k_max = 0);

PairMatrix exact_pair_matrix(const ExactPosterior& posterior);

}  // namespace gsbm
