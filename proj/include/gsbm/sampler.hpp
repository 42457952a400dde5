#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gsbm/dma_prior.hpp"
#include "gsbm/edge_model.hpp"
#include "gsbm/network.hpp"
#include "gsbm/trace.hpp"

namespace gsbm {

struct SamplerConfig {
  double sigma_u = 1.0;  ///< std. dev. of the split auxiliary u
  double rw_sd = 0.1;    ///< random-walk std. dev. on the matched scale
  double nu = 1.0;       ///< add-empty-block propensity
  std::size_t iterations = 10000;
  std::size_t burn_in = 5000;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

enum class InitMode { prior, one_block, singletons };

std::string_view to_string(InitMode mode);
InitMode init_mode_from_string(std::string_view s);

/// Move-probability factors of the trans-dimensional acceptance ratios, in
/// log space. k is the block count of the smaller state of the pair.
///
/// Block labels are exchangeable but the moves place new blocks at label k+1.
/// Counting every labelling of the larger state gives the relabel factors:
/// (k+1)/2 for split/merge (k+1 placements, two (lambda, u) orientations
/// yielding the same unordered pair) and k+1 for add/delete.
namespace acceptance {
/// log[p(merge | k+1) / p(split | k)] = log[1 / (1 + 1{k=1})].
double log_split_choice(std::size_t k);
/// log[(2 / (k (k+1))) / (1 / k)] = log[2 / (k+1)].
double log_pair_choice(std::size_t k);
double log_split_relabel(std::size_t k);
/// log[(nu + n0) / (nu (nu + n0 + 1))] with n0 empty blocks before the add.
double log_add_proposal(std::size_t n_empty, double nu);
/// log[nu (nu + n0) / (nu + n0 - 1)] with n0 empty blocks before the delete.
double log_delete_proposal(std::size_t n_empty, double nu);
double log_add_relabel(std::size_t k);
}  // namespace acceptance

// Parameter matching for split/merge ----------------------------------------

/// m(merged) = lambda m(theta_k) + (1 - lambda) m(theta_l).
ParamVec merge_params(std::span<const double> theta_k,
                      std::span<const double> theta_l, double lambda,
                      const MatchingFunction& mf);

/// m(theta_k) = (m(merged) + u) / (2 lambda),
/// m(theta_l) = (m(merged) - u) / (2 (1 - lambda)).
std::pair<ParamVec, ParamVec> split_params(std::span<const double> merged,
                                           double lambda,
                                           std::span<const double> u,
                                           const MatchingFunction& mf);

/// Auxiliary u the reverse split would need: lambda m(theta_k) - (1-lambda) m(theta_l).
ParamVec implied_u(std::span<const double> theta_k, std::span<const double> theta_l,
                   double lambda, const MatchingFunction& mf);

/// log |d(theta_k, theta_l) / d(merged, u)| of the split map:
///   sum_c [log m'(merged_c) - log m'(theta_k,c) - log m'(theta_l,c)]
///   - p log(2 lambda (1 - lambda)).
double log_jacobian_split(std::span<const double> theta_k,
                          std::span<const double> theta_l,
                          std::span<const double> merged, double lambda,
                          const MatchingFunction& mf);

/// Log target of the random-walk update on the matched scale:
/// loglik + log G0(theta) - log m'(theta).
double rw_log_target(const EdgeModel& model, std::span<const double> theta,
                     double loglik);

// Sequential allocation -------------------------------------------------------

struct Allocation {
  std::vector<char> to_k;  ///< one flag per entry of `order`
  double log_q = 0.0;
};

/// Places the nodes of `order` one at a time into block k or l with
/// probability proportional to the likelihood of their edges to nodes already
/// placed (and their own self-loop). Edges to nodes outside the split block
/// are governed by theta0 under either choice and cancel from the ratio.
Allocation allocate_sequential(const Network& net, const EdgeModel& model,
                               std::span<const std::size_t> order,
                               std::span<const double> theta_k,
                               std::span<const double> theta_l,
                               std::span<const double> theta0, Rng& rng);

/// Log-probability that allocate_sequential produces `to_k` for `order`.
double score_sequential(const Network& net, const EdgeModel& model,
                        std::span<const std::size_t> order,
                        const std::vector<char>& to_k,
                        std::span<const double> theta_k,
                        std::span<const double> theta_l,
                        std::span<const double> theta0);

// Sampler --------------------------------------------------------------------

struct SplitDraw {
  std::size_t block = 0;
  double lambda = 0.5;
  ParamVec u;
  std::vector<std::size_t> order;  ///< permutation of the block's members
};

struct MergeDraw {
  std::size_t block_a = 0;  ///< lambda-weighted side; the merged block keeps this label
  std::size_t block_b = 1;
  double lambda = 0.5;
  std::vector<std::size_t> order;  ///< permutation of the union of members
};

struct Proposal {
  SamplerState state;
  /// Uncapped log acceptance ratio; -inf when the proposal left the space.
  double log_ratio = 0.0;
};

/// One split-merge reversible-jump chain over (K, Z, theta). Holds references
/// to the network, model and prior, which must outlive it.
class Sampler {
 public:
  Sampler(const Network& net, const EdgeModel& model, const DmaPrior& prior,
          SamplerConfig config);

  const SamplerConfig& config() const { return config_; }

  SamplerState initial_state(InitMode mode, Rng& rng) const;

  /// Unnormalised log posterior of the full state.
  double log_posterior(const SamplerState& state) const;

  /// Random-walk Metropolis update of theta0, theta_1..theta_K in turn.
  void update_params(SamplerState& state, Rng& rng,
                     std::vector<MoveOutcome>* log = nullptr) const;

  Proposal evaluate_split(const SamplerState& state, const SplitDraw& draw,
                          Rng& rng) const;
  Proposal evaluate_merge(const SamplerState& state, const MergeDraw& draw) const;

  MoveOutcome propose_split(SamplerState& state, Rng& rng) const;
  MoveOutcome propose_merge(SamplerState& state, Rng& rng) const;
  /// Forced split at K = 1, otherwise split or merge with probability 1/2.
  MoveOutcome split_or_merge(SamplerState& state, Rng& rng) const;

  /// Log acceptance ratios of adding an empty block to / deleting an empty
  /// block from an assignment (likelihood is unchanged by either).
  double log_add_ratio(const BlockAssignment& z) const;
  double log_delete_ratio(const BlockAssignment& z, std::size_t empty_block) const;
  MoveOutcome empty_block_move(SamplerState& state, Rng& rng) const;

  /// Normalised log reassignment probabilities of node i over the K blocks.
  std::vector<double> gibbs_log_probs(const SamplerState& state,
                                      std::size_t i) const;
  void gibbs_sweep(SamplerState& state, Rng& rng) const;

  /// One full iteration: parameters, split/merge, empty block, reassignment.
  void step(SamplerState& state, Rng& rng,
            std::vector<MoveOutcome>* log = nullptr) const;

 private:
  double touching(const SamplerState& s, const std::vector<char>& mask) const;

  const Network& net_;
  const EdgeModel& model_;
  const DmaPrior& prior_;
  SamplerConfig config_;
};

/// Runs config.iterations iterations from the given initial state kind;
/// deterministic given config.seed.
TraceStore run_chain(const Network& net, const EdgeModel& model,
                     const DmaPrior& prior, const SamplerConfig& config,
                     InitMode init);

/// Runs several chains concurrently with seeds derived from config.seed;
/// chain c uses inits[c % inits.size()].
std::vector<TraceStore> run_chains(const Network& net, const EdgeModel& model,
                                   const DmaPrior& prior,
                                   const SamplerConfig& config,
                                   std::size_t n_chains,
                                   const std::vector<InitMode>& inits);

/// Seed used by chain `chain` of a multi-chain run.
std::uint64_t chain_seed(std::uint64_t base_seed, std::size_t chain);

}  // namespace gsbm
