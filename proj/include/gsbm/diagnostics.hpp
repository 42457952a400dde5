#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsbm/pair_matrix.hpp"
#include "gsbm/trace.hpp"

namespace gsbm {

/// P_ij = fraction of retained samples (iterations >= burn_in) with i and j
/// in the same block. Throws std::invalid_argument when nothing is retained.
PairMatrix posterior_pairs(const TraceStore& trace, std::size_t burn_in);

/// Per-node most frequent retained label; ties go to the smaller label.
std::vector<std::size_t> modal_assignment(const TraceStore& trace,
                                          std::size_t burn_in);

/// Maps sampler labels 0..n_labels-1 onto truth labels. Pairs are taken
/// greedily by descending contingency count between the modal and true
/// labels; labels left over get fresh values past max(truth), in order.
std::vector<std::size_t> label_permutation(std::span<const std::size_t> modal,
                                           std::span<const std::size_t> truth,
                                           std::size_t n_labels);

/// Retained samples after relabelling. theta[s][c] is empty when matched
/// label c has no member in sample s.
struct MatchedTrace {
  std::size_t n_nodes = 0;
  std::size_t dim = 0;
  std::size_t n_labels = 0;
  std::vector<std::vector<std::size_t>> z;
  std::vector<ParamVec> theta0;
  std::vector<std::vector<std::optional<ParamVec>>> theta;

  std::size_t samples() const { return z.size(); }
};

/// Retained samples with labels as sampled (identity permutation).
MatchedTrace retained(const TraceStore& trace, std::size_t burn_in);

/// Relabels every retained sample by label_permutation of its own labels
/// against `truth`. Merges and deletions shift labels during a run, so one
/// permutation taken from the modal assignment does not fit every sample;
/// for a chain whose labels never switch the two agree.
MatchedTrace match_labels(const TraceStore& trace,
                          std::span<const std::size_t> truth,
                          std::size_t burn_in);

PairMatrix posterior_pairs(const MatchedTrace& trace);

struct GelmanRubin {
  double r_hat = 0.0;
  double upper_ci = 0.0;  ///< 97.5% quantile bound of the PSRF
  bool degenerate = false;  ///< zero within-chain variance; r_hat is NaN
};

/// Potential scale reduction with the degrees-of-freedom correction of
/// Brooks & Gelman, as computed by coda::gelman.diag. Throws
/// std::invalid_argument for fewer than 2 chains, unequal lengths or chains
/// shorter than 2.
GelmanRubin gelman_rubin(const std::vector<std::vector<double>>& chains);

struct Ess {
  double ess = 0.0;
  bool degenerate = false;  ///< constant series
  bool clamped = false;     ///< estimate exceeded the length
  bool available = true;
};

/// Geyer initial monotone positive sequence estimate. Throws
/// std::invalid_argument for series shorter than 10.
Ess effective_sample_size(std::span<const double> series);

/// Midpoint of the fullest of 100 equal bins over [min, max].
double histogram_mode(std::span<const double> values);
/// Linear-interpolation sample quantile (Hyndman-Fan type 7).
double quantile(std::vector<double> values, double q);

struct ParamSummary {
  std::string name;
  double mode = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  Ess ess;
  std::size_t present = 0;
};

/// One row per component of theta0 and of every matched block that is
/// occupied somewhere. ESS is marked unavailable for blocks occupied in less
/// than 10% of retained samples.
std::vector<ParamSummary> summarize_params(
    const MatchedTrace& trace, const std::vector<std::string>& component_names);

/// Per-sample mean and population variance of theta0 and the occupied
/// blocks' parameters, all components pooled on the natural scale.
struct ThetaSummary {
  std::vector<double> mean;
  std::vector<double> variance;
};
ThetaSummary theta_summary(const MatchedTrace& trace);

/// Post-burn-in count of occupied blocks for every retained sample.
std::vector<std::size_t> occupied_k(const TraceStore& trace, std::size_t burn_in);

/// Most frequent value; ties go to the smaller one.
std::size_t modal_value(std::span<const std::size_t> values);

}  // namespace gsbm
