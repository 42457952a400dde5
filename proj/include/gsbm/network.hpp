#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gsbm {

using Rng = std::mt19937_64;
using ParamVec = std::vector<double>;

/// Raised when input data (networks, traces, truth files) is malformed.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense N x N edge-weight matrix. Undirected networks are stored
/// symmetrically; the diagonal is only modelled when self_loops is set.
class Network {
 public:
  Network() = default;
  Network(std::size_t n_nodes, std::vector<double> weights, bool directed,
          bool self_loops);

  static Network zeros(std::size_t n_nodes, bool directed, bool self_loops);

  std::size_t size() const { return n_; }
  bool directed() const { return directed_; }
  bool self_loops() const { return self_loops_; }

  double weight(std::size_t i, std::size_t j) const { return w_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return {w_.data() + i * n_, n_};
  }
  const std::vector<double>& weights() const { return w_; }

  /// Sets W_ij (and W_ji when undirected).
  void set_weight(std::size_t i, std::size_t j, double w);

  bool integer_valued() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> w_;
  bool directed_ = false;
  bool self_loops_ = false;
};

/// Calls fn(i, j, w) once for every modelled edge: i < j for undirected
/// networks, every ordered pair i != j for directed ones, plus (i, i) when
/// self-loops are modelled.
template <class Fn>
void for_each_edge(const Network& net, Fn&& fn) {
  const std::size_t n = net.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (net.self_loops()) fn(i, i, net.weight(i, i));
    const std::size_t j0 = net.directed() ? 0 : i + 1;
    for (std::size_t j = j0; j < n; ++j) {
      if (j == i) continue;
      fn(i, j, net.weight(i, j));
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> edge_set(const Network& net);
std::size_t edge_count(const Network& net);

/// Node-to-block labels. Labels are 0-based internally (files use 1-based
/// labels). Empty blocks are legal.
class BlockAssignment {
 public:
  BlockAssignment() = default;
  BlockAssignment(std::vector<std::size_t> labels, std::size_t k);

  static BlockAssignment one_block(std::size_t n_nodes);
  static BlockAssignment singletons(std::size_t n_nodes);

  std::size_t size() const { return labels_.size(); }
  std::size_t k() const { return sizes_.size(); }
  std::size_t label(std::size_t i) const { return labels_[i]; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t block_size(std::size_t block) const { return sizes_[block]; }
  std::size_t empty_count() const;
  std::vector<std::size_t> members(std::size_t block) const;

  void assign(std::size_t node, std::size_t block);
  /// Appends an empty block and returns its index.
  std::size_t add_block();
  /// Removes an empty block, shifting higher labels down by one.
  void remove_empty_block(std::size_t block);

  friend bool operator==(const BlockAssignment&,
                         const BlockAssignment&) = default;

 private:
  std::vector<std::size_t> labels_;
  std::vector<std::size_t> sizes_;
};

std::vector<std::size_t> block_sizes(const BlockAssignment& assignment);

/// Between-block parameter theta0 plus one within-block vector per block.
struct BlockParams {
  ParamVec theta0;
  std::vector<ParamVec> theta;

  std::size_t dim() const { return theta0.size(); }
  std::size_t k() const { return theta.size(); }

  friend bool operator==(const BlockParams&, const BlockParams&) = default;
};

struct SamplerState {
  BlockAssignment assignment;
  BlockParams params;
  std::size_t iteration = 0;

  std::size_t k() const { return assignment.k(); }
  /// Throws std::logic_error if the assignment and parameters disagree.
  void check() const;
};

/// Parameter governing edge (i, j): theta_k when both ends sit in block k,
/// theta0 otherwise.
inline std::span<const double> theta_for_edge(const BlockAssignment& z,
                                              const BlockParams& params,
                                              std::size_t i, std::size_t j) {
  const std::size_t a = z.label(i);
  if (a == z.label(j)) return params.theta[a];
  return params.theta0;
}

/// Drops an empty block from the state and keeps labels dense.
SamplerState relabel_contiguous(SamplerState state, std::size_t removed_block);

}  // namespace gsbm
