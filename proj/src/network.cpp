#include "gsbm/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gsbm {

Network::Network(std::size_t n_nodes, std::vector<double> weights,
                 bool directed, bool self_loops)
    : n_(n_nodes),
      w_(std::move(weights)),
      directed_(directed),
      self_loops_(self_loops) {
  if (n_ == 0) throw DataError("network must have at least one node");
  if (w_.size() != n_ * n_)
    throw DataError("weight matrix is not " + std::to_string(n_) + "x" +
                    std::to_string(n_));
  for (double w : w_)
    if (!std::isfinite(w)) throw DataError("non-finite edge weight");
  if (!directed_) {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if (w_[i * n_ + j] != w_[j * n_ + i])
          throw DataError("undirected network has asymmetric weights at (" +
                          std::to_string(i + 1) + "," + std::to_string(j + 1) +
                          ")");
  }
}

Network Network::zeros(std::size_t n_nodes, bool directed, bool self_loops) {
  return Network(n_nodes, std::vector<double>(n_nodes * n_nodes, 0.0),
                 directed, self_loops);
}

void Network::set_weight(std::size_t i, std::size_t j, double w) {
  if (!std::isfinite(w)) throw DataError("non-finite edge weight");
  w_[i * n_ + j] = w;
  if (!directed_) w_[j * n_ + i] = w;
}

bool Network::integer_valued() const {
  bool ok = true;
  for_each_edge(*this, [&](std::size_t, std::size_t, double w) {
    if (w != std::floor(w)) ok = false;
  });
  return ok;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_set(const Network& net) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count(net));
  for_each_edge(net, [&](std::size_t i, std::size_t j, double) {
    out.emplace_back(i, j);
  });
  return out;
}

std::size_t edge_count(const Network& net) {
  const std::size_t n = net.size();
  std::size_t m = net.directed() ? n * (n - 1) : n * (n - 1) / 2;
  if (net.self_loops()) m += n;
  return m;
}

BlockAssignment::BlockAssignment(std::vector<std::size_t> labels,
                                 std::size_t k)
    : labels_(std::move(labels)), sizes_(k, 0) {
  if (k == 0) throw std::invalid_argument("assignment needs at least one block");
  for (std::size_t l : labels_) {
    if (l >= k)
      throw std::invalid_argument("label " + std::to_string(l + 1) +
                                  " exceeds K=" + std::to_string(k));
    ++sizes_[l];
  }
}

BlockAssignment BlockAssignment::one_block(std::size_t n_nodes) {
  return BlockAssignment(std::vector<std::size_t>(n_nodes, 0), 1);
}

BlockAssignment BlockAssignment::singletons(std::size_t n_nodes) {
  std::vector<std::size_t> labels(n_nodes);
  std::iota(labels.begin(), labels.end(), std::size_t{0});
  return BlockAssignment(std::move(labels), std::max<std::size_t>(n_nodes, 1));
}

std::size_t BlockAssignment::empty_count() const {
  return static_cast<std::size_t>(
      std::count(sizes_.begin(), sizes_.end(), std::size_t{0}));
}

std::vector<std::size_t> BlockAssignment::members(std::size_t block) const {
  std::vector<std::size_t> out;
  out.reserve(sizes_[block]);
  for (std::size_t i = 0; i < labels_.size(); ++i)
    if (labels_[i] == block) out.push_back(i);
  return out;
}

void BlockAssignment::assign(std::size_t node, std::size_t block) {
  if (block >= sizes_.size()) throw std::out_of_range("block index out of range");
  --sizes_[labels_[node]];
  labels_[node] = block;
  ++sizes_[block];
}

std::size_t BlockAssignment::add_block() {
  sizes_.push_back(0);
  return sizes_.size() - 1;
}

void BlockAssignment::remove_empty_block(std::size_t block) {
  if (block >= sizes_.size()) throw std::out_of_range("block index out of range");
  if (sizes_[block] != 0)
    throw std::logic_error("cannot remove non-empty block " +
                           std::to_string(block + 1));
  if (sizes_.size() == 1) throw std::logic_error("cannot remove the only block");
  sizes_.erase(sizes_.begin() + static_cast<std::ptrdiff_t>(block));
  for (auto& l : labels_)
    if (l > block) --l;
}

std::vector<std::size_t> block_sizes(const BlockAssignment& assignment) {
  return assignment.sizes();
}

void SamplerState::check() const {
  if (assignment.k() != params.theta.size())
    throw std::logic_error("state has K=" + std::to_string(assignment.k()) +
                           " but " + std::to_string(params.theta.size()) +
                           " block parameters");
  for (const auto& t : params.theta)
    if (t.size() != params.dim())
      throw std::logic_error("block parameter dimension mismatch");
  const auto total = std::accumulate(assignment.sizes().begin(),
                                     assignment.sizes().end(), std::size_t{0});
  if (total != assignment.size())
    throw std::logic_error("block sizes do not sum to N");
}

SamplerState relabel_contiguous(SamplerState state, std::size_t removed_block) {
  state.assignment.remove_empty_block(removed_block);
  state.params.theta.erase(state.params.theta.begin() +
                           static_cast<std::ptrdiff_t>(removed_block));
  return state;
}

}  // namespace gsbm
