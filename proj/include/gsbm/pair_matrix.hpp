#pragma once

#include <cstddef>
#include <vector>

namespace gsbm {

/// Dense symmetric N x N matrix of co-membership probabilities.
struct PairMatrix {
  std::size_t n = 0;
  std::vector<double> p;

  PairMatrix() = default;
  explicit PairMatrix(std::size_t n_nodes) : n(n_nodes), p(n_nodes * n_nodes, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return p[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return p[i * n + j]; }

  /// Largest entrywise absolute difference.
  double max_abs_diff(const PairMatrix& other) const;
};

}  // namespace gsbm
