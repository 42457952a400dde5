#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gsbm/network.hpp"

namespace gsbm {

enum class MoveKind { rw, split, merge, gibbs, add_empty, delete_empty };

std::string_view to_string(MoveKind kind);
MoveKind move_kind_from_string(std::string_view s);

struct MoveOutcome {
  MoveKind kind = MoveKind::rw;
  bool accepted = false;
  /// min(0, log acceptance ratio); -inf for proposals that left the space.
  double log_accept_prob = 0.0;
};

struct MoveRecord {
  std::size_t iteration = 0;
  MoveOutcome outcome;
};

/// Per-iteration record of (K, Z, theta) plus the move log of one chain.
struct TraceStore {
  std::size_t n_nodes = 0;
  std::size_t dim = 0;
  std::vector<std::size_t> k;
  std::vector<std::vector<std::size_t>> z;
  std::vector<BlockParams> theta;
  std::vector<MoveRecord> moves;

  std::size_t iterations() const { return k.size(); }
  void record(const SamplerState& state);
  /// Throws DataError when a row is inconsistent with its K.
  void check() const;
};

}  // namespace gsbm
