#include "gsbm/trace.hpp"

#include <stdexcept>
#include <string>

namespace gsbm {

std::string_view to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::rw: return "rw";
    case MoveKind::split: return "split";
    case MoveKind::merge: return "merge";
    case MoveKind::gibbs: return "gibbs";
    case MoveKind::add_empty: return "add_empty";
    case MoveKind::delete_empty: return "delete_empty";
  }
  return "rw";
}

MoveKind move_kind_from_string(std::string_view s) {
  for (MoveKind k : {MoveKind::rw, MoveKind::split, MoveKind::merge, MoveKind::gibbs,
                     MoveKind::add_empty, MoveKind::delete_empty})
    if (to_string(k) == s) return k;
  throw DataError("unknown move kind '" + std::string(s) + "'");
}

void TraceStore::record(const SamplerState& state) {
  k.push_back(state.k());
  z.push_back(state.assignment.labels());
  theta.push_back(state.params);
}

void TraceStore::check() const {
  if (z.size() != k.size() || theta.size() != k.size())
    throw DataError("trace columns have different lengths");
  for (std::size_t s = 0; s < k.size(); ++s) {
    if (z[s].size() != n_nodes)
      throw DataError("trace row " + std::to_string(s + 1) + " has wrong node count");
    for (std::size_t l : z[s])
      if (l >= k[s])
        throw DataError("trace row " + std::to_string(s + 1) + " has label beyond K");
    if (theta[s].k() != k[s] || theta[s].dim() != dim)
      throw DataError("trace row " + std::to_string(s + 1) + " has malformed theta");
  }
}

}  // namespace gsbm
