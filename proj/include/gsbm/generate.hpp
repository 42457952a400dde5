#pragma once

#include <vector>

#include "gsbm/config.hpp"
#include "gsbm/network.hpp"

namespace gsbm {

struct GeneratedNetwork {
  Network network;
  std::vector<std::size_t> truth;  ///< 0-based block of each node
};

/// Nodes are laid out block by block in the order of spec.sizes; every
/// modelled edge is drawn from the edge model at the parameter of its block
/// pair. Throws ConfigError when a theta row lies outside the model's space.
GeneratedNetwork generate(const GenerateSpec& spec);

}  // namespace gsbm
