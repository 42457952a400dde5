#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gsbm/pair_matrix.hpp"
#include "gsbm/trace.hpp"

namespace gsbm {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);
double parse_double(std::string_view s);

/// Reads a dense CSV matrix (one row per node) or a whitespace edge list of
/// "i j w" lines with 1-based indices. Lines starting with '#' are comments
/// except the directives `#directed`, `#selfloops` and `#nodes N`; the
/// optional arguments override the directives. Edge-list pairs default to 0,
/// and undirected entries are mirrored. Throws DataError on malformed input.
Network read_network(std::istream& in, std::optional<bool> directed = {},
                     std::optional<bool> self_loops = {});
Network read_network(const std::filesystem::path& path,
                     std::optional<bool> directed = {},
                     std::optional<bool> self_loops = {});

/// Dense CSV with directive lines; read_network restores it exactly.
void write_network(std::ostream& out, const Network& net);
void write_network(const std::filesystem::path& path, const Network& net);

/// "node,block" rows with 1-based values; returns 0-based block labels.
std::vector<std::size_t> read_truth(const std::filesystem::path& path);
void write_truth(const std::filesystem::path& path,
                 const std::vector<std::size_t>& labels);

/// One row per iteration: iter,K,z_1..z_N,theta0 components, then the K
/// block vectors flattened in label order. The header names the fixed
/// columns; theta0 columns carry the component names.
void write_trace(std::ostream& out, const TraceStore& trace,
                 const std::vector<std::string>& component_names);
void write_trace(const std::filesystem::path& path, const TraceStore& trace,
                 const std::vector<std::string>& component_names);

struct TraceFile {
  TraceStore trace;
  std::vector<std::string> component_names;
};
TraceFile read_trace(std::istream& in);
TraceFile read_trace(const std::filesystem::path& path);

/// iter,move,accepted,log_accept_prob rows.
void write_moves(const std::filesystem::path& path, const TraceStore& trace);
std::vector<MoveRecord> read_moves(const std::filesystem::path& path);

void write_matrix(const std::filesystem::path& path, const PairMatrix& m);
PairMatrix read_matrix(const std::filesystem::path& path);

}  // namespace gsbm
