#include "gsbm/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace gsbm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

std::size_t parse_index(std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("expected a non-negative integer, got '" + std::string(s) + "'");
  return v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

double parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw DataError("expected a number, got '" + std::string(s) + "'");
  return v;
}

Network read_network(std::istream& in, std::optional<bool> directed,
                     std::optional<bool> self_loops) {
  bool dir = false, loops = false;
  std::size_t declared_n = 0;
  std::vector<std::pair<std::size_t, std::string>> data;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const auto words = split_ws(t.substr(1));
      if (words.empty()) continue;
      if (words[0] == "directed") dir = true;
      else if (words[0] == "selfloops") loops = true;
      else if (words[0] == "nodes" && words.size() == 2) declared_n = parse_index(words[1]);
      continue;
    }
    data.emplace_back(no, std::string(t));
  }
  if (directed) dir = *directed;
  if (self_loops) loops = *self_loops;
  if (data.empty()) throw DataError("network file has no data rows");

  const auto& first = data.front().second;
  if (first.find(',') != std::string::npos || split_ws(first).size() == 1) {
    const std::size_t n = data.size();
    if (declared_n && declared_n != n)
      throw DataError("#nodes directive disagrees with the number of matrix rows");
    std::vector<double> w;
    w.reserve(n * n);
    for (const auto& [no, text] : data) {
      const auto cells = split(text, ',');
      if (cells.size() != n)
        throw DataError("matrix row has " + std::to_string(cells.size()) +
                        " entries, expected " + std::to_string(n) + at_line(no));
      for (auto c : cells) w.push_back(parse_double(c));
    }
    return Network(n, std::move(w), dir, loops);
  }

  struct Entry {
    std::size_t i, j;
    double w;
    std::size_t line;
  };
  std::vector<Entry> entries;
  std::size_t n = declared_n;
  for (const auto& [no, text] : data) {
    const auto tok = split_ws(text);
    if (tok.size() != 2 && tok.size() != 3)
      throw DataError("edge-list line needs 'i j [w]'" + at_line(no));
    const std::size_t i = parse_index(tok[0]), j = parse_index(tok[1]);
    if (i == 0 || j == 0) throw DataError("node indices are 1-based" + at_line(no));
    const double w = tok.size() == 3 ? parse_double(tok[2]) : 1.0;
    n = std::max({n, i, j});
    entries.push_back({i - 1, j - 1, w, no});
  }
  if (declared_n && n > declared_n)
    throw DataError("edge index exceeds the #nodes directive");
  Network net = Network::zeros(n, dir, loops);
  std::map<std::pair<std::size_t, std::size_t>, double> seen;
  for (const auto& e : entries) {
    const std::pair<std::size_t, std::size_t> key =
        dir ? std::pair{e.i, e.j} : std::pair{std::min(e.i, e.j), std::max(e.i, e.j)};
    if (auto it = seen.find(key); it != seen.end()) {
      if (it->second != e.w)
        throw DataError("conflicting weights for the same edge" + at_line(e.line));
      continue;
    }
    seen.emplace(key, e.w);
    net.set_weight(e.i, e.j, e.w);
  }
  return net;
}

Network read_network(const std::filesystem::path& path, std::optional<bool> directed,
                     std::optional<bool> self_loops) {
  auto in = open_in(path);
  try {
    return read_network(in, directed, self_loops);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_network(std::ostream& out, const Network& net) {
  if (net.directed()) out << "#directed\n";
  if (net.self_loops()) out << "#selfloops\n";
  for (std::size_t i = 0; i < net.size(); ++i) {
    for (std::size_t j = 0; j < net.size(); ++j) {
      if (j) out << ',';
      out << format_double(net.weight(i, j));
    }
    out << '\n';
  }
}

void write_network(const std::filesystem::path& path, const Network& net) {
  auto out = open_out(path);
  write_network(out, net);
}

std::vector<std::size_t> read_truth(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::map<std::size_t, std::size_t> rows;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto cells = split(t, ',');
    if (cells.size() != 2) throw DataError(path.string() + ": expected node,block" + at_line(no));
    if (no == 1 && cells[0] == "node") continue;
    const std::size_t node = parse_index(cells[0]), block = parse_index(cells[1]);
    if (node == 0 || block == 0)
      throw DataError(path.string() + ": truth labels are 1-based" + at_line(no));
    if (!rows.emplace(node - 1, block - 1).second)
      throw DataError(path.string() + ": node listed twice" + at_line(no));
  }
  std::vector<std::size_t> labels;
  for (const auto& [node, block] : rows) {
    if (node != labels.size()) throw DataError(path.string() + ": missing nodes in truth file");
    labels.push_back(block);
  }
  return labels;
}

void write_truth(const std::filesystem::path& path, const std::vector<std::size_t>& labels) {
  auto out = open_out(path);
  out << "node,block\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    out << i + 1 << ',' << labels[i] + 1 << '\n';
}

void write_trace(std::ostream& out, const TraceStore& trace,
                 const std::vector<std::string>& component_names) {
  out << "iter,K";
  for (std::size_t i = 0; i < trace.n_nodes; ++i) out << ",z_" << i + 1;
  for (const auto& c : component_names) out << ",theta0_" << c;
  out << '\n';
  std::string row;
  for (std::size_t s = 0; s < trace.iterations(); ++s) {
    row = std::to_string(s + 1);
    row += ',';
    row += std::to_string(trace.k[s]);
    for (std::size_t l : trace.z[s]) {
      row += ',';
      row += std::to_string(l + 1);
    }
    for (double x : trace.theta[s].theta0) {
      row += ',';
      row += format_double(x);
    }
    for (const auto& th : trace.theta[s].theta)
      for (double x : th) {
        row += ',';
        row += format_double(x);
      }
    row += '\n';
    out << row;
  }
}

void write_trace(const std::filesystem::path& path, const TraceStore& trace,
                 const std::vector<std::string>& component_names) {
  auto out = open_out(path);
  write_trace(out, trace, component_names);
}

TraceFile read_trace(std::istream& in) {
  TraceFile f;
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty trace file");
  const auto head = split(trim(line), ',');
  if (head.size() < 2 || head[0] != "iter" || head[1] != "K")
    throw DataError("trace header must start with iter,K");
  std::size_t col = 2;
  while (col < head.size() && head[col].starts_with("z_")) ++col;
  f.trace.n_nodes = col - 2;
  for (; col < head.size(); ++col) {
    if (!head[col].starts_with("theta0_"))
      throw DataError("unexpected trace column '" + std::string(head[col]) + "'");
    f.component_names.emplace_back(head[col].substr(7));
  }
  const std::size_t n = f.trace.n_nodes, p = f.component_names.size();
  if (n == 0 || p == 0) throw DataError("trace header lists no nodes or parameters");
  f.trace.dim = p;

  for (std::size_t no = 2; std::getline(in, line); ++no) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (cells.size() < 2) throw DataError("short trace row" + at_line(no));
    const std::size_t k = parse_index(cells[1]);
    if (k == 0 || cells.size() != 2 + n + p + k * p)
      throw DataError("trace row width does not match its K" + at_line(no));
    std::vector<std::size_t> z(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t l = parse_index(cells[2 + i]);
      if (l == 0 || l > k) throw DataError("trace label outside 1..K" + at_line(no));
      z[i] = l - 1;
    }
    BlockParams bp;
    std::size_t c = 2 + n;
    for (std::size_t d = 0; d < p; ++d) bp.theta0.push_back(parse_double(cells[c++]));
    bp.theta.resize(k);
    for (auto& th : bp.theta)
      for (std::size_t d = 0; d < p; ++d) th.push_back(parse_double(cells[c++]));
    f.trace.k.push_back(k);
    f.trace.z.push_back(std::move(z));
    f.trace.theta.push_back(std::move(bp));
  }
  f.trace.check();
  return f;
}

TraceFile read_trace(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return read_trace(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_moves(const std::filesystem::path& path, const TraceStore& trace) {
  auto out = open_out(path);
  out << "iter,move,accepted,log_accept_prob\n";
  for (const auto& m : trace.moves)
    out << m.iteration << ',' << to_string(m.outcome.kind) << ','
        << (m.outcome.accepted ? 1 : 0) << ',' << format_double(m.outcome.log_accept_prob)
        << '\n';
}

std::vector<MoveRecord> read_moves(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<MoveRecord> out;
  std::string line;
  std::getline(in, line);
  for (std::size_t no = 2; std::getline(in, line); ++no) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split(t, ',');
    if (cells.size() != 4) throw DataError(path.string() + ": malformed move row" + at_line(no));
    MoveRecord r;
    r.iteration = parse_index(cells[0]);
    r.outcome.kind = move_kind_from_string(cells[1]);
    r.outcome.accepted = cells[2] == "1";
    r.outcome.log_accept_prob = parse_double(cells[3]);
    out.push_back(r);
  }
  return out;
}

void write_matrix(const std::filesystem::path& path, const PairMatrix& m) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j < m.n; ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

PairMatrix read_matrix(const std::filesystem::path& path) {
  const Network net = read_network(path, true, true);
  PairMatrix m(net.size());
  m.p = net.weights();
  return m;
}

}  // namespace gsbm
