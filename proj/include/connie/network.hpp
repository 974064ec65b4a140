// Directed weighted network. Entry (src, dst, weight) means src infects dst
// with probability `weight` per cascade. Immutable after construction and
// safe to share read-only across threads.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "connie/io.hpp"

namespace connie {

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

class Network {
public:
  Network() = default;

  /// Validates and canonicalizes the edge list: endpoints in [0, n),
  /// no self-loops, weights in [0, 1], at most one entry per ordered pair.
  Network(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 0) throw std::invalid_argument("node count must be nonnegative");
    for (const Edge& e : edges_) {
      if (e.src < 0 || e.src >= n_ || e.dst < 0 || e.dst >= n_)
        throw std::invalid_argument("edge endpoint out of range");
      if (e.src == e.dst)
        throw std::invalid_argument("self-loops are not allowed");
      if (!(e.weight >= 0.0 && e.weight <= 1.0))
        throw std::invalid_argument("edge weight outside [0, 1]");
    }
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.src != b.src ? a.src < b.src : a.dst < b.dst;
    });
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i].src == edges_[i - 1].src && edges_[i].dst == edges_[i - 1].dst)
        throw std::invalid_argument("duplicate edge for ordered pair");
    out_offsets_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const Edge& e : edges_) ++out_offsets_[static_cast<std::size_t>(e.src) + 1];
    for (int i = 0; i < n_; ++i)
      out_offsets_[static_cast<std::size_t>(i) + 1] += out_offsets_[i];
  }

  int nodes() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Out-edges of `src`, sorted by destination.
  std::span<const Edge> out_edges(int src) const {
    return {edges_.data() + out_offsets_[src],
            edges_.data() + out_offsets_[static_cast<std::size_t>(src) + 1]};
  }

  bool has_edge(int src, int dst) const { return find(src, dst) != nullptr; }

  /// Weight of (src, dst), or 0 when the edge is absent.
  double weight(int src, int dst) const {
    const Edge* e = find(src, dst);
    return e ? e->weight : 0.0;
  }

  friend bool operator==(const Network&, const Network&) = default;

private:
  const Edge* find(int src, int dst) const {
    if (src < 0 || src >= n_) return nullptr;
    auto sp = out_edges(src);
    auto it = std::lower_bound(sp.begin(), sp.end(), dst,
                               [](const Edge& e, int d) { return e.dst < d; });
    return (it != sp.end() && it->dst == dst) ? &*it : nullptr;
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> out_offsets_ = {0};
};

// ---------------------------------------------------------------------------
// File format: UTF-8 TSV, one edge per line `src<TAB>dst<TAB>weight`.
// A required header line `# nodes=<n>` declares the node count so that
// isolated nodes are representable. Other lines starting with '#' are
// comments. Weights round-trip exactly (17 significant digits).

inline void write_network(const Network& net, const std::string& path) {
  auto out = detail::open_output(path);
  out << "# nodes=" << net.nodes() << "\n";
  for (const Edge& e : net.edges())
    out << e.src << '\t' << e.dst << '\t' << detail::format_double(e.weight) << "\n";
  if (!out) throw parse_error(path, 0, "write failed");
}

inline Network read_network(const std::string& path) {
  auto in = detail::open_input(path);
  std::string raw;
  std::size_t lineno = 0;
  long long n = -1;
  std::vector<Edge> edges;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kHeader = "# nodes=";
      if (line.substr(0, kHeader.size()) == kHeader) {
        if (n >= 0) throw parse_error(path, lineno, "duplicate node count header");
        if (!detail::parse_long(line.substr(kHeader.size()), n) || n < 0)
          throw parse_error(path, lineno, "malformed node count header");
      }
      continue;
    }
    if (n < 0) throw parse_error(path, lineno, "edge before '# nodes=<n>' header");
    auto fields = detail::split_tabs(line);
    long long src = 0, dst = 0;
    double w = 0.0;
    if (fields.size() != 3 || !detail::parse_long(fields[0], src) ||
        !detail::parse_long(fields[1], dst) || !detail::parse_double(fields[2], w))
      throw parse_error(path, lineno, "expected 'src<TAB>dst<TAB>weight'");
    if (src < 0 || src >= n || dst < 0 || dst >= n)
      throw parse_error(path, lineno, "node id out of range");
    if (src == dst) throw parse_error(path, lineno, "self-loop");
    if (!(w >= 0.0 && w <= 1.0) || !std::isfinite(w))
      throw parse_error(path, lineno, "weight outside [0, 1]");
    edges.push_back({static_cast<int>(src), static_cast<int>(dst), w});
  }
  if (n < 0) throw parse_error(path, 0, "missing '# nodes=<n>' header");
  try {
    return Network(static_cast<int>(n), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw parse_error(path, 0, e.what());
  }
}

} // namespace connie
