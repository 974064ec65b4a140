// Synthetic network generators and edge weight assignment.

#pragma once

#include <cmath>
#include <cstdint>
#include <iostream>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "connie/network.hpp"
#include "connie/rng.hpp"

namespace connie {

/// Uniform directed G(n, m): exactly m distinct non-self-loop edges sampled
/// without replacement, all weights 1. Deterministic given the seed.
inline Network generate_erdos_renyi(int n, long long m, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("erdos_renyi: need at least one node");
  const long long max_edges = static_cast<long long>(n) * (n - 1);
  if (m < 0 || m > max_edges)
    throw std::invalid_argument("erdos_renyi: edge count exceeds n*(n-1)");

  // Floyd's sampling over the n*(n-1) ordered non-diagonal pairs.
  rng_t rng = make_rng(seed);
  std::unordered_set<long long> chosen;
  chosen.reserve(static_cast<std::size_t>(m) * 2);
  for (long long j = max_edges - m; j < max_edges; ++j) {
    std::uniform_int_distribution<long long> dist(0, j);
    long long t = dist(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }

  std::vector<Edge> edges;
  edges.reserve(chosen.size());
  for (long long k : chosen) {
    int src = static_cast<int>(k / (n - 1));
    int rem = static_cast<int>(k % (n - 1));
    int dst = rem + (rem >= src ? 1 : 0);
    edges.push_back({src, dst, 1.0});
  }
  return Network(n, std::move(edges));
}

/// Directed scale-free graph grown by preferential attachment: each arriving
/// node adds `out_degree` edges to distinct existing nodes, chosen with
/// probability proportional to in-degree + 1 (the +1 lets degree-0 nodes be
/// picked). Early arrivals attach to all existing nodes when fewer than
/// `out_degree` are available. All weights 1.
inline Network generate_preferential_attachment(int n, int out_degree,
                                                std::uint64_t seed) {
  if (out_degree < 1)
    throw std::invalid_argument("preferential_attachment: out_degree must be >= 1");
  if (n <= out_degree)
    throw std::invalid_argument("preferential_attachment: need n > out_degree");

  rng_t rng = make_rng(seed);
  std::vector<long long> indeg(static_cast<std::size_t>(n), 0);
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(n) * out_degree);
  long long total_mass = 0; // sum of (indeg + 1) over existing nodes

  for (int v = 1; v < n; ++v) {
    total_mass += 1; // node v-1 joined the candidate pool
    const int attach = std::min(out_degree, v);
    std::vector<int> targets;
    targets.reserve(attach);
    while (static_cast<int>(targets.size()) < attach) {
      std::uniform_int_distribution<long long> dist(0, total_mass - 1);
      long long r = dist(rng);
      int u = 0;
      for (; u < v; ++u) {
        r -= indeg[u] + 1;
        if (r < 0) break;
      }
      if (std::find(targets.begin(), targets.end(), u) != targets.end())
        continue; // duplicate target, re-draw
      targets.push_back(u);
    }
    for (int u : targets) {
      edges.push_back({v, u, 1.0});
      ++indeg[u];
      ++total_mass;
    }
  }
  return Network(n, std::move(edges));
}

/// Replaces every edge weight with an independent Uniform[lo, hi) draw;
/// topology is unchanged. Edges are visited in canonical (src, dst) order,
/// so the result is deterministic given the seed.
inline Network assign_uniform_weights(const Network& net, double lo, double hi,
                                      std::uint64_t seed) {
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi))
    throw std::invalid_argument("assign_uniform_weights: need 0 <= lo <= hi <= 1");
  rng_t rng = make_rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<Edge> edges = net.edges();
  for (Edge& e : edges) e.weight = dist(rng);
  return Network(net.nodes(), std::move(edges));
}

struct InteractionCount {
  int src = 0;
  int dst = 0;
  long long count = 0;
};

/// Builds a network from pairwise interaction counts: an edge (i, j) is
/// created for every pair with count m >= 1 and gets weight
/// 1 - (1 - phi) * (1 - xi)^m, where xi is the per-event transmission
/// probability and phi a floor applied to any pair that interacted at all.
/// Self-loop counts are ignored with a warning on stderr.
inline Network weights_from_interactions(int n,
                                         const std::vector<InteractionCount>& counts,
                                         double xi, double phi) {
  if (!(xi >= 0.0 && xi <= 1.0) || !(phi >= 0.0 && phi <= 1.0))
    throw std::invalid_argument("weights_from_interactions: xi and phi must lie in [0, 1]");
  std::vector<Edge> edges;
  edges.reserve(counts.size());
  std::size_t self_loops = 0;
  for (const InteractionCount& c : counts) {
    if (c.count < 0)
      throw std::invalid_argument("weights_from_interactions: negative interaction count");
    if (c.src == c.dst) {
      ++self_loops;
      continue;
    }
    if (c.count == 0) continue;
    double w = 1.0 - (1.0 - phi) * std::pow(1.0 - xi, static_cast<double>(c.count));
    edges.push_back({c.src, c.dst, w});
  }
  if (self_loops > 0)
    std::cerr << "warning: ignored " << self_loops
              << " self-loop interaction count(s)\n";
  return Network(n, std::move(edges));
}

// Interaction counts file: same TSV layout as networks with an integer third
// column: `# nodes=<n>` header, then `src<TAB>dst<TAB>count` lines.
inline std::pair<int, std::vector<InteractionCount>>
read_interaction_counts(const std::string& path) {
  auto in = detail::open_input(path);
  std::string raw;
  std::size_t lineno = 0;
  long long n = -1;
  std::vector<InteractionCount> counts;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kHeader = "# nodes=";
      if (line.substr(0, kHeader.size()) == kHeader) {
        if (!detail::parse_long(line.substr(kHeader.size()), n) || n < 0)
          throw parse_error(path, lineno, "malformed node count header");
      }
      continue;
    }
    if (n < 0) throw parse_error(path, lineno, "record before '# nodes=<n>' header");
    auto fields = detail::split_tabs(line);
    long long src = 0, dst = 0, m = 0;
    if (fields.size() != 3 || !detail::parse_long(fields[0], src) ||
        !detail::parse_long(fields[1], dst) || !detail::parse_long(fields[2], m))
      throw parse_error(path, lineno, "expected 'src<TAB>dst<TAB>count'");
    if (src < 0 || src >= n || dst < 0 || dst >= n)
      throw parse_error(path, lineno, "node id out of range");
    if (m < 0) throw parse_error(path, lineno, "negative interaction count");
    counts.push_back({static_cast<int>(src), static_cast<int>(dst), m});
  }
  if (n < 0) throw parse_error(path, 0, "missing '# nodes=<n>' header");
  return {static_cast<int>(n), std::move(counts)};
}

} // namespace connie
