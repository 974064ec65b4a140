// Cascade observations: per-cascade (node, infection time) records. Nodes
// absent from a cascade were never infected in it.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "connie/io.hpp"

namespace connie {

struct InfectionRecord {
  int node = 0;
  double time = 0.0;

  friend bool operator==(const InfectionRecord&, const InfectionRecord&) = default;
};

struct Cascade {
  long long id = 0;
  int seed_node = -1;
  // Sorted by (time, node). Exactly one record has time 0: the seed.
  std::vector<InfectionRecord> records;

  /// Infection time of `node`, or +infinity if it was never infected.
  double time_of(int node) const {
    for (const InfectionRecord& r : records)
      if (r.node == node) return r.time;
    return std::numeric_limits<double>::infinity();
  }

  bool contains(int node) const { return std::isfinite(time_of(node)); }

  friend bool operator==(const Cascade&, const Cascade&) = default;
};

struct CascadeSet {
  int n = 0; // node count of the originating network
  std::vector<Cascade> cascades;

  friend bool operator==(const CascadeSet&, const CascadeSet&) = default;
};

namespace detail {

// Canonicalizes and checks one cascade: sorted records, distinct nodes,
// finite nonnegative times, exactly one time-0 node (the seed).
inline void finalize_cascade(Cascade& c, int n) {
  for (const InfectionRecord& r : c.records) {
    if (r.node < 0 || r.node >= n) throw std::invalid_argument("cascade node id out of range");
    if (!(r.time >= 0.0) || !std::isfinite(r.time))
      throw std::invalid_argument("cascade time must be finite and >= 0");
  }
  std::sort(c.records.begin(), c.records.end(),
            [](const InfectionRecord& a, const InfectionRecord& b) {
              return a.time != b.time ? a.time < b.time : a.node < b.node;
            });
  for (std::size_t i = 1; i < c.records.size(); ++i)
    if (c.records[i].node == c.records[i - 1].node)
      throw std::invalid_argument("duplicate node in cascade");
  int zeros = 0;
  for (const InfectionRecord& r : c.records) zeros += (r.time == 0.0);
  if (c.records.empty() || zeros != 1)
    throw std::invalid_argument("cascade must have exactly one time-0 node");
  c.seed_node = c.records.front().node;
}

} // namespace detail

// ---------------------------------------------------------------------------
// File format: UTF-8 TSV long format, one record per infection:
// `cascade_id<TAB>node<TAB>time`, with a required header `# cascades n=<n>`.
// Times round-trip exactly (17 significant digits).

inline void write_cascades(const CascadeSet& cs, const std::string& path) {
  auto out = detail::open_output(path);
  out << "# cascades n=" << cs.n << "\n";
  for (const Cascade& c : cs.cascades)
    for (const InfectionRecord& r : c.records)
      out << c.id << '\t' << r.node << '\t' << detail::format_double(r.time) << "\n";
  if (!out) throw parse_error(path, 0, "write failed");
}

inline CascadeSet read_cascades(const std::string& path) {
  auto in = detail::open_input(path);
  std::string raw;
  std::size_t lineno = 0;
  long long n = -1;
  std::map<long long, Cascade> by_id;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = detail::chomp(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kHeader = "# cascades n=";
      if (line.substr(0, kHeader.size()) == kHeader) {
        if (!detail::parse_long(line.substr(kHeader.size()), n) || n < 0)
          throw parse_error(path, lineno, "malformed header");
      }
      continue;
    }
    if (n < 0) throw parse_error(path, lineno, "record before '# cascades n=<n>' header");
    auto fields = detail::split_tabs(line);
    long long id = 0, node = 0;
    double t = 0.0;
    if (fields.size() != 3 || !detail::parse_long(fields[0], id) ||
        !detail::parse_long(fields[1], node) || !detail::parse_double(fields[2], t))
      throw parse_error(path, lineno, "expected 'cascade_id<TAB>node<TAB>time'");
    if (node < 0 || node >= n) throw parse_error(path, lineno, "node id out of range");
    if (!(t >= 0.0) || !std::isfinite(t))
      throw parse_error(path, lineno, "time must be finite and >= 0");
    Cascade& c = by_id[id];
    c.id = id;
    for (const InfectionRecord& r : c.records)
      if (r.node == node)
        throw parse_error(path, lineno, "duplicate (cascade, node) record");
    c.records.push_back({static_cast<int>(node), t});
  }
  if (n < 0) throw parse_error(path, 0, "missing '# cascades n=<n>' header");

  CascadeSet cs;
  cs.n = static_cast<int>(n);
  cs.cascades.reserve(by_id.size());
  for (auto& [id, c] : by_id) {
    try {
      detail::finalize_cascade(c, cs.n);
    } catch (const std::invalid_argument& e) {
      throw parse_error(path, 0, "cascade " + std::to_string(id) + ": " + e.what());
    }
    cs.cascades.push_back(std::move(c));
  }
  return cs;
}

} // namespace connie
