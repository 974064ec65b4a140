// SI cascade simulator. An infected node tries each out-edge exactly once
// per cascade; a successful trial schedules the neighbor's infection after a
// delay drawn from the transmission model. When several attempts on the same
// node succeed, the earliest arrival wins. Infected nodes never recover.

#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "connie/cascade.hpp"
#include "connie/network.hpp"
#include "connie/rng.hpp"
#include "connie/transmission.hpp"

namespace connie {

namespace detail {

struct Arrival {
  double time;
  int node;
  int edge_index; // index into net.edges(); -1 for the seed

  // min-heap order; ties broken by node then edge so runs are reproducible
  friend bool operator>(const Arrival& a, const Arrival& b) {
    if (a.time != b.time) return a.time > b.time;
    if (a.node != b.node) return a.node > b.node;
    return a.edge_index > b.edge_index;
  }
};

// Realized transmission delays: the sum and count of (infectee time -
// infector time) over attempts that actually delivered an infection.
struct DelayStats {
  double sum = 0.0;
  long long count = 0;
};

// Core simulation. When `covered` is non-null, marks the index of every edge
// that actually delivered an infection (the winning attempt for each node).
inline Cascade simulate_cascade_impl(const Network& net, const TransmissionModel& model,
                                     int seed_node, rng_t& rng,
                                     std::vector<char>* covered,
                                     DelayStats* delays = nullptr) {
  if (seed_node < 0 || seed_node >= net.nodes())
    throw std::invalid_argument("simulate_cascade: seed node out of range");

  std::vector<char> infected(static_cast<std::size_t>(net.nodes()), 0);
  std::priority_queue<Arrival, std::vector<Arrival>, std::greater<Arrival>> queue;
  queue.push({0.0, seed_node, -1});

  Cascade cascade;
  cascade.seed_node = seed_node;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> infected_at(static_cast<std::size_t>(net.nodes()), 0.0);

  while (!queue.empty()) {
    Arrival a = queue.top();
    queue.pop();
    if (infected[a.node]) continue; // a later attempt on an already infected node
    infected[a.node] = 1;
    infected_at[a.node] = a.time;
    cascade.records.push_back({a.node, a.time});
    if (covered && a.edge_index >= 0) (*covered)[a.edge_index] = 1;
    if (delays && a.edge_index >= 0) {
      delays->sum += a.time - infected_at[net.edges()[a.edge_index].src];
      ++delays->count;
    }

    auto out = net.out_edges(a.node);
    for (const Edge& e : out) {
      if (infected[e.dst]) continue; // trial happens only against susceptible nodes
      if (unit(rng) >= e.weight) continue;
      double delay = sample_delay(model, rng);
      int edge_index = static_cast<int>(&e - net.edges().data());
      queue.push({a.time + delay, e.dst, edge_index});
    }
  }
  detail::finalize_cascade(cascade, net.nodes());
  return cascade;
}

} // namespace detail

inline Cascade simulate_cascade(const Network& net, const TransmissionModel& model,
                                int seed_node, rng_t& rng) {
  return detail::simulate_cascade_impl(net, model, seed_node, rng, nullptr);
}

struct GenerationReport {
  int cascades_kept = 0;
  int cascades_discarded = 0; // fewer than 2 infected nodes, no signal
  double coverage = 0.0;      // fraction of true edges that delivered an infection
  bool coverage_warning = false;      // cap reached below the target
  double mean_transmission_delay = 0.0; // mean realized infector-to-infectee delay
};

/// Simulates cascades from uniformly random seed nodes until the requested
/// fraction of true edges has delivered at least one infection, or the cap is
/// reached. Single-node cascades are discarded and not counted. Each cascade
/// attempt uses its own RNG stream derived from (master seed, attempt index),
/// so output depends only on (master_seed, max_cascades).
inline std::pair<CascadeSet, GenerationReport>
generate_cascade_set(const Network& net, const TransmissionModel& model,
                     double coverage_target, int max_cascades,
                     std::uint64_t master_seed) {
  if (!(coverage_target > 0.0 && coverage_target <= 1.0))
    throw std::invalid_argument("generate_cascade_set: coverage target must be in (0, 1]");
  if (max_cascades < 1)
    throw std::invalid_argument("generate_cascade_set: max_cascades must be >= 1");

  CascadeSet cs;
  cs.n = net.nodes();
  GenerationReport report;
  std::vector<char> covered(net.edge_count(), 0);
  std::size_t covered_count = 0;
  const std::size_t total_edges = net.edge_count();
  report.coverage = total_edges == 0 ? 1.0 : 0.0;

  detail::DelayStats delays;
  for (int attempt = 0; attempt < max_cascades; ++attempt) {
    if (total_edges > 0 &&
        static_cast<double>(covered_count) / total_edges >= coverage_target)
      break;
    if (total_edges == 0) break;

    rng_t rng = make_stream(master_seed, static_cast<std::uint64_t>(attempt));
    std::uniform_int_distribution<int> seed_dist(0, net.nodes() - 1);
    int seed_node = seed_dist(rng);
    detail::DelayStats cascade_delays;
    Cascade c = detail::simulate_cascade_impl(net, model, seed_node, rng, &covered,
                                              &cascade_delays);
    if (c.records.size() < 2) {
      ++report.cascades_discarded;
      continue;
    }
    c.id = static_cast<long long>(cs.cascades.size());
    cs.cascades.push_back(std::move(c));
    ++report.cascades_kept;
    delays.sum += cascade_delays.sum;
    delays.count += cascade_delays.count;

    covered_count = 0;
    for (char f : covered) covered_count += f;
    report.coverage = static_cast<double>(covered_count) / total_edges;
  }
  report.coverage_warning = report.coverage < coverage_target;
  if (delays.count > 0) report.mean_transmission_delay = delays.sum / delays.count;
  return {std::move(cs), report};
}

/// Mean infection-time gap between a node and its earliest-infected strict
/// predecessor, averaged within each cascade and then across cascades. This
/// is the signal scale used for the noise-to-signal ratio.
inline double mean_transmission_gap(const CascadeSet& cs) {
  double cascade_sum = 0.0;
  int cascades_counted = 0;
  for (const Cascade& c : cs.cascades) {
    if (c.records.empty()) continue;
    // Records are sorted by time, so the earliest strict predecessor of any
    // node is the first record (when it is strictly earlier).
    const double earliest = c.records.front().time;
    double gap_sum = 0.0;
    int gaps = 0;
    for (const InfectionRecord& r : c.records) {
      if (r.time > earliest) {
        gap_sum += r.time - earliest;
        ++gaps;
      }
    }
    if (gaps > 0) {
      cascade_sum += gap_sum / gaps;
      ++cascades_counted;
    }
  }
  return cascades_counted == 0 ? 0.0 : cascade_sum / cascades_counted;
}

// Perturbed non-seed times are clamped to this floor rather than to 0 so the
// seed remains the unique time-0 node and the file format stays valid.
inline constexpr double kMinPerturbedTime = 1e-12;

/// Adds independent Normal(0, sigma^2) noise to every non-seed infection
/// time, clamping so times stay positive. Returns the perturbed set and the
/// noise-to-signal ratio: mean applied |perturbation| divided by the input
/// set's mean transmission gap.
inline std::pair<CascadeSet, double> perturb_times(const CascadeSet& cs, double sigma,
                                                   std::uint64_t seed) {
  if (!(sigma >= 0.0))
    throw std::invalid_argument("perturb_times: sigma must be >= 0");

  CascadeSet out = cs;
  if (sigma == 0.0) return {std::move(out), 0.0};

  rng_t rng = make_rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  double abs_perturbation_sum = 0.0;
  long long perturbed = 0;
  for (Cascade& c : out.cascades) {
    for (InfectionRecord& r : c.records) {
      if (r.node == c.seed_node) continue; // seed stays at time 0
      double t_new = std::max(r.time + noise(rng), kMinPerturbedTime);
      abs_perturbation_sum += std::abs(t_new - r.time);
      ++perturbed;
      r.time = t_new;
    }
    detail::finalize_cascade(c, out.n);
  }
  double signal = mean_transmission_gap(cs);
  double ratio = (perturbed == 0 || signal <= 0.0)
                     ? 0.0
                     : (abs_perturbation_sum / perturbed) / signal;
  return {std::move(out), ratio};
}

} // namespace connie
