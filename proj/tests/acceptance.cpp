// Acceptance suite: runs every acceptance criterion end to end and prints
// one PASS/FAIL line per criterion. Exits with the number of failures.
//
// The experiments reproduce the synthetic protocol: a 512-node scale-free
// network (out-degree 2) with Uniform[0.05, 1] weights, cascades generated
// until 99% of edges transmitted at least once, and a precision-recall
// sweep over the sparsity parameter for each transmission model.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "connie/connie.hpp"
#include "test_util.hpp"

using namespace connie;

namespace {

struct Outcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::vector<Outcome> g_outcomes;

void record(const std::string& name, bool pass, const std::string& detail) {
  g_outcomes.push_back({name, pass, detail});
  std::cerr << (pass ? "[pass] " : "[FAIL] ") << name << ": " << detail << "\n";
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

double now_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

struct Experiment {
  std::string label;
  TransmissionModel model;
  GenerationReport gen;
  EvalReport sweep;
  double sweep_seconds = 0.0;
  CascadeSet cascades;
};

Network make_truth() {
  return assign_uniform_weights(generate_preferential_attachment(512, 2, 7), 0.05,
                                1.0, 8);
}

Experiment run_experiment(const std::string& label, const TransmissionModel& model,
                          const Network& truth, std::uint64_t seed) {
  std::cerr << "== experiment: " << label << " ==\n";
  Experiment e;
  e.label = label;
  e.model = model;
  auto [cs, gen] = generate_cascade_set(truth, model, 0.99, 100000, seed);
  e.cascades = std::move(cs);
  e.gen = gen;
  std::cerr << "   cascades " << gen.cascades_kept << ", coverage " << fmt(gen.coverage)
            << ", mean delay " << fmt(gen.mean_transmission_delay) << "\n";

  auto start = std::chrono::steady_clock::now();
  SolverOptions opts;
  e.sweep = pr_sweep(e.cascades, model, truth, default_rho_grid(), opts);
  e.sweep_seconds = now_seconds(start);
  std::cerr << "   break-even " << fmt(e.sweep.break_even) << ", mse "
            << fmt(e.sweep.mse_at_true_edge_count) << " (" << fmt(e.sweep_seconds, 1)
            << " s)\n";
  return e;
}

// Candidate pairs recomputed from the raw cascades, independent of
// build_subproblem: j -> i is allowed only if j strictly precedes i
// somewhere.
std::set<std::pair<int, int>> strict_predecessor_pairs(const CascadeSet& cs) {
  std::set<std::pair<int, int>> pairs;
  for (const Cascade& c : cs.cascades)
    for (const InfectionRecord& ri : c.records)
      for (const InfectionRecord& rj : c.records) {
        if (rj.time >= ri.time) break; // records sorted by time
        pairs.insert({rj.node, ri.node});
      }
  return pairs;
}

bool structural_zeros_hold(const Network& truth, const CascadeSet& cs,
                           const TransmissionModel& model) {
  SolverOptions opts; // rho = 0 gives the densest output
  auto [inferred, rep] = infer_network(cs, model, opts);
  auto allowed = strict_predecessor_pairs(cs);
  for (const Edge& e : inferred.edges())
    if (allowed.count({e.src, e.dst}) == 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// CLI helpers (criterion 7).

std::string cli_binary() {
  if (const char* env = std::getenv("CONNIE_BIN")) return env;
  return "./tools/connie"; // build-tree default
}

int run_cli(const std::string& args) {
  std::string cmd = cli_binary() + " " + args + " 2>/dev/null";
  return std::system(cmd.c_str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool dirs_identical(const std::filesystem::path& a, const std::filesystem::path& b,
                    std::string* why) {
  std::set<std::string> names;
  for (auto& entry : std::filesystem::directory_iterator(a))
    names.insert(entry.path().filename().string());
  for (auto& entry : std::filesystem::directory_iterator(b))
    names.insert(entry.path().filename().string());
  for (const std::string& name : names) {
    if (!std::filesystem::exists(a / name) || !std::filesystem::exists(b / name)) {
      *why = name + " missing on one side";
      return false;
    }
    if (slurp(a / name) != slurp(b / name)) {
      *why = name + " differs";
      return false;
    }
  }
  return true;
}

} // namespace

// ---------------------------------------------------------------------------

int main() {
  std::filesystem::path work =
      std::filesystem::temp_directory_path() / "connie_acceptance";
  std::filesystem::remove_all(work);
  std::filesystem::create_directories(work);

  Network truth = make_truth();
  std::cerr << "truth: " << truth.nodes() << " nodes, " << truth.edge_count()
            << " edges\n";

  std::vector<std::pair<std::string, TransmissionModel>> models = {
      {"exponential", Exponential{1.0}},
      {"powerlaw", PowerLaw{2.0, 1.0}},
      {"weibull", Weibull{9.5, 2.3}},
  };

  // Criteria 1, 2, 8 share the three model experiments.
  std::vector<Experiment> experiments;
  for (std::size_t m = 0; m < models.size(); ++m)
    experiments.push_back(
        run_experiment(models[m].first, models[m].second, truth, 11 + m));

  // --- Criterion 1: PR break-even >= 0.80 within 10 minutes, all models.
  {
    bool pass = true;
    std::string detail;
    for (const Experiment& e : experiments) {
      bool ok = e.sweep.break_even >= 0.80 && e.sweep_seconds <= 600.0 &&
                e.gen.coverage >= 0.99;
      pass = pass && ok;
      detail += e.label + " " + fmt(e.sweep.break_even) + " (" +
                fmt(e.sweep_seconds, 1) + " s, coverage " + fmt(e.gen.coverage, 3) +
                "); ";
    }
    record("criterion 1: PR break-even >= 0.80 within 10 min (exp, powerlaw, weibull)",
           pass, detail);
  }

  // --- Criterion 2: weight MSE at the true-edge-count sweep point <= 0.07.
  {
    bool pass = true;
    std::string detail;
    for (const Experiment& e : experiments) {
      pass = pass && e.sweep.mse_at_true_edge_count <= 0.07;
      detail += e.label + " " + fmt(e.sweep.mse_at_true_edge_count) + " (at rho " +
                fmt(e.sweep.mse_rho, 2) + "); ";
    }
    record("criterion 2: edge-weight MSE <= 0.07 at the true edge count", pass, detail);
  }

  // --- Criterion 3: noise robustness at noise-to-signal ratio 0.4.
  {
    const Experiment& base = experiments[0]; // exponential
    // Calibrate sigma so the artifact's measured noise-to-signal ratio is
    // 0.4 (the ratio definition normalizes by the mean gap to the
    // earliest-infected predecessor).
    double sigma = 1.0, ratio = 0.0;
    for (int i = 0; i < 6; ++i) {
      auto [probe, r] = perturb_times(base.cascades, sigma, 20);
      ratio = r;
      if (std::abs(ratio - 0.4) <= 0.005) break;
      sigma *= 0.4 / ratio;
    }
    auto [noisy, final_ratio] = perturb_times(base.cascades, sigma, 21);
    // The same physical noise expressed against the mean realized
    // transmission delay (the per-hop signal scale).
    double hop_ratio = final_ratio *
                       mean_transmission_gap(base.cascades) /
                       base.gen.mean_transmission_delay;

    auto start = std::chrono::steady_clock::now();
    SolverOptions opts;
    EvalReport noisy_sweep =
        pr_sweep(noisy, base.model, truth, default_rho_grid(), opts);
    double seconds = now_seconds(start);

    double degradation = base.sweep.break_even - noisy_sweep.break_even;
    bool pass = degradation <= 0.15;
    record("criterion 3: break-even degradation <= 0.15 at noise-to-signal 0.4", pass,
           "sigma " + fmt(sigma) + ", ratio " + fmt(final_ratio) +
               " (per-hop-delay convention " + fmt(hop_ratio) + "), clean " +
               fmt(base.sweep.break_even) + " -> noisy " +
               fmt(noisy_sweep.break_even) + ", degradation " + fmt(degradation) +
               " (" + fmt(seconds, 1) + " s)");

    // Criterion 8 also covers the noisy corpus.
    experiments.push_back(Experiment{"exponential+noise", base.model, GenerationReport{},
                                     std::move(noisy_sweep), seconds,
                                     std::move(noisy)});
  }

  // --- Criterion 4: solver vs oracle on small designs.
  {
    rng_t rng = make_rng(4242);
    SolverOptions opts;
    int grid_failures = 0;
    for (int trial = 0; trial < 50; ++trial) {
      NodeSubproblem sp = testutil::random_subproblem(rng, 1 + trial % 2);
      std::vector<double> solved = solve_node(sp, opts);
      std::vector<double> oracle = testutil::grid_search(sp, 0.0, 1e-3);
      for (std::size_t j = 0; j < solved.size(); ++j)
        if (std::abs(solved[j] - oracle[j]) > 1e-2) ++grid_failures;
    }
    int km_failures = 0;
    double max_err = 0.0;
    for (int k = 1; k <= 5; ++k)
      for (int m = 1; m <= 5; ++m) {
        NodeSubproblem sp = testutil::single_parent_design(k, m, 0.61);
        std::vector<double> solved = solve_node(sp, opts);
        double err = std::abs(solved[0] - static_cast<double>(k) / (k + m));
        max_err = std::max(max_err, err);
        if (err > 1e-4) ++km_failures;
      }
    bool pass = grid_failures == 0 && km_failures == 0;
    record("criterion 4: solve_node matches grid search and k/(k+m) closed forms", pass,
           "grid mismatches " + std::to_string(grid_failures) +
               "/50, k/(k+m) mismatches " + std::to_string(km_failures) +
               "/25 (max err " + fmt(max_err, 6) + ")");
  }

  // --- Criterion 5: convexity and gradient checks for all three models.
  {
    bool pass = true;
    std::string detail;
    for (const auto& [label, model] : models) {
      // Evidence drawn from real cascades under this transmission model.
      Network net = assign_uniform_weights(generate_erdos_renyi(64, 320, 31), 0.05,
                                           1.0, 32);
      auto [cs, gen] = generate_cascade_set(net, model, 0.9, 4000, 33);
      std::vector<NodeSubproblem> pool;
      for (int i = 0; i < cs.n; ++i) {
        NodeSubproblem sp = build_subproblem(cs, i, model);
        if (!sp.empty()) pool.push_back(std::move(sp));
      }

      rng_t rng = make_rng(55);
      std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
      std::uniform_real_distribution<double> lambda(0.0, 1.0);

      int convexity_violations = 0;
      for (double rho : {0.0, 1.0, 10.0}) {
        for (int t = 0; t < 200; ++t) {
          const NodeSubproblem& sp = pool[pick(rng)];
          TransformedPoint x = testutil::random_interior_point(rng, sp.dim());
          TransformedPoint y = testutil::random_interior_point(rng, sp.dim());
          double l = lambda(rng);
          TransformedPoint mid;
          for (std::size_t j = 0; j < sp.dim(); ++j)
            mid.b_hat.push_back(l * x.b_hat[j] + (1.0 - l) * y.b_hat[j]);
          if (objective(sp, mid, rho) >
              l * objective(sp, x, rho) + (1.0 - l) * objective(sp, y, rho) + 1e-8)
            ++convexity_violations;
        }
      }

      int gradient_violations = 0;
      for (int t = 0; t < 100; ++t) {
        const NodeSubproblem& sp = pool[pick(rng)];
        TransformedPoint x = testutil::random_interior_point(rng, sp.dim());
        double rho = (t % 3) * 0.7;
        std::vector<double> g = gradient(sp, x, rho);
        std::vector<double> fd = testutil::fd_gradient(sp, x, rho);
        for (std::size_t j = 0; j < sp.dim(); ++j)
          if (std::abs(g[j] - fd[j]) > 1e-5 * std::max(1.0, std::abs(fd[j])))
            ++gradient_violations;
      }

      pass = pass && convexity_violations == 0 && gradient_violations == 0;
      detail += label + " convexity " + std::to_string(convexity_violations) +
                "/600, gradient " + std::to_string(gradient_violations) + "/100; ";
    }
    record("criterion 5: convexity and finite-difference gradient checks", pass, detail);
  }

  // --- Criterion 6: simulator statistics.
  {
    Network two(2, {{0, 1, 0.3}});
    rng_t rng = make_rng(66);
    const int trials = 10000;
    int infected = 0;
    for (int t = 0; t < trials; ++t) {
      Cascade c = simulate_cascade(two, Exponential{1.0}, 0, rng);
      infected += (c.records.size() == 2);
    }
    double freq = static_cast<double>(infected) / trials;
    double band = 3.0 * std::sqrt(0.3 * 0.7 / trials);
    bool freq_ok = std::abs(freq - 0.3) <= band;

    bool ks_ok = true;
    std::string ks_detail;
    std::uint64_t ks_seed = 67;
    for (const auto& [label, model] : models) {
      rng_t krng = make_rng(ks_seed++);
      std::vector<double> samples(10000);
      for (double& s : samples) s = sample_delay(model, krng);
      double ks =
          testutil::ks_statistic(samples, [&](double t) { return cdf(model, t); });
      ks_ok = ks_ok && ks < 0.02;
      ks_detail += label + " KS " + fmt(ks) + "; ";
    }
    record("criterion 6: 2-node frequency within 3 sigma; KS < 0.02 for all samplers",
           freq_ok && ks_ok,
           "frequency " + fmt(freq) + " (band " + fmt(band) + "); " + ks_detail);
  }

  // --- Criterion 7: determinism across worker counts and CLI runs.
  {
    const Experiment& base = experiments[0];
    SolverOptions opts;
    opts.rho = 5.0;
    opts.threads = 1;
    auto [n1, r1] = infer_network(base.cascades, base.model, opts);
    opts.threads = 4;
    auto [n4, r4] = infer_network(base.cascades, base.model, opts);
    opts.threads = 8;
    auto [n8, r8] = infer_network(base.cascades, base.model, opts);
    bool workers_ok = (n1 == n4) && (n1 == n8);

    // Seeded CLI commands, run twice into separate directories.
    auto dir_a = work / "cli_a";
    auto dir_b = work / "cli_b";
    bool cli_ok = true;
    std::string cli_why;
    for (const auto& dir : {dir_a, dir_b}) {
      std::filesystem::create_directories(dir);
      std::string d = dir.string();
      int rc = 0;
      rc |= run_cli("generate-network --model pa --nodes 128 --out-degree 2 "
                    "--weights uniform:0.05,1.0 --seed 5 --out " +
                    d + "/net.tsv > " + d + "/gen.json");
      rc |= run_cli("simulate --net " + d + "/net.tsv --w exp:1.0 --coverage 0.95 "
                    "--max-cascades 4000 --seed 6 --out " + d +
                    "/casc.tsv --report " + d + "/sim.json > " + d + "/sim_out.json");
      rc |= run_cli("perturb --cascades " + d + "/casc.tsv --sigma 0.25 --seed 9 "
                    "--out " + d + "/noisy.tsv > " + d + "/perturb.json");
      int threads = (&dir == &dir_a) ? 1 : 4; // output must not depend on this
      rc |= run_cli("infer --cascades " + d + "/casc.tsv --w exp:1.0 --rho 2.0 "
                    "--threads " + std::to_string(threads) + " --out " + d +
                    "/ahat.tsv --report " + d + "/inf.json > " + d + "/inf_out.json");
      rc |= run_cli("sweep --cascades " + d + "/casc.tsv --truth " + d +
                    "/net.tsv --w exp:1.0 --rho-grid list:0,1,10,100 --out-report " +
                    d + "/eval.json --out-curve " + d + "/curve.csv > " + d +
                    "/sweep_out.json");
      rc |= run_cli("evaluate --truth " + d + "/net.tsv --inferred " + d +
                    "/ahat.tsv --out " + d + "/metrics.json > " + d + "/eval_out.json");
      if (rc != 0) {
        cli_ok = false;
        cli_why = "a CLI command exited nonzero";
      }
    }
    if (cli_ok) cli_ok = dirs_identical(dir_a, dir_b, &cli_why);
    record("criterion 7: bit-identical output across 1/4/8 workers and repeated CLI runs",
           workers_ok && cli_ok,
           std::string("workers ") + (workers_ok ? "identical" : "DIFFER") + "; CLI " +
               (cli_ok ? "byte-identical (threads 1 vs 4)" : cli_why));
  }

  // --- Criterion 8: structural zeros on every acceptance corpus.
  {
    bool pass = true;
    std::string detail;
    for (const Experiment& e : experiments) {
      bool ok = structural_zeros_hold(truth, e.cascades, e.model);
      pass = pass && ok;
      detail += e.label + (ok ? " ok; " : " VIOLATED; ");
    }
    record("criterion 8: inferred weights are zero off the candidate-parent sets", pass,
           detail);
  }

  // ---------------------------------------------------------------------
  std::printf("\n");
  int failures = 0;
  for (const Outcome& o : g_outcomes) {
    std::printf("%s  %s  [%s]\n", o.pass ? "PASS" : "FAIL", o.name.c_str(),
                o.detail.c_str());
    failures += !o.pass;
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(g_outcomes.size()) - failures,
              g_outcomes.size());
  return failures;
}
