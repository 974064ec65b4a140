// connie: simulate contagion cascades over a hidden weighted directed
// network and reconstruct the network from node infection times alone.
//
// Subcommands: generate-network, simulate, perturb, infer, sweep, evaluate,
// run. All bulk data is TSV, all reports are JSON; every seeded command is
// bit-reproducible (timing goes to stderr, never into output files).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "connie/connie.hpp"

using json = nlohmann::ordered_json;

namespace {

struct WeightSpec {
  bool assign = false;
  double lo = 0.0;
  double hi = 1.0;
};

// `uniform:lo,hi` or `none`
WeightSpec parse_weight_spec(const std::string& text) {
  if (text.empty() || text == "none") return {};
  constexpr std::string_view kPrefix = "uniform:";
  if (text.rfind(kPrefix, 0) != 0)
    throw CLI::ValidationError("--weights", "expected 'uniform:lo,hi' or 'none'");
  std::size_t comma = text.find(',', kPrefix.size());
  if (comma == std::string::npos)
    throw CLI::ValidationError("--weights", "expected 'uniform:lo,hi'");
  try {
    WeightSpec spec;
    spec.assign = true;
    spec.lo = std::stod(text.substr(kPrefix.size(), comma - kPrefix.size()));
    spec.hi = std::stod(text.substr(comma + 1));
    return spec;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--weights", "malformed bounds");
  }
}

// `log:lo,hi,k` (k log-spaced values plus rho=0) or `list:a,b,...`
std::vector<double> parse_rho_grid(const std::string& text) {
  auto bad = [&](const std::string& why) {
    return CLI::ValidationError("--rho-grid", "'" + text + "': " + why);
  };
  auto parse_csv = [&](std::string_view body) {
    std::vector<double> vals;
    while (!body.empty()) {
      std::size_t comma = body.find(',');
      try {
        vals.push_back(std::stod(std::string(body.substr(0, comma))));
      } catch (const std::exception&) {
        throw bad("malformed number");
      }
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return vals;
  };

  std::vector<double> grid;
  if (text.rfind("log:", 0) == 0) {
    std::vector<double> p = parse_csv(std::string_view(text).substr(4));
    if (p.size() != 3 || p[0] <= 0.0 || p[1] < p[0] || p[2] < 1.0)
      throw bad("expected log:lo,hi,count with 0 < lo <= hi");
    int count = static_cast<int>(p[2]);
    grid.push_back(0.0);
    for (int i = 0; i < count; ++i) {
      double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      grid.push_back(std::pow(10.0, std::log10(p[0]) + t * (std::log10(p[1]) - std::log10(p[0]))));
    }
  } else if (text.rfind("list:", 0) == 0) {
    grid = parse_csv(std::string_view(text).substr(5));
    std::sort(grid.begin(), grid.end());
  } else {
    throw bad("expected 'log:lo,hi,count' or 'list:a,b,...'");
  }
  if (grid.empty()) throw bad("empty grid");
  for (double r : grid)
    if (r < 0.0) throw bad("rho must be nonnegative");
  return grid;
}

json network_summary(const connie::Network& net) {
  json j;
  j["nodes"] = net.nodes();
  j["edges"] = net.edge_count();
  if (!net.edges().empty()) {
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (const connie::Edge& e : net.edges()) {
      lo = std::min(lo, e.weight);
      hi = std::max(hi, e.weight);
      sum += e.weight;
    }
    j["weight_min"] = lo;
    j["weight_max"] = hi;
    j["weight_mean"] = sum / static_cast<double>(net.edge_count());
  }
  return j;
}

json generation_report_json(const connie::GenerationReport& r) {
  return json{{"cascades", r.cascades_kept},
              {"discarded", r.cascades_discarded},
              {"coverage", r.coverage},
              {"coverage_warning", r.coverage_warning},
              {"mean_transmission_delay", r.mean_transmission_delay}};
}

json solve_report_json(const connie::SolveReport& r, int nodes) {
  json per_node = json::array();
  bool all_converged = true;
  long long iterations = 0;
  for (const connie::NodeReport& nr : r.nodes) {
    all_converged = all_converged && nr.converged;
    iterations += nr.iterations;
    per_node.push_back(json{{"node", nr.node},
                            {"iterations", nr.iterations},
                            {"objective", nr.objective},
                            {"converged", nr.converged},
                            {"stage1_support", nr.stage1_support}});
  }
  return json{{"nodes", nodes},
              {"total_edges", r.total_edges},
              {"converged_all", all_converged},
              {"total_iterations", iterations},
              {"per_node", std::move(per_node)}};
}

json eval_report_json(const connie::EvalReport& r) {
  json curve = json::array();
  for (const connie::PRPoint& p : r.curve)
    curve.push_back(json{{"rho", p.rho},
                         {"precision", p.precision},
                         {"recall", p.recall},
                         {"edges_inferred", p.edges_inferred}});
  return json{{"break_even", r.break_even},
              {"extrapolated", r.extrapolated},
              {"mse_at_true_edge_count", r.mse_at_true_edge_count},
              {"mse_rho", r.mse_rho},
              {"curve", std::move(curve)}};
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int g_verbosity = 0;

void note_timing(const std::string& what, double seconds) {
  if (g_verbosity >= 1)
    std::cerr << what << " took " << seconds << " s\n";
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string model;
  int nodes = 0;
  long long edges = -1;
  int out_degree = 2;
  std::string weights = "none";
  std::string counts_file;
  double xi = 0.0;
  double phi = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

connie::Network build_network(const GenerateArgs& a) {
  connie::Network net;
  if (a.model == "er") {
    if (a.edges < 0) throw std::runtime_error("--edges is required for --model er");
    net = connie::generate_erdos_renyi(a.nodes, a.edges, a.seed);
  } else if (a.model == "pa") {
    net = connie::generate_preferential_attachment(a.nodes, a.out_degree, a.seed);
  } else if (a.model == "interactions") {
    if (a.counts_file.empty())
      throw std::runtime_error("--counts is required for --model interactions");
    auto [n, counts] = connie::read_interaction_counts(a.counts_file);
    net = connie::weights_from_interactions(n, counts, a.xi, a.phi);
  } else {
    throw std::runtime_error("unknown network model '" + a.model + "'");
  }
  WeightSpec w = parse_weight_spec(a.weights);
  if (w.assign) net = connie::assign_uniform_weights(net, w.lo, w.hi, a.seed + 1);
  return net;
}

void cmd_generate_network(const GenerateArgs& a) {
  connie::Network net = build_network(a);
  connie::write_network(net, a.out);
  std::cout << network_summary(net).dump(2) << "\n";
}

struct SimulateArgs {
  std::string net_file;
  std::string model_spec = "exp:1.0";
  double coverage = 0.99;
  int max_cascades = 100000;
  std::uint64_t seed = 0;
  std::string out;
  std::string report_file;
};

connie::GenerationReport run_simulate(const SimulateArgs& a, connie::CascadeSet* out_cs) {
  connie::Network net = connie::read_network(a.net_file);
  connie::TransmissionModel model = connie::parse_model(a.model_spec);
  auto start = std::chrono::steady_clock::now();
  auto [cs, report] =
      connie::generate_cascade_set(net, model, a.coverage, a.max_cascades, a.seed);
  note_timing("simulate", elapsed_since(start));
  connie::write_cascades(cs, a.out);
  if (!a.report_file.empty()) write_json(generation_report_json(report), a.report_file);
  if (out_cs != nullptr) *out_cs = std::move(cs);
  return report;
}

void cmd_simulate(const SimulateArgs& a) {
  connie::GenerationReport report = run_simulate(a, nullptr);
  if (report.coverage_warning)
    std::cerr << "warning: reached max cascades at coverage " << report.coverage << "\n";
  std::cout << generation_report_json(report).dump(2) << "\n";
}

struct PerturbArgs {
  std::string cascades_file;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void cmd_perturb(const PerturbArgs& a) {
  connie::CascadeSet cs = connie::read_cascades(a.cascades_file);
  auto [perturbed, ratio] = connie::perturb_times(cs, a.sigma, a.seed);
  connie::write_cascades(perturbed, a.out);
  std::cout << json{{"sigma", a.sigma}, {"noise_to_signal", ratio}}.dump(2) << "\n";
}

struct InferArgs {
  std::string cascades_file;
  std::string model_spec = "exp:1.0";
  connie::SolverOptions opts;
  std::string out;
  std::string report_file;
};

void cmd_infer(const InferArgs& a) {
  connie::CascadeSet cs = connie::read_cascades(a.cascades_file);
  connie::TransmissionModel model = connie::parse_model(a.model_spec);
  auto [net, report] = connie::infer_network(cs, model, a.opts);
  note_timing("infer", report.wall_seconds);
  connie::write_network(net, a.out);
  json summary = solve_report_json(report, cs.n);
  if (!a.report_file.empty()) write_json(summary, a.report_file);
  summary.erase("per_node");
  std::cout << summary.dump(2) << "\n";
}

struct SweepArgs {
  std::string cascades_file;
  std::string truth_file;
  std::string model_spec = "exp:1.0";
  std::string grid_spec = "log:0.01,1000,20";
  connie::SolverOptions opts;
  std::string report_file;
  std::string curve_file;
};

void cmd_sweep(const SweepArgs& a) {
  connie::CascadeSet cs = connie::read_cascades(a.cascades_file);
  connie::Network truth = connie::read_network(a.truth_file);
  connie::TransmissionModel model = connie::parse_model(a.model_spec);
  std::vector<double> grid = parse_rho_grid(a.grid_spec);

  auto start = std::chrono::steady_clock::now();
  connie::EvalReport report = connie::pr_sweep(cs, model, truth, grid, a.opts);
  note_timing("sweep", elapsed_since(start));

  if (!a.report_file.empty()) write_json(eval_report_json(report), a.report_file);
  if (!a.curve_file.empty()) connie::write_pr_curve_csv(report, a.curve_file);
  json summary = eval_report_json(report);
  summary.erase("curve");
  std::cout << summary.dump(2) << "\n";
}

struct EvaluateArgs {
  std::string truth_file;
  std::string inferred_file;
  std::string out_file;
};

void cmd_evaluate(const EvaluateArgs& a) {
  connie::Network truth = connie::read_network(a.truth_file);
  connie::Network inferred = connie::read_network(a.inferred_file);
  auto [precision, recall] = connie::precision_recall(truth, inferred);
  json j{{"precision", precision},
         {"recall", recall},
         {"mse", connie::mse(truth, inferred)}};
  if (!a.out_file.empty()) write_json(j, a.out_file);
  std::cout << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// `run` drives the full pipeline from a JSON config that mirrors the
// subcommand flags one-to-one; explicitly passed flags override the config.

struct RunArgs {
  std::string config_file;
  std::string outdir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double sigma = -1.0;
  double coverage = -1.0;
  int max_cascades = -1;
  double rho = -1.0;
  std::string grid_spec;
  std::string model_spec;
  int threads = -1;
};

void cmd_run(const RunArgs& a) {
  std::ifstream in(a.config_file);
  if (!in) throw std::runtime_error("cannot open config '" + a.config_file + "'");
  json cfg = json::parse(in);

  auto pick = [&](const char* key, auto fallback) {
    using T = decltype(fallback);
    return cfg.contains(key) ? cfg.at(key).get<T>() : fallback;
  };

  std::string outdir = !a.outdir.empty() ? a.outdir : pick("outdir", std::string("out"));
  std::uint64_t seed = a.seed_set ? a.seed : pick("seed", std::uint64_t{0});
  double sigma = a.sigma >= 0.0 ? a.sigma : pick("sigma", 0.0);
  double coverage = a.coverage >= 0.0 ? a.coverage : pick("coverage", 0.99);
  int max_cascades = a.max_cascades >= 0 ? a.max_cascades : pick("max_cascades", 100000);
  std::string model_spec =
      !a.model_spec.empty() ? a.model_spec : pick("transmission", std::string("exp:1.0"));

  connie::SolverOptions opts;
  if (cfg.contains("solver")) {
    const json& s = cfg.at("solver");
    opts.grad_tol = s.value("grad_tol", opts.grad_tol);
    opts.max_iter = s.value("max_iter", opts.max_iter);
    opts.zero_threshold = s.value("zero_threshold", opts.zero_threshold);
    opts.init_A = s.value("init_a", opts.init_A);
  }
  opts.threads = a.threads >= 0 ? a.threads : pick("threads", 0);

  std::filesystem::create_directories(outdir);
  auto path = [&](const std::string& name) {
    return (std::filesystem::path(outdir) / name).string();
  };
  json summary;

  // 1. Network: from file or generated.
  connie::Network net;
  bool have_truth = false;
  if (!cfg.contains("network"))
    throw std::runtime_error("config needs a 'network' object");
  const json& ncfg = cfg.at("network");
  if (ncfg.contains("file")) {
    net = connie::read_network(ncfg.at("file").get<std::string>());
    have_truth = true;
  } else {
    GenerateArgs g;
    g.model = ncfg.at("model").get<std::string>();
    g.nodes = ncfg.value("nodes", 0);
    g.edges = ncfg.value("edges", -1LL);
    g.out_degree = ncfg.value("out_degree", 2);
    g.weights = ncfg.value("weights", std::string("none"));
    g.counts_file = ncfg.value("counts", std::string());
    g.xi = ncfg.value("xi", 0.0);
    g.phi = ncfg.value("phi", 0.0);
    g.seed = ncfg.contains("seed") ? ncfg.at("seed").get<std::uint64_t>() : seed;
    net = build_network(g);
    have_truth = true;
    connie::write_network(net, path("network.tsv"));
  }
  summary["network"] = network_summary(net);

  // 2. Cascades.
  connie::TransmissionModel model = connie::parse_model(model_spec);
  auto start = std::chrono::steady_clock::now();
  auto [cs, gen_report] =
      connie::generate_cascade_set(net, model, coverage, max_cascades, seed + 1);
  note_timing("simulate", elapsed_since(start));
  connie::write_cascades(cs, path("cascades.tsv"));
  write_json(generation_report_json(gen_report), path("simulate_report.json"));
  summary["simulate"] = generation_report_json(gen_report);

  // 3. Optional noise.
  if (sigma > 0.0) {
    auto [noisy, ratio] = connie::perturb_times(cs, sigma, seed + 2);
    cs = std::move(noisy);
    connie::write_cascades(cs, path("cascades_perturbed.tsv"));
    summary["perturb"] = json{{"sigma", sigma}, {"noise_to_signal", ratio}};
  }

  // 4. Sweep when a grid is configured (the default), single infer otherwise.
  bool single_rho = a.rho >= 0.0 || cfg.contains("rho");
  if (single_rho) {
    opts.rho = a.rho >= 0.0 ? a.rho : cfg.at("rho").get<double>();
    auto [inferred, solve_report] = connie::infer_network(cs, model, opts);
    note_timing("infer", solve_report.wall_seconds);
    connie::write_network(inferred, path("inferred.tsv"));
    write_json(solve_report_json(solve_report, cs.n), path("solve_report.json"));
    json s = solve_report_json(solve_report, cs.n);
    s.erase("per_node");
    summary["infer"] = std::move(s);
    if (have_truth) {
      auto [precision, recall] = connie::precision_recall(net, inferred);
      json ev{{"precision", precision},
              {"recall", recall},
              {"mse", connie::mse(net, inferred)}};
      write_json(ev, path("evaluate.json"));
      summary["evaluate"] = std::move(ev);
    }
  } else {
    std::string grid_spec = !a.grid_spec.empty()
                                ? a.grid_spec
                                : pick("rho_grid", std::string("log:0.01,1000,20"));
    std::vector<double> grid = parse_rho_grid(grid_spec);
    auto sweep_start = std::chrono::steady_clock::now();
    connie::EvalReport report = connie::pr_sweep(cs, model, net, grid, opts);
    note_timing("sweep", elapsed_since(sweep_start));
    write_json(eval_report_json(report), path("eval_report.json"));
    connie::write_pr_curve_csv(report, path("pr_curve.csv"));
    json s = eval_report_json(report);
    s.erase("curve");
    summary["sweep"] = std::move(s);
  }

  std::cout << summary.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"cascade simulation and network inference from infection times"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", g_verbosity, "log progress and timing to stderr");

  GenerateArgs gen;
  auto* cgen = app.add_subcommand("generate-network", "write a synthetic network");
  cgen->add_option("--model", gen.model, "er | pa | interactions")->required();
  cgen->add_option("--nodes", gen.nodes, "node count");
  cgen->add_option("--edges", gen.edges, "edge count (er)");
  cgen->add_option("--out-degree", gen.out_degree, "edges per arriving node (pa)");
  cgen->add_option("--weights", gen.weights, "uniform:lo,hi | none");
  cgen->add_option("--counts", gen.counts_file, "interaction counts TSV (interactions)");
  cgen->add_option("--xi", gen.xi, "per-interaction transmission probability");
  cgen->add_option("--phi", gen.phi, "floor probability for interacting pairs");
  cgen->add_option("--seed", gen.seed, "RNG seed");
  cgen->add_option("--out", gen.out, "output network TSV")->required();
  cgen->callback([&]() { cmd_generate_network(gen); });

  SimulateArgs sim;
  auto* csim = app.add_subcommand("simulate", "generate cascades to an edge-coverage target");
  csim->add_option("--net", sim.net_file, "network TSV")->required();
  csim->add_option("--w", sim.model_spec, "transmission model, e.g. exp:1.0")->required();
  csim->add_option("--coverage", sim.coverage, "edge-coverage target in (0,1]");
  csim->add_option("--max-cascades", sim.max_cascades, "cascade cap");
  csim->add_option("--seed", sim.seed, "master RNG seed");
  csim->add_option("--out", sim.out, "output cascades TSV")->required();
  csim->add_option("--report", sim.report_file, "generation report JSON");
  csim->callback([&]() { cmd_simulate(sim); });

  PerturbArgs per;
  auto* cper = app.add_subcommand("perturb", "add Gaussian noise to infection times");
  cper->add_option("--cascades", per.cascades_file, "input cascades TSV")->required();
  cper->add_option("--sigma", per.sigma, "noise standard deviation")->required();
  cper->add_option("--seed", per.seed, "RNG seed");
  cper->add_option("--out", per.out, "output cascades TSV")->required();
  cper->callback([&]() { cmd_perturb(per); });

  InferArgs inf;
  auto* cinf = app.add_subcommand("infer", "reconstruct the network at one sparsity weight");
  cinf->add_option("--cascades", inf.cascades_file, "cascades TSV")->required();
  cinf->add_option("--w", inf.model_spec, "transmission model")->required();
  cinf->add_option("--rho", inf.opts.rho, "sparsity weight");
  cinf->add_option("--threads", inf.opts.threads, "worker threads (0 = auto)");
  cinf->add_option("--grad-tol", inf.opts.grad_tol, "projected-gradient tolerance");
  cinf->add_option("--max-iter", inf.opts.max_iter, "iteration cap per solve");
  cinf->add_option("--zero-threshold", inf.opts.zero_threshold, "stage-1 absence threshold");
  cinf->add_option("--init-a", inf.opts.init_A, "initial edge probability");
  cinf->add_option("--out", inf.out, "output network TSV")->required();
  cinf->add_option("--report", inf.report_file, "solve report JSON");
  cinf->callback([&]() { cmd_infer(inf); });

  SweepArgs swp;
  auto* cswp = app.add_subcommand("sweep", "trace a precision-recall curve over rho");
  cswp->add_option("--cascades", swp.cascades_file, "cascades TSV")->required();
  cswp->add_option("--truth", swp.truth_file, "ground-truth network TSV")->required();
  cswp->add_option("--w", swp.model_spec, "transmission model")->required();
  cswp->add_option("--rho-grid", swp.grid_spec, "log:lo,hi,count | list:a,b,...");
  cswp->add_option("--threads", swp.opts.threads, "worker threads (0 = auto)");
  cswp->add_option("--out-report", swp.report_file, "eval report JSON");
  cswp->add_option("--out-curve", swp.curve_file, "PR curve CSV");
  cswp->callback([&]() { cmd_sweep(swp); });

  EvaluateArgs ev;
  auto* cev = app.add_subcommand("evaluate", "compare an inferred network to the truth");
  cev->add_option("--truth", ev.truth_file, "ground-truth network TSV")->required();
  cev->add_option("--inferred", ev.inferred_file, "inferred network TSV")->required();
  cev->add_option("--out", ev.out_file, "metrics JSON");
  cev->callback([&]() { cmd_evaluate(ev); });

  RunArgs run;
  auto* crun = app.add_subcommand("run", "full pipeline from a JSON config");
  crun->add_option("--config", run.config_file, "experiment config JSON")->required();
  crun->add_option("--outdir", run.outdir, "output directory (overrides config)");
  auto* seed_opt = crun->add_option("--seed", run.seed, "master seed (overrides config)");
  crun->add_option("--sigma", run.sigma, "noise sigma (overrides config)");
  crun->add_option("--coverage", run.coverage, "coverage target (overrides config)");
  crun->add_option("--max-cascades", run.max_cascades, "cascade cap (overrides config)");
  crun->add_option("--rho", run.rho, "single sparsity weight (overrides config)");
  crun->add_option("--rho-grid", run.grid_spec, "sweep grid (overrides config)");
  crun->add_option("--w", run.model_spec, "transmission model (overrides config)");
  crun->add_option("--threads", run.threads, "worker threads (overrides config)");
  crun->callback([&]() {
    run.seed_set = seed_opt->count() > 0;
    cmd_run(run);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2; // 2 = usage error
  } catch (const connie::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
