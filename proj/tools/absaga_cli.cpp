// Command-line front end: graph generation and checks, problem inspection,
// weight/spectral reports, convergence certificates, experiment runs, and
// multi-method comparisons.

#include <CLI11.hpp>
#include <iostream>
#include <sstream>

#include "absaga/config.hpp"
#include "absaga/digraph.hpp"
#include "absaga/errors.hpp"
#include "absaga/experiment.hpp"
#include "absaga/format.hpp"
#include "absaga/problems.hpp"
#include "absaga/theory.hpp"
#include "absaga/weights.hpp"

namespace {

using namespace absaga;

int exit_code_for(errc code) {
  switch (code) {
    case errc::invalid_argument:
    case errc::configuration:
      return 2;
    case errc::generation_failure:
    case errc::numerical_failure:
    case errc::divergence:
      return 3;
    case errc::data_format:
    case errc::io:
      return 4;
  }
  return 1;
}

struct GraphGenArgs {
  std::string type = "exponential";
  int n = 16;
  double radius = 0.3;
  double reverse_drop = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_graph_gen(const GraphGenArgs& args) {
  DirectedGraph g;
  if (args.type == "exponential")
    g = exponential_graph(args.n);
  else if (args.type == "ring")
    g = ring_digraph(args.n);
  else if (args.type == "complete")
    g = complete_digraph(args.n);
  else if (args.type == "geometric")
    g = geometric_digraph(args.n, args.radius, args.reverse_drop, args.seed);
  else
    fail(errc::configuration, "unknown graph type: " + args.type);
  save_edge_list(g, args.out);
  std::cout << "n = " << g.n << "\n"
            << "edges = " << g.edge_count() << "\n"
            << "file = " << args.out << "\n";
  return 0;
}

int cmd_graph_check(const std::string& path) {
  DirectedGraph g = load_edge_list(path);
  Degrees deg = degrees(g);
  bool connected = is_strongly_connected(g);
  std::cout << "n = " << g.n << "\n"
            << "edges = " << g.edge_count() << "\n"
            << "self_loops = " << (g.self_loops ? "true" : "false") << "\n"
            << "strongly_connected = " << (connected ? "true" : "false") << "\n";
  int in_min = deg.in[0], in_max = deg.in[0], out_min = deg.out[0], out_max = deg.out[0];
  for (int i = 0; i < g.n; ++i) {
    in_min = std::min(in_min, deg.in[i]);
    in_max = std::max(in_max, deg.in[i]);
    out_min = std::min(out_min, deg.out[i]);
    out_max = std::max(out_max, deg.out[i]);
  }
  std::cout << "in_degree = [" << in_min << ", " << in_max << "]\n"
            << "out_degree = [" << out_min << ", " << out_max << "]\n";
  return connected ? 0 : 3;
}

int cmd_problem_info(const std::string& config_path) {
  ExperimentConfig cfg = parse_config(config_path);
  DirectedGraph graph = build_graph(cfg);
  FiniteSumProblem problem = build_problem(cfg, graph.n);
  ProblemConstants constants = problem.constants();
  std::cout << "n = " << problem.nodes() << "\n"
            << "p = " << problem.dim() << "\n";
  std::ostringstream partition;
  for (int i = 0; i < problem.nodes(); ++i) {
    if (i) partition << " ";
    partition << problem.components(i);
  }
  std::cout << "m_i = " << partition.str() << "\n"
            << "total_components = " << problem.total_components() << "\n"
            << "ell = " << format_full(constants.ell) << "\n"
            << "mu = " << format_full(constants.mu) << "\n"
            << "kappa = " << format_full(constants.kappa) << "\n";
  return 0;
}

int cmd_theory_weights(const std::string& graph_path, bool csv) {
  DirectedGraph g = load_edge_list(graph_path);
  WeightSystem weights(g);
  if (csv) {
    std::cout << "n,h_r,h_c,sigma_A,sigma_B,pi_r_dot_pi_c,psi\n"
              << weights.n() << "," << format_full(weights.h_r()) << ","
              << format_full(weights.h_c()) << "," << format_full(weights.sigma_a()) << ","
              << format_full(weights.sigma_b()) << "," << format_full(weights.pi_dot()) << ","
              << format_full(weights.psi()) << "\n";
    return 0;
  }
  std::cout << "n = " << weights.n() << "\n"
            << "h_r = " << format_full(weights.h_r()) << "\n"
            << "h_c = " << format_full(weights.h_c()) << "\n"
            << "sigma_A = " << format_full(weights.sigma_a()) << "\n"
            << "sigma_B = " << format_full(weights.sigma_b()) << "\n"
            << "pi_r_dot_pi_c = " << format_full(weights.pi_dot()) << "\n"
            << "psi = " << format_full(weights.psi()) << "\n";
  return 0;
}

struct CertifyArgs {
  std::string graph_path;
  std::string problem_config;
  double alpha = 0.0;  // 0 = auto (alpha_bar)
  int c = 0, d = 0;    // 0 = auto (thresholds)
  bool csv = false;
};

int cmd_theory_certify(const CertifyArgs& args) {
  DirectedGraph g = load_edge_list(args.graph_path);
  WeightSystem weights(g);
  ExperimentConfig cfg = parse_config(args.problem_config);
  FiniteSumProblem problem = build_problem(cfg, g.n);
  ProblemConstants constants = problem.constants();

  theory::ConvergenceInputs inputs = theory::ConvergenceInputs::from(
      weights, constants, problem.min_components(), problem.max_components(),
      /*alpha=*/1.0, /*c=*/1, /*d=*/1);
  theory::CommRounds rounds = theory::min_comm_rounds(inputs);
  inputs.run.c = args.c > 0 ? args.c : rounds.c;
  inputs.run.d = args.d > 0 ? args.d : rounds.d;
  inputs.run.alpha = args.alpha > 0 ? args.alpha : theory::max_stepsize(inputs).alpha_bar;

  theory::ConvergenceCertificate cert = theory::delta_certificate(inputs);
  if (args.csv) {
    const char* status = cert.status == theory::CertificateStatus::pass ? "pass"
                         : cert.status == theory::CertificateStatus::fail ? "fail"
                                                                          : "not_applicable";
    std::cout << "status,alpha,c,d,alpha_bar,gamma,rho,psi,gamma_order\n"
              << status << "," << format_full(inputs.run.alpha) << "," << inputs.run.c << ","
              << inputs.run.d << "," << format_full(cert.alpha_bar) << ","
              << format_full(cert.gamma) << "," << format_full(cert.rho) << ","
              << format_full(cert.psi) << "," << format_full(cert.gamma_order) << "\n";
    return 0;
  }
  std::cout << "alpha = " << format_full(inputs.run.alpha) << "\n"
            << "c = " << inputs.run.c << "\n"
            << "d = " << inputs.run.d << "\n"
            << theory::certificate_text(cert);
  return 0;
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig cfg = parse_config(config_path);
  RunSummary summary = run_experiment(cfg);
  std::cout << summary_text(summary);
  return summary.diverged ? 3 : 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_dir) {
  std::vector<ExperimentConfig> configs;
  configs.reserve(config_paths.size());
  for (const auto& path : config_paths) configs.push_back(parse_config(path));
  std::vector<RunSummary> summaries = compare(configs, out_dir);
  bool diverged = false;
  for (const auto& summary : summaries) {
    std::cout << summary_text(summary) << "\n";
    diverged = diverged || summary.diverged;
  }
  std::cout << "merged = " << out_dir << "/compare.csv\n";
  return diverged ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decentralized variance-reduced optimization toolkit"};
  app.require_subcommand(1);

  // graph gen / graph check
  auto* graph = app.add_subcommand("graph", "Generate and validate communication graphs");
  graph->require_subcommand(1);
  GraphGenArgs gen_args;
  auto* gen = graph->add_subcommand("gen", "Generate a graph and write an edge list");
  gen->add_option("--type", gen_args.type, "exponential|geometric|ring|complete");
  gen->add_option("--n", gen_args.n, "node count")->required();
  gen->add_option("--radius", gen_args.radius, "geometric disc radius");
  gen->add_option("--reverse-drop", gen_args.reverse_drop, "per-direction drop probability");
  gen->add_option("--seed", gen_args.seed, "generator seed");
  gen->add_option("--out", gen_args.out, "output edge-list file")->required();

  std::string check_path;
  auto* check = graph->add_subcommand("check", "Validate an edge-list file");
  check->add_option("file", check_path, "edge-list file")->required();

  // problem info
  auto* problem = app.add_subcommand("problem", "Inspect finite-sum problems");
  problem->require_subcommand(1);
  std::string problem_config;
  auto* info = problem->add_subcommand("info", "Print problem shape and constants");
  info->add_option("--config", problem_config, "experiment config file")->required();

  // theory weights / theory certify
  auto* theory_cmd = app.add_subcommand("theory", "Spectral reports and rate certificates");
  theory_cmd->require_subcommand(1);
  std::string weights_path;
  bool weights_csv = false;
  auto* weights_cmd = theory_cmd->add_subcommand("weights", "Report weight spectral constants");
  weights_cmd->add_option("file", weights_path, "edge-list file")->required();
  weights_cmd->add_flag("--csv", weights_csv, "emit a machine-readable CSV row");

  CertifyArgs certify_args;
  auto* certify = theory_cmd->add_subcommand("certify", "Evaluate the convergence certificate");
  certify->add_option("--graph", certify_args.graph_path, "edge-list file")->required();
  certify->add_option("--problem-config", certify_args.problem_config,
                      "config file providing the problem section")
      ->required();
  certify->add_option("--alpha", certify_args.alpha, "step size (default: resolved bound)");
  certify->add_option("--c", certify_args.c, "x-mixing rounds (default: threshold)");
  certify->add_option("--d", certify_args.d, "tracker-mixing rounds (default: threshold)");
  certify->add_flag("--csv", certify_args.csv, "emit a machine-readable CSV row");

  // run / compare
  std::string run_config;
  auto* run_cmd = app.add_subcommand("run", "Run one experiment from a config file");
  run_cmd->add_option("--config", run_config, "experiment config file")->required();

  std::string compare_configs;
  std::string compare_out;
  auto* compare_cmd = app.add_subcommand("compare", "Run several configs and merge their gaps");
  compare_cmd->add_option("--configs", compare_configs, "comma-separated config files")
      ->required();
  compare_cmd->add_option("--out", compare_out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_graph_gen(gen_args);
    if (check->parsed()) return cmd_graph_check(check_path);
    if (info->parsed()) return cmd_problem_info(problem_config);
    if (weights_cmd->parsed()) return cmd_theory_weights(weights_path, weights_csv);
    if (certify->parsed()) return cmd_theory_certify(certify_args);
    if (run_cmd->parsed()) return cmd_run(run_config);
    if (compare_cmd->parsed()) {
      std::vector<std::string> paths;
      std::stringstream ss(compare_configs);
      std::string item;
      while (std::getline(ss, item, ',')) {
        if (!item.empty()) paths.push_back(item);
      }
      require(!paths.empty(), errc::configuration, "no config files given");
      return cmd_compare(paths, compare_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
