#include "absaga/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>

#include "absaga/errors.hpp"
#include "absaga/format.hpp"

namespace absaga {

DirectedGraph build_graph(const ExperimentConfig& cfg) {
  validate_graph_section(cfg);
  if (cfg.graph_file) return load_edge_list(*cfg.graph_file);
  const std::string& type = *cfg.graph_type;
  int n = *cfg.graph_n;
  if (type == "exponential") return exponential_graph(n);
  if (type == "ring") return ring_digraph(n);
  if (type == "complete") return complete_digraph(n);
  return geometric_digraph(n, *cfg.graph_radius, cfg.graph_reverse_drop, cfg.graph_seed);
}

FiniteSumProblem build_problem(const ExperimentConfig& cfg, int n) {
  validate_problem_section(cfg);
  double lambda = cfg.problem_lambda
                      ? *cfg.problem_lambda
                      : 1.0 / (static_cast<double>(n) * cfg.problem_per_node);
  if (cfg.problem_csv) return load_csv(*cfg.problem_csv, n, cfg.problem_label_column, lambda);
  if (*cfg.problem_kind == "quadratic")
    return synthetic_quadratic(n, cfg.problem_per_node, cfg.problem_dim, cfg.problem_seed);
  return synthetic_logistic(n, cfg.problem_per_node, cfg.problem_dim, cfg.problem_seed, lambda);
}

namespace {

// n=1 network with trivial mixing; the inputs the centralized baseline
// certifies against.
theory::NetworkInputs trivial_network_inputs() {
  theory::NetworkInputs net;
  net.n = 1;
  net.pi_r_min = net.pi_r_max = net.pi_c_min = net.pi_c_max = 1.0;
  net.h_r = net.h_c = 1.0;
  net.sigma_a = net.sigma_b = 0.0;
  net.pi_r_norm_sq = net.pi_c_norm_sq = 1.0;
  net.pi_dot = 1.0;
  return net;
}

struct ResolvedRun {
  Method method;
  double alpha;
  int c, d;
  long long iterations;
  long long record_every;
  theory::ConvergenceInputs inputs;
};

ResolvedRun resolve_run(const ExperimentConfig& cfg, const FiniteSumProblem& problem,
                        const WeightSystem* weights) {
  validate_algorithm_section(cfg);
  ResolvedRun r;
  r.method = method_from_name(*cfg.algorithm_name);

  ProblemConstants constants = problem.constants();
  long long m_min = problem.min_components();
  long long m_max = problem.max_components();
  if (r.method == Method::saga) {
    m_min = m_max = problem.total_components();
  }

  theory::ConvergenceInputs inputs;
  if (weights != nullptr && r.method != Method::saga) {
    inputs = theory::ConvergenceInputs::from(*weights, constants, m_min, m_max,
                                             /*alpha=*/1.0, 1, 1);
  } else {
    inputs.network = trivial_network_inputs();
    inputs.problem = {constants.ell, constants.mu, constants.kappa, m_min, m_max};
    inputs.run = {1.0, 1, 1};
  }

  if (cfg.c_is_auto || cfg.d_is_auto) {
    theory::CommRounds rounds = theory::min_comm_rounds(inputs);
    r.c = cfg.c_is_auto ? rounds.c : cfg.algorithm_c.value_or(1);
    r.d = cfg.d_is_auto ? rounds.d : cfg.algorithm_d.value_or(1);
  } else {
    r.c = cfg.algorithm_c.value_or(1);
    r.d = cfg.algorithm_d.value_or(1);
  }
  r.alpha = cfg.alpha_is_auto ? theory::max_stepsize(inputs).alpha_bar : *cfg.algorithm_alpha;
  inputs.run = {r.alpha, r.c, r.d};
  r.inputs = inputs;

  // One epoch is a full local data pass for the stochastic engines and a
  // single update for the deterministic one.
  long long per_epoch = 1;
  if (r.method == Method::absaga || r.method == Method::sab)
    per_epoch = problem.max_components();
  else if (r.method == Method::saga)
    per_epoch = problem.total_components();

  if (cfg.run_iterations)
    r.iterations = *cfg.run_iterations;
  else
    r.iterations = cfg.run_epochs.value_or(100) * per_epoch;
  r.record_every = cfg.run_record_every.value_or(per_epoch);
  return r;
}

struct ExperimentOutput {
  RunSummary summary;
  RunResult result;
};

ExperimentOutput run_experiment_impl(const ExperimentConfig& cfg,
                                     const std::string& trace_path) {
  DirectedGraph graph = build_graph(cfg);
  FiniteSumProblem problem = build_problem(cfg, graph.n);

  validate_algorithm_section(cfg);
  Method method = method_from_name(*cfg.algorithm_name);

  std::optional<WeightSystem> weights;
  std::optional<FiniteSumProblem> pooled;
  if (method != Method::saga) weights.emplace(graph);
  ResolvedRun plan = resolve_run(cfg, problem, weights ? &*weights : nullptr);

  EngineOptions opts;
  opts.alpha = plan.alpha;
  opts.rounds_c = plan.c;
  opts.rounds_d = plan.d;
  opts.seed = cfg.run_seed;

  std::unique_ptr<Stepper> stepper;
  if (plan.method == Method::saga) {
    pooled.emplace(problem.pooled());
    stepper = std::make_unique<CentralizedSaga>(*pooled, opts);
  } else {
    stepper = std::make_unique<DecentralizedEngine>(problem, *weights, plan.method, opts);
  }

  TraceWriter writer(trace_path);
  auto start = std::chrono::steady_clock::now();
  RunResult result =
      run(*stepper, plan.iterations, plan.record_every,
          [&writer](const IterationMetrics& m) { writer.write(m); });
  auto stop = std::chrono::steady_clock::now();

  RunSummary summary;
  summary.method = method_name(plan.method);
  summary.trace_path = trace_path;
  summary.alpha_used = plan.alpha;
  summary.c_used = plan.c;
  summary.d_used = plan.d;
  summary.diverged = result.diverged;
  summary.wall_seconds = std::chrono::duration<double>(stop - start).count();
  if (!result.trace.empty()) {
    const IterationMetrics& last = result.trace.back();
    summary.final_gap = last.optimality_gap;
    summary.epochs_completed = last.epoch;
    summary.iterations = last.iteration;
    summary.grads_computed = last.grads_computed;
    summary.comm_rounds = last.comm_rounds;
  }

  if (cfg.output_certificate) {
    theory::ConvergenceCertificate cert = theory::delta_certificate(plan.inputs);
    std::ofstream cert_out(*cfg.output_certificate);
    require(cert_out.good(), errc::io,
            "cannot open certificate file: " + *cfg.output_certificate);
    cert_out << theory::certificate_text(cert);
    switch (cert.status) {
      case theory::CertificateStatus::pass: summary.certificate_status = "pass"; break;
      case theory::CertificateStatus::fail: summary.certificate_status = "fail"; break;
      case theory::CertificateStatus::not_applicable:
        summary.certificate_status = "not_applicable";
        break;
    }
  }
  return {std::move(summary), std::move(result)};
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
  return run_experiment_impl(cfg, cfg.output_trace).summary;
}

std::vector<RunSummary> compare(const std::vector<ExperimentConfig>& configs,
                                const std::string& out_dir) {
  require(!configs.empty(), errc::invalid_argument, "compare needs at least one config");
  for (const auto& cfg : configs) {
    require(cfg.problem_seed == configs.front().problem_seed, errc::invalid_argument,
            "compare: problem seeds differ between configs");
    require(cfg.graph_seed == configs.front().graph_seed, errc::invalid_argument,
            "compare: graph seeds differ between configs");
  }
  std::filesystem::create_directories(out_dir);

  std::vector<RunSummary> summaries;
  std::vector<std::string> labels;
  std::vector<std::map<double, double>> gap_by_epoch(configs.size());

  for (std::size_t k = 0; k < configs.size(); ++k) {
    validate_algorithm_section(configs[k]);
    std::string label = *configs[k].algorithm_name;
    int suffix = 2;
    while (std::find(labels.begin(), labels.end(), label) != labels.end())
      label = *configs[k].algorithm_name + "_" + std::to_string(suffix++);
    labels.push_back(label);

    std::string trace_path = out_dir + "/" + label + ".csv";
    ExperimentOutput output = run_experiment_impl(configs[k], trace_path);
    for (const IterationMetrics& m : output.result.trace)
      gap_by_epoch[k][m.epoch] = m.optimality_gap;
    summaries.push_back(std::move(output.summary));
  }

  // Shared epoch grid = epochs present in every trace.
  std::vector<double> grid;
  for (const auto& [epoch, gap] : gap_by_epoch[0]) {
    (void)gap;
    bool shared = true;
    for (std::size_t k = 1; k < gap_by_epoch.size(); ++k)
      if (!gap_by_epoch[k].count(epoch)) shared = false;
    if (shared) grid.push_back(epoch);
  }

  std::string merged_path = out_dir + "/compare.csv";
  std::ofstream merged(merged_path);
  require(merged.good(), errc::io, "cannot open merged file: " + merged_path);
  merged << "epoch";
  for (const auto& label : labels) merged << ",gap_" << label;
  merged << "\n";
  for (double epoch : grid) {
    merged << format_full(epoch);
    for (std::size_t k = 0; k < gap_by_epoch.size(); ++k)
      merged << "," << format_full(gap_by_epoch[k].at(epoch));
    merged << "\n";
  }
  merged.flush();
  require(merged.good(), errc::io, "write failed: " + merged_path);
  return summaries;
}

std::string summary_text(const RunSummary& summary) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  line("method", summary.method);
  line("final_gap", format_full(summary.final_gap));
  line("epochs_completed", format_full(summary.epochs_completed));
  line("iterations", std::to_string(summary.iterations));
  line("grads_computed", std::to_string(summary.grads_computed));
  line("comm_rounds", std::to_string(summary.comm_rounds));
  line("wall_seconds", format_short(summary.wall_seconds));
  line("alpha", format_full(summary.alpha_used));
  line("c", std::to_string(summary.c_used));
  line("d", std::to_string(summary.d_used));
  line("diverged", summary.diverged ? "true" : "false");
  line("trace", summary.trace_path);
  if (!summary.certificate_status.empty()) line("certificate", summary.certificate_status);
  return out;
}

}  // namespace absaga
