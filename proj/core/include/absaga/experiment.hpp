#pragma once

#include <string>
#include <vector>

#include "absaga/algorithms.hpp"
#include "absaga/config.hpp"
#include "absaga/digraph.hpp"
#include "absaga/problems.hpp"
#include "absaga/theory.hpp"

namespace absaga {

struct RunSummary {
  std::string method;
  double final_gap = 0.0;
  double epochs_completed = 0.0;
  long long iterations = 0;
  long long grads_computed = 0;
  long long comm_rounds = 0;
  double wall_seconds = 0.0;
  double alpha_used = 0.0;
  int c_used = 1, d_used = 1;
  bool diverged = false;
  std::string trace_path;
  std::string certificate_status;  // empty unless a certificate was requested
};

DirectedGraph build_graph(const ExperimentConfig& cfg);
FiniteSumProblem build_problem(const ExperimentConfig& cfg, int n);

// Wires graph -> weights -> problem -> engine -> trace file. `auto` step size
// resolves to the theory bound; `auto` rounds resolve to the communication
// thresholds.
RunSummary run_experiment(const ExperimentConfig& cfg);

// Runs each config (they must share graph and problem seeds), writes
// per-method traces into out_dir, and merges the optimality-gap columns onto
// the shared epoch grid in out_dir/compare.csv.
std::vector<RunSummary> compare(const std::vector<ExperimentConfig>& configs,
                                const std::string& out_dir);

std::string summary_text(const RunSummary& summary);

}  // namespace absaga
