#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace absaga {

/// Flat key=value experiment description. Syntax: one `key = value` per line,
/// `#` comments, and a leading `schema = absaga/1` directive. Unknown keys are
/// rejected. See the README for the full key reference.
struct ExperimentConfig {
  // graph: exactly one of type/file
  std::optional<std::string> graph_type;  // exponential | geometric | ring | complete
  std::optional<std::string> graph_file;
  std::optional<int> graph_n;
  std::uint64_t graph_seed = 0;
  std::optional<double> graph_radius;  // geometric only
  double graph_reverse_drop = 0.0;     // geometric only
  bool weights_self_loops = true;      // only `true` is supported

  // problem: synthetic (kind + dim/per_node/seed) or csv
  std::optional<std::string> problem_kind;  // quadratic | logistic
  int problem_dim = 10;
  int problem_per_node = 100;
  std::optional<double> problem_lambda;  // default 1/(n * per_node)
  std::uint64_t problem_seed = 1;
  std::optional<std::string> problem_csv;
  std::string problem_label_column = "label";

  // algorithm
  std::optional<std::string> algorithm_name;  // absaga | sab | ab | saga
  std::optional<double> algorithm_alpha;      // empty = auto (resolved bound)
  std::optional<int> algorithm_c;             // empty = auto; default key value 1
  std::optional<int> algorithm_d;
  bool alpha_is_auto = true;
  bool c_is_auto = false;
  bool d_is_auto = false;

  // run: at most one of iterations/epochs (default: 100 epochs)
  std::optional<long long> run_iterations;
  std::optional<long long> run_epochs;
  std::optional<long long> run_record_every;  // default: one record per epoch
  std::uint64_t run_seed = 0;

  std::string output_trace = "trace.csv";
  std::optional<std::string> output_certificate;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Section-level requirement checks; configuration errors name the key.
void validate_graph_section(const ExperimentConfig& cfg);
void validate_problem_section(const ExperimentConfig& cfg);
void validate_algorithm_section(const ExperimentConfig& cfg);

}  // namespace absaga
