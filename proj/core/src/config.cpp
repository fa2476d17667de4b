#include "absaga/config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "absaga/errors.hpp"

namespace absaga {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  fail(errc::configuration, "configuration error at key '" + key + "': " + why);
}

double parse_double_value(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) bad_key(key, "not a number: " + value);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_key(key, "not a number: " + value);
  }
}

long long parse_int_value(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) bad_key(key, "not an integer: " + value);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_key(key, "not an integer: " + value);
  }
}

std::uint64_t parse_u64_value(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) bad_key(key, "not a seed value: " + value);
    return v;
  } catch (const Error&) {
    throw;
  } catch (...) {
    bad_key(key, "not a seed value: " + value);
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool schema_seen = false;

  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(errc::configuration,
           origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      fail(errc::configuration,
           origin + ":" + std::to_string(line_no) + ": empty key or value");

    if (!schema_seen) {
      if (key != "schema")
        fail(errc::configuration, origin + ": first directive must be 'schema = absaga/1'");
      if (value != "absaga/1")
        fail(errc::configuration, origin + ": unsupported schema '" + value + "'");
      schema_seen = true;
      continue;
    }

    if (key == "graph.type") {
      if (value != "exponential" && value != "geometric" && value != "ring" &&
          value != "complete")
        bad_key(key, "expected exponential|geometric|ring|complete");
      cfg.graph_type = value;
    } else if (key == "graph.file") {
      cfg.graph_file = value;
    } else if (key == "graph.n") {
      long long n = parse_int_value(key, value);
      if (n < 1) bad_key(key, "must be >= 1");
      cfg.graph_n = static_cast<int>(n);
    } else if (key == "graph.seed") {
      cfg.graph_seed = parse_u64_value(key, value);
    } else if (key == "graph.radius") {
      double r = parse_double_value(key, value);
      if (r <= 0.0) bad_key(key, "must be positive");
      cfg.graph_radius = r;
    } else if (key == "graph.reverse_drop") {
      double q = parse_double_value(key, value);
      if (q < 0.0 || q >= 1.0) bad_key(key, "must lie in [0, 1)");
      cfg.graph_reverse_drop = q;
    } else if (key == "weights.self_loops") {
      if (value != "true") bad_key(key, "only 'true' is supported");
      cfg.weights_self_loops = true;
    } else if (key == "problem.kind") {
      if (value != "quadratic" && value != "logistic")
        bad_key(key, "expected quadratic|logistic");
      cfg.problem_kind = value;
    } else if (key == "problem.dim") {
      long long p = parse_int_value(key, value);
      if (p < 1) bad_key(key, "must be >= 1");
      cfg.problem_dim = static_cast<int>(p);
    } else if (key == "problem.per_node") {
      long long m = parse_int_value(key, value);
      if (m < 1) bad_key(key, "must be >= 1");
      cfg.problem_per_node = static_cast<int>(m);
    } else if (key == "problem.lambda") {
      double l = parse_double_value(key, value);
      if (l <= 0.0) bad_key(key, "must be positive");
      cfg.problem_lambda = l;
    } else if (key == "problem.seed") {
      cfg.problem_seed = parse_u64_value(key, value);
    } else if (key == "problem.csv") {
      cfg.problem_csv = value;
    } else if (key == "problem.label_column") {
      cfg.problem_label_column = value;
    } else if (key == "algorithm.name") {
      if (value != "absaga" && value != "sab" && value != "ab" && value != "saga")
        bad_key(key, "expected absaga|sab|ab|saga");
      cfg.algorithm_name = value;
    } else if (key == "algorithm.alpha") {
      if (value == "auto") {
        cfg.alpha_is_auto = true;
        cfg.algorithm_alpha.reset();
      } else {
        double a = parse_double_value(key, value);
        if (a <= 0.0) bad_key(key, "must be positive or 'auto'");
        cfg.algorithm_alpha = a;
        cfg.alpha_is_auto = false;
      }
    } else if (key == "algorithm.c") {
      if (value == "auto") {
        cfg.c_is_auto = true;
        cfg.algorithm_c.reset();
      } else {
        long long c = parse_int_value(key, value);
        if (c < 1) bad_key(key, "must be >= 1 or 'auto'");
        cfg.algorithm_c = static_cast<int>(c);
        cfg.c_is_auto = false;
      }
    } else if (key == "algorithm.d") {
      if (value == "auto") {
        cfg.d_is_auto = true;
        cfg.algorithm_d.reset();
      } else {
        long long d = parse_int_value(key, value);
        if (d < 1) bad_key(key, "must be >= 1 or 'auto'");
        cfg.algorithm_d = static_cast<int>(d);
        cfg.d_is_auto = false;
      }
    } else if (key == "run.iterations") {
      long long it = parse_int_value(key, value);
      if (it < 1) bad_key(key, "must be >= 1");
      cfg.run_iterations = it;
    } else if (key == "run.epochs") {
      long long e = parse_int_value(key, value);
      if (e < 1) bad_key(key, "must be >= 1");
      cfg.run_epochs = e;
    } else if (key == "run.record_every") {
      long long r = parse_int_value(key, value);
      if (r < 1) bad_key(key, "must be >= 1");
      cfg.run_record_every = r;
    } else if (key == "run.seed") {
      cfg.run_seed = parse_u64_value(key, value);
    } else if (key == "output.trace") {
      cfg.output_trace = value;
    } else if (key == "output.certificate") {
      cfg.output_certificate = value;
    } else {
      fail(errc::configuration, "configuration error: unknown key '" + key + "'");
    }
  }

  require(schema_seen, errc::configuration, origin + ": missing 'schema = absaga/1' line");
  if (cfg.run_iterations && cfg.run_epochs)
    fail(errc::configuration,
         "configuration error: run.iterations and run.epochs are mutually exclusive");
  if (cfg.graph_type && cfg.graph_file)
    fail(errc::configuration,
         "configuration error: graph.type and graph.file are mutually exclusive");
  return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), errc::io, "cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

void validate_graph_section(const ExperimentConfig& cfg) {
  if (!cfg.graph_type && !cfg.graph_file)
    fail(errc::configuration, "configuration error: one of graph.type/graph.file is required");
  if (cfg.graph_type) {
    if (!cfg.graph_n)
      fail(errc::configuration, "configuration error at key 'graph.n': required for generated graphs");
    if (*cfg.graph_type == "geometric" && !cfg.graph_radius)
      fail(errc::configuration,
           "configuration error at key 'graph.radius': required for geometric graphs");
  }
}

void validate_problem_section(const ExperimentConfig& cfg) {
  if (!cfg.problem_kind && !cfg.problem_csv)
    fail(errc::configuration, "configuration error: problem.kind or problem.csv is required");
  if (cfg.problem_csv && cfg.problem_kind && *cfg.problem_kind == "quadratic")
    fail(errc::configuration,
         "configuration error at key 'problem.csv': csv data implies a logistic problem");
}

void validate_algorithm_section(const ExperimentConfig& cfg) {
  if (!cfg.algorithm_name)
    fail(errc::configuration, "configuration error at key 'algorithm.name': required");
}

}  // namespace absaga
