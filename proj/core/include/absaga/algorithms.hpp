#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "absaga/problems.hpp"
#include "absaga/rng.hpp"
#include "absaga/weights.hpp"

namespace absaga {

enum class Method { absaga, sab, ab, saga };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

/// Stored component gradients of one node together with the points they were
/// evaluated at. The running mean is updated incrementally on replacement and
/// rebuilt from scratch every 10^4 replacements to bound drift.
class GradientTable {
 public:
  void init(const FiniteSumProblem& prob, int node, const Eigen::VectorXd& x0);

  int size() const { return static_cast<int>(grads_.rows()); }
  Eigen::VectorXd stored(int j) const { return grads_.row(j).transpose(); }
  const Eigen::VectorXd& average() const { return avg_; }

  void replace(int j, const Eigen::VectorXd& grad, const Eigen::VectorXd& point);

  // sum_j ||v_j - x*||^2 over the stored evaluation points.
  double ref_sq_distance_sum(const Eigen::VectorXd& x_star) const;

 private:
  void rebuild_average();

  Eigen::MatrixXd grads_;   // m x p stored gradients
  Eigen::MatrixXd points_;  // m x p evaluation points
  Eigen::VectorXd avg_;
  long long replacements_since_rebuild_ = 0;
};

// Variance-reduced estimate grad_new + (table mean - stored slot). The
// trailing correction is computed as (average - stored) so it vanishes exactly
// when the table has a single slot.
Eigen::VectorXd saga_estimate(const Eigen::VectorXd& fresh_component_grad,
                              const GradientTable& table, int slot);

struct IterationMetrics {
  long long iteration = 0;
  double epoch = 0.0;
  double optimality_gap = 0.0;   // F(mean iterate) - F(x*)
  double consensus_error = 0.0;  // ||x - A_inf x||^2
  double tracking_error = 0.0;   // ||w - B_inf w||^2
  double aux_gap = 0.0;          // sum_i (1/m_i) sum_j ||v_ij - x*||^2
  double weighted_gap_sq = 0.0;  // n * ||pi_r^T x - x*||^2 (diagnostic, not traced)
  long long grads_computed = 0;
  long long comm_rounds = 0;
};

/// Per-node states stacked one row per node.
struct NetworkState {
  Eigen::MatrixXd x, w, g;  // n x p
  std::vector<GradientTable> tables;
  std::vector<Rng> streams;
  long long iteration = 0;
  long long grads_computed = 0;

  Eigen::VectorXd tracker_sum() const { return w.colwise().sum().transpose(); }
  Eigen::VectorXd estimate_sum() const { return g.colwise().sum().transpose(); }
};

class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual void step() = 0;
  virtual IterationMetrics metrics() const = 0;
  virtual long long iteration() const = 0;
  virtual bool state_finite() const = 0;
};

struct EngineOptions {
  double alpha = 0.1;
  int rounds_c = 1;  // mixing applies A^c
  int rounds_d = 1;  // tracker mixing applies B^d
  std::uint64_t seed = 0;
};

/// Synchronous decentralized iteration over the weight system:
///   x_{k+1} = A^c (x_k - alpha w_k)
///   w_{k+1} = B^d (w_k + g_{k+1} - g_k)
/// with per-method local estimates g: variance-reduced (absaga), raw
/// stochastic (sab), or exact local gradients (ab). Initialization follows
/// w_0 = g_0 = full local gradient at x_0.
class DecentralizedEngine : public Stepper {
 public:
  DecentralizedEngine(const FiniteSumProblem& prob, const WeightSystem& weights, Method method,
                      const EngineOptions& opts);
  DecentralizedEngine(const FiniteSumProblem& prob, const WeightSystem& weights, Method method,
                      const EngineOptions& opts, const Eigen::MatrixXd& x0);

  void step() override;
  IterationMetrics metrics() const override;
  long long iteration() const override { return state_.iteration; }
  bool state_finite() const override;

  const NetworkState& state() const { return state_; }
  Method method() const { return method_; }
  double epoch_of(long long iteration) const;

 private:
  void init(const Eigen::MatrixXd& x0);

  const FiniteSumProblem& prob_;
  const WeightSystem& weights_;
  Method method_;
  EngineOptions opts_;
  Eigen::MatrixXd mix_x_, mix_w_;  // A^c, B^d
  NetworkState state_;
  // scratch
  Eigen::MatrixXd x_next_, w_next_, g_next_, tmp_;
  Eigen::VectorXd grad_buf_, x_buf_;
};

/// Single-machine variance-reduced baseline over the pooled component set.
/// The update phase mirrors the decentralized engine (descend along the
/// previous estimate, then refresh the estimate at the new iterate) so that an
/// n=1 network and this engine produce identical trajectories under a shared
/// seed.
class CentralizedSaga : public Stepper {
 public:
  CentralizedSaga(const FiniteSumProblem& pooled, const EngineOptions& opts);
  CentralizedSaga(const FiniteSumProblem& pooled, const EngineOptions& opts,
                  const Eigen::VectorXd& x0);

  void step() override;
  IterationMetrics metrics() const override;
  long long iteration() const override { return iteration_; }
  bool state_finite() const override;

  const Eigen::VectorXd& x() const { return x_; }
  const GradientTable& table() const { return table_; }

 private:
  void init(const Eigen::VectorXd& x0);

  const FiniteSumProblem& prob_;  // single-node problem
  EngineOptions opts_;
  Eigen::VectorXd x_, w_, g_;
  GradientTable table_;
  Rng stream_;
  long long iteration_ = 0;
  long long grads_computed_ = 0;
  Eigen::VectorXd grad_buf_;
};

struct RunResult {
  std::vector<IterationMetrics> trace;
  bool diverged = false;
  long long diverged_at = -1;
};

// Advances the stepper `iterations` times, recording metrics at iteration 0,
// every `record_every` iterations, and at the final iteration. Each record is
// handed to `sink` as soon as it is produced. Non-finite state stops the run
// and flags divergence; the trace keeps the finite prefix.
RunResult run(Stepper& stepper, long long iterations, long long record_every,
              const std::function<void(const IterationMetrics&)>& sink = {});

// Trace CSV: fixed column order, one header line, 17 significant digits.
std::string trace_csv_header();
std::string trace_csv_row(const IterationMetrics& m);

class TraceWriter {
 public:
  explicit TraceWriter(const std::string& path);
  void write(const IterationMetrics& m);  // flushes every record

 private:
  std::string path_;
  std::ofstream out_;
};

}  // namespace absaga
