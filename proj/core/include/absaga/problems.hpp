#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace absaga {

struct ProblemConstants {
  double ell;    // smoothness of every component cost
  double mu;     // strong convexity of the global cost
  double kappa;  // ell / mu
};

enum class ProblemKind { quadratic, logistic };

/// Finite-sum objective F(x) = (1/n) sum_i f_i(x) with
/// f_i(x) = (1/m_i) sum_j f_ij(x). Immutable; gradient evaluation is pure.
///
/// quadratic: f_ij(x) = 0.5 ||x - theta_ij||^2
/// logistic:  f_ij(x) = log(1 + exp(-y xi^T x)) + (lambda/2) ||x||^2
class FiniteSumProblem {
 public:
  // targets[i] is m_i x p, one target per row.
  static FiniteSumProblem quadratic(std::vector<Eigen::MatrixXd> targets);
  // features[i] is m_i x p, labels[i] in {-1, +1}^{m_i}, lambda > 0.
  static FiniteSumProblem logistic(std::vector<Eigen::MatrixXd> features,
                                   std::vector<Eigen::VectorXd> labels, double lambda);

  ProblemKind kind() const { return kind_; }
  int nodes() const { return n_; }
  int dim() const { return p_; }
  int components(int i) const;
  long long total_components() const;
  int max_components() const;  // M
  int min_components() const;  // m
  double lambda() const { return lambda_; }

  void component_gradient_into(const Eigen::VectorXd& x, int i, int j,
                               Eigen::VectorXd& out) const;
  Eigen::VectorXd component_gradient(const Eigen::VectorXd& x, int i, int j) const;
  double component_value(const Eigen::VectorXd& x, int i, int j) const;

  void local_full_gradient_into(const Eigen::VectorXd& x, int i, Eigen::VectorXd& out) const;
  Eigen::VectorXd local_full_gradient(const Eigen::VectorXd& x, int i) const;
  double local_value(const Eigen::VectorXd& x, int i) const;

  std::pair<double, Eigen::VectorXd> global_value_and_gradient(const Eigen::VectorXd& x) const;
  double global_value(const Eigen::VectorXd& x) const;

  // Conservative analytic bounds: quadratic -> (1, 1); logistic ->
  // ell = max ||xi||^2 / 4 + lambda, mu = lambda.
  ProblemConstants constants() const;

  // High-precision minimizer of F. Quadratic: closed form. Logistic:
  // full-gradient descent with step 1/ell until ||grad F|| <= 1e-13
  // (cap 1e6 iterations, then numerical_failure). Cached per instance.
  const Eigen::VectorXd& optimum() const;

  // All components merged onto a single node; used by the centralized engine.
  FiniteSumProblem pooled() const;

 private:
  FiniteSumProblem() = default;
  void check_indices(int i, int j) const;

  ProblemKind kind_ = ProblemKind::quadratic;
  int n_ = 0, p_ = 0;
  std::vector<Eigen::MatrixXd> data_;    // targets or features, per node
  std::vector<Eigen::VectorXd> labels_;  // logistic only
  double lambda_ = 0.0;

  struct OptimumCache;
  std::shared_ptr<OptimumCache> optimum_cache_;
};

// Random binary classification task: ground-truth separator, unit-Gaussian
// features clipped to ||xi|| <= 1, sign labels with 5% flips. lambda < 0
// selects the default 1/(n * per_node).
FiniteSumProblem synthetic_logistic(int n, int per_node, int dim, std::uint64_t seed,
                                    double lambda = -1.0);

// Random quadratic task with unit-Gaussian targets.
FiniteSumProblem synthetic_quadratic(int n, int per_node, int dim, std::uint64_t seed);

// Comma-separated numeric rows, one sample each; optional header auto-detected
// by a non-numeric first line. The label column is selected by name or 0-based
// index and must hold {-1,+1} or {0,1} labels. Features are rescaled so the
// largest row norm is 1; rows are split contiguously and as evenly as possible
// across n nodes.
FiniteSumProblem load_csv(const std::string& path, int n, const std::string& label_column,
                          double lambda);

}  // namespace absaga
