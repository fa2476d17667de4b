#pragma once

#include <Eigen/Dense>

#include "absaga/digraph.hpp"

namespace absaga {

enum class StochasticKind { row, column };

/// Dense nonnegative matrix with a stochasticity contract. Entry (i, r) is the
/// weight node i places on information received from node r, so it may be
/// nonzero only when the edge r -> i exists in the source graph.
struct StochasticMatrix {
  Eigen::MatrixXd entries;
  StochasticKind kind = StochasticKind::row;

  int n() const { return static_cast<int>(entries.rows()); }
  // Checks nonnegativity and the row/column sum contract (tolerance 1e-12).
  void validate() const;
};

// a_ir = 1 / d_i^in for every in-neighbor r (self included). Requires
// self-loops on every node so the matrix is primitive.
StochasticMatrix row_stochastic_from_indegree(const DirectedGraph& g);

// b_ir = 1 / d_r^out for every edge r -> i. Requires self-loops.
StochasticMatrix column_stochastic_from_outdegree(const DirectedGraph& g);

// Left Perron vector of a primitive row-stochastic A: positive, sums to one,
// and pi^T A = pi^T with residual <= 1e-12. Power iteration on A^T, tolerance
// 1e-14, deterministic uniform start; non-convergence within the cap raises
// numerical_failure.
Eigen::VectorXd perron_left(const StochasticMatrix& a);

// Right Perron vector of a primitive column-stochastic B (B pi = pi).
Eigen::VectorXd perron_right(const StochasticMatrix& b);

// Contraction factor sigma = || D^{1/2} (M - M^inf) D^{-1/2} ||_2 where
// D = diag(pi) for row-stochastic M and D = diag(pi)^{-1} for column-stochastic
// M, and M^inf is the rank-one Perron limit. The similarity norm is a declared
// convention; a value >= 1 raises numerical_failure. Decay of the powers
// ||(M - M^inf)^k|| is spot-checked against sigma^k.
double contraction_factor(const StochasticMatrix& m, const Eigen::VectorXd& pi);

// psi = sqrt(h_r h_c) / (n pi_r^T pi_c); equals 1 when both vectors are
// uniform and exceeds 1 otherwise.
double directivity(const Eigen::VectorXd& pi_r, const Eigen::VectorXd& pi_c, int n);

// M^k by binary powering; the stochasticity kind is preserved.
StochasticMatrix matrix_power(const StochasticMatrix& m, int k);

/// Weight matrices of a graph together with every spectral quantity the rate
/// analysis consumes. Immutable after construction.
class WeightSystem {
 public:
  explicit WeightSystem(const DirectedGraph& g);
  // For hand-specified weight pairs (not necessarily built from 1/degree).
  WeightSystem(StochasticMatrix a, StochasticMatrix b);

  int n() const { return a_.n(); }
  const StochasticMatrix& A() const { return a_; }
  const StochasticMatrix& B() const { return b_; }
  const Eigen::VectorXd& pi_r() const { return pi_r_; }
  const Eigen::VectorXd& pi_c() const { return pi_c_; }
  Eigen::MatrixXd A_inf() const;  // ones * pi_r^T
  Eigen::MatrixXd B_inf() const;  // pi_c * ones^T

  double pi_r_min() const { return pi_r_.minCoeff(); }
  double pi_r_max() const { return pi_r_.maxCoeff(); }
  double pi_c_min() const { return pi_c_.minCoeff(); }
  double pi_c_max() const { return pi_c_.maxCoeff(); }
  double h_r() const { return pi_r_max() / pi_r_min(); }
  double h_c() const { return pi_c_max() / pi_c_min(); }
  double sigma_a() const { return sigma_a_; }
  double sigma_b() const { return sigma_b_; }
  double pi_dot() const { return pi_r_.dot(pi_c_); }
  double psi() const { return directivity(pi_r_, pi_c_, n()); }

  // Smallest K with sigma^K <= 1e-9, and the max-norm residual of M^K against
  // the rank-one limit at that K.
  struct LimitCheck {
    int k;
    double residual;
  };
  LimitCheck a_limit_check() const;
  LimitCheck b_limit_check() const;

 private:
  void finish_construction();

  StochasticMatrix a_, b_;
  Eigen::VectorXd pi_r_, pi_c_;
  double sigma_a_ = 0.0, sigma_b_ = 0.0;
};

}  // namespace absaga
