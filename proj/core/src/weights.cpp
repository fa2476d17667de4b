#include "absaga/weights.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "absaga/errors.hpp"

namespace absaga {

namespace {

constexpr double kSumTol = 1e-12;
constexpr double kPerronTol = 1e-14;
constexpr double kResidualTol = 1e-12;

long long perron_iteration_cap(int n) {
  return static_cast<long long>(100.0 * n * std::log(std::max(2, n))) + 10000;
}

void check_self_loops(const DirectedGraph& g, const char* op) {
  require(g.self_loops, errc::invalid_argument,
          std::string(op) + ": graph must have self-loops on every node");
  require(is_strongly_connected(g), errc::invalid_argument,
          std::string(op) + ": graph must be strongly connected");
}

// Fixed point of v -> M v for a stochastic direction that preserves the entry
// sum. `transpose` selects A^T iteration (left vector) vs. B iteration.
Eigen::VectorXd perron_power_iteration(const StochasticMatrix& m, bool transpose,
                                       const char* what) {
  const int n = m.n();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::VectorXd next(n);
  const long long cap = perron_iteration_cap(n);
  for (long long it = 0; it < cap; ++it) {
    if (transpose)
      next.noalias() = m.entries.transpose() * v;
    else
      next.noalias() = m.entries * v;
    next /= next.sum();  // guard drift; the sum is 1 up to roundoff
    double diff = (next - v).cwiseAbs().maxCoeff();
    v.swap(next);
    if (diff <= kPerronTol) {
      require(v.minCoeff() > 0.0, errc::numerical_failure,
              std::string(what) + ": Perron vector not positive (matrix not primitive?)");
      return v;
    }
  }
  fail(errc::numerical_failure,
       std::string(what) + ": power iteration did not converge (matrix not primitive?)");
}

}  // namespace

void StochasticMatrix::validate() const {
  const int dim = n();
  require(dim >= 1 && entries.cols() == dim, errc::invalid_argument,
          "stochastic matrix must be square");
  require(entries.minCoeff() >= 0.0, errc::invalid_argument,
          "stochastic matrix must be nonnegative");
  if (kind == StochasticKind::row) {
    for (int i = 0; i < dim; ++i)
      require(std::abs(entries.row(i).sum() - 1.0) <= kSumTol, errc::invalid_argument,
              "row " + std::to_string(i) + " does not sum to 1");
  } else {
    for (int r = 0; r < dim; ++r)
      require(std::abs(entries.col(r).sum() - 1.0) <= kSumTol, errc::invalid_argument,
              "column " + std::to_string(r) + " does not sum to 1");
  }
}

StochasticMatrix row_stochastic_from_indegree(const DirectedGraph& g) {
  check_self_loops(g, "row_stochastic_from_indegree");
  auto rev = in_neighbors(g);
  StochasticMatrix a;
  a.kind = StochasticKind::row;
  a.entries = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int i = 0; i < g.n; ++i) {
    double w = 1.0 / static_cast<double>(rev[i].size());
    for (int r : rev[i]) a.entries(i, r) = w;
  }
  a.validate();
  return a;
}

StochasticMatrix column_stochastic_from_outdegree(const DirectedGraph& g) {
  check_self_loops(g, "column_stochastic_from_outdegree");
  StochasticMatrix b;
  b.kind = StochasticKind::column;
  b.entries = Eigen::MatrixXd::Zero(g.n, g.n);
  for (int r = 0; r < g.n; ++r) {
    double w = 1.0 / static_cast<double>(g.out_edges[r].size());
    for (int i : g.out_edges[r]) b.entries(i, r) = w;
  }
  b.validate();
  return b;
}

Eigen::VectorXd perron_left(const StochasticMatrix& a) {
  require(a.kind == StochasticKind::row, errc::invalid_argument,
          "perron_left expects a row-stochastic matrix");
  Eigen::VectorXd pi = perron_power_iteration(a, /*transpose=*/true, "perron_left");
  double residual = (pi.transpose() * a.entries - pi.transpose()).cwiseAbs().maxCoeff();
  require(residual <= kResidualTol, errc::numerical_failure,
          "perron_left: residual " + std::to_string(residual) + " exceeds tolerance");
  return pi;
}

Eigen::VectorXd perron_right(const StochasticMatrix& b) {
  require(b.kind == StochasticKind::column, errc::invalid_argument,
          "perron_right expects a column-stochastic matrix");
  Eigen::VectorXd pi = perron_power_iteration(b, /*transpose=*/false, "perron_right");
  double residual = (b.entries * pi - pi).cwiseAbs().maxCoeff();
  require(residual <= kResidualTol, errc::numerical_failure,
          "perron_right: residual " + std::to_string(residual) + " exceeds tolerance");
  return pi;
}

namespace {

Eigen::MatrixXd rank_one_limit(const StochasticMatrix& m, const Eigen::VectorXd& pi) {
  const int n = m.n();
  if (m.kind == StochasticKind::row)
    return Eigen::VectorXd::Ones(n) * pi.transpose();  // every row is pi^T
  return pi * Eigen::RowVectorXd::Ones(n);             // every column is pi
}

Eigen::MatrixXd similarity_scaled(const StochasticMatrix& m, const Eigen::VectorXd& pi,
                                  const Eigen::MatrixXd& centered) {
  // D^{1/2} N D^{-1/2} with D = diag(pi) (row) or diag(pi)^{-1} (column).
  Eigen::VectorXd half = pi.array().sqrt();
  if (m.kind == StochasticKind::row)
    return half.asDiagonal() * centered * half.cwiseInverse().asDiagonal();
  return half.cwiseInverse().asDiagonal() * centered * half.asDiagonal();
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.rows() <= 32) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

double contraction_factor(const StochasticMatrix& m, const Eigen::VectorXd& pi) {
  require(pi.size() == m.n(), errc::invalid_argument, "contraction_factor: size mismatch");
  require(pi.minCoeff() > 0.0, errc::invalid_argument,
          "contraction_factor: Perron vector must be positive");
  Eigen::MatrixXd centered = m.entries - rank_one_limit(m, pi);
  double sigma = spectral_norm(similarity_scaled(m, pi, centered));
  require(sigma < 1.0, errc::numerical_failure,
          "contraction factor " + std::to_string(sigma) +
              " is not < 1; the similarity norm does not contract this matrix");
  // Spot-check submultiplicative decay of the centered powers.
  Eigen::MatrixXd pow = centered * centered;
  double s2 = spectral_norm(similarity_scaled(m, pi, pow));
  require(s2 <= sigma * sigma * (1.0 + 1e-8) + 1e-12, errc::numerical_failure,
          "contraction factor decay check failed");
  return sigma;
}

double directivity(const Eigen::VectorXd& pi_r, const Eigen::VectorXd& pi_c, int n) {
  double h_r = pi_r.maxCoeff() / pi_r.minCoeff();
  double h_c = pi_c.maxCoeff() / pi_c.minCoeff();
  return std::sqrt(h_r * h_c) / (static_cast<double>(n) * pi_r.dot(pi_c));
}

StochasticMatrix matrix_power(const StochasticMatrix& m, int k) {
  require(k >= 1, errc::invalid_argument, "matrix_power requires k >= 1");
  StochasticMatrix result = m;
  Eigen::MatrixXd base = m.entries;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Identity(m.n(), m.n());
  int e = k;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  result.entries = std::move(acc);
  return result;
}

WeightSystem::WeightSystem(const DirectedGraph& g)
    : a_(row_stochastic_from_indegree(g)), b_(column_stochastic_from_outdegree(g)) {
  finish_construction();
}

WeightSystem::WeightSystem(StochasticMatrix a, StochasticMatrix b)
    : a_(std::move(a)), b_(std::move(b)) {
  require(a_.kind == StochasticKind::row && b_.kind == StochasticKind::column,
          errc::invalid_argument, "WeightSystem expects a row/column stochastic pair");
  require(a_.n() == b_.n(), errc::invalid_argument, "WeightSystem: dimension mismatch");
  a_.validate();
  b_.validate();
  finish_construction();
}

void WeightSystem::finish_construction() {
  pi_r_ = perron_left(a_);
  pi_c_ = perron_right(b_);
  sigma_a_ = contraction_factor(a_, pi_r_);
  sigma_b_ = contraction_factor(b_, pi_c_);
  require(psi() >= 1.0 - 1e-10, errc::numerical_failure, "directivity constant below 1");
}

Eigen::MatrixXd WeightSystem::A_inf() const {
  return Eigen::VectorXd::Ones(n()) * pi_r_.transpose();
}

Eigen::MatrixXd WeightSystem::B_inf() const { return pi_c_ * Eigen::RowVectorXd::Ones(n()); }

namespace {

WeightSystem::LimitCheck limit_check(const StochasticMatrix& m, const Eigen::MatrixXd& m_inf,
                                     double sigma) {
  int k = 1;
  if (sigma > 0.0) k = std::max(1, static_cast<int>(std::ceil(std::log(1e-9) / std::log(sigma))));
  StochasticMatrix mk = matrix_power(m, k);
  double residual = (mk.entries - m_inf).cwiseAbs().maxCoeff();
  return {k, residual};
}

}  // namespace

WeightSystem::LimitCheck WeightSystem::a_limit_check() const {
  return limit_check(a_, A_inf(), sigma_a_);
}

WeightSystem::LimitCheck WeightSystem::b_limit_check() const {
  return limit_check(b_, B_inf(), sigma_b_);
}

}  // namespace absaga
