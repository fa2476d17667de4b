#include "absaga/algorithms.hpp"

#include <cmath>

#include "absaga/errors.hpp"
#include "absaga/format.hpp"

namespace absaga {

const char* method_name(Method m) {
  switch (m) {
    case Method::absaga: return "absaga";
    case Method::sab: return "sab";
    case Method::ab: return "ab";
    case Method::saga: return "saga";
  }
  return "?";
}

Method method_from_name(const std::string& name) {
  if (name == "absaga") return Method::absaga;
  if (name == "sab") return Method::sab;
  if (name == "ab") return Method::ab;
  if (name == "saga") return Method::saga;
  fail(errc::configuration, "unknown algorithm name: " + name);
}

void GradientTable::init(const FiniteSumProblem& prob, int node, const Eigen::VectorXd& x0) {
  const int m = prob.components(node);
  const int p = prob.dim();
  grads_.resize(m, p);
  points_.resize(m, p);
  Eigen::VectorXd grad(p);
  for (int j = 0; j < m; ++j) {
    prob.component_gradient_into(x0, node, j, grad);
    grads_.row(j) = grad.transpose();
    points_.row(j) = x0.transpose();
  }
  rebuild_average();
  replacements_since_rebuild_ = 0;
}

void GradientTable::rebuild_average() {
  avg_.setZero(grads_.cols());
  for (int j = 0; j < grads_.rows(); ++j) avg_ += grads_.row(j).transpose();
  avg_ /= static_cast<double>(grads_.rows());
}

void GradientTable::replace(int j, const Eigen::VectorXd& grad, const Eigen::VectorXd& point) {
  if (size() == 1) {
    // Single-slot table: keep the mean bitwise equal to the slot so the
    // variance-reduction correction vanishes exactly.
    avg_ = grad;
  } else {
    avg_ += (grad - grads_.row(j).transpose()) / static_cast<double>(size());
  }
  grads_.row(j) = grad.transpose();
  points_.row(j) = point.transpose();
  if (++replacements_since_rebuild_ >= 10000) {
    rebuild_average();
    replacements_since_rebuild_ = 0;
  }
}

double GradientTable::ref_sq_distance_sum(const Eigen::VectorXd& x_star) const {
  double acc = 0.0;
  for (int j = 0; j < points_.rows(); ++j)
    acc += (points_.row(j).transpose() - x_star).squaredNorm();
  return acc;
}

Eigen::VectorXd saga_estimate(const Eigen::VectorXd& fresh_component_grad,
                              const GradientTable& table, int slot) {
  return fresh_component_grad + (table.average() - table.stored(slot));
}

namespace {

void validate_options(const EngineOptions& opts) {
  require(opts.alpha > 0.0, errc::invalid_argument, "step size must be positive");
  require(opts.rounds_c >= 1 && opts.rounds_d >= 1, errc::invalid_argument,
          "communication rounds must be >= 1");
}

}  // namespace

DecentralizedEngine::DecentralizedEngine(const FiniteSumProblem& prob,
                                         const WeightSystem& weights, Method method,
                                         const EngineOptions& opts)
    : DecentralizedEngine(prob, weights, method, opts,
                          Eigen::MatrixXd::Zero(prob.nodes(), prob.dim())) {}

DecentralizedEngine::DecentralizedEngine(const FiniteSumProblem& prob,
                                         const WeightSystem& weights, Method method,
                                         const EngineOptions& opts, const Eigen::MatrixXd& x0)
    : prob_(prob), weights_(weights), method_(method), opts_(opts) {
  require(method != Method::saga, errc::invalid_argument,
          "the centralized baseline runs through CentralizedSaga");
  require(prob.nodes() == weights.n(), errc::invalid_argument,
          "problem and weight system disagree on the node count");
  validate_options(opts);
  require(x0.rows() == prob.nodes() && x0.cols() == prob.dim(), errc::invalid_argument,
          "x0 must be n x p");
  mix_x_ = matrix_power(weights.A(), opts.rounds_c).entries;
  mix_w_ = matrix_power(weights.B(), opts.rounds_d).entries;
  init(x0);
}

void DecentralizedEngine::init(const Eigen::MatrixXd& x0) {
  const int n = prob_.nodes();
  const int p = prob_.dim();
  state_.x = x0;
  state_.g.resize(n, p);
  state_.streams.reserve(n);
  for (int i = 0; i < n; ++i) state_.streams.emplace_back(node_stream_seed(opts_.seed, i));

  Eigen::VectorXd xi(p), grad(p);
  if (method_ == Method::absaga) {
    state_.tables.resize(n);
    for (int i = 0; i < n; ++i) {
      xi = state_.x.row(i).transpose();
      state_.tables[i].init(prob_, i, xi);
      state_.g.row(i) = state_.tables[i].average().transpose();
    }
  } else {
    for (int i = 0; i < n; ++i) {
      xi = state_.x.row(i).transpose();
      prob_.local_full_gradient_into(xi, i, grad);
      state_.g.row(i) = grad.transpose();
    }
  }
  state_.w = state_.g;
  state_.iteration = 0;
  state_.grads_computed = 0;

  x_next_.resize(n, p);
  w_next_.resize(n, p);
  g_next_.resize(n, p);
  tmp_.resize(n, p);
  grad_buf_.resize(p);
  x_buf_.resize(p);
}

void DecentralizedEngine::step() {
  const int n = prob_.nodes();
  // x_{k+1} = A^c (x_k - alpha w_k): the mixing applies to the descended states.
  tmp_ = state_.x - opts_.alpha * state_.w;
  x_next_.noalias() = mix_x_ * tmp_;

  for (int i = 0; i < n; ++i) {
    x_buf_ = x_next_.row(i).transpose();
    switch (method_) {
      case Method::absaga: {
        int s = state_.streams[i].next_below(prob_.components(i));
        prob_.component_gradient_into(x_buf_, i, s, grad_buf_);
        g_next_.row(i) = saga_estimate(grad_buf_, state_.tables[i], s).transpose();
        state_.tables[i].replace(s, grad_buf_, x_buf_);
        ++state_.grads_computed;
        break;
      }
      case Method::sab: {
        int s = state_.streams[i].next_below(prob_.components(i));
        prob_.component_gradient_into(x_buf_, i, s, grad_buf_);
        g_next_.row(i) = grad_buf_.transpose();
        ++state_.grads_computed;
        break;
      }
      case Method::ab: {
        prob_.local_full_gradient_into(x_buf_, i, grad_buf_);
        g_next_.row(i) = grad_buf_.transpose();
        state_.grads_computed += prob_.components(i);
        break;
      }
      case Method::saga: break;  // unreachable
    }
  }

  // w_{k+1} = B^d (w_k + g_{k+1} - g_k)
  tmp_ = state_.w + g_next_ - state_.g;
  w_next_.noalias() = mix_w_ * tmp_;

  state_.x.swap(x_next_);
  state_.w.swap(w_next_);
  state_.g.swap(g_next_);
  ++state_.iteration;
}

bool DecentralizedEngine::state_finite() const {
  return state_.x.allFinite() && state_.w.allFinite() && state_.g.allFinite();
}

double DecentralizedEngine::epoch_of(long long iteration) const {
  if (method_ == Method::ab) return static_cast<double>(iteration);
  return static_cast<double>(iteration) / static_cast<double>(prob_.max_components());
}

IterationMetrics DecentralizedEngine::metrics() const {
  IterationMetrics m;
  m.iteration = state_.iteration;
  m.epoch = epoch_of(state_.iteration);
  m.grads_computed = state_.grads_computed;
  m.comm_rounds =
      static_cast<long long>(opts_.rounds_c + opts_.rounds_d) * state_.iteration;

  const Eigen::VectorXd& x_star = prob_.optimum();
  Eigen::VectorXd x_bar = state_.x.colwise().mean().transpose();
  m.optimality_gap = prob_.global_value(x_bar) - prob_.global_value(x_star);

  Eigen::RowVectorXd proj = weights_.pi_r().transpose() * state_.x;  // A_inf x rows
  m.consensus_error =
      (state_.x - Eigen::VectorXd::Ones(prob_.nodes()) * proj).squaredNorm();
  m.weighted_gap_sq =
      static_cast<double>(prob_.nodes()) * (proj.transpose() - x_star).squaredNorm();

  Eigen::RowVectorXd col_sum = state_.w.colwise().sum();  // B_inf w = pi_c (1^T w)
  m.tracking_error = (state_.w - weights_.pi_c() * col_sum).squaredNorm();

  if (method_ == Method::absaga) {
    double aux = 0.0;
    for (int i = 0; i < prob_.nodes(); ++i)
      aux += state_.tables[i].ref_sq_distance_sum(x_star) /
             static_cast<double>(prob_.components(i));
    m.aux_gap = aux;
  }
  return m;
}

CentralizedSaga::CentralizedSaga(const FiniteSumProblem& pooled, const EngineOptions& opts)
    : CentralizedSaga(pooled, opts, Eigen::VectorXd::Zero(pooled.dim())) {}

CentralizedSaga::CentralizedSaga(const FiniteSumProblem& pooled, const EngineOptions& opts,
                                 const Eigen::VectorXd& x0)
    : prob_(pooled), opts_(opts), stream_(node_stream_seed(opts.seed, 0)) {
  require(pooled.nodes() == 1, errc::invalid_argument,
          "CentralizedSaga expects a pooled single-node problem");
  validate_options(opts);
  require(x0.size() == pooled.dim(), errc::invalid_argument, "x0 dimension mismatch");
  init(x0);
}

void CentralizedSaga::init(const Eigen::VectorXd& x0) {
  x_ = x0;
  table_.init(prob_, 0, x_);
  g_ = table_.average();
  w_ = g_;
  grad_buf_.resize(prob_.dim());
  iteration_ = 0;
  grads_computed_ = 0;
}

void CentralizedSaga::step() {
  // Descend along the previous estimate, then refresh it at the new iterate;
  // same phase as the decentralized engine so n=1 trajectories agree bitwise.
  x_ = x_ - opts_.alpha * w_;
  int s = stream_.next_below(static_cast<int>(prob_.total_components()));
  prob_.component_gradient_into(x_, 0, s, grad_buf_);
  Eigen::VectorXd estimate = saga_estimate(grad_buf_, table_, s);
  table_.replace(s, grad_buf_, x_);
  w_ = w_ + estimate - g_;
  g_ = estimate;
  ++iteration_;
  ++grads_computed_;
}

bool CentralizedSaga::state_finite() const {
  return x_.allFinite() && w_.allFinite() && g_.allFinite();
}

IterationMetrics CentralizedSaga::metrics() const {
  IterationMetrics m;
  m.iteration = iteration_;
  m.epoch = static_cast<double>(iteration_) / static_cast<double>(prob_.max_components());
  m.grads_computed = grads_computed_;
  m.comm_rounds = static_cast<long long>(opts_.rounds_c + opts_.rounds_d) * iteration_;

  const Eigen::VectorXd& x_star = prob_.optimum();
  m.optimality_gap = prob_.global_value(x_) - prob_.global_value(x_star);
  m.consensus_error = 0.0;
  m.tracking_error = 0.0;
  m.weighted_gap_sq = (x_ - x_star).squaredNorm();
  m.aux_gap =
      table_.ref_sq_distance_sum(x_star) / static_cast<double>(prob_.total_components());
  return m;
}

namespace {

bool metrics_finite(const IterationMetrics& m) {
  return std::isfinite(m.optimality_gap) && std::isfinite(m.consensus_error) &&
         std::isfinite(m.tracking_error) && std::isfinite(m.aux_gap);
}

}  // namespace

RunResult run(Stepper& stepper, long long iterations, long long record_every,
              const std::function<void(const IterationMetrics&)>& sink) {
  require(iterations >= 1, errc::invalid_argument, "run requires iterations >= 1");
  require(record_every >= 1, errc::invalid_argument, "run requires record_every >= 1");
  RunResult result;
  // Returns false when the record is non-finite (the objective can overflow
  // before the iterates do); such a record is dropped and flags divergence.
  auto record = [&]() -> bool {
    IterationMetrics m = stepper.metrics();
    if (!metrics_finite(m)) return false;
    result.trace.push_back(m);
    if (sink) sink(m);
    return true;
  };
  if (!record()) {
    result.diverged = true;
    result.diverged_at = 0;
    return result;
  }
  for (long long k = 1; k <= iterations; ++k) {
    stepper.step();
    if (!stepper.state_finite()) {
      result.diverged = true;
      result.diverged_at = k;
      break;
    }
    if (k % record_every == 0 || k == iterations) {
      if (!record()) {
        result.diverged = true;
        result.diverged_at = k;
        break;
      }
    }
  }
  return result;
}

std::string trace_csv_header() {
  return "iteration,epoch,optimality_gap,consensus_error,tracking_error,aux_gap,"
         "grads_computed,comm_rounds";
}

std::string trace_csv_row(const IterationMetrics& m) {
  std::string row = std::to_string(m.iteration);
  row += ',';
  row += format_full(m.epoch);
  row += ',';
  row += format_full(m.optimality_gap);
  row += ',';
  row += format_full(m.consensus_error);
  row += ',';
  row += format_full(m.tracking_error);
  row += ',';
  row += format_full(m.aux_gap);
  row += ',';
  row += std::to_string(m.grads_computed);
  row += ',';
  row += std::to_string(m.comm_rounds);
  return row;
}

TraceWriter::TraceWriter(const std::string& path) : path_(path), out_(path) {
  require(out_.good(), errc::io, "cannot open trace file: " + path);
  out_ << trace_csv_header() << "\n";
  out_.flush();
}

void TraceWriter::write(const IterationMetrics& m) {
  out_ << trace_csv_row(m) << "\n";
  out_.flush();
  require(out_.good(), errc::io, "trace write failed: " + path_);
}

}  // namespace absaga
