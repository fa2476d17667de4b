// Acceptance suite: one pass/fail line per criterion (T1-T9), nonzero exit on
// any failure. Criteria run at pinned tolerances; wall-clock budgets are
// asserted where stated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "absaga/algorithms.hpp"
#include "absaga/digraph.hpp"
#include "absaga/problems.hpp"
#include "absaga/rng.hpp"
#include "absaga/theory.hpp"
#include "absaga/weights.hpp"

using namespace absaga;

namespace {

int failures = 0;

void report(const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s: %s (%s)\n", name.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct LinearFit {
  double slope = 0, r_squared = 0;
  int points = 0;
};

LinearFit fit_log_gap(const std::vector<IterationMetrics>& trace, double lo, double hi) {
  std::vector<double> xs, ys;
  for (const auto& m : trace) {
    if (m.optimality_gap >= lo && m.optimality_gap <= hi) {
      xs.push_back(m.epoch);
      ys.push_back(std::log10(m.optimality_gap));
    }
  }
  LinearFit fit;
  fit.points = static_cast<int>(xs.size());
  if (fit.points < 3) return fit;
  double n = fit.points, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < fit.points; ++k) {
    sx += xs[k];
    sy += ys[k];
    sxx += xs[k] * xs[k];
    sxy += xs[k] * ys[k];
  }
  double denom = n * sxx - sx * sx;
  fit.slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean_y = sy / n;
  for (int k = 0; k < fit.points; ++k) {
    double pred = intercept + fit.slope * xs[k];
    ss_res += (ys[k] - pred) * (ys[k] - pred);
    ss_tot += (ys[k] - mean_y) * (ys[k] - mean_y);
  }
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;
  return fit;
}

// Shared configuration for T1, T2, T7: 16-node exponential graph, synthetic
// logistic task with 100 components per node, tuned constant step size.
struct Desk {
  DirectedGraph graph = exponential_graph(16);
  WeightSystem weights{graph};
  FiniteSumProblem problem = synthetic_logistic(16, 100, 10, 1, 0.01);
  double alpha = 0.2;  // tuned: fast yet smooth enough for the log-linear fit
  std::uint64_t seed = 42;
};

double t1_final_gap = 1.0;  // shared with T2

void t1_linear_convergence(const Desk& desk) {
  auto start = std::chrono::steady_clock::now();
  EngineOptions opts;
  opts.alpha = desk.alpha;
  opts.seed = desk.seed;
  DecentralizedEngine eng(desk.problem, desk.weights, Method::absaga, opts);
  auto result = run(eng, 500 * 100, 10);
  double elapsed = seconds_since(start);

  double final_gap = result.trace.back().optimality_gap;
  t1_final_gap = final_gap;
  LinearFit fit = fit_log_gap(result.trace, 1e-10, 1e-2);
  bool ok = !result.diverged && final_gap <= 1e-10 && fit.points >= 3 && fit.slope < 0 &&
            fit.r_squared >= 0.99 && elapsed <= 60.0;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "final_gap=%.3g within 500 epochs, log-fit R^2=%.4f over %d points, %.1fs",
                final_gap, fit.r_squared, fit.points, elapsed);
  report("T1 linear-convergence", ok, detail);
}

void t2_variance_reduction_exactness(const Desk& desk) {
  auto start = std::chrono::steady_clock::now();
  EngineOptions opts;
  opts.alpha = desk.alpha;
  opts.seed = desk.seed;
  DecentralizedEngine eng(desk.problem, desk.weights, Method::sab, opts);
  auto result = run(eng, 500 * 100, 100);
  double elapsed = seconds_since(start);

  // plateau: the best gap the raw stochastic method reaches after burn-in
  double plateau = 1e300;
  for (const auto& m : result.trace)
    if (m.iteration >= 10000) plateau = std::min(plateau, m.optimality_gap);
  double reference = std::max(t1_final_gap, 2.3e-16);  // floor at float noise
  bool ok = !result.diverged && plateau >= 100.0 * reference && elapsed <= 60.0;
  char detail[256];
  std::snprintf(detail, sizeof(detail),
                "plateau=%.3g vs variance-reduced final=%.3g (ratio %.1e), %.1fs", plateau,
                reference, plateau / reference, elapsed);
  report("T2 stochastic-baseline-plateau", ok, detail);
}

void t3_centralized_equivalence() {
  auto problem = synthetic_logistic(1, 50, 5, 9, 0.05);
  WeightSystem weights{ring_digraph(1)};
  EngineOptions opts;
  opts.alpha = 0.05;
  opts.seed = 7;

  std::string net_csv = trace_csv_header() + "\n";
  DecentralizedEngine net(problem, weights, Method::absaga, opts);
  run(net, 1000, 100,
      [&net_csv](const IterationMetrics& m) { net_csv += trace_csv_row(m) + "\n"; });

  std::string central_csv = trace_csv_header() + "\n";
  auto pooled = problem.pooled();
  CentralizedSaga central(pooled, opts);
  run(central, 1000, 100,
      [&central_csv](const IterationMetrics& m) { central_csv += trace_csv_row(m) + "\n"; });

  bool ok = net_csv == central_csv;
  char detail[128];
  std::snprintf(detail, sizeof(detail), "%zu-byte traces %s over 1000 iterations",
                net_csv.size(), ok ? "identical" : "differ");
  report("T3 centralized-equivalence", ok, detail);
}

void t4_estimator_unbiasedness() {
  auto problem = synthetic_logistic(1, 5, 4, 29, 0.1);
  Rng rng(30);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd point(4), x(4);
    for (int k = 0; k < 4; ++k) {
      point(k) = rng.next_gaussian();
      x(k) = rng.next_gaussian();
    }
    GradientTable table;
    table.init(problem, 0, point);
    for (int j = 0; j < 5; j += 2) {
      Eigen::VectorXd other(4);
      for (int k = 0; k < 4; ++k) other(k) = rng.next_gaussian();
      table.replace(j, problem.component_gradient(other, 0, j), other);
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    for (int s = 0; s < 5; ++s)
      mean += saga_estimate(problem.component_gradient(x, 0, s), table, s);
    mean /= 5.0;
    worst = std::max(worst,
                     (mean - problem.local_full_gradient(x, 0)).cwiseAbs().maxCoeff());
  }
  bool ok = worst < 1e-12;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "exhaustive mean vs full gradient: worst |diff|=%.3g at 100 states", worst);
  report("T4 estimator-unbiasedness", ok, detail);
}

struct CertOutcome {
  bool recursion_ok = false;  // four inequalities + G delta <= gamma delta
  bool rho_ok = false;        // rho(G) <= gamma + 1e-9
  bool closed_form_ok = false;
  theory::ConvergenceCertificate cert;
};

CertOutcome certify(const WeightSystem& weights, double ell, double mu, long long m,
                    long long big_m) {
  ProblemConstants constants{ell, mu, ell / mu};
  auto in = theory::ConvergenceInputs::from(weights, constants, m, big_m, 1.0, 1, 1);
  auto rounds = theory::min_comm_rounds(in);
  in.run.c = rounds.c;
  in.run.d = rounds.d;
  in.run.alpha = theory::max_stepsize(in).alpha_bar;
  CertOutcome outcome;
  outcome.cert = theory::delta_certificate(in);
  outcome.recursion_ok =
      outcome.cert.status != theory::CertificateStatus::not_applicable &&
      outcome.cert.g_delta_ok && outcome.cert.ineq_ok[0] && outcome.cert.ineq_ok[1] &&
      outcome.cert.ineq_ok[2] && outcome.cert.ineq_ok[3];
  outcome.rho_ok = outcome.cert.rho <= outcome.cert.gamma + 1e-9;
  outcome.closed_form_ok = outcome.cert.closed_form_ok;
  return outcome;
}

WeightSystem two_node_directed() {
  StochasticMatrix a;
  a.kind = StochasticKind::row;
  a.entries = (Eigen::Matrix2d() << 0.75, 0.25, 0.5, 0.5).finished();
  StochasticMatrix b;
  b.kind = StochasticKind::column;
  b.entries = (Eigen::Matrix2d() << 0.75, 0.5, 0.25, 0.5).finished();
  return WeightSystem(std::move(a), std::move(b));
}

void t5_certificate() {
  WeightSystem ds16{exponential_graph(16)};
  CertOutcome a = certify(ds16, 0.35, 0.1, 100, 100);
  std::printf("  T5/doubly-stochastic-16: G.delta<=gamma.delta %s, rho<=gamma %s "
              "(rho=%.9f gamma=%.9f), closed-form %s (rho_at_abar=%.9f bound=%.9f)\n",
              a.recursion_ok ? "PASS" : "FAIL", a.rho_ok ? "PASS" : "FAIL", a.cert.rho,
              a.cert.gamma, a.closed_form_ok ? "PASS" : "FAIL", a.cert.rho_at_alpha_bar,
              a.cert.closed_form_bound);

  WeightSystem dir2 = two_node_directed();
  CertOutcome b = certify(dir2, 1.0, 1.0, 32, 32);
  std::printf("  T5/directed-2-node: G.delta<=gamma.delta %s, rho<=gamma %s "
              "(rho=%.9f gamma=%.9f), closed-form %s (rho_at_abar=%.9f bound=%.9f)\n",
              b.recursion_ok ? "PASS" : "FAIL", b.rho_ok ? "PASS" : "FAIL", b.cert.rho,
              b.cert.gamma, b.closed_form_ok ? "PASS" : "FAIL", b.cert.rho_at_alpha_bar,
              b.cert.closed_form_bound);

  // The closed-form contraction display does hold in the large-data regime
  // where its third term binds; shown for context, not scored.
  CertOutcome s = certify(ds16, 1.0, 1.0, 512, 512);
  std::printf("  T5/supplementary (n=16, kappa=1, M=m=512): closed-form %s "
              "(rho_at_abar=%.9f bound=%.9f)\n",
              s.closed_form_ok ? "holds" : "violated", s.cert.rho_at_alpha_bar,
              s.cert.closed_form_bound);

  bool ok = a.recursion_ok && a.rho_ok && a.closed_form_ok && b.recursion_ok && b.rho_ok &&
            b.closed_form_ok;
  report("T5 rate-certificate", ok,
         ok ? "all clauses hold on both pinned systems"
            : "closed-form contraction display fails at alpha_bar: rho(G) is at least "
              "the diagonal entry 1 - alpha_bar*g5, which exceeds the displayed bound "
              "on both pinned systems; weighted-vector certificate and rho<=gamma hold");
}

void t6_directivity() {
  bool ok = true;
  std::string detail;
  for (int n : {4, 8, 16, 32, 64}) {
    WeightSystem w{exponential_graph(n)};
    if (std::abs(w.psi() - 1.0) > 1e-10) {
      ok = false;
      detail += "exponential n=" + std::to_string(n) + " psi off; ";
    }
  }
  for (auto make : {ring_digraph, complete_digraph}) {
    WeightSystem w{make(6)};
    if (std::abs(w.psi() - 1.0) > 1e-10) {
      ok = false;
      detail += "regular graph psi off; ";
    }
  }
  WeightSystem dir2 = two_node_directed();
  WeightSystem geo50{geometric_digraph(50, 0.3, 0.3, 7)};
  WeightSystem geo100{geometric_digraph(100, 0.25, 0.2, 11)};
  char buf[160];
  std::snprintf(buf, sizeof(buf), "doubly stochastic psi=1 (<=1e-10); directed psi: %.4f, %.4f, %.4f",
                dir2.psi(), geo50.psi(), geo100.psi());
  detail += buf;
  if (!(dir2.psi() > 1.0) || !(geo50.psi() > 1.0) || !(geo100.psi() > 1.0)) ok = false;
  report("T6 directivity", ok, detail);
}

void t7_tracking_conservation(const Desk& desk) {
  EngineOptions opts;
  opts.alpha = desk.alpha;
  opts.seed = desk.seed;
  DecentralizedEngine eng(desk.problem, desk.weights, Method::absaga, opts);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    eng.step();
    Eigen::VectorXd sw = eng.state().tracker_sum();
    Eigen::VectorXd sg = eng.state().estimate_sum();
    worst = std::max(worst, (sw - sg).norm() / (1.0 + sg.norm()));
  }
  bool ok = worst <= 1e-9;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "sum_i w_i vs sum_i g_i: worst relative error %.3g over 1e4 iterations",
                worst);
  report("T7 tracking-conservation", ok, detail);
}

void t8_single_round_regime() {
  bool ok = true;
  std::string detail;
  for (int n : {6, 8}) {
    WeightSystem w{complete_digraph(n)};
    auto in = theory::ConvergenceInputs::from(w, {1.0, 1.0, 1.0}, 1, 1, 1e-3, 1, 1);
    auto rounds = theory::min_comm_rounds(in);
    char buf[96];
    std::snprintf(buf, sizeof(buf), "complete n=%d: sigma=%.2g rounds=(%d,%d); ", n,
                  w.sigma_a(), rounds.c, rounds.d);
    detail += buf;
    if (rounds.c != 1 || rounds.d != 1) ok = false;
  }
  report("T8 single-round-regime", ok, detail);
}

void t9_spectral_and_oracles() {
  bool ok = true;
  std::string detail;

  std::vector<DirectedGraph> graphs;
  for (int n : {2, 4, 8, 16, 32, 64}) graphs.push_back(exponential_graph(n));
  graphs.push_back(ring_digraph(8));
  graphs.push_back(complete_digraph(6));
  graphs.push_back(geometric_digraph(50, 0.3, 0.3, 7));
  graphs.push_back(geometric_digraph(100, 0.25, 0.2, 11));

  double max_sigma = 0.0, max_residual = 0.0;
  for (const auto& g : graphs) {
    WeightSystem w(g);
    if (!(w.sigma_a() < 1.0 && w.sigma_b() < 1.0)) ok = false;
    max_sigma = std::max({max_sigma, w.sigma_a(), w.sigma_b()});
    auto la = w.a_limit_check();
    auto lb = w.b_limit_check();
    max_residual = std::max({max_residual, la.residual, lb.residual});
    if (la.residual > 1e-8 || lb.residual > 1e-8) ok = false;
  }

  // finite-difference gradient oracles
  auto quad = synthetic_quadratic(3, 4, 5, 21);
  auto logi = synthetic_logistic(3, 4, 5, 22, 0.05);
  Rng rng(23);
  double worst_fd = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd x(5);
    for (int k = 0; k < 5; ++k) x(k) = 2.0 * rng.next_gaussian();
    int i = rng.next_below(3), j = rng.next_below(4);
    for (const FiniteSumProblem* prob : {&quad, &logi}) {
      Eigen::VectorXd exact = prob->component_gradient(x, i, j);
      Eigen::VectorXd fd(5);
      Eigen::VectorXd xp = x, xm = x;
      for (int k = 0; k < 5; ++k) {
        xp(k) = x(k) + 1e-6;
        xm(k) = x(k) - 1e-6;
        fd(k) = (prob->component_value(xp, i, j) - prob->component_value(xm, i, j)) / 2e-6;
        xp(k) = x(k);
        xm(k) = x(k);
      }
      worst_fd = std::max(worst_fd, (exact - fd).norm() / std::max(1.0, exact.norm()));
    }
  }
  if (worst_fd > 1e-6) ok = false;

  char buf[192];
  std::snprintf(buf, sizeof(buf),
                "11 graphs: max sigma=%.4f, max limit residual=%.2g; "
                "finite-difference worst rel err=%.2g",
                max_sigma, max_residual, worst_fd);
  report("T9 spectral-machinery", ok, buf);
}

}  // namespace

int main() {
  Desk desk;
  t1_linear_convergence(desk);
  t2_variance_reduction_exactness(desk);
  t3_centralized_equivalence();
  t4_estimator_unbiasedness();
  t5_certificate();
  t6_directivity();
  t7_tracking_conservation(desk);
  t8_single_round_regime();
  t9_spectral_and_oracles();
  std::printf("ACCEPTANCE: %d/9 criteria passed\n", 9 - failures);
  return failures;
}
