#include "absaga/theory.hpp"

#include <algorithm>
#include <cmath>

#include "absaga/errors.hpp"
#include "absaga/format.hpp"

namespace absaga::theory {

namespace rc = rate_constants;

ConvergenceInputs ConvergenceInputs::from(const WeightSystem& weights,
                                          const ProblemConstants& constants, long long m_min,
                                          long long m_max, double alpha, int c, int d) {
  ConvergenceInputs in;
  in.network.n = weights.n();
  in.network.pi_r_min = weights.pi_r_min();
  in.network.pi_r_max = weights.pi_r_max();
  in.network.pi_c_min = weights.pi_c_min();
  in.network.pi_c_max = weights.pi_c_max();
  in.network.h_r = weights.h_r();
  in.network.h_c = weights.h_c();
  in.network.sigma_a = weights.sigma_a();
  in.network.sigma_b = weights.sigma_b();
  in.network.pi_r_norm_sq = weights.pi_r().squaredNorm();
  in.network.pi_c_norm_sq = weights.pi_c().squaredNorm();
  in.network.pi_dot = weights.pi_dot();
  in.problem.ell = constants.ell;
  in.problem.mu = constants.mu;
  in.problem.kappa = constants.kappa;
  in.problem.m_min = m_min;
  in.problem.m_max = m_max;
  in.run.alpha = alpha;
  in.run.c = c;
  in.run.d = d;
  in.validate();
  return in;
}

void ConvergenceInputs::validate() const {
  require(network.n >= 1, errc::invalid_argument, "network size must be positive");
  require(network.pi_r_min > 0 && network.pi_c_min > 0, errc::invalid_argument,
          "Perron vectors must be positive");
  require(network.sigma_a >= 0 && network.sigma_a < 1 && network.sigma_b >= 0 &&
              network.sigma_b < 1,
          errc::invalid_argument, "contraction factors must lie in [0, 1)");
  require(problem.ell >= problem.mu && problem.mu > 0, errc::invalid_argument,
          "need ell >= mu > 0");
  require(problem.m_min >= 1 && problem.m_max >= problem.m_min, errc::invalid_argument,
          "component counts must satisfy M >= m >= 1");
  require(run.alpha > 0, errc::invalid_argument, "step size must be positive");
  require(run.c >= 1 && run.d >= 1, errc::invalid_argument, "rounds must be >= 1");
}

double ConvergenceInputs::psi() const {
  return std::sqrt(network.h_r * network.h_c) / (network.n * network.pi_dot);
}

double ConvergenceInputs::sigma_a_2c() const {
  return std::pow(network.sigma_a, 2.0 * run.c);
}

double ConvergenceInputs::sigma_b_2d() const {
  return std::pow(network.sigma_b, 2.0 * run.d);
}

GConstants g_constants(const ConvergenceInputs& in) {
  const auto& net = in.network;
  const auto& pr = in.problem;
  const double n = net.n;
  const double ell2 = pr.ell * pr.ell;
  const double one_minus_sa = 1.0 - in.sigma_a_2c();
  GConstants g;
  g.g1 = rc::kMixErrX * ell2 * n * net.pi_c_norm_sq * net.pi_r_max / one_minus_sa;
  g.g2 = rc::kMixErrOpt * ell2 * net.pi_c_norm_sq * net.pi_r_max / one_minus_sa;
  g.g3 = rc::kMixErrTrack * ell2 * net.pi_r_max * net.pi_c_max / one_minus_sa;
  g.g4 = rc::kOptCoupling * ell2 * n * net.pi_dot / (pr.mu * net.pi_r_min);
  g.g5 = pr.mu * n * net.pi_dot / rc::kDescentQuarter;
  g.g6 = rc::kAuxCoupling * ell2 * n * net.pi_dot * net.pi_dot;
  g.g7 = rc::kTrackCoupling * ell2 * net.pi_r_norm_sq * net.pi_c_max / (pr.mu * net.pi_dot);
  return g;
}

Eigen::Matrix4d build_G(const ConvergenceInputs& in) {
  const GConstants g = g_constants(in);
  const double alpha = in.run.alpha;
  const double sa2c = in.sigma_a_2c();
  const double sb2d = in.sigma_b_2d();
  const double m = static_cast<double>(in.problem.m_min);
  const double big_m = static_cast<double>(in.problem.m_max);
  const double n = in.network.n;
  const double track_scale = sb2d / (1.0 - sb2d);

  Eigen::Matrix4d G;
  G(0, 0) = rc::kDiagContraction;
  G(0, 1) = alpha * alpha * g.g1 * sa2c;
  G(0, 2) = alpha * alpha * g.g2 * sa2c;
  G(0, 3) = alpha * alpha * g.g3 * sa2c;

  G(1, 0) = alpha * g.g4;
  G(1, 1) = 1.0 - alpha * g.g5;
  G(1, 2) = alpha * alpha * g.g6;
  G(1, 3) = alpha * g.g7;

  G(2, 0) = rc::kTableRowConsensus / (m * in.network.pi_r_min);
  G(2, 1) = rc::kTableRowOpt / m;
  G(2, 2) = 1.0 - 1.0 / big_m;
  G(2, 3) = 0.0;

  G(3, 0) = rc::kTrackRowConsensus * n * track_scale /
            (in.network.pi_r_min * in.network.pi_c_min);
  G(3, 1) = rc::kTrackRowOpt * n * track_scale / in.network.pi_c_min;
  G(3, 2) = rc::kTrackRowAux * track_scale / in.network.pi_c_min;
  G(3, 3) = rc::kDiagContraction;
  return G;
}

ConditionReport recursion_preconditions(const ConvergenceInputs& in) {
  const auto& net = in.network;
  const auto& pr = in.problem;
  ConditionReport rep;
  double term1 = 1.0 / (rc::kStepHr * pr.ell * std::sqrt(net.h_r * net.h_c));
  double term2 = pr.mu / (rc::kStepSum * net.n * pr.ell * pr.ell * net.pi_dot);
  rep.alpha_bound = std::min(term1, term2);
  rep.alpha_ok = in.run.alpha <= rep.alpha_bound;

  double log4n = std::log(4.0 * net.n);
  rep.c_threshold = net.sigma_a > 0 ? log4n / std::log(1.0 / net.sigma_a) : 0.0;
  rep.d_threshold = net.sigma_b > 0 ? log4n / std::log(1.0 / net.sigma_b) : 0.0;
  rep.c_ok = in.run.c >= rep.c_threshold;
  rep.d_ok = in.run.d >= rep.d_threshold;
  return rep;
}

namespace {

double companion_spectral_radius(const Eigen::Matrix4d& g) {
  // Characteristic polynomial coefficients via Faddeev-LeVerrier, then the
  // eigenvalues of its companion matrix.
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  std::array<double, 5> coeff{};  // x^4 + c1 x^3 + c2 x^2 + c3 x + c4
  coeff[0] = 1.0;
  Eigen::Matrix4d acc = Eigen::Matrix4d::Zero();
  for (int k = 1; k <= 4; ++k) {
    acc = g * m;
    double ck = -acc.trace() / k;
    coeff[k] = ck;
    m = acc + ck * Eigen::Matrix4d::Identity();
  }
  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) companion(0, i) = -coeff[i + 1];
  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

SpectralResult spectral_radius(const Eigen::Matrix4d& g, const Eigen::Vector4d* delta) {
  require(g.minCoeff() >= 0.0, errc::invalid_argument,
          "spectral_radius expects a nonnegative matrix");
  SpectralResult result;

  Eigen::Vector4d v = Eigen::Vector4d::Constant(0.25);
  double lambda = 0.0;
  bool converged = false;
  for (int it = 0; it < 200000; ++it) {
    Eigen::Vector4d u = g * v;
    double norm = u.cwiseAbs().maxCoeff();
    if (norm == 0.0) {
      lambda = 0.0;
      converged = true;
      break;
    }
    u /= norm;
    if (std::abs(norm - lambda) <= 1e-12 * std::max(1.0, norm) && it > 2) {
      lambda = norm;
      converged = true;
      break;
    }
    lambda = norm;
    v = u;
  }
  if (converged) {
    result.rho = lambda;
    result.method = "power";
  } else {
    result.rho = companion_spectral_radius(g);
    result.method = "companion";
  }

  if (delta != nullptr) {
    require(delta->minCoeff() > 0.0, errc::invalid_argument,
            "spectral_radius bound needs a positive vector");
    result.scaled_max_bound = ((g * (*delta)).array() / delta->array()).maxCoeff();
    result.bound_supplied = true;
    require(result.rho <= result.scaled_max_bound + 1e-9, errc::numerical_failure,
            "spectral radius exceeds the weighted-max-norm bound");
  }
  return result;
}

StepsizeBound max_stepsize(const ConvergenceInputs& in) {
  const auto& net = in.network;
  const auto& pr = in.problem;
  const double m = static_cast<double>(pr.m_min);
  const double big_m = static_cast<double>(pr.m_max);
  StepsizeBound b;
  b.terms[0] = 1.0 / (rc::kStepHr * pr.ell * std::sqrt(net.h_r * net.h_c));
  b.terms[1] = m / (rc::kStepSum * big_m * net.n * pr.kappa * pr.ell * net.pi_dot);
  b.terms[2] = 1.0 / (rc::kStepTable * pr.mu * big_m * net.pi_dot);
  b.binding = 0;
  for (int k = 1; k < 3; ++k)
    if (b.terms[k] < b.terms[b.binding]) b.binding = k;
  b.alpha_bar = b.terms[b.binding];
  return b;
}

CommRounds min_comm_rounds(const ConvergenceInputs& in) {
  const auto& net = in.network;
  const auto& pr = in.problem;
  const double m = static_cast<double>(pr.m_min);
  const double big_m = static_cast<double>(pr.m_max);
  const double n = net.n;
  CommRounds rounds;

  if (net.sigma_b <= 0.0) {
    rounds.d_bar = 0.0;
    rounds.d = 1;
  } else {
    double arg_d = rc::kRoundsW * pr.kappa / net.pi_dot * std::sqrt(n * big_m * net.h_c / m);
    rounds.d_bar = std::log(arg_d) / std::log(1.0 / net.sigma_b);
    rounds.d = std::max(1, static_cast<int>(std::ceil(rounds.d_bar)));
  }

  if (net.sigma_a <= 0.0) {
    rounds.c_bar = 0.0;
    rounds.c = 1;
  } else {
    double sb2d = std::pow(net.sigma_b, 2.0 * rounds.d);
    double arg_c = rc::kRoundsX * n * big_m * pr.kappa / (m * (1.0 - sb2d)) *
                   std::sqrt(net.h_r * net.h_c / net.pi_dot);
    rounds.c_bar = std::log(arg_c) / std::log(1.0 / net.sigma_a);
    rounds.c = std::max(1, static_cast<int>(std::ceil(rounds.c_bar)));
  }
  return rounds;
}

ConvergenceCertificate delta_certificate(const ConvergenceInputs& in) {
  const auto& net = in.network;
  const auto& pr = in.problem;
  const double m = static_cast<double>(pr.m_min);
  const double big_m = static_cast<double>(pr.m_max);
  const double n = net.n;
  const double kappa2 = pr.kappa * pr.kappa;
  const double sb2d = in.sigma_b_2d();
  const double sbd = std::pow(net.sigma_b, static_cast<double>(in.run.d));

  ConvergenceCertificate cert;
  cert.psi = in.psi();
  cert.gamma_order = std::max({pr.kappa * cert.psi, kappa2 * big_m / m, big_m});
  cert.g = g_constants(in);
  cert.G = build_G(in);

  StepsizeBound sb = max_stepsize(in);
  cert.alpha_bar = sb.alpha_bar;
  CommRounds rounds = min_comm_rounds(in);
  cert.c_bar = rounds.c_bar;
  cert.d_bar = rounds.d_bar;
  cert.c_rounds = rounds.c;
  cert.d_rounds = rounds.d;

  // Closed-form contraction claim at alpha_bar, evaluated regardless of the
  // certificate gate below.
  {
    ConvergenceInputs at_bar = in;
    at_bar.run.alpha = cert.alpha_bar;
    Eigen::Matrix4d g_bar = build_G(at_bar);
    cert.rho_at_alpha_bar = spectral_radius(g_bar).rho;
    cert.closed_form_bound =
        1.0 - std::min({1.0 / (rc::kStepHr * pr.kappa * cert.psi),
                        m / (rc::kStepSum * kappa2 * big_m),
                        1.0 / (rc::kStepTable * big_m)});
    cert.closed_form_ok = cert.rho_at_alpha_bar <= cert.closed_form_bound + 1e-9;
  }

  // Applicability gate: sigma_B^d must be small against the network/problem
  // conditioning, and tau1 must stay positive.
  double gate = net.pi_dot / (rc::kApplicabilityGate * pr.kappa) *
                std::sqrt(m / (n * big_m * net.h_c));
  if (!(sbd < gate)) {
    cert.status = CertificateStatus::not_applicable;
    cert.reason = "sigma_B^d does not satisfy the smallness gate";
    return cert;
  }
  double tau1 = 1.0 - rc::kDeltaTrack * n * sb2d * kappa2 * big_m * net.h_c /
                          (m * (1.0 - sb2d) * net.pi_dot * net.pi_dot);
  if (!(tau1 > 0.0)) {
    cert.status = CertificateStatus::not_applicable;
    cert.reason = "tau1 is not positive";
    return cert;
  }
  double tau2 = 1.0 + rc::kDeltaTrack * n * kappa2 * big_m * net.h_c /
                          (net.pi_dot * net.pi_dot * tau1 * m * (1.0 - sb2d));
  cert.tau1 = tau1;
  cert.tau2 = tau2;

  cert.delta(0) = 1.0;
  cert.delta(1) = rc::kDeltaOpt * tau2 * kappa2 / net.pi_r_min;
  cert.delta(2) = rc::kDeltaAux * tau2 * kappa2 * big_m / (m * net.pi_r_min);
  cert.delta(3) = rc::kDeltaTrack * n * kappa2 * big_m /
                  (m * tau1 * (1.0 - sb2d) * net.pi_r_min * net.pi_c_min);

  const GConstants& g = cert.g;
  const double alpha = in.run.alpha;
  const double sa2c = in.sigma_a_2c();
  const auto& d = cert.delta;

  // Row-wise forms of G delta <= gamma delta with gamma = 1 - alpha g5 / 2.
  cert.ineq_lhs[0] = alpha * g.g5 / 2.0 +
                     sa2c / d(0) *
                         (alpha * alpha * g.g1 * d(1) + alpha * alpha * g.g2 * d(2) +
                          alpha * alpha * g.g3 * d(3));
  cert.ineq_rhs[0] = 0.25;

  cert.ineq_lhs[1] = alpha * g.g6;
  cert.ineq_rhs[1] =
      g.g5 / 2.0 * d(1) / d(2) - g.g4 * d(0) / d(2) - g.g7 * d(3) / d(2);

  cert.ineq_lhs[2] = alpha * g.g5 / 2.0;
  cert.ineq_rhs[2] = 1.0 / big_m - (2.0 / net.pi_r_min) / m * d(0) / d(2) -
                     2.0 / m * d(1) / d(2);

  cert.ineq_lhs[3] = alpha * g.g5 / 2.0;
  cert.ineq_rhs[3] =
      0.25 - sb2d / d(3) *
                 (rc::kTrackRowConsensus * n / (net.pi_r_min * net.pi_c_min * (1.0 - sb2d)) *
                      d(0) +
                  rc::kTrackRowOpt * n / (net.pi_c_min * (1.0 - sb2d)) * d(1) +
                  rc::kTrackRowAux / (net.pi_c_min * (1.0 - sb2d)) * d(2));

  for (int k = 0; k < 4; ++k) cert.ineq_ok[k] = cert.ineq_lhs[k] <= cert.ineq_rhs[k];

  cert.gamma = 1.0 - alpha * g.g5 / 2.0;
  Eigen::Vector4d lhs = cert.G * cert.delta;
  cert.g_delta_ok = (lhs.array() <= cert.gamma * cert.delta.array() + 1e-15).all();

  SpectralResult radius = spectral_radius(cert.G, cert.g_delta_ok ? &cert.delta : nullptr);
  cert.rho = radius.rho;
  cert.rho_method = radius.method;
  cert.rho_le_gamma = cert.rho <= cert.gamma + 1e-9;

  // Small-mixing-residual diagnostic on sigma_A^{2c}.
  double cond1 = m * (1.0 - sa2c) / (rc::kSigmaCondA1 * n * big_m * tau2 * net.h_r);
  double cond2 = m * tau1 * (1.0 - sa2c) * (1.0 - sb2d) /
                 (rc::kSigmaCondA2 * n * big_m * net.h_r * net.h_c);
  cert.sigma_a_condition_ok = sa2c < std::min(cond1, cond2);

  bool all_ok = cert.g_delta_ok && cert.rho_le_gamma;
  for (bool ok : cert.ineq_ok) all_ok = all_ok && ok;
  cert.status = all_ok ? CertificateStatus::pass : CertificateStatus::fail;
  return cert;
}

Complexity gradient_complexity(const ConvergenceInputs& in, double epsilon) {
  require(epsilon > 0.0 && epsilon < 1.0, errc::invalid_argument,
          "epsilon must lie in (0, 1)");
  const auto& pr = in.problem;
  Complexity c;
  double psi = in.psi();
  double big_m = static_cast<double>(pr.m_max);
  c.order = std::max({pr.kappa * psi, pr.kappa * pr.kappa * big_m / pr.m_min, big_m});
  c.estimate = c.order * std::log(1.0 / epsilon);
  c.centralized_order = static_cast<double>(in.network.n) * big_m;
  c.speedup = c.centralized_order / c.order;
  c.linear_speedup = c.order == big_m;
  return c;
}

std::string certificate_text(const ConvergenceCertificate& cert) {
  std::string out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  auto num = [&line](const std::string& key, double v) { line(key, format_full(v)); };
  auto flag = [&line](const std::string& key, bool v) { line(key, v ? "true" : "false"); };

  switch (cert.status) {
    case CertificateStatus::pass: line("status", "pass"); break;
    case CertificateStatus::fail: line("status", "fail"); break;
    case CertificateStatus::not_applicable: line("status", "not_applicable"); break;
  }
  if (!cert.reason.empty()) line("reason", cert.reason);
  num("psi", cert.psi);
  num("gamma_order", cert.gamma_order);
  num("alpha_bar", cert.alpha_bar);
  num("c_bar", cert.c_bar);
  num("d_bar", cert.d_bar);
  line("c_rounds", std::to_string(cert.c_rounds));
  line("d_rounds", std::to_string(cert.d_rounds));
  const double gs[7] = {cert.g.g1, cert.g.g2, cert.g.g3, cert.g.g4,
                        cert.g.g5, cert.g.g6, cert.g.g7};
  for (int k = 0; k < 7; ++k) num("g" + std::to_string(k + 1), gs[k]);
  for (int i = 0; i < 4; ++i) {
    std::string row;
    for (int j = 0; j < 4; ++j) {
      if (j) row += ' ';
      row += format_full(cert.G(i, j));
    }
    line("G.row" + std::to_string(i + 1), row);
  }
  if (cert.status != CertificateStatus::not_applicable) {
    num("gamma", cert.gamma);
    for (int k = 0; k < 4; ++k) num("delta" + std::to_string(k + 1), cert.delta(k));
    num("tau1", cert.tau1);
    num("tau2", cert.tau2);
    for (int k = 0; k < 4; ++k) {
      num("ineq" + std::to_string(k + 4) + "_lhs", cert.ineq_lhs[k]);
      num("ineq" + std::to_string(k + 4) + "_rhs", cert.ineq_rhs[k]);
      flag("ineq" + std::to_string(k + 4) + "_ok", cert.ineq_ok[k]);
    }
    flag("g_delta_le_gamma_delta", cert.g_delta_ok);
    num("rho", cert.rho);
    line("rho_method", cert.rho_method);
    flag("rho_le_gamma", cert.rho_le_gamma);
    flag("sigma_a_condition_ok", cert.sigma_a_condition_ok);
  }
  num("rho_at_alpha_bar", cert.rho_at_alpha_bar);
  num("closed_form_bound", cert.closed_form_bound);
  flag("closed_form_ok", cert.closed_form_ok);
  return out;
}

}  // namespace absaga::theory
