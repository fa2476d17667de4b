#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "absaga/problems.hpp"
#include "absaga/weights.hpp"

namespace absaga::theory {

// Every fixed coefficient of the rate analysis lives here so a transcription
// slip has a single place to hide.
namespace rate_constants {
inline constexpr double kMixErrX = 40.0;        // g1 numerator
inline constexpr double kMixErrOpt = 16.0;      // g2 numerator
inline constexpr double kMixErrTrack = 8.0;     // g3 numerator
inline constexpr double kOptCoupling = 8.0;     // g4 numerator
inline constexpr double kDescentQuarter = 4.0;  // g5 denominator
inline constexpr double kAuxCoupling = 3.0;     // g6 numerator
inline constexpr double kTrackCoupling = 5.0;   // g7 numerator
inline constexpr double kDiagContraction = 0.75;
inline constexpr double kTableRowConsensus = 2.0;  // row 3, consensus column
inline constexpr double kTableRowOpt = 2.0;        // row 3, optimality column
inline constexpr double kTrackRowConsensus = 146.0;
inline constexpr double kTrackRowOpt = 97.0;
inline constexpr double kTrackRowAux = 26.0;
inline constexpr double kStepHr = 35.0;     // 1 / (35 l sqrt(h_r h_c))
inline constexpr double kStepSum = 288.0;   // m / (288 M n k l pi_dot)
inline constexpr double kStepTable = 9.0;   // 1 / (9 mu M pi_dot)
inline constexpr double kRoundsX = 90512.0;
inline constexpr double kRoundsW = 1265.0;
inline constexpr double kApplicabilityGate = 201.0;
inline constexpr double kDeltaOpt = 64.0;
inline constexpr double kDeltaAux = 130.0;
inline constexpr double kDeltaTrack = 40000.0;
inline constexpr double kSigmaCondA1 = 51200.0;
inline constexpr double kSigmaCondA2 = 640000.0;
}  // namespace rate_constants

struct NetworkInputs {
  int n = 0;
  double pi_r_min = 0, pi_r_max = 0, pi_c_min = 0, pi_c_max = 0;
  double h_r = 1, h_c = 1;
  double sigma_a = 0, sigma_b = 0;
  double pi_r_norm_sq = 0, pi_c_norm_sq = 0;
  double pi_dot = 0;  // pi_r^T pi_c
};

struct ProblemInputs {
  double ell = 1, mu = 1, kappa = 1;
  long long m_min = 1;  // m
  long long m_max = 1;  // M
};

struct RunInputs {
  double alpha = 0;
  int c = 1, d = 1;
};

struct ConvergenceInputs {
  NetworkInputs network;
  ProblemInputs problem;
  RunInputs run;

  static ConvergenceInputs from(const WeightSystem& weights, const ProblemConstants& constants,
                                long long m_min, long long m_max, double alpha, int c, int d);
  void validate() const;
  double psi() const;
  double sigma_a_2c() const;  // sigma_A^{2c}
  double sigma_b_2d() const;  // sigma_B^{2d}
};

// The seven network/problem constants of the four-term error recursion.
struct GConstants {
  double g1, g2, g3, g4, g5, g6, g7;
};
GConstants g_constants(const ConvergenceInputs& in);

// The 4x4 nonnegative matrix driving the error recursion (consensus,
// optimality, table gap, tracking). Constructible even when the small-step
// preconditions fail; recursion_preconditions reports those separately.
Eigen::Matrix4d build_G(const ConvergenceInputs& in);

struct ConditionReport {
  double alpha_bound = 0;
  double c_threshold = 0, d_threshold = 0;
  bool alpha_ok = false, c_ok = false, d_ok = false;
  bool ok() const { return alpha_ok && c_ok && d_ok; }
};
// alpha <= min{1/(35 l sqrt(h_r h_c)), mu/(288 n l^2 pi_dot)},
// c >= log(4n)/log(1/sigma_A), d >= log(4n)/log(1/sigma_B).
ConditionReport recursion_preconditions(const ConvergenceInputs& in);

struct SpectralResult {
  double rho = 0;
  std::string method;        // "power" or "companion"
  double scaled_max_bound = 0;  // max_i (G delta)_i / delta_i when delta given
  bool bound_supplied = false;
};
// rho(G) by power iteration (tolerance 1e-12) with a companion-matrix
// eigensolve fallback. With a positive delta supplied, also evaluates the
// weighted-max-norm bound and asserts rho <= bound + 1e-9.
SpectralResult spectral_radius(const Eigen::Matrix4d& g,
                               const Eigen::Vector4d* delta = nullptr);

struct StepsizeBound {
  double alpha_bar = 0;
  std::array<double, 3> terms{};
  int binding = 0;  // index of the smallest term
};
StepsizeBound max_stepsize(const ConvergenceInputs& in);

struct CommRounds {
  double c_bar = 0, d_bar = 0;  // raw threshold values (may be negative)
  int c = 1, d = 1;             // ceilings, floored at 1
};
// d first (the x-mixing threshold depends on sigma_B^{2d} at the returned d).
CommRounds min_comm_rounds(const ConvergenceInputs& in);

enum class CertificateStatus { pass, fail, not_applicable };

struct ConvergenceCertificate {
  CertificateStatus status = CertificateStatus::not_applicable;
  std::string reason;  // set when not applicable

  GConstants g{};
  Eigen::Matrix4d G = Eigen::Matrix4d::Zero();
  double gamma = 0;  // 1 - alpha g5 / 2
  Eigen::Vector4d delta = Eigen::Vector4d::Zero();
  double tau1 = 0, tau2 = 0;

  // Row-wise inequalities equivalent to G delta <= gamma delta.
  std::array<double, 4> ineq_lhs{}, ineq_rhs{};
  std::array<bool, 4> ineq_ok{};
  bool g_delta_ok = false;

  double rho = 0;
  std::string rho_method;
  bool rho_le_gamma = false;

  double alpha_bar = 0;
  double c_bar = 0, d_bar = 0;
  int c_rounds = 1, d_rounds = 1;
  double psi = 0;
  double gamma_order = 0;  // max{kappa psi, kappa^2 M / m, M}

  // Contraction of G at alpha = alpha_bar against the closed-form decrement
  // 1 - min{1/(35 k psi), m/(288 k^2 M), 1/(9M)}.
  double rho_at_alpha_bar = 0;
  double closed_form_bound = 0;
  bool closed_form_ok = false;

  bool sigma_a_condition_ok = false;  // diagnostic small-mixing-residual check
};

// Builds the weighted-vector certificate: the applicability gate on
// sigma_B^d, the tau pair, the delta vector, the four row inequalities,
// G delta <= gamma delta, and rho(G) <= gamma. Also evaluates the closed-form
// contraction claim at alpha_bar.
ConvergenceCertificate delta_certificate(const ConvergenceInputs& in);

struct Complexity {
  double order = 0;             // max{kappa psi, kappa^2 M / m, M}
  double estimate = 0;          // order * log(1/eps)
  double centralized_order = 0; // n * M
  double speedup = 0;           // centralized_order / order
  bool linear_speedup = false;  // order == M regime
};
Complexity gradient_complexity(const ConvergenceInputs& in, double epsilon);

// Labeled key=value rendering of a certificate, shared by the CLI and the
// experiment runner.
std::string certificate_text(const ConvergenceCertificate& cert);

}  // namespace absaga::theory
