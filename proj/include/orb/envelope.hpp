#ifndef ORB_ENVELOPE_HPP
#define ORB_ENVELOPE_HPP

#include <vector>

#include "orb/calculus.hpp"
#include "orb/grid.hpp"

namespace orb {

/// Envelope of the class of theta: the largest u <= 0 with theta + i ddbar u >= 0.
/// phi_kahler witnesses that the class is Kahler: theta + i ddbar(phi_kahler) > 0.
struct EnvelopeProblem {
  HermitianField theta;    // possibly mixed-sign coefficients
  HermitianField omega_x;  // reference Kahler metric
  GridField dV;            // volume density against which theta^n is compared
  GridField phi_kahler;
};

struct EnvelopeReport {
  std::vector<double> beta_list;
  std::vector<GridField> u_beta;
  GridField oracle_envelope;
  std::vector<double> sup_errors;
  std::vector<double> c1_upper;  // (1/beta) log sup(theta^n / dV) per beta
  std::vector<double> sup_u;     // measured sup u_beta per beta
  double fitted_C = 0;           // sup over beta of sup_error * beta / log(beta)
  double rate_ratio = 0;         // max/min of sup_error * beta / log(beta)
  bool max_principle_ok = false;
};

/// sup over the grid of det(theta)/dV; the max-principle bound needs it > 0.
double sup_density_ratio(const EnvelopeProblem& problem);

/// One penalized solve (theta + i ddbar u_b)^n = e^{beta u_b} dV, through the
/// substitution u_b = u/beta + phi_kahler which keeps the Newton iteration in
/// the positive cone. Optional warm start is a previous u_b.
GridField envelope_beta(const EnvelopeProblem& problem, double beta, double tol = 1e-10,
                        const GridField* warm = nullptr);

/// n=1 obstacle-problem oracle: projected SOR on the finite-difference
/// complementarity system u <= 0, theta_11 + (1/4) lap u >= 0.
GridField envelope_oracle_1d(const EnvelopeProblem& problem, double tol = 1e-12);

/// Runs the beta schedule against the oracle and fits the log(beta)/beta rate.
EnvelopeReport convergence_report(const EnvelopeProblem& problem,
                                  const std::vector<double>& beta_list, double tol = 1e-10);

}  // namespace orb

#endif
