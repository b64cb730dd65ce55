#include "orb/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "orb/ma_solver.hpp"

namespace orb {

double sup_density_ratio(const EnvelopeProblem& problem) {
  GridField dt = det_field(problem.theta);
  double s = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < dt.size(); ++i) {
    if (problem.dV[i] <= 0) throw std::invalid_argument("sup_density_ratio: dV must be positive");
    s = std::max(s, dt[i] / problem.dV[i]);
  }
  return s;
}

namespace {

// Roundoff floor for the log residual in the contact region; far below the
// O(log(beta)/beta) approximation error of the scheme itself.
constexpr double kEnvelopeStallTol = 1e-6;

GridField solve_penalized(const EnvelopeProblem& problem, const HermitianField& omega_phi,
                          double beta, double tol, const GridField* warm) {
  const auto grid = problem.theta.grid;
  const int n = grid->n;
  // (theta + i ddbar u_b)^n = e^{beta u_b} dV  becomes, with u = beta(u_b - phi),
  // (beta omega_phi + i ddbar u)^n = beta^n e^{beta phi} e^u dV.
  GridField det_ref = det_field(problem.omega_x);
  MAProblem pb;
  pb.base = beta * omega_phi;
  pb.reference = problem.omega_x;
  pb.lambda = 1.0;
  pb.scale = std::pow(beta, n);
  pb.normalization = MAProblem::Norm::none;
  pb.density_log = GridField(grid);
  for (Index i = 0; i < pb.density_log.size(); ++i)
    pb.density_log[i] = beta * problem.phi_kahler[i] + std::log(problem.dV[i] / det_ref[i]);

  std::optional<GridField> init;
  if (warm) {
    GridField w0(grid);
    for (Index i = 0; i < w0.size(); ++i) w0[i] = beta * ((*warm)[i] - problem.phi_kahler[i]);
    init = std::move(w0);
  }
  MASolution sol = solve_ma(pb, tol, 200, init, kEnvelopeStallTol);

  GridField u_b(grid);
  for (Index i = 0; i < u_b.size(); ++i) u_b[i] = sol.u[i] / beta + problem.phi_kahler[i];
  return u_b;
}

}  // namespace

GridField envelope_beta(const EnvelopeProblem& problem, double beta, double tol,
                        const GridField* warm) {
  if (beta < 1) throw std::invalid_argument("envelope_beta: beta must be >= 1");
  HermitianField omega_phi = problem.theta + i_ddbar(problem.phi_kahler);
  if (positivity_margin(omega_phi) <= 0)
    throw std::invalid_argument("envelope_beta: phi_kahler is not a Kahler witness");

  if (warm) {
    try {
      return solve_penalized(problem, omega_phi, beta, tol, warm);
    } catch (const SolveError&) {
      // fall back to continuation from a gentler beta
    }
  }
  std::vector<double> schedule;
  for (double b = beta; b > 16; b /= 2) schedule.push_back(b);
  schedule.push_back(std::min(beta, 16.0));
  std::reverse(schedule.begin(), schedule.end());

  GridField u_b(problem.theta.grid);
  const GridField* prev = warm;
  for (double b : schedule) {
    u_b = solve_penalized(problem, omega_phi, b, tol, prev);
    prev = &u_b;
  }
  return u_b;
}

GridField envelope_oracle_1d(const EnvelopeProblem& problem, double tol) {
  const auto grid = problem.theta.grid;
  if (grid->n != 1) throw std::invalid_argument("envelope_oracle_1d: n = 1 only");
  const int m = grid->resolution;
  const double h2 = 1.0 / (double(m) * m);
  const double relax = 2.0 / (1.0 + std::sin(std::numbers::pi / m));

  GridField u(grid);  // starts at the obstacle u = 0
  const Index np = grid->num_points();
  for (int sweep = 0; sweep < 500000; ++sweep) {
    double change = 0;
    for (Index i = 0; i < np; ++i) {
      auto c = grid->coords(i);
      auto at = [&](int dx, int dy) {
        int cc[2] = {c[0] + dx, c[1] + dy};
        return u[grid->index(cc)];
      };
      double nb = at(1, 0) + at(-1, 0) + at(0, 1) + at(0, -1);
      // unconstrained Gauss-Seidel point for theta_11 + (1/4) lap u = 0
      double gs = (nb + 4 * h2 * problem.theta.coeffs[i].real()) / 4.0;
      double next = std::min(0.0, u[i] + relax * (gs - u[i]));
      change = std::max(change, std::abs(next - u[i]));
      u[i] = next;
    }
    if (change <= tol) return group_average(u);
  }
  throw std::runtime_error("envelope_oracle_1d: projected SOR did not converge");
}

EnvelopeReport convergence_report(const EnvelopeProblem& problem,
                                  const std::vector<double>& beta_list, double tol) {
  if (beta_list.size() < 4 || !std::is_sorted(beta_list.begin(), beta_list.end()))
    throw std::invalid_argument("convergence_report: need an increasing schedule of >= 4 betas");

  EnvelopeReport rep;
  rep.beta_list = beta_list;
  rep.oracle_envelope = envelope_oracle_1d(problem);
  const double log_sup_ratio = std::log(sup_density_ratio(problem));

  const GridField* warm = nullptr;
  double worst = 0, best = std::numeric_limits<double>::infinity();
  for (double beta : beta_list) {
    GridField ub = envelope_beta(problem, beta, tol, warm);
    double err = 0;
    for (Index i = 0; i < ub.size(); ++i)
      err = std::max(err, std::abs(ub[i] - rep.oracle_envelope[i]));
    rep.sup_errors.push_back(err);
    rep.sup_u.push_back(ub.sup());
    rep.c1_upper.push_back(log_sup_ratio / beta);
    double scaled = err * beta / std::log(beta);
    worst = std::max(worst, scaled);
    best = std::min(best, scaled);
    rep.u_beta.push_back(std::move(ub));
    warm = &rep.u_beta.back();
  }
  rep.fitted_C = worst;
  rep.rate_ratio = best > 0 ? worst / best : std::numeric_limits<double>::infinity();
  rep.max_principle_ok = true;
  for (std::size_t i = 0; i < beta_list.size(); ++i)
    if (rep.sup_u[i] > rep.c1_upper[i] + 1e-8) rep.max_principle_ok = false;
  return rep;
}

}  // namespace orb
