#include "orb/alpha.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace orb {

double exp_integral(const GridField& phi, double alpha, const HermitianField& metric) {
  if (alpha < 0) throw std::invalid_argument("exp_integral: alpha must be >= 0");
  if (phi.sup() > 1e-10) throw std::invalid_argument("exp_integral: phi must be <= 0");
  const auto grid = phi.grid;
  GridField det = det_field(metric);
  // log-sum-exp over the quadrature weights
  double emax = 0;
  for (Index i = 0; i < phi.size(); ++i) emax = std::max(emax, -alpha * phi[i]);
  double acc = 0;
  for (Index i = 0; i < phi.size(); ++i) acc += std::exp(-alpha * phi[i] - emax) * det[i];
  const int m = grid->resolution;
  const double w = 1.0 / std::pow(double(m), 2 * grid->n) / grid->group.order;
  return std::exp(emax + std::log(acc * w));
}

bool is_admissible(const GridField& phi, const HermitianField& omega_x, double eig_tol,
                   double sup_tol) {
  if (std::abs(phi.sup()) > sup_tol) return false;
  return positivity_margin(omega_x + i_ddbar(phi)) >= -eig_tol;
}

GridField project_admissible(const GridField& candidate, const HermitianField& omega_x,
                             double eig_tol) {
  HermitianField h = i_ddbar(candidate);
  double s = 1.0;
  for (int k = 0; k < 400; ++k) {
    if (positivity_margin(omega_x + s * h) >= -eig_tol) {
      GridField out(candidate.grid);
      for (Index i = 0; i < out.size(); ++i) out[i] = s * candidate[i];
      double sup = out.sup();
      for (double& v : out.values) v -= sup;
      return out;
    }
    s *= 0.7;
  }
  throw std::runtime_error("project_admissible: candidate could not be projected");
}

GridField truncated_log(GridPtr grid, const std::vector<int>& center, double c, double M) {
  if (c <= 0 || M <= 0) throw std::invalid_argument("truncated_log: c and M must be positive");
  if (static_cast<int>(center.size()) != 2 * grid->n)
    throw std::invalid_argument("truncated_log: center has wrong dimension");
  const int m = grid->resolution;
  GridField f(grid);
  for (Index i = 0; i < f.size(); ++i) {
    auto co = grid->coords(i);
    double r2 = 0;
    for (int d = 0; d < 2 * grid->n; ++d) {
      int dc = std::abs(co[d] - center[d]) % m;
      dc = std::min(dc, m - dc);
      double x = double(dc) / m;
      r2 += x * x;
    }
    f[i] = r2 == 0 ? -M : std::max(0.5 * c * std::log(r2), -M);
  }
  f = group_average(f);
  double sup = f.sup();
  for (double& v : f.values) v -= sup;
  return f;
}

std::pair<double, double> avg_lower_bound_check(const GridField& phi, const GreenKernel& kernel) {
  HermitianField omega = constant_form(phi.grid, kernel.metric0);
  if (!is_admissible(phi, omega))
    throw std::invalid_argument("avg_lower_bound_check: phi is not an admissible member");
  double avg = integrate(phi, omega) / total_volume(omega);
  return {avg, -double(phi.grid->n) * kernel.c1};
}

double domination_constant(const HermitianField& chi, const HermitianField& omega) {
  if (positivity_margin(omega) <= 0)
    throw std::invalid_argument("domination_constant: omega must be positive definite");
  const int n = chi.grid->n;
  double c = -std::numeric_limits<double>::infinity();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> es;
  for (Index p = 0; p < chi.grid->num_points(); ++p) {
    es.compute(chi.at(p), omega.at(p), Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    c = std::max(c, es.eigenvalues()(n - 1));
  }
  return c;
}

AlphaReport estimate_alpha(const PshFamily& family, const HermitianField& metric, double C_target,
                           const std::vector<double>& alpha_grid) {
  if (family.members.empty() || alpha_grid.empty())
    throw std::invalid_argument("estimate_alpha: empty family or alpha grid");
  AlphaReport rep;
  rep.alpha_grid = alpha_grid;
  for (const GridField& phi : family.members) {
    std::vector<double> row;
    for (double a : alpha_grid) row.push_back(exp_integral(phi, a, metric));
    rep.integrals.push_back(std::move(row));
  }
  rep.alpha_star = 0;
  for (std::size_t j = 0; j < alpha_grid.size(); ++j) {
    bool ok = true;
    for (const auto& row : rep.integrals)
      if (row[j] > C_target) ok = false;
    if (ok) rep.alpha_star = std::max(rep.alpha_star, alpha_grid[j]);
  }
  return rep;
}

}  // namespace orb
