#ifndef ORB_ALPHA_HPP
#define ORB_ALPHA_HPP

#include <string>
#include <utility>
#include <vector>

#include "orb/calculus.hpp"
#include "orb/grid.hpp"

namespace orb {

/// Candidates phi with sup phi = 0 and omega_X + i ddbar phi >= -tol.
struct PshFamily {
  std::vector<GridField> members;
  std::string provenance;
};

struct AlphaReport {
  std::vector<double> alpha_grid;
  std::vector<std::vector<double>> integrals;  // member-major, one row per member
  double alpha_star = 0;                       // largest grid alpha passing C_target
  double c1 = 0;                               // Green kernel row integral (context)
  double c2 = 0;                               // domination constant (context)
};

/// int e^{-alpha phi} det(metric), computed in log-sum-exp form.
/// Requires phi <= 0 (tolerance 1e-10) and alpha >= 0.
double exp_integral(const GridField& phi, double alpha, const HermitianField& metric);

bool is_admissible(const GridField& phi, const HermitianField& omega_x, double eig_tol = 1e-8,
                   double sup_tol = 1e-10);

/// Scale a candidate toward zero until omega_X + i ddbar phi >= -eig_tol,
/// then shift so sup = 0 exactly.
GridField project_admissible(const GridField& candidate, const HermitianField& omega_x,
                             double eig_tol = 1e-8);

/// Group-averaged max(c log r_flat(z - center), -M), sup-shifted to 0;
/// r_flat is the flat torus distance. center given in grid coordinates.
GridField truncated_log(GridPtr grid, const std::vector<int>& center, double c, double M);

/// Returns (mean of phi over the kernel's metric, -n * c1) and rejects
/// inadmissible phi. The bound mean >= sup phi - n*c1 is a theorem; a
/// violation on an admissible member signals a discretization bug.
std::pair<double, double> avg_lower_bound_check(const GridField& phi, const GreenKernel& kernel);

/// Smallest C with chi <= C omega pointwise (largest generalized eigenvalue).
double domination_constant(const HermitianField& chi, const HermitianField& omega);

/// Family-relative surrogate for the alpha invariant: largest grid alpha with
/// all member integrals <= C_target.
AlphaReport estimate_alpha(const PshFamily& family, const HermitianField& metric, double C_target,
                           const std::vector<double>& alpha_grid);

}  // namespace orb

#endif
