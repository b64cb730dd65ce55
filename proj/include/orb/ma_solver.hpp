#ifndef ORB_MA_SOLVER_HPP
#define ORB_MA_SOLVER_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orb/calculus.hpp"
#include "orb/grid.hpp"

namespace orb {

/// (base + i ddbar u)^n = scale * e^{lambda u + F} * reference^n
struct MAProblem {
  HermitianField base;
  HermitianField reference;
  GridField density_log;  // F
  double lambda = 0.0;
  enum class Norm { sup_zero, mean_zero, none } normalization = Norm::sup_zero;
  double scale = 1.0;  // c
};

struct MASolution {
  GridField u;
  double residual_sup = 0;
  double positivity_margin = 0;
  int iterations = 0;
  std::vector<double> residual_history;
  double V_t = 0;     // filled by solve_calibrated_family
  GridField F_t;      // filled by solve_calibrated_family
};

/// Non-convergence or loss of positivity, carrying the residual history.
class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, std::vector<double> history)
      : std::runtime_error(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

/// sup |log(achieved density) - log(target density)|; +inf when the achieved
/// density is non-positive somewhere.
double residual(const MAProblem& problem, const GridField& u);

/// Damped Newton with a spectrally preconditioned Krylov inner solve and a
/// positivity-preserving line search; continuity ramp on F as fallback.
/// stagnation_tol: residual level below which a stalled line search counts as
/// converged (the log residual hits a roundoff floor when det(base + i ddbar u)
/// nearly degenerates, as in deep envelope contact). The achieved residual is
/// always reported in the solution.
MASolution solve_ma(const MAProblem& problem, double tol = 1e-10, int max_iter = 100,
                    const std::optional<GridField>& warm_start = std::nullopt,
                    double stagnation_tol = 0.0);

/// Solve (chi + t omega_x + i ddbar phi_t)^n = V_t e^{F_t} omega_x^n for each
/// t (descending, warm-started), with sup phi_t = 0, F_t the mass-normalized
/// version of F_spec and V_t = int (chi + t omega_x)^n from Stokes invariance.
std::vector<MASolution> solve_calibrated_family(
    const HermitianField& chi, const HermitianField& omega_x, const GridField& F_spec,
    const std::vector<double>& t_list, double tol = 1e-10,
    const std::optional<GridField>& init = std::nullopt);

}  // namespace orb

#endif
