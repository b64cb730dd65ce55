#ifndef ORB_ESTIMATES_HPP
#define ORB_ESTIMATES_HPP

#include <optional>
#include <vector>

#include "orb/calculus.hpp"
#include "orb/grid.hpp"

namespace orb {

struct DeGiorgiParams {
  double p = 0;
  double n = 0;
  double delta0 = 0;   // (p - n)/(n p)
  double C_prime = 0;  // functional-inequality constant
  double s0 = 0;       // (2 C')^{1/delta0}, optionally scaled by E_t
  double C = 0;        // s0 + 1/(1 - 2^{-delta0})
};

/// Weighted measure of the super-level sets {v > s}.
struct LevelVolume {
  GridField v;
  GridField density;           // per-point masses, total 1
  std::vector<double> s_grid;  // sample levels, increasing
  std::vector<double> phi;     // phi(s_grid[i])

  /// Exact recount of the mass of {v > s} at an arbitrary level.
  double eval(double s) const;
};

struct DeGiorgiReport {
  double C_prime_emp = 0;  // sup of r phi(s+r) / phi(s)^{1+delta0} over grid pairs
  DeGiorgiParams params;   // recomputed with C' = C_prime_emp
  bool vanishing_ok = false;
  bool chain_ok = false;
  std::vector<double> chain_levels;    // s0 + partial geometric sums
  std::vector<double> chain_bounds;    // claimed bound per m
  std::vector<double> chain_measured;  // phi at the chain level
};

struct EnergyReport {
  bool ordering_ok = false;  // phi_t <= V_t_env <= 0 within tolerance
  double E_t = 0;            // int (V_t_env - phi_t) e^F
  double jensen_lhs = 0;     // int (-F - alpha phi_t) e^F
  double jensen_mid = 0;     // log int e^{-alpha phi_t}
  double jensen_rhs = 0;     // log C_alpha
  double int_neg_phi = 0;    // int -phi_t e^F
  double int_abs_F = 0;      // int |F| e^F
  double entropy_p = 0;      // int |F|^p e^F
  double bound = 0;          // (int_abs_F + log C_alpha) / alpha
  bool all_ok = false;
};

/// int |F|^p e^F det(metric); requires the calibration int e^F det(metric) = 1.
double entropy(const GridField& F, double p, const HermitianField& metric);

/// Exact weighted counting on the given levels; an empty s_grid defaults to
/// 512 uniform samples on [0, max v] plus the exact max.
LevelVolume level_volume(const GridField& v, const GridField& density,
                         std::vector<double> s_grid = {});

/// Unique positive root of x^{n+1} = ((n+1)/n^2)^n (a + n x)^n A by bisection.
double epsilon_root(int n, double a, double A);

/// 2 max_i coef_i^{1/(n+1-i)} for the expanded polynomial; dominates the root.
double epsilon_root_upper_bound(int n, double a, double A);

/// f^p e^F <= e^F (1+|F|)^p + C(p) e^{2f} with C(p) = (p/e)^p; must hold.
bool fact_inequality_check(double f, double F, double p);

DeGiorgiParams degiorgi_constants(double p, double n, double C_prime,
                                  std::optional<double> E_t = std::nullopt);

/// Didactic variant taking delta0 directly (integer n and real p cannot
/// produce every delta0); production code derives delta0 from (p, n).
DeGiorgiParams degiorgi_constants_delta(double delta0, double C_prime,
                                        std::optional<double> E_t = std::nullopt);

/// Measures C' empirically, recomputes the constants, and checks vanishing
/// beyond C plus the inductive level chain. Violations are reported findings.
DeGiorgiReport degiorgi_verify(const LevelVolume& lv, const DeGiorgiParams& params);

/// The E_t <= (int |F| e^F + log C_alpha)/alpha chain through Jensen and
/// Hoelder, with every link measured.
EnergyReport energy_bound_check(const GridField& F, const GridField& phi_t,
                                const GridField& V_t_env, double p, double alpha, double C_alpha,
                                const HermitianField& metric);

}  // namespace orb

#endif
