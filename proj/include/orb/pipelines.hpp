#ifndef ORB_PIPELINES_HPP
#define ORB_PIPELINES_HPP

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "orb/calculus.hpp"
#include "orb/config.hpp"
#include "orb/envelope.hpp"
#include "orb/estimates.hpp"
#include "orb/grid.hpp"
#include "orb/report.hpp"

namespace orb {

/// Everything a certification run needs. The geometric data is synthesized
/// from a handful of scalars: omega_X is the calibrated flat metric, chi is
/// chi_const * omega_X plus an exact i ddbar of a cosine potential of
/// amplitude chi_amp, and the density exponent F is a fixed trigonometric
/// shape of amplitude f_amp, mass-normalized by the solver.
struct RunConfig {
  int n = 1;
  int resolution = 64;
  std::string group = "trivial";
  double chi_const = 0.5;
  double chi_amp = 0.0;
  double f_amp = 0.0;
  std::vector<double> t_list{1.0};
  double p = 2.0;
  std::vector<double> beta_list{16, 64, 256};
  std::vector<double> s_list{0.0};
  std::vector<int> k_list{64};
  double a = 1.0;
  double tol = 1e-10;
  double alpha = 0.5;     // exponent for the energy chain's measured C_alpha
  double c_target = 20;   // admissible-family integral target for alpha_star
  std::vector<double> alpha_grid{0.25, 0.5, 0.75, 1.0, 1.5};
  int v_samples = 10;
  unsigned long long seed = 1;
  std::string out_dir;

  static RunConfig from_config(const Config& c);
  static std::set<std::string> known_keys();

  HermitianField make_omega_x(GridPtr grid) const;
  HermitianField make_chi(GridPtr grid, const HermitianField& omega_x) const;
  GridField make_f_spec(GridPtr grid) const;
};

/// One auxiliary Monge-Ampere solve and its non-positivity certificate.
struct AuxiliaryCertificate {
  std::string variant;  // "linfty" or "mean_value"
  double t = 0, s = 0, beta = 0;
  int k = 0;
  GridField psi;           // sup psi = 0
  double A_s = 0;          // normalizing mass of the cutoff density
  double epsilon = 0, Lambda = 0;
  GridField Phi;
  double sup_Phi = 0;
  double threshold = 0;    // pass iff sup_Phi <= threshold
  double psi_margin = 0;   // min eigenvalue of base + i ddbar psi
  double mass_defect = 0;  // |int of the equation's RHS - V_t|
  double solve_residual = 0;
  bool psi_below_u_plus_1 = true;  // linfty variant side condition
  bool pass = false;
};

struct LinftyStage {
  double t = 0, V_t = 0;
  double mass_defect = 0;  // |int e^{F_t} omega_X^n - 1|
  double c_inf = 0;        // sup(V_t_env - phi_t)
  double eps_beta = 0;     // sup|u_beta - oracle| at the largest beta
  std::vector<double> beta_list, sup_errors, sup_u, c1_upper;
  bool max_principle_ok = false;
  std::vector<AuxiliaryCertificate> certificates;
  DeGiorgiReport degiorgi;
  bool sup_below_C = false;  // c_inf <= the DeGiorgi C
  EnergyReport energy;
  bool ok = false;
  std::string error;  // nonempty when the stage aborted
};

struct LinftyRunReport {
  RunConfig config;
  std::vector<LinftyStage> stages;
  double c_inf_max = 0, c_inf_min = 0;
  double c_alpha = 0;  // measured sup_t int e^{-alpha phi_t}, with 5% margin
  bool all_ok = false;
};

struct MeanValueSample {
  int index = 0;
  bool skipped = false;  // Laplacian floor unreachable; logged, not fatal
  double sup_v = 0, l1_norm = 0, lap_min = 0;
  std::vector<AuxiliaryCertificate> certificates;
  DeGiorgiReport degiorgi;
  double level_C = 0;        // the sample's measured DeGiorgi constant
  bool sup_bound_ok = false; // sup v <= C_run (1 + ||v||_1)
  std::vector<double> alpha_integrals;  // per certificate
  bool alpha_step_ok = false;
  bool ok = false;
};

struct MeanValueStage {
  double t = 0, V_t = 0;
  double c_inf = 0, Lambda = 0;
  std::vector<MeanValueSample> samples;
  int skipped = 0;
  bool ok = false;
  std::string error;
};

struct MeanValueRunReport {
  RunConfig config;
  double V0 = 0;             // int chi^n, the L1 budget for test functions
  std::vector<MeanValueStage> stages;
  double C_run = 0;          // max measured DeGiorgi C over all samples
  double C_dom = 0;          // smallest C with chi <= C omega_X
  double alpha_star = 0, alpha0 = 0, C1 = 0, alpha_ratio = 0;  // C1 alpha0 / alpha_star
  double C3 = 0;             // uniform alpha-step budget exp(alpha0 C1 Lambda) c_target
  double delta0 = 0, holder_exponent = 0;
  bool exponent_identity_ok = false;
  bool all_ok = false;
};

/// Random band-limited test function for the mean-value theorem: group
/// averaged, amplitude shrunk until lap_{omega_t} v >= -a everywhere, mean
/// zero against omega_t^n, and L1-rescaled to at most V0. Returns nullopt
/// when 50 shrink steps cannot reach the Laplacian floor.
std::optional<GridField> sample_test_function(std::mt19937_64& rng, const HermitianField& omega_t,
                                              double a, double V0);

LinftyRunReport run_linfty_check(const RunConfig& config);
MeanValueRunReport run_mean_value_check(const RunConfig& config, int v_samples);

RunReport to_report(const LinftyRunReport& run);
RunReport to_report(const MeanValueRunReport& run);

/// Serializes and writes; requires an existing config.out_dir.
void emit_report(const LinftyRunReport& run);
void emit_report(const MeanValueRunReport& run);

}  // namespace orb

#endif
