#include "orb/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orb/alpha.hpp"
#include "orb/ma_solver.hpp"
#include "orb/smoothing.hpp"

namespace orb {

namespace {

constexpr double tau2pi = 2 * std::numbers::pi;

std::vector<double> as_real(const std::vector<long long>& v) {
  return std::vector<double>(v.begin(), v.end());
}

double quad_weight(GridPtr grid) {
  return 1.0 / std::pow(double(grid->resolution), 2 * grid->n) / grid->group.order;
}

/// Per-point masses of e^{F} omega_X^n; totals int e^F omega_X^n.
GridField mass_density(const GridField& F, const HermitianField& omega_x) {
  GridField det = det_field(omega_x);
  const double w = quad_weight(F.grid);
  GridField d(F.grid);
  for (Index i = 0; i < d.size(); ++i) d[i] = std::exp(F[i]) * det[i] * w;
  return d;
}

double sup_abs_diff(const GridField& a, const GridField& b) {
  double s = 0;
  for (Index i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

}  // namespace

std::set<std::string> RunConfig::known_keys() {
  return {"n",     "resolution", "group",  "chi_const",  "chi_amp",    "f_amp",
          "t_list", "p",         "beta_list", "s_list",  "k_list",     "a",
          "tol",   "alpha",      "c_target", "alpha_grid", "v_samples", "seed",
          "out"};
}

RunConfig RunConfig::from_config(const Config& c) {
  RunConfig r;
  r.n = static_cast<int>(c.get_int("n", r.n));
  r.resolution = static_cast<int>(c.get_int("resolution", r.resolution));
  r.group = c.get_string("group", r.group);
  r.chi_const = c.get_real("chi_const", r.chi_const);
  r.chi_amp = c.get_real("chi_amp", r.chi_amp);
  r.f_amp = c.get_real("f_amp", r.f_amp);
  r.t_list = c.get_real_list("t_list", r.t_list);
  r.p = c.get_real("p", r.p);
  r.beta_list = c.get_real_list("beta_list", r.beta_list);
  r.s_list = c.get_real_list("s_list", r.s_list);
  std::vector<long long> kfall(r.k_list.begin(), r.k_list.end());
  r.k_list.clear();
  for (long long k : c.get_int_list("k_list", kfall)) r.k_list.push_back(static_cast<int>(k));
  r.a = c.get_real("a", r.a);
  r.tol = c.get_real("tol", r.tol);
  r.alpha = c.get_real("alpha", r.alpha);
  r.c_target = c.get_real("c_target", r.c_target);
  r.alpha_grid = c.get_real_list("alpha_grid", r.alpha_grid);
  r.v_samples = static_cast<int>(c.get_int("v_samples", r.v_samples));
  r.seed = static_cast<unsigned long long>(c.get_int("seed", static_cast<long long>(r.seed)));
  r.out_dir = c.get_string("out", r.out_dir);
  if (r.t_list.empty() || r.beta_list.empty() || r.s_list.empty() || r.k_list.empty())
    throw std::invalid_argument("run config: all schedules must be nonempty");
  return r;
}

HermitianField RunConfig::make_omega_x(GridPtr grid) const {
  return calibrated_flat_metric(grid);
}

HermitianField RunConfig::make_chi(GridPtr grid, const HermitianField& omega_x) const {
  // chi = chi_const omega_X + i ddbar(pot); the cosine potential adds the
  // exact coefficient chi_amp cos(2 pi x_0), so chi_amp > chi_const makes the
  // representative mixed-sign while the class stays big.
  GridField pot(grid);
  const double scale = -chi_amp / (std::numbers::pi * std::numbers::pi);
  for (Index i = 0; i < pot.size(); ++i) pot[i] = scale * std::cos(tau2pi * grid->point(i)[0]);
  return chi_const * omega_x + i_ddbar(group_average(pot));
}

GridField RunConfig::make_f_spec(GridPtr grid) const {
  GridField f(grid);
  for (Index i = 0; i < f.size(); ++i) {
    auto x = grid->point(i);
    f[i] = f_amp * (std::cos(tau2pi * x[0]) + 0.4 * std::sin(tau2pi * x[1]));
  }
  return group_average(f);
}

std::optional<GridField> sample_test_function(std::mt19937_64& rng, const HermitianField& omega_t,
                                              double a, double V0) {
  const GridPtr grid = omega_t.grid;
  if (grid->n != 1) throw std::invalid_argument("sample_test_function: n = 1 only");
  std::uniform_real_distribution<double> u(-1, 1);
  GridField v(grid);
  for (int kx = -3; kx <= 3; ++kx)
    for (int ky = -3; ky <= 3; ++ky) {
      if (kx == 0 && ky == 0) continue;
      double ca = 0.5 * u(rng), cb = 0.5 * u(rng);
      for (Index i = 0; i < v.size(); ++i) {
        auto x = grid->point(i);
        double ph = tau2pi * (kx * x[0] + ky * x[1]);
        v[i] += ca * std::cos(ph) + cb * std::sin(ph);
      }
    }
  v = group_average(v);

  bool floored = false;
  for (int shrink = 0; shrink < 50; ++shrink) {
    if (laplacian(omega_t, v).inf() >= -a) {
      floored = true;
      break;
    }
    for (double& x : v.values) x *= 0.7;
  }
  if (!floored) return std::nullopt;

  double mean = integrate(v, omega_t) / total_volume(omega_t);
  v = shifted(v, -mean);

  GridField av(grid);
  for (Index i = 0; i < v.size(); ++i) av[i] = std::abs(v[i]);
  double l1 = integrate(av, omega_t);
  if (l1 > V0)
    for (double& x : v.values) x *= V0 / l1;
  return v;
}

namespace {

struct AuxSetup {
  const HermitianField* base;     // omega_hat_t
  const HermitianField* omega_x;
  const GridField* F_t;
  double V_t;
};

/// Solves (omega_hat_t + i ddbar psi)^n = V_t (cutoff/A) e^{F_t} omega_X^n
/// with sup psi = 0 and fills the certificate's solve-side fields.
AuxiliaryCertificate aux_solve(const AuxSetup& setup, const GridField& cutoff, double tol,
                               const GridField& warm) {
  const GridPtr grid = cutoff.grid;
  AuxiliaryCertificate cert;
  GridField weighted(grid);
  for (Index i = 0; i < weighted.size(); ++i) weighted[i] = cutoff[i] * std::exp((*setup.F_t)[i]);
  cert.A_s = integrate(weighted, *setup.omega_x);

  MAProblem pb;
  pb.base = *setup.base;
  pb.reference = *setup.omega_x;
  pb.lambda = 0.0;
  pb.normalization = MAProblem::Norm::sup_zero;
  pb.scale = setup.V_t;
  pb.density_log = GridField(grid);
  for (Index i = 0; i < grid->num_points(); ++i)
    pb.density_log[i] = std::log(cutoff[i]) + (*setup.F_t)[i] - std::log(cert.A_s);

  // The cutoff density is not band-limited, so the spectral log residual has
  // a truncation floor on coarse grids; a stall below 1e-6 is accepted and
  // the achieved residual enters the certificate's pass condition.
  MASolution sol = solve_ma(pb, tol, 100, warm, std::max(tol, 1e-6));
  cert.psi = std::move(sol.u);
  cert.solve_residual = sol.residual_sup;
  cert.psi_margin = positivity_margin(*setup.base + i_ddbar(cert.psi));

  GridField rhs(grid);
  for (Index i = 0; i < rhs.size(); ++i) rhs[i] = setup.V_t * std::exp(pb.density_log[i]);
  cert.mass_defect = std::abs(integrate(rhs, *setup.omega_x) - setup.V_t);
  return cert;
}

}  // namespace

LinftyRunReport run_linfty_check(const RunConfig& config) {
  if (config.n != 1)
    throw std::invalid_argument("run_linfty_check: the envelope oracle needs n = 1");
  LinftyRunReport run;
  run.config = config;
  const int n = config.n;
  GridPtr grid = build_grid(config.n, config.resolution, config.group);
  HermitianField omega_x = config.make_omega_x(grid);
  HermitianField chi = config.make_chi(grid, omega_x);
  GridField f_spec = config.make_f_spec(grid);

  std::vector<double> ts = config.t_list;
  std::sort(ts.begin(), ts.end(), std::greater<double>());
  auto sols = solve_calibrated_family(chi, omega_x, f_spec, ts, config.tol);

  // uniform-in-t exponential moment of phi_t, the energy chain's C_alpha
  for (const auto& sol : sols)
    run.c_alpha = std::max(run.c_alpha, exp_integral(sol.u, config.alpha, omega_x));
  run.c_alpha *= 1.05;

  run.c_inf_min = std::numeric_limits<double>::infinity();
  for (std::size_t si = 0; si < ts.size(); ++si) {
    LinftyStage stage;
    stage.t = ts[si];
    const MASolution& sol = sols[si];
    stage.V_t = sol.V_t;
    try {
      GridField expf(grid);
      for (Index i = 0; i < expf.size(); ++i) expf[i] = std::exp(sol.F_t[i]);
      stage.mass_defect = std::abs(integrate(expf, omega_x) - 1.0);

      EnvelopeProblem ep;
      ep.theta = chi + stage.t * omega_x;
      ep.omega_x = omega_x;
      ep.dV = det_field(omega_x);
      ep.phi_kahler = sol.u;
      GridField oracle = envelope_oracle_1d(ep);
      const double log_ratio = std::log(sup_density_ratio(ep));

      GridField u_beta;
      const GridField* warm = nullptr;
      stage.max_principle_ok = true;
      for (double beta : config.beta_list) {
        u_beta = envelope_beta(ep, beta, config.tol, warm);
        warm = &u_beta;
        stage.beta_list.push_back(beta);
        stage.sup_errors.push_back(sup_abs_diff(u_beta, oracle));
        stage.sup_u.push_back(u_beta.sup());
        stage.c1_upper.push_back(log_ratio / beta);
        if (stage.sup_u.back() > stage.c1_upper.back() + 1e-8) stage.max_principle_ok = false;
      }
      stage.eps_beta = stage.sup_errors.back();

      // The discrete envelope estimate: the oracle and phi_t discretize
      // differently, so take the pointwise max, which is a valid lower
      // envelope bound and restores phi_t <= V_t_env exactly.
      GridField v_env(grid);
      for (Index i = 0; i < v_env.size(); ++i) v_env[i] = std::max(oracle[i], sol.u[i]);
      stage.c_inf = 0;
      for (Index i = 0; i < v_env.size(); ++i)
        stage.c_inf = std::max(stage.c_inf, v_env[i] - sol.u[i]);

      AuxSetup setup{&ep.theta, &omega_x, &sol.F_t, sol.V_t};
      for (double s : config.s_list)
        for (int k : config.k_list) {
          GridField arg(grid);
          for (Index i = 0; i < arg.size(); ++i) arg[i] = -sol.u[i] + u_beta[i] - s;
          AuxiliaryCertificate cert = aux_solve(setup, tau_cutoff(arg, k), config.tol, sol.u);
          cert.variant = "linfty";
          cert.t = stage.t;
          cert.s = s;
          cert.k = k;
          cert.beta = config.beta_list.back();
          cert.epsilon = std::pow(cert.A_s, 1.0 / (n + 1)) *
                         std::pow((n + 1.0) / n, n / (n + 1.0));
          cert.Lambda = n / (n + 1.0) * cert.A_s;
          cert.Phi = GridField(grid);
          cert.psi_below_u_plus_1 = true;
          for (Index i = 0; i < grid->num_points(); ++i) {
            if (cert.psi[i] > u_beta[i] + 1) cert.psi_below_u_plus_1 = false;
            double inner = -cert.psi[i] + u_beta[i] + 1 + cert.Lambda;
            cert.Phi[i] = -cert.epsilon * std::pow(inner, n / (n + 1.0)) -
                          (sol.u[i] - u_beta[i] + s);
          }
          cert.sup_Phi = cert.Phi.sup();
          cert.threshold = stage.eps_beta + 1e-6;
          cert.pass = cert.sup_Phi <= cert.threshold && cert.psi_margin > -1e-8 &&
                      cert.psi.sup() == 0.0 && cert.psi_below_u_plus_1 &&
                      cert.mass_defect <= 1e-8 &&
                      cert.solve_residual <= std::max(config.tol, 1e-6);
          stage.certificates.push_back(std::move(cert));
        }

      GridField diff = v_env - sol.u;
      LevelVolume lv = level_volume(diff, mass_density(sol.F_t, omega_x));
      stage.degiorgi = degiorgi_verify(lv, degiorgi_constants(config.p, n, 1.0));
      stage.sup_below_C = stage.c_inf <= stage.degiorgi.params.C + 1e-12;

      stage.energy = energy_bound_check(sol.F_t, sol.u, v_env, config.p, config.alpha,
                                        run.c_alpha, omega_x);

      stage.ok = stage.mass_defect <= 1e-10 && stage.max_principle_ok &&
                 stage.degiorgi.vanishing_ok && stage.degiorgi.chain_ok && stage.sup_below_C &&
                 stage.energy.all_ok;
      for (const auto& c : stage.certificates) stage.ok = stage.ok && c.pass;
    } catch (const std::exception& e) {
      stage.ok = false;
      stage.error = e.what();
    }
    if (stage.error.empty()) {
      run.c_inf_max = std::max(run.c_inf_max, stage.c_inf);
      run.c_inf_min = std::min(run.c_inf_min, stage.c_inf);
    }
    run.stages.push_back(std::move(stage));
  }

  run.all_ok = !run.stages.empty();
  for (const auto& st : run.stages) run.all_ok = run.all_ok && st.ok;
  return run;
}

MeanValueRunReport run_mean_value_check(const RunConfig& config, int v_samples) {
  if (config.n != 1)
    throw std::invalid_argument("run_mean_value_check: the envelope oracle needs n = 1");
  if (v_samples < 1) throw std::invalid_argument("run_mean_value_check: need v_samples >= 1");
  MeanValueRunReport run;
  run.config = config;
  run.config.v_samples = v_samples;
  const int n = config.n;
  GridPtr grid = build_grid(config.n, config.resolution, config.group);
  HermitianField omega_x = config.make_omega_x(grid);
  HermitianField chi = config.make_chi(grid, omega_x);
  GridField f_spec = config.make_f_spec(grid);
  GridField one(grid, 1.0);
  run.V0 = integrate(one, chi);

  std::vector<double> ts = config.t_list;
  std::sort(ts.begin(), ts.end(), std::greater<double>());
  auto sols = solve_calibrated_family(chi, omega_x, f_spec, ts, config.tol);

  std::mt19937_64 rng(config.seed);
  PshFamily psi_family;
  psi_family.provenance = "auxiliary solutions of this run";
  struct CertRef {
    std::size_t stage, sample, cert;  // indices into run.stages
    double s, A, eps;
  };
  std::vector<CertRef> cert_refs;
  std::vector<std::vector<GridField>> stage_vs;
  double lambda_max = 0;

  for (std::size_t si = 0; si < ts.size(); ++si) {
    MeanValueStage stage;
    stage.t = ts[si];
    const MASolution& sol = sols[si];
    stage.V_t = sol.V_t;
    stage_vs.emplace_back();
    try {
      HermitianField theta = chi + stage.t * omega_x;
      HermitianField omega_t = theta + i_ddbar(sol.u);

      EnvelopeProblem ep;
      ep.theta = theta;
      ep.omega_x = omega_x;
      ep.dV = det_field(omega_x);
      ep.phi_kahler = sol.u;
      GridField oracle = envelope_oracle_1d(ep);
      stage.c_inf = 0;
      for (Index i = 0; i < oracle.size(); ++i)
        stage.c_inf = std::max(stage.c_inf, std::max(oracle[i], sol.u[i]) - sol.u[i]);
      stage.Lambda = stage.c_inf + 1;
      lambda_max = std::max(lambda_max, stage.Lambda);

      AuxSetup setup{&theta, &omega_x, &sol.F_t, sol.V_t};
      GridField fmass = mass_density(sol.F_t, omega_x);
      for (int j = 0; j < v_samples; ++j) {
        MeanValueSample sample;
        sample.index = j;
        auto vopt = sample_test_function(rng, omega_t, config.a, run.V0);
        if (!vopt) {
          sample.skipped = true;
          ++stage.skipped;
          stage.samples.push_back(std::move(sample));
          stage_vs.back().emplace_back(grid);
          continue;
        }
        GridField v = std::move(*vopt);
        sample.sup_v = v.sup();
        GridField av(grid);
        for (Index i = 0; i < v.size(); ++i) av[i] = std::abs(v[i]);
        sample.l1_norm = integrate(av, omega_t);
        sample.lap_min = laplacian(omega_t, v).inf();

        sample.ok = true;
        for (double s : config.s_list) {
          if (v.sup() <= s) continue;  // empty super-level set: nothing to certify
          for (int k : config.k_list) {
            AuxiliaryCertificate cert =
                aux_solve(setup, smooth_max_cutoff(v, s, k), config.tol, sol.u);
            cert.variant = "mean_value";
            cert.t = stage.t;
            cert.s = s;
            cert.k = k;
            cert.epsilon = epsilon_root(n, config.a, cert.A_s);
            cert.Lambda = stage.Lambda;
            cert.Phi = GridField(grid);
            for (Index i = 0; i < grid->num_points(); ++i) {
              double inner = -cert.psi[i] + sol.u[i] + cert.Lambda;
              cert.Phi[i] =
                  -cert.epsilon * std::pow(inner, n / (n + 1.0)) + v[i] - s;
            }
            cert.sup_Phi = cert.Phi.sup();
            cert.threshold = 1e-6;
            cert.pass = cert.sup_Phi <= cert.threshold && cert.psi_margin > -1e-8 &&
                        cert.psi.sup() == 0.0 && cert.mass_defect <= 1e-8 &&
                        cert.solve_residual <= std::max(config.tol, 1e-6);
            sample.ok = sample.ok && cert.pass;
            psi_family.members.push_back(cert.psi);
            cert_refs.push_back({si, std::size_t(j), sample.certificates.size(), s, cert.A_s,
                                 cert.epsilon});
            sample.certificates.push_back(std::move(cert));
          }
        }

        sample.degiorgi = degiorgi_verify(level_volume(v, fmass),
                                          degiorgi_constants(config.p, n, 1.0));
        sample.level_C = sample.degiorgi.params.C;
        sample.ok = sample.ok && sample.degiorgi.vanishing_ok && sample.degiorgi.chain_ok;
        stage_vs.back().push_back(std::move(v));
        stage.samples.push_back(std::move(sample));
      }
      stage.ok = stage.skipped < v_samples;
      for (const auto& smp : stage.samples)
        if (!smp.skipped) stage.ok = stage.ok && smp.ok;
    } catch (const std::exception& e) {
      stage.ok = false;
      stage.error = e.what();
    }
    run.stages.push_back(std::move(stage));
  }

  // run-level measured constants
  for (const auto& st : run.stages)
    for (const auto& smp : st.samples)
      if (!smp.skipped) run.C_run = std::max(run.C_run, smp.level_C);
  for (auto& st : run.stages)
    for (auto& smp : st.samples)
      if (!smp.skipped) {
        smp.sup_bound_ok = smp.sup_v <= run.C_run * (1 + smp.l1_norm) + 1e-12;
        smp.ok = smp.ok && smp.sup_bound_ok;
      }

  run.C_dom = domination_constant(chi, omega_x);
  if (!psi_family.members.empty()) {
    AlphaReport ar = estimate_alpha(psi_family, omega_x, config.c_target, config.alpha_grid);
    run.alpha_star = ar.alpha_star;
  }
  for (const CertRef& cr : cert_refs)
    run.C1 = std::max(run.C1, std::pow(cr.eps, (n + 1.0) / n) / std::pow(cr.A, 1.0 / n));
  if (run.C1 > 0 && run.alpha_star > 0) {
    run.alpha0 = 0.9 * run.alpha_star / run.C1;
    run.alpha_ratio = run.C1 * run.alpha0 / run.alpha_star;
    run.C3 = std::exp(run.alpha0 * run.C1 * lambda_max) * config.c_target;
    GridField det = det_field(omega_x);
    const double w = quad_weight(grid);
    for (const CertRef& cr : cert_refs) {
      if (cr.sample >= stage_vs[cr.stage].size()) continue;  // stage aborted mid-sample
      const GridField& v = stage_vs[cr.stage][cr.sample];
      double integral = 0;
      for (Index i = 0; i < v.size(); ++i) {
        double ex = v[i] - cr.s;
        if (ex <= 0) continue;
        integral +=
            std::exp(run.alpha0 * std::pow(ex, (n + 1.0) / n) / std::pow(cr.A, 1.0 / n)) *
            det[i] * w;
      }
      auto& smp = run.stages[cr.stage].samples[cr.sample];
      smp.alpha_integrals.push_back(integral);
      smp.alpha_step_ok = integral <= run.C3;
      smp.ok = smp.ok && smp.alpha_step_ok;
    }
  }

  // exponent bookkeeping of the Hoelder closure
  const double p = config.p;
  run.delta0 = (p - n) / (n * p);
  const double p_dual = p * (n + 1.0) / (p * (n + 1.0) - n);
  run.holder_exponent = (n + 1.0) / (n * p_dual);
  run.exponent_identity_ok =
      std::abs(run.holder_exponent - (1.0 + run.delta0)) <= 1e-14 &&
      std::abs((p * n + p - n) / (n * p) - (1.0 + run.delta0)) <= 1e-14;

  run.all_ok = !run.stages.empty() && run.exponent_identity_ok && run.alpha_ratio < 1.0;
  for (const auto& st : run.stages) run.all_ok = run.all_ok && st.ok;
  return run;
}

namespace {

nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["resolution"] = c.resolution;
  j["group"] = c.group;
  j["chi_const"] = c.chi_const;
  j["chi_amp"] = c.chi_amp;
  j["f_amp"] = c.f_amp;
  j["t_list"] = c.t_list;
  j["p"] = c.p;
  j["beta_list"] = c.beta_list;
  j["s_list"] = c.s_list;
  j["k_list"] = c.k_list;
  j["a"] = c.a;
  j["tol"] = c.tol;
  j["alpha"] = c.alpha;
  j["c_target"] = c.c_target;
  j["alpha_grid"] = c.alpha_grid;
  j["v_samples"] = c.v_samples;
  j["seed"] = c.seed;
  return j;
}

nlohmann::ordered_json cert_json(const AuxiliaryCertificate& c) {
  nlohmann::ordered_json j;
  j["variant"] = c.variant;
  j["t"] = c.t;
  j["s"] = c.s;
  j["k"] = c.k;
  if (c.variant == "linfty") j["beta"] = c.beta;
  j["A_s"] = c.A_s;
  j["epsilon"] = c.epsilon;
  j["Lambda"] = c.Lambda;
  j["sup_Phi"] = c.sup_Phi;
  j["threshold"] = c.threshold;
  j["psi_margin"] = c.psi_margin;
  j["mass_defect"] = c.mass_defect;
  j["solve_residual"] = c.solve_residual;
  if (c.variant == "linfty") j["psi_below_u_plus_1"] = c.psi_below_u_plus_1;
  j["pass"] = c.pass;
  return j;
}

nlohmann::ordered_json degiorgi_json(const DeGiorgiReport& d) {
  nlohmann::ordered_json j;
  j["C_prime_emp"] = d.C_prime_emp;
  j["s0"] = d.params.s0;
  j["C"] = d.params.C;
  j["vanishing_ok"] = d.vanishing_ok;
  j["chain_ok"] = d.chain_ok;
  return j;
}

std::string chain_csv(const DeGiorgiReport& d) {
  std::vector<double> ms(d.chain_levels.size());
  for (std::size_t i = 0; i < ms.size(); ++i) ms[i] = double(i);
  return csv_table({"m", "level", "bound", "measured"},
                   {ms, d.chain_levels, d.chain_bounds, d.chain_measured});
}

}  // namespace

RunReport to_report(const LinftyRunReport& run) {
  RunReport rep;
  rep.record["pipeline"] = "linfty";
  rep.record["config"] = config_json(run.config);
  rep.record["c_alpha"] = run.c_alpha;
  rep.record["c_inf_max"] = run.c_inf_max;
  rep.record["c_inf_min"] = run.c_inf_min;
  auto stages = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.stages.size(); ++i) {
    const LinftyStage& st = run.stages[i];
    nlohmann::ordered_json j;
    j["t"] = st.t;
    j["V_t"] = st.V_t;
    j["mass_defect"] = st.mass_defect;
    j["c_inf"] = st.c_inf;
    j["eps_beta"] = st.eps_beta;
    j["max_principle_ok"] = st.max_principle_ok;
    auto certs = nlohmann::ordered_json::array();
    for (const auto& c : st.certificates) certs.push_back(cert_json(c));
    j["certificates"] = certs;
    j["degiorgi"] = degiorgi_json(st.degiorgi);
    j["sup_below_C"] = st.sup_below_C;
    nlohmann::ordered_json e;
    e["ordering_ok"] = st.energy.ordering_ok;
    e["E_t"] = st.energy.E_t;
    e["jensen_lhs"] = st.energy.jensen_lhs;
    e["jensen_mid"] = st.energy.jensen_mid;
    e["jensen_rhs"] = st.energy.jensen_rhs;
    e["int_neg_phi"] = st.energy.int_neg_phi;
    e["int_abs_F"] = st.energy.int_abs_F;
    e["entropy_p"] = st.energy.entropy_p;
    e["bound"] = st.energy.bound;
    e["all_ok"] = st.energy.all_ok;
    j["energy"] = e;
    j["ok"] = st.ok;
    if (!st.error.empty()) j["error"] = st.error;
    stages.push_back(j);

    std::string tag = "linfty_t" + std::to_string(i);
    if (!st.beta_list.empty())
      rep.curves[tag + "_beta.csv"] = csv_table({"beta", "sup_error", "sup_u", "c1_upper"},
                                                {st.beta_list, st.sup_errors, st.sup_u,
                                                 st.c1_upper});
    if (!st.degiorgi.chain_levels.empty()) rep.curves[tag + "_chain.csv"] = chain_csv(st.degiorgi);

    std::string prefix = "t=" + format_double(st.t) + " ";
    rep.check(prefix + "stage completed", st.error.empty());
    rep.check(prefix + "density mass is one", st.mass_defect <= 1e-10);
    rep.check(prefix + "maximum principle on sup u_beta", st.max_principle_ok);
    for (const auto& c : st.certificates)
      rep.check(prefix + "certificate s=" + format_double(c.s) + " k=" + std::to_string(c.k),
                c.pass);
    rep.check(prefix + "level volume vanishes beyond C",
              st.degiorgi.vanishing_ok && st.degiorgi.chain_ok);
    rep.check(prefix + "sup(V_t - phi_t) below C", st.sup_below_C);
    rep.check(prefix + "energy chain", st.energy.all_ok);
  }
  rep.record["stages"] = stages;
  rep.check("uniformity: c_inf max within 2x of min",
            run.c_inf_max <= 2 * run.c_inf_min + 1e-12);
  rep.record["all_ok"] = run.all_ok;
  return rep;
}

RunReport to_report(const MeanValueRunReport& run) {
  RunReport rep;
  rep.record["pipeline"] = "mean_value";
  rep.record["config"] = config_json(run.config);
  rep.record["V0"] = run.V0;
  rep.record["C_run"] = run.C_run;
  rep.record["C_dom"] = run.C_dom;
  rep.record["alpha_star"] = run.alpha_star;
  rep.record["alpha0"] = run.alpha0;
  rep.record["C1"] = run.C1;
  rep.record["alpha_ratio"] = run.alpha_ratio;
  rep.record["C3"] = run.C3;
  rep.record["delta0"] = run.delta0;
  rep.record["holder_exponent"] = run.holder_exponent;
  rep.record["exponent_identity_ok"] = run.exponent_identity_ok;
  auto stages = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.stages.size(); ++i) {
    const MeanValueStage& st = run.stages[i];
    nlohmann::ordered_json j;
    j["t"] = st.t;
    j["V_t"] = st.V_t;
    j["c_inf"] = st.c_inf;
    j["Lambda"] = st.Lambda;
    j["skipped"] = st.skipped;
    auto samples = nlohmann::ordered_json::array();
    for (const auto& smp : st.samples) {
      nlohmann::ordered_json s;
      s["index"] = smp.index;
      s["skipped"] = smp.skipped;
      if (!smp.skipped) {
        s["sup_v"] = smp.sup_v;
        s["l1_norm"] = smp.l1_norm;
        s["lap_min"] = smp.lap_min;
        auto certs = nlohmann::ordered_json::array();
        for (const auto& c : smp.certificates) certs.push_back(cert_json(c));
        s["certificates"] = certs;
        s["degiorgi"] = degiorgi_json(smp.degiorgi);
        s["level_C"] = smp.level_C;
        s["sup_bound_ok"] = smp.sup_bound_ok;
        s["alpha_integrals"] = smp.alpha_integrals;
        s["alpha_step_ok"] = smp.alpha_step_ok;
        s["ok"] = smp.ok;
      }
      samples.push_back(s);

      if (!smp.skipped && !smp.degiorgi.chain_levels.empty())
        rep.curves["mv_t" + std::to_string(i) + "_sample" + std::to_string(smp.index) +
                   "_chain.csv"] = chain_csv(smp.degiorgi);
      std::string prefix =
          "t=" + format_double(st.t) + " sample " + std::to_string(smp.index) + " ";
      if (!smp.skipped) {
        for (const auto& c : smp.certificates)
          rep.check(prefix + "certificate s=" + format_double(c.s) + " k=" + std::to_string(c.k),
                    c.pass);
        rep.check(prefix + "level volume vanishes beyond C",
                  smp.degiorgi.vanishing_ok && smp.degiorgi.chain_ok);
        rep.check(prefix + "sup v <= C (1 + ||v||_1)", smp.sup_bound_ok);
        rep.check(prefix + "alpha step integral within budget", smp.alpha_step_ok);
      }
    }
    j["samples"] = samples;
    j["ok"] = st.ok;
    if (!st.error.empty()) j["error"] = st.error;
    stages.push_back(j);
    rep.check("t=" + format_double(st.t) + " stage completed", st.error.empty());
  }
  rep.record["stages"] = stages;
  rep.check("alpha selection ratio C1 alpha0 / alpha_star < 1", run.alpha_ratio < 1.0);
  rep.check("Hoelder exponent identity 1+delta0 = (pn+p-n)/(np)", run.exponent_identity_ok);
  rep.record["all_ok"] = run.all_ok;
  return rep;
}

void emit_report(const LinftyRunReport& run) { to_report(run).write(run.config.out_dir); }
void emit_report(const MeanValueRunReport& run) { to_report(run).write(run.config.out_dir); }

}  // namespace orb
