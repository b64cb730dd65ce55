#include "orb/ma_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "orb/fft.hpp"
#include "orb/report.hpp"

namespace orb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double plain_mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

/// Linearization of log det around the current metric A. For lambda = 0 the
/// system is assembled in divergence form (scaled by det A), which keeps the
/// constant-kernel projection consistent; for lambda > 0 the plain log form is
/// used, which stays well scaled when det A varies by many orders of magnitude
/// (the envelope regime).
struct NewtonOperator {
  const HermitianField* base_plus_hu;  // A
  GridField det_a;
  std::vector<Eigen::MatrixXcd> ainv_scaled;  // A^{-1}, times det(A) when scaled
  bool scaled = false;
  double lambda;
  GridPtr grid;

  // constant-coefficient preconditioner data
  Eigen::MatrixXcd ainv_mean;
  double det_mean;
  std::vector<double> symbol;  // precond symbol per mode (real, <= 0 for lambda=0)

  void init(const HermitianField& a, double lam) {
    base_plus_hu = &a;
    lambda = lam;
    scaled = (lam == 0.0);
    grid = a.grid;
    const int n = grid->n;
    const Index np = grid->num_points();
    det_a = det_field(a);
    ainv_scaled.resize(np);
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
    for (Index p = 0; p < np; ++p) {
      Eigen::MatrixXcd m = a.at(p).inverse();
      ainv_scaled[p] = scaled ? (det_a[p] * m).eval() : m;
      acc += ainv_scaled[p];
    }
    ainv_mean = acc / static_cast<double>(np);
    det_mean = scaled ? plain_mean(det_a.values) : 1.0;

    Fft& fft = fft_for(grid);
    constexpr double pi = std::numbers::pi;
    symbol.assign(np, 0.0);
    for (Index i = 0; i < np; ++i) {
      if (fft.nyquist(i)) continue;
      auto c = grid->coords(i);
      Cplx tr = 0;
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double kxj = fft.freq(c[2 * j]), kyj = fft.freq(c[2 * j + 1]);
          double kxk = fft.freq(c[2 * k]), kyk = fft.freq(c[2 * k + 1]);
          Cplx sym = -pi * pi * Cplx(kxj, -kyj) * Cplx(kxk, kyk);
          tr += ainv_mean(k, j) * sym;
        }
      symbol[i] = tr.real();
    }
  }

  std::vector<double> apply(const std::vector<double>& x) const {
    GridField xf(grid);
    xf.values = x;
    HermitianField h = i_ddbar(xf);
    const int n = grid->n;
    const Index np = grid->num_points();
    std::vector<double> y(np);
    for (Index p = 0; p < np; ++p) {
      Cplx tr = 0;
      const Cplx* hc = h.coeffs.data() + p * n * n;
      const Eigen::MatrixXcd& ai = ainv_scaled[p];
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) tr += ai(k, j) * hc[j * n + k];
      y[p] = tr.real() - lambda * (scaled ? det_a[p] : 1.0) * x[p];
    }
    return y;
  }

  std::vector<double> precond(const std::vector<double>& x) const {
    Fft& fft = fft_for(grid);
    std::vector<Cplx> xh = fft.forward(x);
    for (Index i = 0; i < xh.size(); ++i) {
      double s = symbol[i] - lambda * det_mean;
      xh[i] = (s != 0.0) ? xh[i] / s : Cplx(0, 0);
    }
    std::vector<double> out(xh.size());
    Fft& f2 = fft_for(grid);
    out = f2.inverse_real(xh);
    return out;
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (Index i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

/// Right-preconditioned BiCGStab for the Newton linear system.
std::vector<double> bicgstab(const NewtonOperator& op, std::vector<double> b, double rtol,
                             int max_iter) {
  const Index np = b.size();
  if (op.lambda == 0.0) {
    double m = plain_mean(b);
    for (double& v : b) v -= m;
  }
  std::vector<double> x(np, 0.0), r = b;
  std::vector<double> r0 = r, p(np, 0.0), v(np, 0.0);
  double rho = 1, alpha = 1, omega = 1;
  const double bn = norm2(b);
  if (bn == 0) return x;
  for (int it = 0; it < max_iter; ++it) {
    double rho1 = dot(r0, r);
    if (std::abs(rho1) < 1e-300) break;
    if (it == 0) {
      p = r;
    } else {
      double beta = (rho1 / rho) * (alpha / omega);
      for (Index i = 0; i < np; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    rho = rho1;
    std::vector<double> phat = op.precond(p);
    v = op.apply(phat);
    double r0v = dot(r0, v);
    if (std::abs(r0v) < 1e-300) break;
    alpha = rho / r0v;
    std::vector<double> s(np);
    for (Index i = 0; i < np; ++i) s[i] = r[i] - alpha * v[i];
    if (norm2(s) <= rtol * bn) {
      for (Index i = 0; i < np; ++i) x[i] += alpha * phat[i];
      break;
    }
    std::vector<double> shat = op.precond(s);
    std::vector<double> t = op.apply(shat);
    double tt = dot(t, t);
    if (tt < 1e-300) break;
    omega = dot(t, s) / tt;
    for (Index i = 0; i < np; ++i) {
      x[i] += alpha * phat[i] + omega * shat[i];
      r[i] = s[i] - omega * t[i];
    }
    if (norm2(r) <= rtol * bn || std::abs(omega) < 1e-300) break;
  }
  if (op.lambda == 0.0) {
    double m = plain_mean(x);
    for (double& v2 : x) v2 -= m;
  }
  return x;
}

struct ResidualEval {
  double sup = kInf;
  double margin = -kInf;
  GridField pointwise;  // defined only when margin > 0
  GridField det_a;
};

ResidualEval eval_residual(const MAProblem& pb, const GridField& u, double log_c,
                           const GridField& F, const GridField& log_det_ref) {
  ResidualEval ev;
  HermitianField a = pb.base + i_ddbar(u);
  ev.margin = positivity_margin(a);
  ev.det_a = det_field(a);
  if (ev.margin <= 0) return ev;
  ev.pointwise = GridField(u.grid);
  double s = 0;
  for (Index p = 0; p < u.size(); ++p) {
    double r = std::log(ev.det_a[p]) - log_det_ref[p] - log_c - pb.lambda * u[p] - F[p];
    ev.pointwise[p] = r;
    s = std::max(s, std::abs(r));
  }
  ev.sup = s;
  return ev;
}

MASolution newton_solve(const MAProblem& pb, const GridField& F, double log_c, GridField u,
                        double tol, int max_iter, double stagnation_tol) {
  GridField log_det_ref = det_field(pb.reference);
  for (double& v : log_det_ref.values) v = std::log(v);

  std::vector<double> history;
  ResidualEval ev = eval_residual(pb, u, log_c, F, log_det_ref);
  if (ev.margin <= 0)
    throw SolveError("initial iterate is outside the positive cone", history);
  history.push_back(ev.sup);

  int it = 0;
  while (ev.sup > tol) {
    if (++it > max_iter)
      throw SolveError("no convergence in " + std::to_string(max_iter) + " iterations", history);
    HermitianField a = pb.base + i_ddbar(u);
    NewtonOperator op;
    op.init(a, pb.lambda);
    std::vector<double> b(u.size());
    for (Index p = 0; p < u.size(); ++p)
      b[p] = -ev.pointwise[p] * (op.scaled ? ev.det_a[p] : 1.0);
    std::vector<double> delta = bicgstab(op, b, 1e-10, 400);

    bool accepted = false;
    double step = 1.0;
    for (int half = 0; half <= 20; ++half, step *= 0.5) {
      GridField u2 = u;
      for (Index p = 0; p < u.size(); ++p) u2[p] += step * delta[p];
      ResidualEval ev2 = eval_residual(pb, u2, log_c, F, log_det_ref);
      if (ev2.margin > 0 && ev2.sup < ev.sup) {
        u = std::move(u2);
        ev = std::move(ev2);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Log-residual evaluation has a roundoff floor when det(A) nearly
      // degenerates (deep envelope contact); accept stalls below the floor.
      if (ev.sup <= stagnation_tol) break;
      throw SolveError("line search failed to preserve positivity or reduce the residual (sup " +
                           format_double(ev.sup) + ")",
                       history);
    }
    history.push_back(ev.sup);
  }

  MASolution sol;
  sol.u = std::move(u);
  sol.residual_sup = ev.sup;
  sol.positivity_margin = ev.margin;
  sol.iterations = it;
  sol.residual_history = std::move(history);
  return sol;
}

}  // namespace

double residual(const MAProblem& problem, const GridField& u) {
  GridField dens = ma_density(problem.base, u, problem.reference);
  HermitianField a = problem.base + i_ddbar(u);
  if (positivity_margin(a) <= 0) return kInf;
  double s = 0;
  for (Index p = 0; p < u.size(); ++p) {
    double r = std::log(dens[p]) - std::log(problem.scale) - problem.lambda * u[p] -
               problem.density_log[p];
    s = std::max(s, std::abs(r));
  }
  return s;
}

MASolution solve_ma(const MAProblem& problem, double tol, int max_iter,
                    const std::optional<GridField>& warm_start, double stagnation_tol) {
  if (positivity_margin(problem.reference) <= 0)
    throw std::invalid_argument("solve_ma: reference form is not positive definite");
  if (problem.lambda == 0.0 && problem.normalization == MAProblem::Norm::none)
    throw std::invalid_argument("solve_ma: lambda = 0 requires a normalization");
  const GridPtr grid = problem.base.grid;
  GridField u0 = warm_start ? *warm_start : GridField(grid);

  // lambda = 0 gauge: the scale is forced by Stokes invariance; renormalize.
  auto effective_log_c = [&](const GridField& F) {
    if (problem.lambda > 0.0) return std::log(problem.scale);
    double v_base = integrate(GridField(grid, 1.0), problem.base);
    GridField expf(grid);
    for (Index p = 0; p < expf.size(); ++p) expf[p] = std::exp(F[p]);
    double mass = integrate(expf, problem.reference);
    return std::log(v_base / mass);
  };

  MASolution sol;
  try {
    sol = newton_solve(problem, problem.density_log, effective_log_c(problem.density_log), u0,
                       tol, max_iter, stagnation_tol);
  } catch (const SolveError&) {
    // continuity ramp: walk the density up from 0 in 8 stages
    GridField u = u0;
    for (int stage = 1; stage <= 8; ++stage) {
      double frac = stage / 8.0;
      GridField fs = frac * problem.density_log;
      double stage_tol = stage == 8 ? tol : std::max(tol, 1e-8);
      sol = newton_solve(problem, fs, effective_log_c(fs), u, stage_tol, max_iter,
                         std::max(stagnation_tol, stage == 8 ? 0.0 : 1e-8));
      u = sol.u;
    }
  }

  if (problem.lambda == 0.0) {
    if (problem.normalization == MAProblem::Norm::sup_zero) {
      double s = sol.u.sup();
      for (double& v : sol.u.values) v -= s;
    } else if (problem.normalization == MAProblem::Norm::mean_zero) {
      double m = integrate(sol.u, problem.reference) / total_volume(problem.reference);
      for (double& v : sol.u.values) v -= m;
    }
  }
  return sol;
}

std::vector<MASolution> solve_calibrated_family(const HermitianField& chi,
                                                const HermitianField& omega_x,
                                                const GridField& F_spec,
                                                const std::vector<double>& t_list, double tol,
                                                const std::optional<GridField>& init) {
  const GridPtr grid = chi.grid;
  GridField one(grid, 1.0);
  const double v0 = integrate(one, chi);
  if (v0 <= 0)
    throw std::invalid_argument("solve_calibrated_family: the class is not big (int chi^n <= 0)");

  GridField expf(grid);
  for (Index p = 0; p < expf.size(); ++p) expf[p] = std::exp(F_spec[p]);
  const double mass = integrate(expf, omega_x);
  GridField f_t = shifted(F_spec, -std::log(mass));

  std::vector<double> ts = t_list;
  std::sort(ts.begin(), ts.end(), std::greater<double>());

  std::vector<MASolution> out;
  std::optional<GridField> warm = init;
  for (double t : ts) {
    MAProblem pb;
    pb.base = chi + t * omega_x;
    pb.reference = omega_x;
    pb.density_log = f_t;
    pb.lambda = 0.0;
    pb.normalization = MAProblem::Norm::sup_zero;
    pb.scale = integrate(one, pb.base);
    MASolution sol = solve_ma(pb, tol, 100, warm);
    warm = sol.u;
    sol.V_t = pb.scale;
    sol.F_t = f_t;
    out.push_back(std::move(sol));
  }
  return out;
}

}  // namespace orb
