#include "orb/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace orb {

namespace {

double binom(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double entropy(const GridField& F, double p, const HermitianField& metric) {
  if (p <= 0) throw std::invalid_argument("entropy: p must be positive");
  GridField ef(F.grid);
  for (Index i = 0; i < F.size(); ++i) ef[i] = std::exp(F[i]);
  double mass = integrate(ef, metric);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("entropy: e^F is not calibrated, mass = " + std::to_string(mass));
  GridField g(F.grid);
  for (Index i = 0; i < F.size(); ++i) g[i] = std::pow(std::abs(F[i]), p) * ef[i];
  return integrate(g, metric);
}

double LevelVolume::eval(double s) const {
  double m = 0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > s) m += density[i];
  return m;
}

LevelVolume level_volume(const GridField& v, const GridField& density,
                         std::vector<double> s_grid) {
  double mass = 0;
  for (Index i = 0; i < density.size(); ++i) {
    if (density[i] < 0) throw std::invalid_argument("level_volume: density must be >= 0");
    mass += density[i];
  }
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("level_volume: total mass must be 1, got " + std::to_string(mass));

  LevelVolume lv;
  lv.v = v;
  lv.density = density;
  if (s_grid.empty()) {
    double vmax = std::max(v.sup(), 0.0);
    for (int i = 0; i < 512; ++i) s_grid.push_back(vmax * i / 512.0);
    s_grid.push_back(vmax);
  }
  if (!std::is_sorted(s_grid.begin(), s_grid.end()))
    throw std::invalid_argument("level_volume: s_grid must be increasing");
  lv.s_grid = std::move(s_grid);
  for (double s : lv.s_grid) lv.phi.push_back(lv.eval(s));
  return lv;
}

double epsilon_root(int n, double a, double A) {
  if (n < 1 || a <= 0 || A <= 0)
    throw std::invalid_argument("epsilon_root: need n >= 1, a > 0, A > 0");
  const double K = std::pow((n + 1.0) / (double(n) * n), n);
  auto f = [&](double x) { return std::pow(x, n + 1) - K * std::pow(a + n * x, n) * A; };
  double lo = 0, hi = 1;
  while (f(hi) < 0) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double epsilon_root_upper_bound(int n, double a, double A) {
  const double K = std::pow((n + 1.0) / (double(n) * n), n);
  double best = 0;
  for (int i = 0; i <= n; ++i) {
    double coef = K * A * binom(n, i) * std::pow(a, n - i) * std::pow(double(n), i);
    best = std::max(best, std::pow(coef, 1.0 / (n + 1 - i)));
  }
  return 2 * best;
}

bool fact_inequality_check(double f, double F, double p) {
  if (f < 0 || p <= 0) throw std::invalid_argument("fact_inequality_check: need f >= 0, p > 0");
  const double Cp = std::pow(p / std::numbers::e, p);
  double lhs = std::pow(f, p) * std::exp(F);
  double rhs = std::exp(F) * std::pow(1 + std::abs(F), p) + Cp * std::exp(2 * f);
  return lhs <= rhs;
}

namespace {

DeGiorgiParams finish_constants(DeGiorgiParams d, std::optional<double> E_t) {
  if (d.C_prime <= 0) throw std::invalid_argument("degiorgi constants: C' must be positive");
  d.s0 = std::pow(2 * d.C_prime, 1.0 / d.delta0);
  if (E_t) {
    if (*E_t <= 0) throw std::invalid_argument("degiorgi constants: E_t must be positive");
    d.s0 *= *E_t;
  }
  d.C = d.s0 + 1.0 / (1.0 - std::pow(2.0, -d.delta0));
  return d;
}

}  // namespace

DeGiorgiParams degiorgi_constants(double p, double n, double C_prime, std::optional<double> E_t) {
  if (p <= n) throw std::invalid_argument("degiorgi_constants: need p > n");
  DeGiorgiParams d;
  d.p = p;
  d.n = n;
  d.delta0 = (p - n) / (n * p);
  d.C_prime = C_prime;
  return finish_constants(d, E_t);
}

DeGiorgiParams degiorgi_constants_delta(double delta0, double C_prime, std::optional<double> E_t) {
  if (delta0 <= 0) throw std::invalid_argument("degiorgi_constants_delta: need delta0 > 0");
  DeGiorgiParams d;
  d.delta0 = delta0;
  d.C_prime = C_prime;
  return finish_constants(d, E_t);
}

DeGiorgiReport degiorgi_verify(const LevelVolume& lv, const DeGiorgiParams& params) {
  DeGiorgiReport rep;
  const auto& s = lv.s_grid;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (lv.phi[i] == 0) continue;  // the inequality is trivially true there
    double denom = std::pow(lv.phi[i], 1.0 + params.delta0);
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      double r = s[j] - s[i];
      if (r <= 0) continue;
      rep.C_prime_emp = std::max(rep.C_prime_emp, r * lv.phi[j] / denom);
    }
  }

  DeGiorgiParams d = params;
  d.C_prime = std::max(rep.C_prime_emp, 1e-30);  // phi == 0 convention
  rep.params = finish_constants(d, std::nullopt);

  rep.vanishing_ok = lv.eval(rep.params.C) == 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] >= rep.params.C && lv.phi[i] != 0.0) rep.vanishing_ok = false;

  rep.chain_ok = true;
  double level = rep.params.s0;
  for (int m = 0; m < 200; ++m) {
    level += std::pow(2.0, -m * rep.params.delta0);
    if (m > 0 && level > s.back()) break;
    double bound =
        std::pow(rep.params.C_prime, -1.0 / rep.params.delta0) *
        std::pow(2.0, -(m + 1) - 1.0 / rep.params.delta0);
    double measured = lv.eval(level);
    rep.chain_levels.push_back(level);
    rep.chain_bounds.push_back(bound);
    rep.chain_measured.push_back(measured);
    if (measured > bound + 1e-12) rep.chain_ok = false;
  }
  return rep;
}

EnergyReport energy_bound_check(const GridField& F, const GridField& phi_t,
                                const GridField& V_t_env, double p, double alpha, double C_alpha,
                                const HermitianField& metric) {
  if (alpha <= 0 || C_alpha <= 0)
    throw std::invalid_argument("energy_bound_check: need alpha > 0 and C_alpha > 0");
  EnergyReport rep;
  const double tol = 1e-8;
  rep.ordering_ok = true;
  for (Index i = 0; i < F.size(); ++i)
    if (phi_t[i] > V_t_env[i] + tol || V_t_env[i] > tol) rep.ordering_ok = false;

  GridField ef(F.grid), g(F.grid);
  for (Index i = 0; i < F.size(); ++i) ef[i] = std::exp(F[i]);
  double mass = integrate(ef, metric);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("energy_bound_check: e^F is not calibrated");

  for (Index i = 0; i < F.size(); ++i) g[i] = (V_t_env[i] - phi_t[i]) * ef[i];
  rep.E_t = integrate(g, metric);

  for (Index i = 0; i < F.size(); ++i) g[i] = (-F[i] - alpha * phi_t[i]) * ef[i];
  rep.jensen_lhs = integrate(g, metric);
  for (Index i = 0; i < F.size(); ++i) g[i] = std::exp(-alpha * phi_t[i]);
  rep.jensen_mid = std::log(integrate(g, metric));
  rep.jensen_rhs = std::log(C_alpha);

  for (Index i = 0; i < F.size(); ++i) g[i] = -phi_t[i] * ef[i];
  rep.int_neg_phi = integrate(g, metric);
  for (Index i = 0; i < F.size(); ++i) g[i] = std::abs(F[i]) * ef[i];
  rep.int_abs_F = integrate(g, metric);
  rep.entropy_p = entropy(F, p, metric);
  rep.bound = (rep.int_abs_F + rep.jensen_rhs) / alpha;

  const double slack = 1e-10;
  rep.all_ok = rep.ordering_ok && rep.E_t <= rep.int_neg_phi + slack &&
               rep.jensen_lhs <= rep.jensen_mid + slack &&
               rep.jensen_mid <= rep.jensen_rhs + slack &&
               rep.int_neg_phi <= rep.bound + slack &&
               rep.int_abs_F <= std::pow(rep.entropy_p, 1.0 / p) + slack;
  return rep;
}

}  // namespace orb
