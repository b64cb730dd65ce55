#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "orb/alpha.hpp"
#include "orb/calculus.hpp"
#include "orb/grid.hpp"

using namespace orb;

namespace {

constexpr double tau = 2 * std::numbers::pi;

GridField band_limited(GridPtr g, std::mt19937_64& rng, int kmax, double amp) {
  std::uniform_real_distribution<double> u(-1, 1);
  GridField f(g);
  for (int kx = -kmax; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if (kx == 0 && ky == 0) continue;
      double a = amp * u(rng), b = amp * u(rng);
      for (Index i = 0; i < f.size(); ++i) {
        auto x = g->point(i);
        double ph = tau * (kx * x[0] + ky * x[1]);
        f[i] += a * std::cos(ph) + b * std::sin(ph);
      }
    }
  return f;
}

// int over [0, pi/4] of (sec^p - 1) by Simpson's rule
double corner_secant_integral(double p, int cells) {
  auto f = [&](double t) { return std::pow(1.0 / std::cos(t), p) - 1.0; };
  double h = (std::numbers::pi / 4) / cells, s = 0;
  for (int i = 0; i < cells; ++i) {
    double a = i * h;
    s += (f(a) + 4 * f(a + h / 2) + f(a + h)) * h / 6;
  }
  return s;
}

// closed-form/1-d quadrature for int over the unit cell of e^{-alpha max(c log r, -M)}
double radial_oracle(double c, double M, double alpha) {
  const double ac = alpha * c;
  const double rstar = std::exp(-M / c);
  double core = std::numbers::pi * rstar * rstar * std::exp(alpha * M);
  double p = 2 - ac;
  double disk = 2 * std::numbers::pi / p * (std::pow(0.5, p) - std::pow(rstar, p));
  double corner = 8.0 / p * std::pow(0.5, p) * corner_secant_integral(p, 20000);
  return core + disk + corner;
}

}  // namespace

TEST_CASE("exp_integral basics") {
  auto g = build_grid(1, 32, "Z2");
  HermitianField w = calibrated_flat_metric(g);
  GridField zero(g);
  CHECK(exp_integral(zero, 0.7, w) == doctest::Approx(1.0).epsilon(1e-12));

  GridField pos(g, 0.5);
  CHECK_THROWS(exp_integral(pos, 1.0, w));
  CHECK_THROWS(exp_integral(zero, -1.0, w));

  // monotone in alpha across a projected random family
  auto gt = build_grid(1, 32, "trivial");
  HermitianField wt = calibrated_flat_metric(gt);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    GridField phi = project_admissible(band_limited(gt, rng, 3, 0.5), wt);
    double a = exp_integral(phi, 0.5, wt), b = exp_integral(phi, 1.0, wt);
    CHECK(a >= 1.0 - 1e-12);
    CHECK(b >= a - 1e-12);
  }
}

TEST_CASE("log-sum-exp evaluation survives pointwise overflow") {
  auto g = build_grid(1, 16, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  GridField spike(g);
  spike[0] = -715.0;  // e^{715} overflows a double, the weighted sum does not
  double v = exp_integral(spike, 1.0, w);
  CHECK(std::isfinite(v));
  double expected = std::exp(715.0 + std::log(1.0 / (16.0 * 16.0)));
  CHECK(v == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("truncated log matches the radial quadrature oracle within 2%") {
  auto g = build_grid(1, 512, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  const double c = 0.5, M = 6.0, alpha = 1.0;
  GridField phi = truncated_log(g, {0, 0}, c, M);
  // the generator shifts sup to 0; undo the shift factor for the comparison
  const double sup_raw = c * std::log(std::sqrt(0.5));
  double grid_val = exp_integral(phi, alpha, w) * std::exp(-alpha * sup_raw);
  double oracle = radial_oracle(c, M, alpha);
  CHECK(grid_val == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("average lower bound via the Green kernel") {
  auto g = build_grid(1, 64, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  GreenKernel k = green_kernel(w);

  auto [avg0, bound0] = avg_lower_bound_check(GridField(g), k);
  CHECK(avg0 == 0.0);
  CHECK(bound0 == -k.c1);
  CHECK(avg0 >= bound0);

  // projected truncated log
  GridField tl = project_admissible(truncated_log(g, {5, 11}, 0.5, 6.0), w);
  auto [avg1, bound1] = avg_lower_bound_check(tl, k);
  CHECK(avg1 < 0.0);
  CHECK(avg1 >= bound1);

  // randomized theorem test
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    GridField phi = project_admissible(band_limited(g, rng, 4, 0.6), w);
    auto [avg, bound] = avg_lower_bound_check(phi, k);
    CHECK(avg >= bound);
  }

  GridField bad(g, 0.0);
  bad[3] = 1.0;  // positive somewhere
  CHECK_THROWS(avg_lower_bound_check(bad, k));
}

TEST_CASE("domination constant") {
  auto g = build_grid(1, 32, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  CHECK(domination_constant(w, w) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(domination_constant(2.0 * w, w) == doctest::Approx(2.0).epsilon(1e-12));

  // variable chi whose extremum sits on a shared grid point of both resolutions
  auto mk = [](GridPtr gg) {
    HermitianField ww = calibrated_flat_metric(gg);
    GridField p(gg);
    for (Index i = 0; i < p.size(); ++i)
      p[i] = -0.02 * std::cos(tau * gg->point(i)[0]) - 0.013 * std::cos(tau * gg->point(i)[1]);
    return ww + i_ddbar(p);
  };
  double coarse = domination_constant(mk(g), w);
  auto g2 = build_grid(1, 64, "trivial");
  double fine = domination_constant(mk(g2), calibrated_flat_metric(g2));
  CHECK(coarse == doctest::Approx(fine).epsilon(1e-6));
  CHECK(coarse > 1.0);
}

TEST_CASE("estimate_alpha on the zero member and the truncated-log pencil") {
  auto g = build_grid(1, 32, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  PshFamily trivial_family;
  trivial_family.members.push_back(GridField(g));
  AlphaReport r0 = estimate_alpha(trivial_family, w, 2.0, {0.5, 1.0, 2.0});
  CHECK(r0.alpha_star == 2.0);

  // pencil: larger c lowers the blow-up threshold; members only shrink alpha_star
  auto g5 = build_grid(1, 512, "trivial");
  HermitianField w5 = calibrated_flat_metric(g5);
  PshFamily fam;
  std::vector<double> alphas = {0.5, 1.0, 1.5, 2.0};
  double last_star = 1e300;
  for (double c : {0.25, 0.5, 1.0}) {
    fam.members.push_back(truncated_log(g5, {0, 0}, c, 6.0));
    AlphaReport r = estimate_alpha(fam, w5, 15.0, alphas);
    CHECK(r.alpha_star <= last_star);
    last_star = r.alpha_star;
    // monotone rows
    for (const auto& row : r.integrals)
      for (std::size_t j = 1; j < row.size(); ++j) CHECK(row[j] >= row[j - 1] - 1e-12);
  }
  CHECK(last_star < 2.0);   // the c=1 member kills alpha*c = 2
  CHECK(last_star >= 1.0);  // but integrable exponents survive
}

TEST_CASE("integral growth in the truncation depth") {
  auto g = build_grid(1, 512, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  const double c = 1.0;
  // near-critical exponent: integrals grow with M
  double prev = 0;
  for (double M : {2.0, 4.0, 6.0, 8.0}) {
    double v = exp_integral(truncated_log(g, {0, 0}, c, M), 1.9, w);
    CHECK(v > prev);
    prev = v;
  }
  double shallow = exp_integral(truncated_log(g, {0, 0}, c, 2.0), 1.9, w);
  CHECK(prev > 1.5 * shallow);

  // integrable exponent: increments decay geometrically, so the limit is finite
  double a2 = exp_integral(truncated_log(g, {0, 0}, c, 2.0), 0.9, w);
  double a4 = exp_integral(truncated_log(g, {0, 0}, c, 4.0), 0.9, w);
  double a6 = exp_integral(truncated_log(g, {0, 0}, c, 6.0), 0.9, w);
  double a8 = exp_integral(truncated_log(g, {0, 0}, c, 8.0), 0.9, w);
  CHECK(a4 - a2 > 0);
  CHECK(a6 - a4 < 0.5 * (a4 - a2));
  CHECK(a8 - a6 < 0.5 * (a6 - a4));
}
