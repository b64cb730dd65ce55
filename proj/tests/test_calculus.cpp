#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "orb/calculus.hpp"
#include "orb/grid.hpp"

using namespace orb;

namespace {

constexpr double tau = 2 * std::numbers::pi;

GridField band_limited(GridPtr g, std::mt19937_64& rng, int kmax, double amp) {
  std::uniform_real_distribution<double> u(-1, 1);
  GridField f(g);
  const int n = g->n;
  for (int kx = -kmax; kx <= kmax; ++kx)
    for (int ky = -kmax; ky <= kmax; ++ky) {
      if (kx == 0 && ky == 0) continue;
      double a = amp * u(rng), b = amp * u(rng);
      for (Index i = 0; i < f.size(); ++i) {
        auto x = g->point(i);
        double ph = tau * (kx * x[0] + ky * x[1]);
        // use the first complex coordinate only; higher n fields stay 2d
        (void)n;
        f[i] += a * std::cos(ph) + b * std::sin(ph);
      }
    }
  return f;
}

}  // namespace

TEST_CASE("i_ddbar of a constant vanishes") {
  auto g = build_grid(1, 16, "trivial");
  GridField u(g, 3.0);
  HermitianField h = i_ddbar(u);
  for (const auto& c : h.coeffs) CHECK(std::abs(c) == 0.0);
}

TEST_CASE("i_ddbar matches the analytic derivative of cos(2 pi x)") {
  auto g = build_grid(1, 64, "trivial");
  GridField u(g);
  for (Index i = 0; i < u.size(); ++i) u[i] = std::cos(tau * g->point(i)[0]);
  HermitianField h = i_ddbar(u);
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  double err = 0;
  for (Index i = 0; i < u.size(); ++i)
    err = std::max(err, std::abs(h.coeffs[i].real() + pi2 * std::cos(tau * g->point(i)[0])));
  CHECK(err <= 1e-8);
}

TEST_CASE("i_ddbar agrees with centered finite differences at O(h^2)") {
  std::mt19937_64 rng(5);
  double errs[2];
  int resos[2] = {32, 64};
  for (int r = 0; r < 2; ++r) {
    auto g = build_grid(1, resos[r], "trivial");
    std::mt19937_64 rng2(5);  // same field on both grids
    GridField u = band_limited(g, rng2, 3, 0.3);
    HermitianField h = i_ddbar(u);
    const int m = g->resolution;
    const double h2 = 1.0 / (m * m);
    double err = 0;
    for (Index i = 0; i < u.size(); ++i) {
      auto c = g->coords(i);
      auto at = [&](int dx, int dy) {
        int cc[2] = {c[0] + dx, c[1] + dy};
        return u[g->index(cc)];
      };
      double lap_fd = (at(1, 0) + at(-1, 0) + at(0, 1) + at(0, -1) - 4 * at(0, 0)) / h2;
      err = std::max(err, std::abs(h.coeffs[i].real() - 0.25 * lap_fd));
    }
    errs[r] = err;
  }
  CHECK(errs[0] / errs[1] > 3.0);  // halving h shrinks the gap ~4x
  CHECK(errs[0] / errs[1] < 5.0);
}

TEST_CASE("i_ddbar is linear and equivariant") {
  auto g = build_grid(1, 32, "Z4");
  std::mt19937_64 rng(9);
  GridField a = group_average(band_limited(g, rng, 3, 0.5));
  GridField b = group_average(band_limited(g, rng, 3, 0.5));
  HermitianField ha = i_ddbar(a), hb = i_ddbar(b);
  GridField sum = a + b;
  HermitianField hsum = i_ddbar(sum);
  double lin = 0;
  for (Index i = 0; i < hsum.coeffs.size(); ++i)
    lin = std::max(lin, std::abs(hsum.coeffs[i] - ha.coeffs[i] - hb.coeffs[i]));
  CHECK(lin <= 1e-10);
  CHECK(equivariance_defect(ha) <= 1e-12);
}

TEST_CASE("ma_density closed forms") {
  SUBCASE("identical forms give 1") {
    auto g = build_grid(1, 16, "trivial");
    HermitianField base = calibrated_flat_metric(g);
    GridField u(g);
    GridField d = ma_density(base, u, base);
    for (Index i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(1.0).epsilon(1e-14));
  }
  SUBCASE("n=1 scalar ratio 1 + q(x)") {
    auto g = build_grid(1, 64, "trivial");
    HermitianField base = constant_form(g, Eigen::MatrixXcd::Identity(1, 1));
    GridField u(g);
    for (Index i = 0; i < u.size(); ++i) u[i] = std::cos(tau * g->point(i)[0]);
    GridField d = ma_density(base, u, base);
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    for (Index i = 0; i < d.size(); ++i) {
      double q = -pi2 * std::cos(tau * g->point(i)[0]);
      CHECK(d[i] == doctest::Approx(1.0 + q).epsilon(1e-9));
    }
  }
  SUBCASE("n=2 diagonal determinant") {
    auto g = build_grid(2, 8, "trivial");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = 1;
    m(1, 1) = 2;
    HermitianField base = constant_form(g, m);
    HermitianField ref = constant_form(g, Eigen::MatrixXcd::Identity(2, 2));
    GridField u(g);
    GridField d = ma_density(base, u, ref);
    for (Index i = 0; i < d.size(); ++i) CHECK(d[i] == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("integrate: calibration, mean-zero modes, refinement oracle") {
  for (const char* spec : {"trivial", "Z2", "Z4"}) {
    auto g = build_grid(1, 32, spec);
    HermitianField w = calibrated_flat_metric(g);
    GridField one(g, 1.0);
    CHECK(integrate(one, w) == doctest::Approx(1.0).epsilon(1e-12));
  }
  auto g = build_grid(1, 32, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  GridField f(g);
  for (Index i = 0; i < f.size(); ++i) f[i] = std::cos(tau * g->point(i)[0]);
  CHECK(std::abs(integrate(f, w)) < 1e-12);

  auto g2 = build_grid(1, 64, "trivial");
  std::mt19937_64 r1(13), r2(13);
  GridField fc = band_limited(g, r1, 4, 0.5);
  GridField ff = band_limited(g2, r2, 4, 0.5);
  HermitianField w2 = calibrated_flat_metric(g2);
  CHECK(integrate(fc, w) == doctest::Approx(integrate(ff, w2)).epsilon(1e-8));
}

TEST_CASE("laplacian basics and the trace inequality") {
  auto g = build_grid(1, 64, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  GridField c(g, 5.0);
  GridField lc = laplacian(w, c);
  CHECK(lc.sup() == 0.0);
  CHECK(lc.inf() == 0.0);

  GridField u(g);
  for (Index i = 0; i < u.size(); ++i) u[i] = std::cos(tau * g->point(i)[0]);
  GridField lu = laplacian(w, u);
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double g11 = w.coeffs[0].real();
  for (Index i = 0; i < u.size(); ++i)
    CHECK(lu[i] == doctest::Approx(-(pi2 / g11) * std::cos(tau * g->point(i)[0])).epsilon(1e-9));

  // Delta phi >= -n for omega_X-psh phi
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    GridField phi = band_limited(g, rng, 3, 0.2);
    // scale toward zero until omega_X + i ddbar phi is positive semidefinite
    for (int k = 0; k < 60; ++k) {
      if (positivity_margin(w + i_ddbar(phi)) >= -1e-8) break;
      phi = 0.7 * phi;
    }
    GridField lp = laplacian(w, phi);
    CHECK(lp.inf() >= -1.0 - 1e-7);
  }

  CHECK_THROWS(laplacian(constant_form(g, -Eigen::MatrixXcd::Identity(1, 1)), u));
}

TEST_CASE("Stokes invariance of the total Monge-Ampere mass") {
  auto g = build_grid(1, 64, "trivial");
  HermitianField ref = calibrated_flat_metric(g);
  HermitianField base = 2.0 * ref;
  std::mt19937_64 rng(31);
  GridField zero(g);
  double m0 = integrate(ma_density(base, zero, ref), ref);
  for (int trial = 0; trial < 5; ++trial) {
    GridField u = band_limited(g, rng, 4, 0.05);
    double m = integrate(ma_density(base, u, ref), ref);
    CHECK(m == doctest::Approx(m0).epsilon(1e-8));
  }
}

TEST_CASE("green kernel: normalization, symmetry, c1 oracle") {
  auto g = build_grid(1, 64, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  GreenKernel k = green_kernel(w);

  double mn = 1e300;
  for (Index y = 0; y < g->num_points(); y += 7) {
    CHECK(k.value(0, y) == doctest::Approx(k.value(y, 0)).epsilon(1e-10));
    mn = std::min(mn, k.value(0, y));
  }
  double global_min = 1e300;
  for (Index x = 0; x < g->num_points(); ++x) global_min = std::min(global_min, k.value(x, 0));
  CHECK(global_min == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(global_min >= 0.0);

  CHECK(k.c1 > 0.0);
  CHECK(k.c1 == doctest::Approx(k.row_integral(1234)).epsilon(1e-10));

  GridField bump(g);
  for (Index i = 0; i < bump.size(); ++i) bump[i] = 0.01 * std::cos(tau * g->point(i)[0]);
  CHECK_THROWS(green_kernel(w + i_ddbar(bump)));  // variable coefficients rejected
}

TEST_CASE("green kernel on a quotient grid") {
  auto g = build_grid(1, 32, "Z2");
  HermitianField w = calibrated_flat_metric(g);
  GreenKernel k = green_kernel(w);
  CHECK(k.c1 > 0.0);
  // row integrals are constant in x
  CHECK(k.row_integral(17) == doctest::Approx(k.c1).epsilon(1e-10));
  // spot-check symmetry
  for (Index y = 1; y < g->num_points(); y += 101)
    CHECK(k.value(3, y) == doctest::Approx(k.value(y, 3)).epsilon(1e-10));
}

TEST_CASE("Green-Riesz reconstruction of band-limited fields") {
  auto g = build_grid(1, 256, "trivial");
  HermitianField w = calibrated_flat_metric(g);
  GreenKernel k = green_kernel(w);
  std::mt19937_64 rng(41);
  GridField phi = band_limited(g, rng, 5, 0.4);
  GridField rec = green_riesz_reconstruct(k, phi);
  double err = 0;
  for (Index i = 0; i < phi.size(); ++i) err = std::max(err, std::abs(rec[i] - phi[i]));
  CHECK(err <= 1e-8);
}
