#include "orb/calculus.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "orb/fft.hpp"

namespace orb {

HermitianField::HermitianField(GridPtr g)
    : grid(std::move(g)), coeffs(grid->num_points() * grid->n * grid->n, Cplx(0, 0)) {}

Eigen::MatrixXcd HermitianField::at(Index p) const {
  const int n = dim();
  Eigen::MatrixXcd m(n, n);
  const Cplx* c = coeffs.data() + p * n * n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) m(j, k) = c[j * n + k];
  return m;
}

void HermitianField::set(Index p, const Eigen::MatrixXcd& m) {
  const int n = dim();
  Cplx* c = coeffs.data() + p * n * n;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) c[j * n + k] = m(j, k);
}

static void check_same_grid(const HermitianField& a, const HermitianField& b) {
  if (a.grid.get() != b.grid.get())
    throw std::invalid_argument("HermitianField arithmetic across different grids");
}

HermitianField operator+(const HermitianField& a, const HermitianField& b) {
  check_same_grid(a, b);
  HermitianField r = a;
  for (Index i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += b.coeffs[i];
  return r;
}

HermitianField operator-(const HermitianField& a, const HermitianField& b) {
  check_same_grid(a, b);
  HermitianField r = a;
  for (Index i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= b.coeffs[i];
  return r;
}

HermitianField operator*(double s, const HermitianField& a) {
  HermitianField r = a;
  for (auto& c : r.coeffs) c *= s;
  return r;
}

HermitianField constant_form(GridPtr grid, const Eigen::MatrixXcd& m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("constant_form: matrix is not Hermitian");
  HermitianField h(grid);
  for (Index p = 0; p < grid->num_points(); ++p) h.set(p, m);
  return h;
}

HermitianField calibrated_flat_metric(GridPtr grid) {
  const double c = std::pow(static_cast<double>(grid->group.order), 1.0 / grid->n);
  return constant_form(grid, c * Eigen::MatrixXcd::Identity(grid->n, grid->n));
}

HermitianField i_ddbar(const GridField& u) {
  const auto grid = u.grid;
  const int n = grid->n;
  const Index np = grid->num_points();
  Fft& fft = fft_for(grid);
  std::vector<Cplx> uhat = fft.forward(u.values);
  constexpr double pi = std::numbers::pi;

  HermitianField h(grid);
  std::vector<Cplx> mode(np);
  for (int j = 0; j < n; ++j)
    for (int k = j; k < n; ++k) {
      for (Index i = 0; i < np; ++i) {
        if (fft.nyquist(i)) {
          mode[i] = 0;
          continue;
        }
        auto c = grid->coords(i);
        double kxj = fft.freq(c[2 * j]), kyj = fft.freq(c[2 * j + 1]);
        double kxk = fft.freq(c[2 * k]), kyk = fft.freq(c[2 * k + 1]);
        Cplx sym = -pi * pi * Cplx(kxj, -kyj) * Cplx(kxk, kyk);
        mode[i] = sym * uhat[i];
      }
      fft.buffer() = mode;
      fft.inverse();
      const auto& out = fft.buffer();
      for (Index p = 0; p < np; ++p) {
        Cplx v = out[p];
        if (j == k) v = Cplx(v.real(), 0.0);
        h.coeffs[p * n * n + j * n + k] = v;
        h.coeffs[p * n * n + k * n + j] = std::conj(v);
      }
    }
  return h;
}

GridField det_field(const HermitianField& h) {
  const int n = h.dim();
  GridField r(h.grid);
  const Index np = h.grid->num_points();
  if (n == 1) {
    for (Index p = 0; p < np; ++p) r[p] = h.coeffs[p].real();
  } else if (n == 2) {
    for (Index p = 0; p < np; ++p) {
      const Cplx* c = h.coeffs.data() + 4 * p;
      r[p] = (c[0] * c[3] - c[1] * c[2]).real();
    }
  } else {
    for (Index p = 0; p < np; ++p) r[p] = h.at(p).determinant().real();
  }
  return r;
}

GridField min_eigenvalue_field(const HermitianField& h) {
  const int n = h.dim();
  GridField r(h.grid);
  const Index np = h.grid->num_points();
  if (n == 1) {
    for (Index p = 0; p < np; ++p) r[p] = h.coeffs[p].real();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es;
    for (Index p = 0; p < np; ++p) {
      es.compute(h.at(p), Eigen::EigenvaluesOnly);
      r[p] = es.eigenvalues().minCoeff();
    }
  }
  return r;
}

double positivity_margin(const HermitianField& h) { return min_eigenvalue_field(h).inf(); }

GridField ma_density(const HermitianField& base, const GridField& u,
                     const HermitianField& reference) {
  if (positivity_margin(reference) <= 0)
    throw std::invalid_argument("ma_density: reference form is not positive definite");
  HermitianField num = base + i_ddbar(u);
  GridField dn = det_field(num);
  GridField dr = det_field(reference);
  GridField r(base.grid);
  for (Index p = 0; p < r.size(); ++p) r[p] = dn[p] / dr[p];
  return r;
}

double integrate(const GridField& f, const HermitianField& volume) {
  if (f.grid.get() != volume.grid.get())
    throw std::invalid_argument("integrate: field and volume live on different grids");
  GridField d = det_field(volume);
  double s = 0;
  for (Index p = 0; p < f.size(); ++p) s += f[p] * d[p];
  const double w = 1.0 / static_cast<double>(f.grid->num_points());
  return s * w / f.grid->group.order;
}

double total_volume(const HermitianField& h) {
  GridField one(h.grid, 1.0);
  return integrate(one, h);
}

GridField laplacian(const HermitianField& metric, const GridField& u) {
  if (positivity_margin(metric) <= 0)
    throw std::invalid_argument("laplacian: metric is not positive definite");
  const int n = metric.dim();
  HermitianField h = i_ddbar(u);
  GridField r(u.grid);
  const Index np = u.grid->num_points();
  if (n == 1) {
    for (Index p = 0; p < np; ++p) r[p] = h.coeffs[p].real() / metric.coeffs[p].real();
  } else {
    for (Index p = 0; p < np; ++p)
      r[p] = (metric.at(p).inverse() * h.at(p)).trace().real();
  }
  return r;
}

double equivariance_defect(const HermitianField& h) {
  const auto& grp = h.grid->group;
  double d = 0;
  for (int a = 1; a < grp.order; ++a) {
    const Eigen::MatrixXcd& u = grp.elements[a];
    const auto& perm = grp.permutations[a];
    for (Index p = 0; p < h.grid->num_points(); ++p) {
      Eigen::MatrixXcd pulled = u.transpose() * h.at(perm[p]) * u.conjugate();
      d = std::max(d, (pulled - h.at(p)).cwiseAbs().maxCoeff());
    }
  }
  return d;
}

bool is_constant_coefficient(const HermitianField& h, double tol) {
  const int n = h.dim();
  for (Index p = 1; p < h.grid->num_points(); ++p)
    for (int e = 0; e < n * n; ++e)
      if (std::abs(h.coeffs[p * n * n + e] - h.coeffs[e]) > tol) return false;
  return true;
}

namespace {

Index sub_index(const OrbifoldGrid& g, Index x, Index y) {
  auto cx = g.coords(x);
  auto cy = g.coords(y);
  int out[6];
  for (int d = 0; d < 2 * g.n; ++d) out[d] = cx[d] - cy[d];
  return g.index(out);
}

}  // namespace

double GreenKernel::value(Index x, Index y) const {
  const auto& grp = grid->group;
  double s = 0;
  for (int a = 0; a < grp.order; ++a) s += torus_kernel[sub_index(*grid, x, grp.permutations[a][y])];
  return s - shift;
}

double GreenKernel::row_integral(Index x) const {
  const Index np = grid->num_points();
  double s = 0;
  for (Index y = 0; y < np; ++y) s += value(x, y);
  const double w = det0 / static_cast<double>(np);
  return s * w / grid->group.order;
}

GreenKernel green_kernel(const HermitianField& metric) {
  if (positivity_margin(metric) <= 0)
    throw std::invalid_argument("green_kernel: metric is not positive definite");
  if (!is_constant_coefficient(metric))
    throw std::invalid_argument("green_kernel: variable-coefficient metrics are unsupported");
  const auto grid = metric.grid;
  const int n = grid->n;
  const Index np = grid->num_points();
  Fft& fft = fft_for(grid);
  constexpr double pi = std::numbers::pi;

  GreenKernel kern;
  kern.grid = grid;
  kern.metric0 = metric.at(0);
  kern.det0 = kern.metric0.determinant().real();
  Eigen::MatrixXcd ginv = kern.metric0.inverse();
  const double w = kern.det0 / static_cast<double>(np);

  // Laplacian symbol with the same Nyquist truncation as i_ddbar, inverted
  // away from the mean mode.
  std::vector<Cplx> khat(np, Cplx(0, 0));
  for (Index i = 1; i < np; ++i) {
    if (fft.nyquist(i)) continue;
    auto c = grid->coords(i);
    Cplx tr = 0;
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double kxj = fft.freq(c[2 * j]), kyj = fft.freq(c[2 * j + 1]);
        double kxk = fft.freq(c[2 * k]), kyk = fft.freq(c[2 * k + 1]);
        Cplx sym = -pi * pi * Cplx(kxj, -kyj) * Cplx(kxk, kyk);
        tr += ginv(k, j) * sym;
      }
    // classical orientation: the symbol is negative, so K is positive and
    // peaked at the diagonal, and phi = mean - int K lap(phi)
    double lambda = tr.real();
    if (lambda != 0.0) khat[i] = -1.0 / (w * lambda);
  }
  kern.torus_kernel = fft.inverse_real(khat);

  const auto& grp = grid->group;
  if (grp.is_trivial()) {
    double m = kern.torus_kernel[0];
    for (double v : kern.torus_kernel) m = std::min(m, v);
    kern.shift = m;
  } else {
    if (np > 20000)
      throw std::invalid_argument(
          "green_kernel: pair normalization for non-trivial groups is limited to 20000 points");
    double m = std::numeric_limits<double>::infinity();
    for (Index x = 0; x < np; ++x)
      for (Index y = 0; y < np; ++y) {
        double s = 0;
        for (int a = 0; a < grp.order; ++a)
          s += kern.torus_kernel[sub_index(*grid, x, grp.permutations[a][y])];
        m = std::min(m, s);
      }
    kern.shift = m;
  }
  kern.c1 = kern.row_integral(0);
  return kern;
}

GridField green_riesz_reconstruct(const GreenKernel& kernel, const GridField& phi) {
  const auto grid = kernel.grid;
  HermitianField metric = constant_form(grid, kernel.metric0);
  GridField lap = laplacian(metric, phi);
  Fft& fft = fft_for(grid);

  std::vector<Cplx> khat = fft.forward(kernel.torus_kernel);
  std::vector<Cplx> lhat = fft.forward(lap.values);
  for (Index i = 0; i < khat.size(); ++i) khat[i] *= lhat[i];
  std::vector<double> conv = fft.inverse_real(khat);

  const double v = total_volume(metric);
  const double mean = integrate(phi, metric) / v;
  const double int_lap = integrate(lap, metric);
  const double w = kernel.det0 / static_cast<double>(grid->num_points());
  GridField rec(grid);
  for (Index p = 0; p < rec.size(); ++p) rec[p] = mean - conv[p] * w + kernel.shift * int_lap;
  return rec;
}

}  // namespace orb
