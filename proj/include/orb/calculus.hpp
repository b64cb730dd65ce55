#ifndef ORB_CALCULUS_HPP
#define ORB_CALCULUS_HPP

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "orb/grid.hpp"

namespace orb {

using Cplx = std::complex<double>;

/// n x n Hermitian coefficient matrix per grid point; houses the (1,1)-forms
/// omega_X, chi, omega_hat_t and i ddbar u via their coefficients h_{j kbar}.
struct HermitianField {
  GridPtr grid;
  std::vector<Cplx> coeffs;  // point-major, row-major n x n block per point

  HermitianField() = default;
  explicit HermitianField(GridPtr g);

  int dim() const { return grid->n; }
  Eigen::MatrixXcd at(Index p) const;
  void set(Index p, const Eigen::MatrixXcd& m);
};

HermitianField operator+(const HermitianField& a, const HermitianField& b);
HermitianField operator-(const HermitianField& a, const HermitianField& b);
HermitianField operator*(double s, const HermitianField& a);

/// Constant-coefficient field from a single Hermitian matrix.
HermitianField constant_form(GridPtr grid, const Eigen::MatrixXcd& m);

/// Flat metric c * Id with c = |G|^{1/n}, calibrated so integrate(1, .) = 1.
HermitianField calibrated_flat_metric(GridPtr grid);

/// Spectral i ddbar: coefficient matrix of i ddbar u. Exact on band-limited
/// fields; Nyquist modes are truncated so the output is exactly Hermitian.
HermitianField i_ddbar(const GridField& u);

/// Pointwise determinant (real for Hermitian input).
GridField det_field(const HermitianField& h);

/// Pointwise smallest eigenvalue.
GridField min_eigenvalue_field(const HermitianField& h);

/// min over the grid of the smallest eigenvalue; > 0 means Kahler on the grid.
double positivity_margin(const HermitianField& h);

/// det(base + i ddbar u) / det(reference), pointwise. May be non-positive
/// where base + i ddbar u leaves the positive cone; callers needing the
/// failure set use min_eigenvalue_field on the numerator.
GridField ma_density(const HermitianField& base, const GridField& u,
                     const HermitianField& reference);

/// Orbifold integral of f against det(volume): equal-weight quadrature over
/// the torus divided by the group order.
double integrate(const GridField& f, const HermitianField& volume);

/// integrate(1, h): the total mass of h^n.
double total_volume(const HermitianField& h);

/// Laplacian tr_metric(i ddbar u). Rejects non-positive-definite metrics.
GridField laplacian(const HermitianField& metric, const GridField& u);

/// max over points and group elements of |g^* h - h| (pullback vs conjugation).
double equivariance_defect(const HermitianField& h);

bool is_constant_coefficient(const HermitianField& h, double tol = 1e-12);

/// Green kernel of the Laplacian for a constant-coefficient metric,
/// normalized so that inf over all pairs is 0.
struct GreenKernel {
  GridPtr grid;
  Eigen::MatrixXcd metric0;          // the constant coefficient matrix
  double det0 = 1;                   // det(metric0)
  std::vector<double> torus_kernel;  // mean-zero kernel K_T on the covering torus
  double shift = 0;                  // inf over pairs of the orbit-summed kernel
  double c1 = 0;                     // sup_x of the L1 row norm (constant in x)

  /// G(x, y) = sum_g K_T(x - g y) - shift.
  double value(Index x, Index y) const;
  /// Direct quadrature of the row integral at x (oracle for c1).
  double row_integral(Index x) const;
};

GreenKernel green_kernel(const HermitianField& metric);

/// Green-Riesz right-hand side: mean(phi) - int G(x,y) Lap(phi)(y) omega^n(y),
/// evaluated for all x by FFT convolution. Reproduces band-limited phi.
GridField green_riesz_reconstruct(const GreenKernel& kernel, const GridField& phi);

}  // namespace orb

#endif
