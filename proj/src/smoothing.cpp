#include "orb/smoothing.hpp"

#include <cmath>
#include <stdexcept>

namespace orb {

double softplus(double x, int k) {
  // stable branches: log(1+e^t) = t + log(1+e^{-t}) for large t
  double t = k * x;
  if (t > 35.0) return x + std::log1p(std::exp(-t)) / k;
  if (t < -35.0) return std::exp(t) / k;
  return std::log1p(std::exp(t)) / k;
}

double eta_scalar(double x, int k) { return softplus(x, k) + 1.0 / k; }
double tau_scalar(double x, int k) { return softplus(x, k) + 1.0 / k; }

GridField smooth_max_cutoff(const GridField& v, double s, int k) {
  if (k < 1) throw std::invalid_argument("smoothing index k must be >= 1");
  GridField r(v.grid);
  for (Index i = 0; i < v.size(); ++i) r[i] = eta_scalar(v[i] - s, k);
  return r;
}

GridField tau_cutoff(const GridField& x, int k) {
  if (k < 1) throw std::invalid_argument("smoothing index k must be >= 1");
  GridField r(x.grid);
  for (Index i = 0; i < x.size(); ++i) r[i] = tau_scalar(x[i], k);
  return r;
}

}  // namespace orb
