#ifndef ORB_SMOOTHING_HPP
#define ORB_SMOOTHING_HPP

#include "orb/grid.hpp"

namespace orb {

// Smooth one-sided cutoffs built from a numerically stable softplus,
//   softplus_k(x) = log(1 + e^{kx}) / k.
// Both families sit strictly above their limits and converge uniformly:
//   eta_k(x) = softplus_k(x) + 1/k   >= max(0, x),  error <= log(2)/k + 1/k
//   tau_k(x) = softplus_k(x) + 1/k   >= x 1_{x>0} + 1/k, error <= (log 2 + 1)/k

double softplus(double x, int k);
double eta_scalar(double x, int k);
double tau_scalar(double x, int k);

/// Uniform error of softplus_k above max(0, x).
inline double eta_epsilon(int k) { return 0.6931471805599453 / k; }

/// eta_k(v - s) pointwise; smooth, strictly positive majorant of max(0, v-s).
GridField smooth_max_cutoff(const GridField& v, double s, int k);

/// tau_k(x) pointwise; smooth, strictly positive majorant of x 1_{x>0}.
GridField tau_cutoff(const GridField& x, int k);

}  // namespace orb

#endif
