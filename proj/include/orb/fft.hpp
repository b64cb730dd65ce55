#ifndef ORB_FFT_HPP
#define ORB_FFT_HPP

#include <complex>
#include <vector>

#include "orb/grid.hpp"

namespace orb {

using Cplx = std::complex<double>;

/// Cached FFTW plans for complex transforms on the 2n-dimensional periodic
/// grid. Forward is unnormalized; inverse divides by the point count.
class Fft {
 public:
  explicit Fft(GridPtr grid);
  ~Fft();
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  // in-place on the internal buffer
  std::vector<Cplx>& buffer() { return buf_; }
  void forward();
  void inverse();

  std::vector<Cplx> forward(const std::vector<double>& real_in);
  std::vector<double> inverse_real(const std::vector<Cplx>& freq);

  /// Signed frequency of coordinate c along one axis: c <= m/2 ? c : c - m.
  int freq(int c) const { return c <= res_ / 2 ? c : c - res_; }
  /// True if any axis of frequency-index i sits on the Nyquist mode m/2.
  bool nyquist(Index i) const;

  GridPtr grid() const { return grid_; }

 private:
  GridPtr grid_;
  int res_;
  std::vector<Cplx> buf_;
  void* plan_fwd_;
  void* plan_bwd_;
};

/// Shared per-grid Fft instance (plans are expensive to recreate).
Fft& fft_for(const GridPtr& grid);

}  // namespace orb

#endif
