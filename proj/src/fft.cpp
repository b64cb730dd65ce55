#include "orb/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <stdexcept>

namespace orb {

Fft::Fft(GridPtr grid) : grid_(std::move(grid)), res_(grid_->resolution) {
  const int rank = 2 * grid_->n;
  std::vector<int> dims(rank, res_);
  buf_.resize(grid_->num_points());
  auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
  plan_fwd_ = fftw_plan_dft(rank, dims.data(), data, data, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft(rank, dims.data(), data, data, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_fwd_ || !plan_bwd_) throw std::runtime_error("fftw plan creation failed");
}

Fft::~Fft() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

void Fft::forward() { fftw_execute(static_cast<fftw_plan>(plan_fwd_)); }

void Fft::inverse() {
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  const double inv = 1.0 / static_cast<double>(buf_.size());
  for (auto& c : buf_) c *= inv;
}

std::vector<Cplx> Fft::forward(const std::vector<double>& real_in) {
  if (real_in.size() != buf_.size()) throw std::invalid_argument("fft size mismatch");
  for (Index i = 0; i < buf_.size(); ++i) buf_[i] = real_in[i];
  forward();
  return buf_;
}

std::vector<double> Fft::inverse_real(const std::vector<Cplx>& freq) {
  if (freq.size() != buf_.size()) throw std::invalid_argument("fft size mismatch");
  buf_ = freq;
  inverse();
  std::vector<double> out(buf_.size());
  for (Index i = 0; i < buf_.size(); ++i) out[i] = buf_[i].real();
  return out;
}

bool Fft::nyquist(Index i) const {
  auto c = grid_->coords(i);
  for (int d = 0; d < 2 * grid_->n; ++d)
    if (c[d] == res_ / 2) return true;
  return false;
}

Fft& fft_for(const GridPtr& grid) {
  static std::map<const OrbifoldGrid*, std::unique_ptr<Fft>> cache;
  auto it = cache.find(grid.get());
  if (it == cache.end()) it = cache.emplace(grid.get(), std::make_unique<Fft>(grid)).first;
  return *it->second;
}

}  // namespace orb
