#pragma once

// Thin FFTW3 wrappers for the complex transforms used by the samplers and
// the singular-integral solver.  Plans are cached per (size, direction)
// and created with FFTW_ESTIMATE so results are bit-deterministic.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

namespace weldlab {

namespace detail {

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache c;
    return c;
  }

  fftw_plan get_1d(std::size_t n, int sign) {
    const Key k{n, 1, sign};
    auto it = plans_.find(k);
    if (it != plans_.end()) return it->second;
    buf_.resize(std::max(buf_.size(), n));
    fftw_plan p = fftw_plan_dft_1d(int(n), reinterpret_cast<fftw_complex*>(buf_.data()),
                                   reinterpret_cast<fftw_complex*>(buf_.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw: 1d plan creation failed");
    plans_.emplace(k, p);
    return p;
  }

  fftw_plan get_2d(std::size_t nx, std::size_t ny, int sign) {
    const Key k{nx, ny, sign};
    auto it = plans_.find(k);
    if (it != plans_.end()) return it->second;
    buf_.resize(std::max(buf_.size(), nx * ny));
    fftw_plan p = fftw_plan_dft_2d(int(nx), int(ny),
                                   reinterpret_cast<fftw_complex*>(buf_.data()),
                                   reinterpret_cast<fftw_complex*>(buf_.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw: 2d plan creation failed");
    plans_.emplace(k, p);
    return p;
  }

 private:
  struct Key {
    std::size_t nx, ny;
    int sign;
    bool operator<(const Key& o) const {
      if (nx != o.nx) return nx < o.nx;
      if (ny != o.ny) return ny < o.ny;
      return sign < o.sign;
    }
  };
  std::map<Key, fftw_plan> plans_;
  std::vector<std::complex<double>> buf_;
};

}  // namespace detail

/** In-place DFT; forward is unnormalized, inverse divides by n. */
inline void fft_1d(std::vector<std::complex<double>>& a, bool inverse = false) {
  if (a.empty()) throw std::invalid_argument("fft_1d: empty input");
  fftw_plan p = detail::PlanCache::instance().get_1d(a.size(),
                                                     inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(a.data()),
                   reinterpret_cast<fftw_complex*>(a.data()));
  if (inverse)
    for (auto& z : a) z /= double(a.size());
}

/** In-place 2D DFT on row-major data [ix*ny + iy]; inverse divides by nx*ny. */
inline void fft_2d(std::vector<std::complex<double>>& a, std::size_t nx, std::size_t ny,
                   bool inverse = false) {
  if (a.size() != nx * ny) throw std::invalid_argument("fft_2d: size mismatch");
  fftw_plan p = detail::PlanCache::instance().get_2d(nx, ny,
                                                     inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(a.data()),
                   reinterpret_cast<fftw_complex*>(a.data()));
  if (inverse)
    for (auto& z : a) z /= double(nx * ny);
}

}  // namespace weldlab
