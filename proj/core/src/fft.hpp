#pragma once

// Thin RAII wrapper over an FFTW 1-D complex plan of arbitrary length.

#include <fftw3.h>

#include <mutex>

#include "lgdecomp/common.hpp"

namespace lgd::detail {

// FFTW planning is not thread-safe; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft1d {
 public:
  enum class Direction { forward = FFTW_FORWARD, backward = FFTW_BACKWARD };

  Fft1d(int n, Direction dir) : n_(n) {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_complex* in = fftw_alloc_complex(n);
    fftw_complex* out = fftw_alloc_complex(n);
    plan_ = fftw_plan_dft_1d(n, in, out, static_cast<int>(dir), FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan_ == nullptr) throw NumericError("fftw: failed to create plan");
  }

  Fft1d(const Fft1d&) = delete;
  Fft1d& operator=(const Fft1d&) = delete;

  ~Fft1d() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }

  int size() const { return n_; }

  // Unnormalized transform of n values; `in` and `out` must not alias.
  void run(const Complex* in, Complex* out) const {
    fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }

 private:
  int n_;
  fftw_plan plan_;
};

}  // namespace lgd::detail
