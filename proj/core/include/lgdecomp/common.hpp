#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace lgd {

using Complex = std::complex<double>;

/// Upper bound on |l| and p accepted by the basis recurrences.
inline constexpr int kDefaultMaxOrder = 512;

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied something invalid (bad dimensions, ranges, files).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A mode order beyond the configured recurrence limit.
class BoundsError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure inside an algorithm (root bracketing, overflow).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The pipeline could not produce a result (e.g. no feasible waist).
class PipelineError : public Error {
 public:
  using Error::Error;
};

/// Number of worker threads used by parallel loops. 0 means hardware
/// concurrency. Results never depend on this value.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index is visited exactly once; the
/// body must only write state owned by its index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace lgd
