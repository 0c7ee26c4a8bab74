#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "lgdecomp/polar_grid.hpp"

namespace lgd::test {

inline double power(const std::vector<Complex>& v) {
  double s = 0;
  for (const Complex& c : v) s += std::norm(c);
  return s;
}

inline double power(const CartesianImage& img) { return power(img.samples); }

/// ||a - b|| / ||b|| over two equally sized sample vectors.
inline double rel_l2(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double rel_l2(const CartesianImage& a, const CartesianImage& b) { return rel_l2(a.samples, b.samples); }

inline double max_abs(const std::vector<Complex>& v) {
  double m = 0;
  for (const Complex& c : v) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace lgd::test
