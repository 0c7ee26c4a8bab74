#pragma once

// Per-ring OAM spectrum B_l(r_j) of a polar image.
//
// Normalization: B_l(r) = (1/2pi) * integral U(r, theta) exp(-i l theta),
// discretized as (1/n_theta) * sum_k. With orthonormal LG modes this makes
// B_l(r) = sum_p A_{l,p} LG_{l,p}(r) hold exactly.

#include <vector>

#include "lgdecomp/common.hpp"
#include "lgdecomp/polar_grid.hpp"

namespace lgd {

struct AzimuthalSpectrum {
  int l_max = 0;
  int n_r = 0;
  double dr = 0;
  std::vector<Complex> coeffs;  // row l + l_max, column ring j

  AzimuthalSpectrum() = default;
  AzimuthalSpectrum(int order, int rings, double step);

  int l_count() const { return 2 * l_max + 1; }
  double radius(int j) const { return (j + 0.5) * dr; }

  Complex& at(int l, int j) { return coeffs[static_cast<std::size_t>(l + l_max) * n_r + j]; }
  const Complex& at(int l, int j) const { return coeffs[static_cast<std::size_t>(l + l_max) * n_r + j]; }
};

/// Normalized DFT over angle at every ring, orders [-l_max, l_max].
/// Requires 2 l_max + 1 <= n_theta.
AzimuthalSpectrum azimuthal_decompose(const PolarImage& polar, int l_max);

/// Full-order decomposition, l_max = (n_theta - 1) / 2.
AzimuthalSpectrum azimuthal_decompose(const PolarImage& polar);

/// polar[j, k] = sum_l B_l(r_j) exp(i l theta_k). Requires
/// n_theta >= 2 l_max + 1.
PolarImage azimuthal_recompose(const AzimuthalSpectrum& spectrum, int n_theta);

struct AzimuthalTruncation {
  std::vector<int> per_ring;  // m(r_j)
  int m_max = 0;
};

/// Smallest m per ring whose band [-m, m] holds `fraction` of the ring's
/// power. Rings without power get m = 0.
AzimuthalTruncation truncation_l(const AzimuthalSpectrum& spectrum, double fraction = 0.99);

/// Copy limited to orders [-l_max, l_max].
AzimuthalSpectrum restrict_orders(const AzimuthalSpectrum& spectrum, int l_max);

/// Sum over rings of |B_l(r_j)|^2 r_j dr for every l in the spectrum.
double total_power(const AzimuthalSpectrum& spectrum);

/// Power within [-m, m] divided by total power (1 for an empty spectrum).
double retained_power_fraction(const AzimuthalSpectrum& spectrum, int m);

}  // namespace lgd
