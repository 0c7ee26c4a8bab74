#pragma once

// Brick-wall band filtering over the azimuthal index l.

#include <string>
#include <utility>
#include <vector>

#include "lgdecomp/azimuthal_spectrum.hpp"
#include "lgdecomp/decompose_reconstruct.hpp"
#include "lgdecomp/polar_grid.hpp"

namespace lgd {

/// Retained band [l_keep_min, l_keep_max], inclusive.
struct BandSpec {
  int l_keep_min = -150;
  int l_keep_max = 150;

  void validate() const;
  bool contains(int l) const { return l >= l_keep_min && l <= l_keep_max; }
};

template <typename Spectrum>
struct Filtered {
  Spectrum spectrum;
  std::vector<std::string> warnings;  // e.g. band clipped to the spectrum range
};

/// Zeroes every coefficient with l outside the band; the rest are copied
/// unchanged.
Filtered<AzimuthalSpectrum> band_filter_spectrum(const AzimuthalSpectrum& spectrum, const BandSpec& band);
Filtered<LGSpectrum> band_filter_spectrum(const LGSpectrum& spectrum, const BandSpec& band);

/// to_polar -> full-order azimuthal spectrum -> band filter -> recompose ->
/// from_polar. No radial fit is involved.
CartesianImage denoise(const CartesianImage& img, const DetectorSpec& spec, const BandSpec& band);

/// Radially integrated power per l: P(l) = sum_j |B_l(r_j)|^2 r_j dr.
std::vector<std::pair<int, double>> l_power_spectrum(const AzimuthalSpectrum& spectrum);

}  // namespace lgd
