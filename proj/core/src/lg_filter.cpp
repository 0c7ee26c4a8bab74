#include "lgdecomp/lg_filter.hpp"

#include <sstream>

namespace lgd {

namespace {

std::vector<std::string> clip_warnings(const BandSpec& band, int l_max) {
  std::vector<std::string> warnings;
  if (band.l_keep_min < -l_max || band.l_keep_max > l_max) {
    std::ostringstream msg;
    msg << "band [" << band.l_keep_min << ", " << band.l_keep_max << "] clipped to spectrum range [" << -l_max
        << ", " << l_max << "]";
    warnings.push_back(msg.str());
  }
  return warnings;
}

}  // namespace

void BandSpec::validate() const {
  if (l_keep_min > l_keep_max) throw InputError("band: l_keep_min must not exceed l_keep_max");
}

Filtered<AzimuthalSpectrum> band_filter_spectrum(const AzimuthalSpectrum& spectrum, const BandSpec& band) {
  band.validate();
  Filtered<AzimuthalSpectrum> out{spectrum, clip_warnings(band, spectrum.l_max)};
  for (int l = -spectrum.l_max; l <= spectrum.l_max; ++l) {
    if (band.contains(l)) continue;
    for (int j = 0; j < spectrum.n_r; ++j) out.spectrum.at(l, j) = 0.0;
  }
  return out;
}

Filtered<LGSpectrum> band_filter_spectrum(const LGSpectrum& spectrum, const BandSpec& band) {
  band.validate();
  Filtered<LGSpectrum> out{spectrum, clip_warnings(band, spectrum.l_max)};
  for (SubspaceSpectrum& s : out.spectrum.subspaces) {
    if (band.contains(s.l)) continue;
    for (Complex& a : s.amplitudes) a = 0.0;
  }
  return out;
}

CartesianImage denoise(const CartesianImage& img, const DetectorSpec& spec, const BandSpec& band) {
  band.validate();
  const PolarImage polar = to_polar(img, spec);
  const AzimuthalSpectrum filtered = band_filter_spectrum(azimuthal_decompose(polar), band).spectrum;
  return from_polar(azimuthal_recompose(filtered, polar.n_theta), spec);
}

std::vector<std::pair<int, double>> l_power_spectrum(const AzimuthalSpectrum& spectrum) {
  std::vector<std::pair<int, double>> out;
  out.reserve(spectrum.l_count());
  for (int l = -spectrum.l_max; l <= spectrum.l_max; ++l) {
    double power = 0;
    for (int j = 0; j < spectrum.n_r; ++j) power += std::norm(spectrum.at(l, j)) * spectrum.radius(j);
    out.emplace_back(l, power * spectrum.dr);
  }
  return out;
}

}  // namespace lgd
