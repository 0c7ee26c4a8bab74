#include "lgdecomp/azimuthal_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fft.hpp"

namespace lgd {

AzimuthalSpectrum::AzimuthalSpectrum(int order, int rings, double step)
    : l_max(order), n_r(rings), dr(step), coeffs(static_cast<std::size_t>(2 * order + 1) * rings) {}

AzimuthalSpectrum azimuthal_decompose(const PolarImage& polar, int l_max) {
  if (l_max < 0 || 2 * l_max + 1 > polar.n_theta) {
    std::ostringstream msg;
    msg << "azimuthal_decompose: l_max=" << l_max << " needs more than n_theta=" << polar.n_theta
        << " angular samples";
    throw InputError(msg.str());
  }
  const int n = polar.n_theta;
  AzimuthalSpectrum spectrum(l_max, polar.n_r, polar.dr);
  const detail::Fft1d fft(n, detail::Fft1d::Direction::forward);
  const double scale = 1.0 / n;

  parallel_for(static_cast<std::size_t>(polar.n_r), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    std::vector<Complex> out(n);
    fft.run(&polar.at(j, 0), out.data());
    for (int l = -l_max; l <= l_max; ++l) {
      spectrum.at(l, j) = out[static_cast<std::size_t>((l % n + n) % n)] * scale;
    }
  });
  return spectrum;
}

AzimuthalSpectrum azimuthal_decompose(const PolarImage& polar) {
  return azimuthal_decompose(polar, (polar.n_theta - 1) / 2);
}

PolarImage azimuthal_recompose(const AzimuthalSpectrum& spectrum, int n_theta) {
  if (n_theta < spectrum.l_count()) {
    throw InputError("azimuthal_recompose: n_theta smaller than 2 l_max + 1");
  }
  PolarImage polar(spectrum.n_r, n_theta, spectrum.dr);
  const detail::Fft1d fft(n_theta, detail::Fft1d::Direction::backward);

  parallel_for(static_cast<std::size_t>(spectrum.n_r), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    std::vector<Complex> in(n_theta, 0.0);
    for (int l = -spectrum.l_max; l <= spectrum.l_max; ++l) {
      in[static_cast<std::size_t>((l % n_theta + n_theta) % n_theta)] = spectrum.at(l, j);
    }
    fft.run(in.data(), &polar.at(j, 0));
  });
  return polar;
}

AzimuthalTruncation truncation_l(const AzimuthalSpectrum& spectrum, double fraction) {
  if (!(fraction > 0) || fraction > 1) throw InputError("truncation_l: fraction must be in (0, 1]");
  AzimuthalTruncation result;
  result.per_ring.assign(spectrum.n_r, 0);

  std::vector<double> cumulative(spectrum.l_max + 1);
  for (int j = 0; j < spectrum.n_r; ++j) {
    double acc = std::norm(spectrum.at(0, j));
    cumulative[0] = acc;
    for (int m = 1; m <= spectrum.l_max; ++m) {
      acc += std::norm(spectrum.at(m, j)) + std::norm(spectrum.at(-m, j));
      cumulative[m] = acc;
    }
    // The threshold uses the same summation order as the cumulative sums,
    // so fraction = 1 lands exactly on the full band.
    const double target = fraction * cumulative[spectrum.l_max];
    int m = 0;
    if (target > 0) {
      while (m < spectrum.l_max && cumulative[m] < target) ++m;
    }
    result.per_ring[j] = m;
    result.m_max = std::max(result.m_max, m);
  }
  return result;
}

AzimuthalSpectrum restrict_orders(const AzimuthalSpectrum& spectrum, int l_max) {
  if (l_max < 0 || l_max > spectrum.l_max) throw InputError("restrict_orders: l_max outside spectrum");
  AzimuthalSpectrum out(l_max, spectrum.n_r, spectrum.dr);
  for (int l = -l_max; l <= l_max; ++l) {
    for (int j = 0; j < spectrum.n_r; ++j) out.at(l, j) = spectrum.at(l, j);
  }
  return out;
}

namespace {

double band_power(const AzimuthalSpectrum& spectrum, int m) {
  double total = 0;
  for (int l = -m; l <= m; ++l) {
    for (int j = 0; j < spectrum.n_r; ++j) total += std::norm(spectrum.at(l, j)) * spectrum.radius(j);
  }
  return total * spectrum.dr;
}

}  // namespace

double total_power(const AzimuthalSpectrum& spectrum) { return band_power(spectrum, spectrum.l_max); }

double retained_power_fraction(const AzimuthalSpectrum& spectrum, int m) {
  const double total = total_power(spectrum);
  if (total == 0) return 1.0;
  return band_power(spectrum, std::clamp(m, 0, spectrum.l_max)) / total;
}

}  // namespace lgd
