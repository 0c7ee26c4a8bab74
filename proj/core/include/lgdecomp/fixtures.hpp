#pragma once

// Synthetic test fields: LG superpositions rendered on a detector, seeded
// random mode mixtures, azimuthal ripple noise and the radial test fields
// used to compare least squares against integral projection.

#include <cstdint>
#include <string>
#include <vector>

#include "lgdecomp/lg_basis.hpp"
#include "lgdecomp/polar_grid.hpp"
#include "lgdecomp/radial_fit.hpp"

namespace lgd {

struct ModeTerm {
  ModeIndex mode;
  Complex amplitude;
};

/// Coherent sum of terms evaluated at the pixel centers of spec.
CartesianImage render_modes(const std::vector<ModeTerm>& terms, BeamWaist w0, const DetectorSpec& spec);

/// The same sum evaluated exactly on the polar grid of spec.
PolarImage render_modes_polar(const std::vector<ModeTerm>& terms, BeamWaist w0, const DetectorSpec& spec);

/// `count` distinct modes with l uniform in [-l_bound, l_bound], p uniform
/// in [0, p_bound] and standard complex normal amplitudes. Deterministic in
/// the seed.
std::vector<ModeTerm> random_modes(std::uint64_t seed, int count, int l_bound, int p_bound);

/// img + amplitude * cos(l theta) inside the annulus
/// [r_inner_frac, 1] * (detector half width), smoothly switched on.
CartesianImage add_azimuthal_ripple(const CartesianImage& img, const DetectorSpec& spec, int l, double amplitude,
                                    double r_inner_frac = 0.5);

/// A purely radial test field in one OAM subspace.
struct RadialField {
  std::string name;
  int l = 0;
  BeamWaist w0{1.0};
  std::vector<std::pair<int, double>> terms;  // (p, amplitude)

  int p_max() const;
  /// Amplitude vector for p = 0 .. p_max().
  SubspaceCoefficients truth() const;
  RadialSamples sample(const std::vector<double>& radii) const;
};

/// Built-in comparison fields: "p8" (p = 8, w0 = 3000 um), "p50" (p = 50,
/// w0 = 1260 um) and "mix" (p = 9, 15, 28 at 1:2:1, w0 = 1700 um), all l = 0.
RadialField comparison_field(const std::string& name);
std::vector<std::string> comparison_field_names();

/// n radii at the centers of n equal bins over (0, r_outer].
std::vector<double> uniform_radii(int n, double r_outer);

}  // namespace lgd
