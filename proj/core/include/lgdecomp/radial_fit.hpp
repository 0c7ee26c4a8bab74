#pragma once

// Radial coefficients A_{l,p} of one OAM subspace.
//
// fit_radial treats B_l(r_i) = sum_p A_{l,p} LG_{l,p}(r_i) as an
// overdetermined linear system and solves it by least squares; only
// p_trunc + 1 samples are needed. integral_project is the quadrature
// projection it replaces, kept as a comparison baseline.

#include <vector>

#include "lgdecomp/azimuthal_spectrum.hpp"
#include "lgdecomp/lg_basis.hpp"

namespace lgd {

struct RadialSamples {
  int l = 0;
  std::vector<double> radii;  // strictly increasing, > 0
  std::vector<Complex> values;

  void validate() const;
};

/// Row l of an azimuthal spectrum, sampled at every ring.
RadialSamples subspace_row(const AzimuthalSpectrum& spectrum, int l);

struct SubspaceCoefficients {
  int l = 0;
  BeamWaist w0{1.0};
  std::vector<Complex> amplitudes;  // p = 0 .. p_trunc
  double residual = 0;              // relative L2 misfit of the samples
  int rank = 0;
  bool rank_deficient = false;
};

/// Least-squares fit with unit-norm column scaling and a complete
/// orthogonal decomposition (relative rank threshold 1e-10). Rank
/// deficient systems get the minimum-norm solution and the flag set.
SubspaceCoefficients fit_radial(const RadialSamples& samples, BeamWaist w0, int p_trunc);

/// A_{l,p} = 2 pi * integral B_l(r) LG_{l,p}(r) r dr by the trapezoid rule
/// over the given radii.
SubspaceCoefficients integral_project(const RadialSamples& samples, BeamWaist w0, int p_trunc);

/// |<a, b>|^2 / (|a|^2 |b|^2) over the amplitude vectors, which must share
/// l and p range. Throws InputError for a zero-norm truth.
double decomposition_accuracy(const SubspaceCoefficients& coeffs, const SubspaceCoefficients& truth);

}  // namespace lgd
