#pragma once

// End-to-end pipeline: detector image -> LG spectrum -> image.

#include <optional>
#include <vector>

#include "lgdecomp/azimuthal_spectrum.hpp"
#include "lgdecomp/lg_basis.hpp"
#include "lgdecomp/polar_grid.hpp"
#include "lgdecomp/waist_optimizer.hpp"

namespace lgd {

struct DecomposeParams {
  double azimuthal_fraction = 0.99;
  double width_fraction_r = 0.99;
  double width_fraction_f = 0.95;
  std::vector<double> waist_candidates = waist_grid();
  std::optional<double> forced_waist;
  // Per-l truncation orders for l = -L..L (size 2L + 1). Requires a forced
  // waist; replaces both the azimuthal rule and the truncation-p search.
  std::optional<std::vector<int>> forced_orders;
  int sample_budget = 256;  // clipped to the detector's ring count
  int dropped = 8;
  int p_cap = kDefaultMaxOrder;
  double negligible_power = 1e-6;

  void validate() const;
};

/// Parameters a spectrum was produced with, stored alongside it.
struct Provenance {
  DetectorSpec detector;
  bool waist_forced = false;
  double azimuthal_fraction = 0.99;
  double width_fraction_r = 0.99;
  double width_fraction_f = 0.95;
  int sample_budget = 256;
  int dropped = 8;
};

/// Amplitudes of one OAM subspace for p = 0 .. amplitudes.size() - 1.
struct SubspaceSpectrum {
  int l = 0;
  std::vector<Complex> amplitudes;

  int p_trunc() const { return static_cast<int>(amplitudes.size()) - 1; }
};

struct LGSpectrum {
  BeamWaist w0{1.0};
  int l_max = 0;
  std::vector<SubspaceSpectrum> subspaces;  // ordered by l, one per l in [-l_max, l_max]
  Provenance provenance;

  std::size_t mode_count() const;
  /// A_{l,p}; zero for modes outside the stored range.
  Complex amplitude(int l, int p) const;
  double power() const;
  void validate() const;
};

struct FidelityScore {
  double value = 0;
};

struct Decomposition {
  LGSpectrum spectrum;
  AzimuthalTruncation truncation;      // per-ring orders from the power rule
  double azimuthal_retained = 1;       // power fraction inside [-m_max, m_max]
  std::optional<WaistReport> waist_report;  // absent when the waist was forced
  std::vector<double> residuals;       // per-subspace relative misfit
};

/// to_polar -> azimuthal spectrum -> power-rule truncation -> subspace
/// widths -> waist selection (or forced waist) -> truncation p -> least
/// squares per subspace. Throws PipelineError naming the blocking
/// subspaces when no waist is feasible.
Decomposition decompose(const CartesianImage& img, const DetectorSpec& spec, const DecomposeParams& params = {});

/// Same pipeline from an already computed full-order azimuthal spectrum.
Decomposition decompose_spectrum(const AzimuthalSpectrum& full, const DetectorSpec& spec,
                                 const DecomposeParams& params = {});

/// Coherent sum of the spectrum's modes on the polar grid of spec.
PolarImage reconstruct_polar(const LGSpectrum& spectrum, const DetectorSpec& spec);

/// reconstruct_polar resampled onto the detector pixels.
CartesianImage reconstruct(const LGSpectrum& spectrum, const DetectorSpec& spec);

/// Normalized overlap of the intensities |U|^2 of two images.
FidelityScore fidelity(const CartesianImage& reconstructed, const CartesianImage& original);

/// Per-pixel intensity difference |U_r|^2 - |U_0|^2.
CartesianImage residual_map(const CartesianImage& reconstructed, const CartesianImage& original);

}  // namespace lgd
