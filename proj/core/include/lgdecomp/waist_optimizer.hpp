#pragma once

// Beam waist selection from the effective-area truncation conditions.
//
// For each OAM subspace the image occupies a spatial width r_l and a
// radial frequency width f_l. A mode LG_{l,p} is deep enough when its
// effective area covers the subspace,
//     n1 * w0 > r_l,
// and its outer node spacing resolves it,
//     2 (n1 - n2) w0 <= 1 / f_l.
// The truncation order is the smallest such p; the selected waist is the
// feasible candidate with the fewest total modes.

#include <iosfwd>
#include <map>
#include <optional>
#include <vector>

#include "lgdecomp/azimuthal_spectrum.hpp"
#include "lgdecomp/lg_basis.hpp"
#include "lgdecomp/radial_fit.hpp"

namespace lgd {

struct SubspaceWidths {
  int l = 0;
  double r_l = 0;  // meters, radius enclosing the spatial power fraction
  double f_l = 0;  // 1/meters, frequency enclosing the spectral power fraction
};

/// Spatial and frequency widths of one subspace row. Spatial power is
/// weighted by r dr; the frequency width comes from the 4x zero-padded
/// DFT of the row (radii must be uniformly spaced). Returns nullopt for a
/// row without power.
std::optional<SubspaceWidths> subspace_widths(const RadialSamples& row, double power_frac_r = 0.99,
                                              double power_frac_f = 0.95);

struct TruncationOptions {
  int dropped = 8;
  int p_cap = kDefaultMaxOrder;
};

/// Lazily computed effective areas of LG_{|l|, p}, p in [dropped + 2, cap].
/// Dimensionless, so one table serves every waist.
class EffectiveAreaTable {
 public:
  EffectiveAreaTable(int l, TruncationOptions options = {});

  int first_p() const { return options_.dropped + 2; }
  int last_p() const { return options_.p_cap; }
  const EffectiveArea& at(int p);

 private:
  int abs_l_;
  TruncationOptions options_;
  std::map<int, EffectiveArea> areas_;
};

/// Smallest p >= dropped + 2 meeting both conditions, or nullopt when no
/// p up to the cap does (infeasible subspace).
std::optional<int> truncation_p(EffectiveAreaTable& table, BeamWaist w0, const SubspaceWidths& widths);
std::optional<int> truncation_p(int l, BeamWaist w0, const SubspaceWidths& widths, TruncationOptions options = {});

struct WaistOptions {
  int sample_budget = 256;
  double power_frac_r = 0.99;
  double power_frac_f = 0.95;
  // Subspaces holding less than this fraction of the spectrum's power are
  // treated as empty.
  double negligible_power = 1e-6;
  TruncationOptions truncation;
};

inline constexpr int kInfeasibleSubspace = -1;

struct WaistCandidate {
  double w0 = 0;
  std::vector<int> p_trunc;  // index l + l_max; kInfeasibleSubspace when none fits
  int max_required_samples = 0;
  long long total_modes = 0;
  bool feasible = false;
};

struct WaistReport {
  int l_max = 0;
  std::vector<WaistCandidate> candidates;
  std::optional<double> selected;

  /// Subspaces of candidate i that break the sample budget.
  std::vector<int> blocking_subspaces(std::size_t i, int sample_budget) const;
};

/// Per-subspace widths of a spectrum; empty or negligible rows are nullopt.
std::vector<std::optional<SubspaceWidths>> spectrum_widths(const AzimuthalSpectrum& spectrum,
                                                           const WaistOptions& options = {});

/// Truncation orders for one waist given precomputed widths. Empty
/// subspaces take dropped + 2.
WaistCandidate evaluate_waist(double w0, const std::vector<std::optional<SubspaceWidths>>& widths,
                              int l_max, const WaistOptions& options = {});

/// Scores every candidate waist and selects the feasible one with the
/// fewest modes; ties go to the larger waist.
WaistReport select_waist(const AzimuthalSpectrum& spectrum, const std::vector<double>& candidates,
                         const WaistOptions& options = {});

/// Spearman rank correlation between candidate w0 and the mean truncation
/// order over the active subspaces (infeasible ones count as cap + 1).
/// Negative when larger waists need lower orders. NaN with fewer than two
/// candidates or a constant column.
double truncation_trend(const WaistReport& report, const WaistOptions& options = {});

/// Inclusive grid lo, lo + step, ... <= hi.
std::vector<double> waist_grid(double lo = 600e-6, double hi = 1500e-6, double step = 25e-6);

/// CSV with header w0,l,p_trunc,feasible; one row per (candidate, l).
void write_waist_csv(std::ostream& out, const WaistReport& report);

}  // namespace lgd
