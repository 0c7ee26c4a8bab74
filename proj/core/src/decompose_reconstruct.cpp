#include "lgdecomp/decompose_reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lgdecomp/radial_fit.hpp"

namespace lgd {

void DecomposeParams::validate() const {
  auto in_unit = [](double f) { return f > 0 && f <= 1; };
  if (!in_unit(azimuthal_fraction) || !in_unit(width_fraction_r) || !in_unit(width_fraction_f))
    throw InputError("decompose: power fractions must be in (0, 1]");
  if (sample_budget < 1) throw InputError("decompose: sample budget must be >= 1");
  if (dropped < 0) throw InputError("decompose: dropped must be >= 0");
  if (p_cap < dropped + 2 || p_cap > kDefaultMaxOrder) throw InputError("decompose: p cap out of range");
  if (!(negligible_power >= 0) || negligible_power >= 1) throw InputError("decompose: negligible power must be in [0, 1)");
  if (forced_waist) BeamWaist{*forced_waist};
  if (!forced_waist && waist_candidates.empty()) throw InputError("decompose: no waist candidates");
  for (double w : waist_candidates) BeamWaist{w};
  if (forced_orders) {
    if (!forced_waist) throw InputError("decompose: forced orders need a forced waist");
    if (forced_orders->size() % 2 == 0) throw InputError("decompose: forced orders must cover l = -L..L");
    for (int p : *forced_orders) {
      if (p < 0 || p > p_cap) throw InputError("decompose: forced order out of range");
    }
  }
}

std::size_t LGSpectrum::mode_count() const {
  std::size_t n = 0;
  for (const auto& s : subspaces) n += s.amplitudes.size();
  return n;
}

Complex LGSpectrum::amplitude(int l, int p) const {
  if (std::abs(l) > l_max || p < 0) return 0.0;
  const SubspaceSpectrum& s = subspaces[static_cast<std::size_t>(l + l_max)];
  return p < static_cast<int>(s.amplitudes.size()) ? s.amplitudes[p] : Complex(0.0);
}

double LGSpectrum::power() const {
  double total = 0;
  for (const auto& s : subspaces) {
    for (const Complex& a : s.amplitudes) total += std::norm(a);
  }
  return total;
}

void LGSpectrum::validate() const {
  if (l_max < 0) throw InputError("spectrum: l_max must be >= 0");
  if (subspaces.size() != static_cast<std::size_t>(2 * l_max + 1))
    throw InputError("spectrum: expected one subspace per l in [-l_max, l_max]");
  for (int i = 0; i < static_cast<int>(subspaces.size()); ++i) {
    const SubspaceSpectrum& s = subspaces[i];
    if (s.l != i - l_max) throw InputError("spectrum: subspaces out of order");
    if (s.amplitudes.empty()) throw InputError("spectrum: empty subspace");
    ModeIndex{s.l, s.p_trunc()}.validate();
    for (const Complex& a : s.amplitudes) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw InputError("spectrum: non-finite amplitude");
    }
  }
}

namespace {

std::string blocking_message(const WaistCandidate& c, int l_max, int budget) {
  std::ostringstream msg;
  msg << "no feasible beam waist (best candidate w0=" << c.w0 << " m needs " << c.max_required_samples
      << " samples, budget " << budget << "); blocking subspaces l =";
  int shown = 0;
  for (int l = -l_max; l <= l_max; ++l) {
    const int p = c.p_trunc[l + l_max];
    if (p == kInfeasibleSubspace || p + 1 > budget) {
      if (shown++ < 16) msg << ' ' << l;
    }
  }
  if (shown > 16) msg << " ... (" << shown << " total)";
  return msg.str();
}

}  // namespace

Decomposition decompose_spectrum(const AzimuthalSpectrum& full, const DetectorSpec& spec,
                                 const DecomposeParams& params) {
  params.validate();
  Decomposition out;
  out.truncation = truncation_l(full, params.azimuthal_fraction);

  int l_max = out.truncation.m_max;
  if (params.forced_orders) {
    l_max = static_cast<int>(params.forced_orders->size() / 2);
    if (l_max > full.l_max) throw InputError("decompose: forced orders exceed the angular sampling");
  }
  out.azimuthal_retained = retained_power_fraction(full, l_max);
  const AzimuthalSpectrum spectrum = restrict_orders(full, l_max);

  WaistOptions wopts;
  wopts.sample_budget = std::min(params.sample_budget, full.n_r);
  wopts.power_frac_r = params.width_fraction_r;
  wopts.power_frac_f = params.width_fraction_f;
  wopts.negligible_power = params.negligible_power;
  wopts.truncation = {params.dropped, params.p_cap};

  WaistCandidate chosen;
  if (params.forced_orders) {
    chosen.w0 = *params.forced_waist;
    chosen.p_trunc = *params.forced_orders;
    for (int p : chosen.p_trunc) {
      if (p + 1 > full.n_r) throw PipelineError("decompose: forced order needs more samples than rings");
    }
  } else if (params.forced_waist) {
    chosen = evaluate_waist(*params.forced_waist, spectrum_widths(spectrum, wopts), l_max, wopts);
    if (!chosen.feasible) throw PipelineError(blocking_message(chosen, l_max, wopts.sample_budget));
  } else {
    WaistReport report = select_waist(spectrum, params.waist_candidates, wopts);
    if (!report.selected) {
      const auto least_demanding = std::min_element(
          report.candidates.begin(), report.candidates.end(),
          [](const auto& a, const auto& b) { return a.max_required_samples < b.max_required_samples; });
      throw PipelineError(blocking_message(*least_demanding, l_max, wopts.sample_budget));
    }
    for (const WaistCandidate& c : report.candidates) {
      if (c.w0 == *report.selected) chosen = c;
    }
    out.waist_report = std::move(report);
  }

  const BeamWaist w0(chosen.w0);
  LGSpectrum& result = out.spectrum;
  result.w0 = w0;
  result.l_max = l_max;
  result.subspaces.resize(static_cast<std::size_t>(2 * l_max + 1));
  out.residuals.assign(result.subspaces.size(), 0.0);
  parallel_for(result.subspaces.size(), [&](std::size_t i) {
    const int l = static_cast<int>(i) - l_max;
    const SubspaceCoefficients fit = fit_radial(subspace_row(spectrum, l), w0, chosen.p_trunc[i]);
    result.subspaces[i] = SubspaceSpectrum{l, fit.amplitudes};
    out.residuals[i] = fit.residual;
  });

  Provenance& prov = result.provenance;
  prov.detector = spec;
  prov.waist_forced = params.forced_waist.has_value();
  prov.azimuthal_fraction = params.azimuthal_fraction;
  prov.width_fraction_r = params.width_fraction_r;
  prov.width_fraction_f = params.width_fraction_f;
  prov.sample_budget = wopts.sample_budget;
  prov.dropped = params.dropped;
  return out;
}

Decomposition decompose(const CartesianImage& img, const DetectorSpec& spec, const DecomposeParams& params) {
  params.validate();
  return decompose_spectrum(azimuthal_decompose(to_polar(img, spec)), spec, params);
}

PolarImage reconstruct_polar(const LGSpectrum& spectrum, const DetectorSpec& spec) {
  spectrum.validate();
  const GridDimensions dims = grid_dimensions(spec);
  if (dims.n_theta < 2 * spectrum.l_max + 1) throw InputError("reconstruct: detector too small for l_max");

  AzimuthalSpectrum rows(spectrum.l_max, dims.n_r, spec.pitch);
  parallel_for(static_cast<std::size_t>(dims.n_r), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double r = rows.radius(j);
    for (const SubspaceSpectrum& s : spectrum.subspaces) {
      const std::vector<double> radial = eval_radial_all(s.l, s.p_trunc(), spectrum.w0, r);
      Complex acc = 0;
      for (int p = 0; p <= s.p_trunc(); ++p) acc += s.amplitudes[p] * radial[p];
      rows.at(s.l, j) = acc;
    }
  });
  return azimuthal_recompose(rows, dims.n_theta);
}

CartesianImage reconstruct(const LGSpectrum& spectrum, const DetectorSpec& spec) {
  return from_polar(reconstruct_polar(spectrum, spec), spec);
}

namespace {

void check_same_shape(const CartesianImage& a, const CartesianImage& b, const char* what) {
  if (a.width != b.width || a.height != b.height || a.samples.size() != b.samples.size())
    throw InputError(std::string(what) + ": images differ in size");
}

}  // namespace

FidelityScore fidelity(const CartesianImage& reconstructed, const CartesianImage& original) {
  check_same_shape(reconstructed, original, "fidelity");
  double cross = 0, norm_r = 0, norm_o = 0;
  for (std::size_t i = 0; i < original.samples.size(); ++i) {
    const double ir = std::norm(reconstructed.samples[i]);
    const double io = std::norm(original.samples[i]);
    cross += ir * io;
    norm_r += ir * ir;
    norm_o += io * io;
  }
  if (norm_o == 0) throw InputError("fidelity: original image has zero intensity");
  if (norm_r == 0) return {0.0};
  return {std::clamp(cross * cross / (norm_r * norm_o), 0.0, 1.0)};
}

CartesianImage residual_map(const CartesianImage& reconstructed, const CartesianImage& original) {
  check_same_shape(reconstructed, original, "residual_map");
  CartesianImage out(original.width, original.height);
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    out.samples[i] = std::norm(reconstructed.samples[i]) - std::norm(original.samples[i]);
  }
  return out;
}

}  // namespace lgd
