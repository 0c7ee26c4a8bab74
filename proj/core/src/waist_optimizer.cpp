#include "lgdecomp/waist_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "fft.hpp"

namespace lgd {

namespace {

// Midpoint cell widths of a radius list.
std::vector<double> cell_widths(const std::vector<double>& radii) {
  const std::size_t n = radii.size();
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  w[0] = radii[1] - radii[0];
  w[n - 1] = radii[n - 1] - radii[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (radii[i + 1] - radii[i - 1]);
  return w;
}

double uniform_step(const std::vector<double>& radii) {
  if (radii.size() < 2) return radii.empty() ? 1.0 : 2 * radii[0];
  const double h = radii[1] - radii[0];
  for (std::size_t i = 2; i < radii.size(); ++i) {
    if (std::fabs((radii[i] - radii[i - 1]) - h) > 1e-6 * h)
      throw InputError("subspace_widths: frequency width needs uniformly spaced radii");
  }
  return h;
}

void check_fraction(double f, const char* what) {
  if (!(f > 0) || f > 1) throw InputError(std::string("subspace_widths: ") + what + " must be in (0, 1]");
}

}  // namespace

std::optional<SubspaceWidths> subspace_widths(const RadialSamples& row, double power_frac_r,
                                              double power_frac_f) {
  row.validate();
  check_fraction(power_frac_r, "spatial fraction");
  check_fraction(power_frac_f, "frequency fraction");
  const std::size_t n = row.radii.size();
  if (n == 0) return std::nullopt;

  const std::vector<double> widths = cell_widths(row.radii);
  std::vector<double> cumulative(n);
  double acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += std::norm(row.values[i]) * row.radii[i] * widths[i];
    cumulative[i] = acc;
  }
  if (acc == 0) return std::nullopt;

  SubspaceWidths out;
  out.l = row.l;
  const double spatial_target = power_frac_r * acc;
  std::size_t i_r = 0;
  while (i_r + 1 < n && cumulative[i_r] < spatial_target) ++i_r;
  out.r_l = row.radii[i_r];

  const double h = uniform_step(row.radii);
  const int padded = static_cast<int>(4 * n);
  std::vector<Complex> in(padded, 0.0), spectrum(padded);
  std::copy(row.values.begin(), row.values.end(), in.begin());
  const detail::Fft1d fft(padded, detail::Fft1d::Direction::forward);
  fft.run(in.data(), spectrum.data());

  double spectral_total = 0;
  for (const Complex& c : spectrum) spectral_total += std::norm(c);
  const double spectral_target = power_frac_f * spectral_total;
  double spectral_acc = std::norm(spectrum[0]);
  int k = 0;
  while (spectral_acc < spectral_target && k < padded / 2) {
    ++k;
    spectral_acc += std::norm(spectrum[k]);
    if (padded - k != k) spectral_acc += std::norm(spectrum[padded - k]);
  }
  out.f_l = std::max(k, 1) / (padded * h);
  return out;
}

EffectiveAreaTable::EffectiveAreaTable(int l, TruncationOptions options)
    : abs_l_(std::abs(l)), options_(options) {
  if (options_.dropped < 0) throw InputError("truncation: dropped must be >= 0");
  if (options_.p_cap < options_.dropped + 2) throw InputError("truncation: p cap below dropped + 2");
}

const EffectiveArea& EffectiveAreaTable::at(int p) {
  if (p < first_p() || p > last_p()) throw InputError("effective area table: p out of range");
  auto it = areas_.find(p);
  if (it == areas_.end()) it = areas_.emplace(p, effective_area(ModeIndex{abs_l_, p}, options_.dropped)).first;
  return it->second;
}

namespace {

// Smallest p in [lo, hi] with pred(p), assuming pred is monotone in p.
template <class Pred>
std::optional<int> first_true(int lo, int hi, Pred pred) {
  if (!pred(hi)) return std::nullopt;
  while (lo < hi) {
    const int mid = lo + (hi - lo) / 2;
    if (pred(mid)) hi = mid;
    else lo = mid + 1;
  }
  return lo;
}

}  // namespace

// n1 grows and n1 - n2 shrinks with p at fixed l, so each condition holds
// on a suffix of the p range and the answer is the later of the two starts.
std::optional<int> truncation_p(EffectiveAreaTable& table, BeamWaist w0, const SubspaceWidths& widths) {
  const double w = w0.meters();
  const double max_spacing = 1.0 / widths.f_l;
  const auto covers = first_true(table.first_p(), table.last_p(),
                                 [&](int p) { return table.at(p).n1 * w > widths.r_l; });
  if (!covers) return std::nullopt;
  const auto resolves = first_true(table.first_p(), table.last_p(), [&](int p) {
    const EffectiveArea& a = table.at(p);
    return 2 * (a.n1 - a.n2) * w <= max_spacing;
  });
  if (!resolves) return std::nullopt;
  return std::max(*covers, *resolves);
}

std::optional<int> truncation_p(int l, BeamWaist w0, const SubspaceWidths& widths, TruncationOptions options) {
  EffectiveAreaTable table(l, options);
  return truncation_p(table, w0, widths);
}

std::vector<int> WaistReport::blocking_subspaces(std::size_t i, int sample_budget) const {
  std::vector<int> out;
  const WaistCandidate& c = candidates.at(i);
  for (int l = -l_max; l <= l_max; ++l) {
    const int p = c.p_trunc[l + l_max];
    if (p == kInfeasibleSubspace || p + 1 > sample_budget) out.push_back(l);
  }
  return out;
}

std::vector<std::optional<SubspaceWidths>> spectrum_widths(const AzimuthalSpectrum& spectrum,
                                                           const WaistOptions& options) {
  const double total = total_power(spectrum);
  std::vector<std::optional<SubspaceWidths>> widths(spectrum.l_count());
  parallel_for(widths.size(), [&](std::size_t i) {
    const int l = static_cast<int>(i) - spectrum.l_max;
    double power = 0;
    for (int j = 0; j < spectrum.n_r; ++j) power += std::norm(spectrum.at(l, j)) * spectrum.radius(j);
    power *= spectrum.dr;
    if (total == 0 || power <= options.negligible_power * total) return;
    widths[i] = subspace_widths(subspace_row(spectrum, l), options.power_frac_r, options.power_frac_f);
  });
  return widths;
}

namespace {

void finish_candidate(WaistCandidate& c, const WaistOptions& options) {
  c.feasible = true;
  c.total_modes = 0;
  c.max_required_samples = 0;
  for (int p : c.p_trunc) {
    if (p == kInfeasibleSubspace) {
      c.feasible = false;
      c.max_required_samples = std::max(c.max_required_samples, options.truncation.p_cap + 2);
      continue;
    }
    c.total_modes += p + 1;
    c.max_required_samples = std::max(c.max_required_samples, p + 1);
  }
  if (c.max_required_samples > options.sample_budget) c.feasible = false;
}

}  // namespace

WaistCandidate evaluate_waist(double w0, const std::vector<std::optional<SubspaceWidths>>& widths, int l_max,
                              const WaistOptions& options) {
  const BeamWaist waist(w0);
  WaistCandidate c;
  c.w0 = w0;
  c.p_trunc.assign(widths.size(), options.truncation.dropped + 2);
  parallel_for(static_cast<std::size_t>(l_max) + 1, [&](std::size_t abs_l) {
    const bool representable = static_cast<int>(abs_l) <= kDefaultMaxOrder;
    std::optional<EffectiveAreaTable> table;
    if (representable) table.emplace(static_cast<int>(abs_l), options.truncation);
    for (int sign : {1, -1}) {
      const int l = sign * static_cast<int>(abs_l);
      if (sign < 0 && l == 0) break;
      const auto& w = widths[l + l_max];
      if (!w) continue;
      c.p_trunc[l + l_max] =
          representable ? truncation_p(*table, waist, *w).value_or(kInfeasibleSubspace) : kInfeasibleSubspace;
    }
  });
  finish_candidate(c, options);
  return c;
}

WaistReport select_waist(const AzimuthalSpectrum& spectrum, const std::vector<double>& candidates,
                         const WaistOptions& options) {
  if (candidates.empty()) throw InputError("select_waist: no candidate waists");
  if (options.sample_budget < 1) throw InputError("select_waist: sample budget must be >= 1");
  std::vector<BeamWaist> waists;
  for (double w : candidates) waists.emplace_back(w);

  const auto widths = spectrum_widths(spectrum, options);
  WaistReport report;
  report.l_max = spectrum.l_max;
  report.candidates.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    report.candidates[c].w0 = candidates[c];
    report.candidates[c].p_trunc.assign(widths.size(), options.truncation.dropped + 2);
  }

  // One effective-area table per |l| serves all candidates and both signs.
  // Subspaces beyond the supported order cannot be represented at all.
  parallel_for(static_cast<std::size_t>(spectrum.l_max) + 1, [&](std::size_t abs_l) {
    const bool representable = static_cast<int>(abs_l) <= kDefaultMaxOrder;
    std::optional<EffectiveAreaTable> table;
    if (representable) table.emplace(static_cast<int>(abs_l), options.truncation);
    for (int sign : {1, -1}) {
      const int l = sign * static_cast<int>(abs_l);
      if (sign < 0 && l == 0) break;
      const auto& w = widths[l + spectrum.l_max];
      if (!w) continue;
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        report.candidates[c].p_trunc[l + spectrum.l_max] =
            representable ? truncation_p(*table, waists[c], *w).value_or(kInfeasibleSubspace) : kInfeasibleSubspace;
      }
    }
  });

  const WaistCandidate* best = nullptr;
  for (WaistCandidate& c : report.candidates) {
    finish_candidate(c, options);
    if (!c.feasible) continue;
    if (best == nullptr || c.total_modes < best->total_modes ||
        (c.total_modes == best->total_modes && c.w0 > best->w0)) {
      best = &c;
    }
  }
  if (best != nullptr) report.selected = best->w0;
  return report;
}

namespace {

// Ranks 1..n with ties sharing their average rank.
std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = 0.5 * static_cast<double>(i + j) + 1;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double truncation_trend(const WaistReport& report, const WaistOptions& options) {
  const std::size_t n = report.candidates.size();
  if (n < 2) return std::nan("");
  std::vector<double> w(n), mean_p(n);
  for (std::size_t c = 0; c < n; ++c) {
    w[c] = report.candidates[c].w0;
    double sum = 0;
    for (int p : report.candidates[c].p_trunc) sum += p == kInfeasibleSubspace ? options.truncation.p_cap + 1 : p;
    mean_p[c] = sum / static_cast<double>(report.candidates[c].p_trunc.size());
  }
  const std::vector<double> rw = average_ranks(w), rp = average_ranks(mean_p);
  const double mean_rank = 0.5 * static_cast<double>(n + 1);
  double cov = 0, vw = 0, vp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cov += (rw[i] - mean_rank) * (rp[i] - mean_rank);
    vw += (rw[i] - mean_rank) * (rw[i] - mean_rank);
    vp += (rp[i] - mean_rank) * (rp[i] - mean_rank);
  }
  if (vw == 0 || vp == 0) return std::nan("");
  return cov / std::sqrt(vw * vp);
}

std::vector<double> waist_grid(double lo, double hi, double step) {
  if (!(lo > 0) || !(hi >= lo) || !(step > 0)) throw InputError("waist_grid: need 0 < lo <= hi and step > 0");
  std::vector<double> grid;
  for (int i = 0;; ++i) {
    const double w = lo + i * step;
    if (w > hi + 1e-9 * step) break;
    grid.push_back(w);
  }
  return grid;
}

void write_waist_csv(std::ostream& out, const WaistReport& report) {
  out << "w0,l,p_trunc,feasible\n";
  char buf[64];
  for (const WaistCandidate& c : report.candidates) {
    std::snprintf(buf, sizeof buf, "%.9g", c.w0);
    for (int l = -report.l_max; l <= report.l_max; ++l) {
      out << buf << ',' << l << ',' << c.p_trunc[l + report.l_max] << ',' << (c.feasible ? 1 : 0) << '\n';
    }
  }
}

}  // namespace lgd
