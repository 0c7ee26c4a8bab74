#include "lgdecomp/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace lgd {

namespace {

// Terms regrouped as l -> amplitudes indexed by p.
using Grouped = std::map<int, std::vector<Complex>>;

Grouped group_terms(const std::vector<ModeTerm>& terms) {
  Grouped grouped;
  for (const ModeTerm& t : terms) {
    t.mode.validate();
    auto& amps = grouped[t.mode.l];
    if (static_cast<int>(amps.size()) <= t.mode.p) amps.resize(t.mode.p + 1, 0.0);
    amps[t.mode.p] += t.amplitude;
  }
  return grouped;
}

Complex field_at(const Grouped& grouped, BeamWaist w0, double r, double theta) {
  Complex acc = 0;
  for (const auto& [l, amps] : grouped) {
    const std::vector<double> radial = eval_radial_all(l, static_cast<int>(amps.size()) - 1, w0, r);
    Complex radial_sum = 0;
    for (std::size_t p = 0; p < amps.size(); ++p) radial_sum += amps[p] * radial[p];
    acc += radial_sum * std::polar(1.0, l * theta);
  }
  return acc;
}

}  // namespace

CartesianImage render_modes(const std::vector<ModeTerm>& terms, BeamWaist w0, const DetectorSpec& spec) {
  spec.validate();
  const Grouped grouped = group_terms(terms);
  CartesianImage img(spec.nx, spec.ny);

  // With the center on the half-pixel lattice, (2 dx)^2 + (2 dy)^2 is an
  // integer and identifies the radius exactly, so each distinct radius is
  // evaluated once.
  const double cx2 = 2 * spec.center_x, cy2 = 2 * spec.center_y;
  if (cx2 != std::round(cx2) || cy2 != std::round(cy2)) {
    parallel_for(static_cast<std::size_t>(spec.ny), [&](std::size_t yy) {
      const int y = static_cast<int>(yy);
      for (int x = 0; x < spec.nx; ++x) {
        const double dx = (x - spec.center_x) * spec.pitch;
        const double dy = (y - spec.center_y) * spec.pitch;
        img.at(x, y) = field_at(grouped, w0, std::hypot(dx, dy), std::atan2(dy, dx));
      }
    });
    return img;
  }

  auto key = [&](int x, int y) {
    const long long dx = 2LL * x - std::llround(cx2), dy = 2LL * y - std::llround(cy2);
    return dx * dx + dy * dy;
  };
  std::vector<long long> keys;
  keys.reserve(static_cast<std::size_t>(spec.nx) * spec.ny);
  for (int y = 0; y < spec.ny; ++y) {
    for (int x = 0; x < spec.nx; ++x) keys.push_back(key(x, y));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  // radial[i][g]: radial sum of group g at radius keys[i].
  std::vector<std::vector<Complex>> radial(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) {
    const double r = 0.5 * std::sqrt(static_cast<double>(keys[i])) * spec.pitch;
    auto& row = radial[i];
    row.reserve(grouped.size());
    for (const auto& [l, amps] : grouped) {
      const std::vector<double> basis = eval_radial_all(l, static_cast<int>(amps.size()) - 1, w0, r);
      Complex acc = 0;
      for (std::size_t p = 0; p < amps.size(); ++p) acc += amps[p] * basis[p];
      row.push_back(acc);
    }
  });

  parallel_for(static_cast<std::size_t>(spec.ny), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < spec.nx; ++x) {
      const auto& row = radial[std::lower_bound(keys.begin(), keys.end(), key(x, y)) - keys.begin()];
      const double theta = std::atan2(y - spec.center_y, x - spec.center_x);
      Complex acc = 0;
      std::size_t g = 0;
      for (const auto& entry : grouped) acc += row[g++] * std::polar(1.0, entry.first * theta);
      img.at(x, y) = acc;
    }
  });
  return img;
}

PolarImage render_modes_polar(const std::vector<ModeTerm>& terms, BeamWaist w0, const DetectorSpec& spec) {
  const GridDimensions dims = grid_dimensions(spec);
  const Grouped grouped = group_terms(terms);
  PolarImage polar(dims.n_r, dims.n_theta, spec.pitch);
  parallel_for(static_cast<std::size_t>(dims.n_r), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    for (int k = 0; k < dims.n_theta; ++k) polar.at(j, k) = field_at(grouped, w0, polar.radius(j), polar.angle(k));
  });
  return polar;
}

std::vector<ModeTerm> random_modes(std::uint64_t seed, int count, int l_bound, int p_bound) {
  if (count < 0 || l_bound < 0 || p_bound < 0) throw InputError("random_modes: negative bound");
  const long long available = static_cast<long long>(2 * l_bound + 1) * (p_bound + 1);
  if (count > available) throw InputError("random_modes: more modes requested than the index box holds");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_l(-l_bound, l_bound);
  std::uniform_int_distribution<int> pick_p(0, p_bound);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  std::set<ModeIndex> used;
  std::vector<ModeTerm> terms;
  while (static_cast<int>(terms.size()) < count) {
    const ModeIndex mode{pick_l(rng), pick_p(rng)};
    const double re = gauss(rng);
    const double im = gauss(rng);
    if (!used.insert(mode).second) continue;
    terms.push_back({mode, Complex(re, im)});
  }
  return terms;
}

CartesianImage add_azimuthal_ripple(const CartesianImage& img, const DetectorSpec& spec, int l, double amplitude,
                                    double r_inner_frac) {
  if (img.width != spec.nx || img.height != spec.ny) throw InputError("add_azimuthal_ripple: size mismatch");
  const double half = std::min(spec.nx, spec.ny) / 2.0;
  const double r_in = r_inner_frac * half;
  const double ramp = 0.1 * half;
  CartesianImage out = img;
  for (int y = 0; y < spec.ny; ++y) {
    for (int x = 0; x < spec.nx; ++x) {
      const double dx = x - spec.center_x;
      const double dy = y - spec.center_y;
      const double r = std::hypot(dx, dy);
      if (r < r_in) continue;
      const double t = std::min(1.0, (r - r_in) / ramp);
      const double gate = 0.5 - 0.5 * std::cos(std::numbers::pi * t);
      out.at(x, y) += amplitude * gate * std::cos(l * std::atan2(dy, dx));
    }
  }
  return out;
}

int RadialField::p_max() const {
  int p = 0;
  for (const auto& [pi, a] : terms) p = std::max(p, pi);
  return p;
}

SubspaceCoefficients RadialField::truth() const {
  SubspaceCoefficients t;
  t.l = l;
  t.w0 = w0;
  t.amplitudes.assign(static_cast<std::size_t>(p_max()) + 1, 0.0);
  for (const auto& [p, a] : terms) t.amplitudes[p] += a;
  t.rank = p_max() + 1;
  return t;
}

RadialSamples RadialField::sample(const std::vector<double>& radii) const {
  RadialSamples s;
  s.l = l;
  s.radii = radii;
  s.values.resize(radii.size());
  const int pm = p_max();
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const std::vector<double> basis = eval_radial_all(l, pm, w0, radii[i]);
    Complex acc = 0;
    for (const auto& [p, a] : terms) acc += a * basis[p];
    s.values[i] = acc;
  }
  return s;
}

RadialField comparison_field(const std::string& name) {
  if (name == "p8") return {"p8", 0, BeamWaist(3000e-6), {{8, 1.0}}};
  if (name == "p50") return {"p50", 0, BeamWaist(1260e-6), {{50, 1.0}}};
  if (name == "mix") return {"mix", 0, BeamWaist(1700e-6), {{9, 1.0}, {15, 2.0}, {28, 1.0}}};
  throw InputError("unknown comparison field '" + name + "' (expected p8, p50 or mix)");
}

std::vector<std::string> comparison_field_names() { return {"p8", "p50", "mix"}; }

std::vector<double> uniform_radii(int n, double r_outer) {
  if (n < 1 || !(r_outer > 0)) throw InputError("uniform_radii: need n >= 1 and r_outer > 0");
  std::vector<double> radii(n);
  for (int i = 0; i < n; ++i) radii[i] = (i + 0.5) * r_outer / n;
  return radii;
}

}  // namespace lgd
