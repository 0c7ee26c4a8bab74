#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "lgdecomp/fixtures.hpp"
#include "lgdecomp/waist_optimizer.hpp"

using namespace lgd;

namespace {

// Linear scan over p using node radii from grid bracketing.
std::optional<int> brute_force_p(int l, double w0, const SubspaceWidths& widths, int dropped, int cap) {
  for (int p = dropped + 2; p <= cap; ++p) {
    const std::vector<double> nodes = radial_nodes({l, p}, BeamWaist(w0));
    const double n1 = nodes[p - 1 - dropped];
    const double n2 = nodes[p - 2 - dropped];
    if (n1 > widths.r_l && 2 * (n1 - n2) <= 1 / widths.f_l) return p;
  }
  return std::nullopt;
}

AzimuthalSpectrum single_mode_spectrum(ModeIndex mode, double w0, int l_max, int n_r, double dr) {
  AzimuthalSpectrum s(l_max, n_r, dr);
  for (int j = 0; j < n_r; ++j) s.at(mode.l, j) = eval_radial(mode, BeamWaist(w0), s.radius(j));
  return s;
}

}  // namespace

TEST_SUITE("waist_optimizer") {
  TEST_CASE("widths of a Gaussian row") {
    const double w0 = 1e-3;
    RadialField g{"g", 0, BeamWaist(w0), {{0, 1.0}}};
    const auto widths = subspace_widths(g.sample(uniform_radii(256, 12.8e-3)));
    REQUIRE(widths);
    // 1 - exp(-2 r^2 / w0^2) = 0.99
    CHECK(std::fabs(widths->r_l - w0 * std::sqrt(std::log(100.0) / 2)) <= 50e-6);
    CHECK(widths->f_l > 0);
    const auto wider = subspace_widths(g.sample(uniform_radii(256, 12.8e-3)), 0.999, 0.95);
    CHECK(wider->r_l > widths->r_l);
  }

  TEST_CASE("widths of a single bright ring") {
    RadialSamples row{2, uniform_radii(64, 6.4e-3), std::vector<Complex>(64, 0.0)};
    row.values[20] = 1.0;
    const auto widths = subspace_widths(row);
    REQUIRE(widths);
    CHECK(widths->r_l == doctest::Approx(row.radii[20]));
    CHECK(widths->l == 2);
  }

  TEST_CASE("widths of an empty row") {
    RadialSamples row{0, uniform_radii(16, 1e-3), std::vector<Complex>(16, 0.0)};
    CHECK_FALSE(subspace_widths(row));
    row.values[3] = 1.0;
    CHECK_THROWS_AS(subspace_widths(row, 0.0), InputError);
    CHECK_THROWS_AS(subspace_widths(row, 0.99, 1.5), InputError);
    row.radii = {1, 2, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17};
    CHECK_THROWS_AS(subspace_widths(row), InputError);
  }

  TEST_CASE("truncation order for a compact smooth subspace") {
    const SubspaceWidths w{0, 0.5e-3, 1e-6};
    CHECK(truncation_p(0, BeamWaist(1e-3), w) == 10);
    CHECK(brute_force_p(0, 1e-3, w, 8, 40) == 10);
  }

  TEST_CASE("unresolvable frequency width") {
    const SubspaceWidths w{0, 0.5e-3, 1e9};
    CHECK_FALSE(truncation_p(0, BeamWaist(1e-3), w));
    CHECK_FALSE(truncation_p(3, BeamWaist(1e-3), {3, 1.0, 1.0}, {8, 64}));
  }

  TEST_CASE("truncation order agrees with a linear scan") {
    for (int l : {0, 3, -12, 40}) {
      for (double r_l : {0.8e-3, 2e-3, 4e-3}) {
        for (double f_l : {50.0, 300.0, 900.0}) {
          const SubspaceWidths w{l, r_l, f_l};
          for (double w0 : {0.6e-3, 1e-3}) {
            CHECK(truncation_p(l, BeamWaist(w0), w, {8, 120}) == brute_force_p(l, w0, w, 8, 120));
          }
        }
      }
    }
  }

  TEST_CASE("effective area table") {
    EffectiveAreaTable t(-4, {8, 30});
    CHECK(t.first_p() == 10);
    CHECK(t.last_p() == 30);
    CHECK(t.at(20).n1 == doctest::Approx(effective_area({4, 20}).n1));
    CHECK_THROWS_AS(t.at(9), InputError);
    CHECK_THROWS_AS(t.at(31), InputError);
    CHECK_THROWS_AS(EffectiveAreaTable(0, {8, 9}), InputError);
    CHECK_THROWS_AS(EffectiveAreaTable(0, {-1, 9}), InputError);
  }

  TEST_CASE("fundamental mode selects its own waist") {
    const AzimuthalSpectrum s = single_mode_spectrum({0, 0}, 1e-3, 2, 256, 50e-6);
    WaistOptions opts;
    const std::vector<double> candidates{0.5e-3, 1e-3, 2e-3};
    const WaistReport r = select_waist(s, candidates, opts);
    REQUIRE(r.selected);
    // Brute force: the candidate with the fewest modes, larger waist on ties.
    const auto widths = spectrum_widths(s, opts);
    double best_w = 0;
    long long best_modes = std::numeric_limits<long long>::max();
    for (double w0 : candidates) {
      long long modes = 0;
      bool ok = true;
      for (std::size_t i = 0; i < widths.size(); ++i) {
        const int l = static_cast<int>(i) - s.l_max;
        int p = opts.truncation.dropped + 2;
        if (widths[i]) {
          const auto bp = brute_force_p(l, w0, *widths[i], 8, 256);
          if (!bp) ok = false;
          p = bp.value_or(0);
        }
        modes += p + 1;
        if (p + 1 > opts.sample_budget) ok = false;
      }
      if (ok && (modes < best_modes || (modes == best_modes && w0 > best_w))) {
        best_modes = modes;
        best_w = w0;
      }
    }
    CHECK(*r.selected == best_w);
    CHECK(*r.selected == 1e-3);
    const auto& chosen = r.candidates[1];
    CHECK(chosen.total_modes == best_modes);
    CHECK(chosen.p_trunc.size() == 5);
  }

  TEST_CASE("empty spectrum selects the largest waist") {
    const AzimuthalSpectrum s(3, 32, 1e-4);
    const WaistReport r = select_waist(s, {0.6e-3, 0.9e-3, 0.7e-3});
    REQUIRE(r.selected);
    CHECK(*r.selected == 0.9e-3);
    for (const auto& c : r.candidates) {
      CHECK(c.feasible);
      CHECK(c.total_modes == 7 * 11);
    }
  }

  TEST_CASE("fine radial grating is infeasible") {
    AzimuthalSpectrum s(0, 256, 50e-6);
    for (int j = 0; j < 256; ++j) {
      const double x = j + 0.5;
      s.at(0, j) = std::cos(2 * std::numbers::pi * x / 5) * std::exp(-std::pow(x / 150, 2));
    }
    const WaistReport r = select_waist(s, {800e-6});
    CHECK_FALSE(r.selected);
    CHECK_FALSE(r.candidates[0].feasible);
    CHECK(r.blocking_subspaces(0, 256) == std::vector<int>{0});
  }

  TEST_CASE("selected candidate respects the budget") {
    const DetectorSpec spec = DetectorSpec::square(128, 50e-6);
    const PolarImage p = render_modes_polar(random_modes(5, 6, 3, 6), BeamWaist(900e-6), spec);
    const AzimuthalSpectrum s = restrict_orders(azimuthal_decompose(p), 10);
    WaistOptions opts;
    opts.sample_budget = 64;
    const WaistReport r = select_waist(s, waist_grid(500e-6, 1500e-6, 100e-6), opts);
    REQUIRE(r.selected);
    const auto widths = spectrum_widths(s, opts);
    for (const auto& c : r.candidates) {
      const WaistCandidate again = evaluate_waist(c.w0, widths, s.l_max, opts);
      CHECK(again.p_trunc == c.p_trunc);
      CHECK(again.feasible == c.feasible);
      if (c.w0 == *r.selected) {
        CHECK(c.feasible);
        CHECK(c.max_required_samples <= 64);
      }
    }
  }

  TEST_CASE("orders beyond the supported range are infeasible") {
    std::vector<std::optional<SubspaceWidths>> widths(2 * 513 + 1);
    widths[0] = SubspaceWidths{-513, 1e-3, 10};
    const WaistCandidate c = evaluate_waist(1e-3, widths, 513);
    CHECK(c.p_trunc[0] == kInfeasibleSubspace);
    CHECK_FALSE(c.feasible);
  }

  TEST_CASE("trend statistic") {
    WaistReport r;
    r.l_max = 0;
    r.candidates = {{1.0, {30}}, {2.0, {20}}, {3.0, {12}}, {4.0, {kInfeasibleSubspace}}};
    CHECK(truncation_trend(r) == doctest::Approx(0.2));
    r.candidates.pop_back();
    CHECK(truncation_trend(r) == doctest::Approx(-1.0));
    r.candidates = {{1.0, {10}}, {2.0, {10}}};
    CHECK(std::isnan(truncation_trend(r)));
    r.candidates.resize(1);
    CHECK(std::isnan(truncation_trend(r)));
  }

  TEST_CASE("waist grid") {
    const auto g = waist_grid();
    CHECK(g.size() == 37);
    CHECK(g.front() == doctest::Approx(600e-6));
    CHECK(g.back() == doctest::Approx(1500e-6));
    CHECK(waist_grid(1e-3, 1e-3, 1e-4).size() == 1);
    CHECK_THROWS_AS(waist_grid(2e-3, 1e-3, 1e-4), InputError);
    CHECK_THROWS_AS(waist_grid(1e-3, 2e-3, 0), InputError);
  }

  TEST_CASE("waist csv") {
    WaistReport r;
    r.l_max = 1;
    r.candidates = {{7.75e-4, {10, 12, kInfeasibleSubspace}, 0, 0, false}};
    std::ostringstream out;
    write_waist_csv(out, r);
    CHECK(out.str() == "w0,l,p_trunc,feasible\n0.000775,-1,10,0\n0.000775,0,12,0\n0.000775,1,-1,0\n");
  }
}
