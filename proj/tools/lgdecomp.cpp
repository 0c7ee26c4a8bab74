#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lgdecomp/decompose_reconstruct.hpp"
#include "lgdecomp/fixtures.hpp"
#include "lgdecomp/io.hpp"
#include "lgdecomp/lg_filter.hpp"
#include "lgdecomp/radial_fit.hpp"
#include "lgdecomp/waist_optimizer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPipeline = 3;
constexpr const char* kThreadsEnv = "LGDECOMP_THREADS";
constexpr double kDefaultPitch = 50e-6;

struct DetectorOpts {
  std::optional<double> pitch;
  std::optional<double> center_x;
  std::optional<double> center_y;

  void add(CLI::App* cmd) {
    cmd->add_option("--pitch", pitch, "Pixel pitch in meters (default: sidecar value, else 50e-6)");
    cmd->add_option("--center-x", center_x, "Optical axis x in pixels (default: image center)");
    cmd->add_option("--center-y", center_y, "Optical axis y in pixels (default: image center)");
  }

  lgd::DetectorSpec resolve(const lgd::ImageFile& file) const {
    const lgd::CartesianImage& img = file.image;
    lgd::DetectorSpec spec;
    spec.nx = img.width;
    spec.ny = img.height;
    spec.pitch = pitch.value_or(file.pitch.value_or(kDefaultPitch));
    spec.center_x = center_x.value_or((img.width - 1) / 2.0);
    spec.center_y = center_y.value_or((img.height - 1) / 2.0);
    spec.validate();
    return spec;
  }
};

struct FitOpts {
  double azimuthal_fraction = 0.99;
  double width_fraction_r = 0.99;
  double width_fraction_f = 0.95;
  std::optional<double> waist;
  double waist_min = 600e-6;
  double waist_max = 1500e-6;
  double waist_step = 25e-6;
  int sample_budget = 256;
  int dropped = 8;

  void add(CLI::App* cmd, bool allow_forced) {
    cmd->add_option("--azimuthal-fraction", azimuthal_fraction, "Per-ring power fraction for the l truncation");
    cmd->add_option("--width-fraction-r", width_fraction_r, "Power fraction defining the spatial width r_l");
    cmd->add_option("--width-fraction-f", width_fraction_f, "Power fraction defining the frequency width f_l");
    if (allow_forced) cmd->add_option("--waist", waist, "Force the beam waist (meters); skips the scan");
    cmd->add_option("--waist-min", waist_min, "Waist scan start (meters)");
    cmd->add_option("--waist-max", waist_max, "Waist scan end, inclusive (meters)");
    cmd->add_option("--waist-step", waist_step, "Waist scan step (meters)");
    cmd->add_option("--sample-budget", sample_budget, "Maximum radial samples per subspace");
    cmd->add_option("--dropped", dropped, "Outer nodes discarded by the effective area");
  }

  lgd::DecomposeParams params() const {
    lgd::DecomposeParams p;
    p.azimuthal_fraction = azimuthal_fraction;
    p.width_fraction_r = width_fraction_r;
    p.width_fraction_f = width_fraction_f;
    p.forced_waist = waist;
    if (!waist) p.waist_candidates = lgd::waist_grid(waist_min, waist_max, waist_step);
    p.sample_budget = sample_budget;
    p.dropped = dropped;
    p.validate();
    return p;
  }
};

std::string fmt(double v, int digits = 9) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lgd::InputError("cannot open '" + path + "' for writing");
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_image_any(const std::string& path, const lgd::CartesianImage& img, double pitch) {
  lgd::write_image(path, img, lgd::format_for_path(path), pitch);
}

// ---------------------------------------------------------------- decompose

struct DecomposeCmd {
  std::string input, output, waist_csv;
  DetectorOpts det;
  FitOpts fit;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("decompose", "Image -> LG spectrum file");
    cmd->add_option("-i,--input", input, "Input image (.pgm, .raw/.f64 with .json sidecar)")->required();
    cmd->add_option("-o,--output", output, "Spectrum file to write")->required();
    cmd->add_option("--waist-csv", waist_csv, "Also write the waist scan table");
    det.add(cmd);
    fit.add(cmd, true);
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto t0 = std::chrono::steady_clock::now();
    const lgd::DecomposeParams params = fit.params();
    const lgd::ImageFile file = lgd::read_image(input);
    const lgd::DetectorSpec spec = det.resolve(file);
    const lgd::Decomposition d = lgd::decompose(file.image, spec, params);
    lgd::write_spectrum_file(output, d.spectrum);
    if (!waist_csv.empty() && d.waist_report) {
      std::ofstream out = open_out(waist_csv);
      lgd::write_waist_csv(out, *d.waist_report);
    }
    int p_max = 0;
    for (const auto& s : d.spectrum.subspaces) p_max = std::max(p_max, s.p_trunc());
    std::cout << "modes=" << d.spectrum.mode_count() << '\n'
              << "w0=" << fmt(d.spectrum.w0.meters()) << '\n'
              << "waist_forced=" << (params.forced_waist ? 1 : 0) << '\n'
              << "l_max=" << d.spectrum.l_max << '\n'
              << "p_max=" << p_max << '\n'
              << "azimuthal_retained=" << fmt(d.azimuthal_retained) << '\n'
              << "elapsed_s=" << fmt(seconds_since(t0), 4) << '\n';
  }
};

// -------------------------------------------------------------- reconstruct

struct ReconstructCmd {
  std::string input, output, compare, residual;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("reconstruct", "LG spectrum file -> image");
    cmd->add_option("-i,--input", input, "Spectrum file")->required();
    cmd->add_option("-o,--output", output, "Image to write")->required();
    cmd->add_option("--compare", compare, "Original image; prints the fidelity");
    cmd->add_option("--residual", residual, "Residual intensity map (needs --compare)");
    cmd->callback([this] { run(); });
  }

  void run() {
    if (!residual.empty() && compare.empty()) throw lgd::InputError("--residual needs --compare");
    const auto t0 = std::chrono::steady_clock::now();
    const lgd::LGSpectrum spectrum = lgd::read_spectrum_file(input);
    const lgd::DetectorSpec& spec = spectrum.provenance.detector;
    const lgd::CartesianImage img = lgd::reconstruct(spectrum, spec);
    write_image_any(output, img, spec.pitch);
    std::cout << "modes=" << spectrum.mode_count() << '\n';
    if (!compare.empty()) {
      const lgd::ImageFile original = lgd::read_image(compare);
      std::cout << "fidelity=" << fmt(lgd::fidelity(img, original.image).value, 12) << '\n';
      if (!residual.empty()) write_image_any(residual, lgd::residual_map(img, original.image), spec.pitch);
    }
    std::cout << "elapsed_s=" << fmt(seconds_since(t0), 4) << '\n';
  }
};

// ------------------------------------------------------------ analyze-waist

struct AnalyzeWaistCmd {
  std::string input, output;
  DetectorOpts det;
  FitOpts fit;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("analyze-waist", "Truncation order table over a waist scan");
    cmd->add_option("-i,--input", input, "Input image")->required();
    cmd->add_option("-o,--output", output, "CSV report (w0,l,p_trunc,feasible)")->required();
    det.add(cmd);
    fit.add(cmd, false);
    cmd->callback([this] { run(); });
  }

  void run() {
    const lgd::DecomposeParams params = fit.params();
    const lgd::ImageFile file = lgd::read_image(input);
    const lgd::DetectorSpec spec = det.resolve(file);
    const lgd::AzimuthalSpectrum full = lgd::azimuthal_decompose(lgd::to_polar(file.image, spec));
    const lgd::AzimuthalTruncation trunc = lgd::truncation_l(full, params.azimuthal_fraction);

    lgd::WaistOptions opts;
    opts.sample_budget = std::min(params.sample_budget, full.n_r);
    opts.power_frac_r = params.width_fraction_r;
    opts.power_frac_f = params.width_fraction_f;
    opts.truncation.dropped = params.dropped;
    const lgd::WaistReport report =
        lgd::select_waist(lgd::restrict_orders(full, trunc.m_max), params.waist_candidates, opts);
    {
      std::ofstream out = open_out(output);
      lgd::write_waist_csv(out, report);
    }
    std::size_t feasible = 0;
    for (const auto& c : report.candidates) feasible += c.feasible ? 1 : 0;
    std::cout << "l_max=" << report.l_max << '\n'
              << "candidates=" << report.candidates.size() << '\n'
              << "feasible=" << feasible << '\n'
              << "trend_spearman=" << fmt(lgd::truncation_trend(report, opts), 4) << '\n';
    if (!report.selected) {
      std::cout << "selected=none\n";
      throw lgd::PipelineError("no candidate waist fits the sample budget of " +
                               std::to_string(opts.sample_budget));
    }
    std::cout << "selected=" << fmt(*report.selected) << '\n';
  }
};

// --------------------------------------------------------------- compare-fit

struct CompareFitCmd {
  std::string field = "p8", output;
  double r_outer = 12.8e-3;
  int max_samples = 256;
  int l = 0;
  std::optional<double> waist;
  std::vector<std::string> terms;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("compare-fit", "Least squares vs integral projection accuracy");
    cmd->add_option("--field", field, "p8, p50, mix or custom")->check(CLI::IsMember({"p8", "p50", "mix", "custom"}));
    cmd->add_option("-o,--output", output, "CSV output (default stdout)");
    cmd->add_option("--r-outer", r_outer, "Outer sampling radius (meters)");
    cmd->add_option("--max-samples", max_samples, "Largest sample count");
    cmd->add_option("--l", l, "Custom field: azimuthal order");
    cmd->add_option("--waist", waist, "Custom field: beam waist (meters)");
    cmd->add_option("--term", terms, "Custom field: P:AMPLITUDE, repeatable");
    cmd->callback([this] { run(); });
  }

  lgd::RadialField make_field() const {
    if (field != "custom") return lgd::comparison_field(field);
    if (!waist) throw lgd::InputError("custom field needs --waist");
    if (terms.empty()) throw lgd::InputError("custom field needs at least one --term");
    lgd::RadialField f{"custom", l, lgd::BeamWaist(*waist), {}};
    for (const std::string& t : terms) {
      const auto colon = t.find(':');
      if (colon == std::string::npos) throw lgd::InputError("bad --term '" + t + "' (expected P:AMPLITUDE)");
      try {
        f.terms.emplace_back(std::stoi(t.substr(0, colon)), std::stod(t.substr(colon + 1)));
      } catch (const std::exception&) {
        throw lgd::InputError("bad --term '" + t + "' (expected P:AMPLITUDE)");
      }
      lgd::ModeIndex{l, f.terms.back().first}.validate();
    }
    return f;
  }

  void run() {
    if (!(r_outer > 0)) throw lgd::InputError("--r-outer must be positive");
    const lgd::RadialField f = make_field();
    const lgd::SubspaceCoefficients truth = f.truth();
    bool nonzero = false;
    for (const auto& a : truth.amplitudes) nonzero |= std::abs(a) > 0;
    if (!nonzero) throw lgd::InputError("compare-fit: field is identically zero");
    const int p_trunc = f.p_max();
    if (max_samples < p_trunc + 1) throw lgd::InputError("--max-samples below p_trunc + 1");

    std::ofstream file;
    if (!output.empty()) file = open_out(output);
    std::ostream& out = output.empty() ? std::cout : file;
    out << "samples,accuracy_least_squares,accuracy_integral\n";
    for (int n = p_trunc + 1; n <= max_samples; ++n) {
      const lgd::RadialSamples s = f.sample(lgd::uniform_radii(n, r_outer));
      const double ls = lgd::decomposition_accuracy(lgd::fit_radial(s, f.w0, p_trunc), truth);
      const double in = lgd::decomposition_accuracy(lgd::integral_project(s, f.w0, p_trunc), truth);
      out << n << ',' << fmt(ls, 12) << ',' << fmt(in, 12) << '\n';
    }
  }
};

// -------------------------------------------------------------------- filter

struct FilterCmd {
  std::string input, output, before_csv, after_csv;
  bool spectrum_mode = false;
  int band_min = -150, band_max = 150;
  DetectorOpts det;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("filter", "Azimuthal band filter");
    cmd->add_option("-i,--input", input, "Input image (or spectrum file with --spectrum)")->required();
    cmd->add_option("-o,--output", output, "Filtered output")->required();
    cmd->add_option("--band-min", band_min, "Lowest kept l");
    cmd->add_option("--band-max", band_max, "Highest kept l");
    cmd->add_option("--before-csv", before_csv, "l power spectrum before filtering (l,power)");
    cmd->add_option("--after-csv", after_csv, "l power spectrum after filtering (l,power)");
    cmd->add_flag("--spectrum", spectrum_mode, "Filter an LG spectrum file instead of an image");
    det.add(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    const lgd::BandSpec band{band_min, band_max};
    band.validate();
    if (spectrum_mode) {
      if (!before_csv.empty() || !after_csv.empty()) throw lgd::InputError("--before-csv/--after-csv need an image input");
      const auto filtered = lgd::band_filter_spectrum(lgd::read_spectrum_file(input), band);
      for (const auto& w : filtered.warnings) std::cerr << "warning: " << w << '\n';
      lgd::write_spectrum_file(output, filtered.spectrum);
      std::cout << "modes=" << filtered.spectrum.mode_count() << '\n';
      return;
    }
    const lgd::ImageFile file = lgd::read_image(input);
    const lgd::DetectorSpec spec = det.resolve(file);
    const lgd::PolarImage polar = lgd::to_polar(file.image, spec);
    const lgd::AzimuthalSpectrum full = lgd::azimuthal_decompose(polar);
    const auto filtered = lgd::band_filter_spectrum(full, band);
    for (const auto& w : filtered.warnings) std::cerr << "warning: " << w << '\n';
    const lgd::CartesianImage out = lgd::from_polar(lgd::azimuthal_recompose(filtered.spectrum, polar.n_theta), spec);
    write_image_any(output, out, spec.pitch);
    if (!before_csv.empty()) {
      std::ofstream f = open_out(before_csv);
      lgd::write_l_power_csv(f, lgd::l_power_spectrum(full));
    }
    if (!after_csv.empty()) {
      std::ofstream f = open_out(after_csv);
      lgd::write_l_power_csv(f, lgd::l_power_spectrum(filtered.spectrum));
    }
    const double before = lgd::total_power(full), after = lgd::total_power(filtered.spectrum);
    std::cout << "retained_power=" << fmt(before > 0 ? after / before : 1.0, 12) << '\n';
  }
};

// ------------------------------------------------------------------ fidelity

struct FidelityCmd {
  std::string reconstructed, original, residual;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("fidelity", "Intensity-overlap fidelity of two images");
    cmd->add_option("-a,--reconstructed", reconstructed, "Reconstructed image")->required();
    cmd->add_option("-b,--original", original, "Original image")->required();
    cmd->add_option("--residual", residual, "Write the residual intensity map");
    cmd->callback([this] { run(); });
  }

  void run() {
    const lgd::ImageFile a = lgd::read_image(reconstructed);
    const lgd::ImageFile b = lgd::read_image(original);
    std::cout << "fidelity=" << fmt(lgd::fidelity(a.image, b.image).value, 12) << '\n';
    if (!residual.empty()) {
      write_image_any(residual, lgd::residual_map(a.image, b.image), b.pitch.value_or(a.pitch.value_or(kDefaultPitch)));
    }
  }
};

// --------------------------------------------------------------- gen-fixture

struct GenFixtureCmd {
  std::string output;
  int size = 256;
  double pitch = kDefaultPitch;
  double waist = 775e-6;
  std::vector<std::string> modes;
  int random_count = 0;
  int l_bound = 10, p_bound = 10;
  std::uint64_t seed = 1;
  std::optional<int> ripple_l;
  double ripple_amplitude = 0.1;
  double ripple_inner = 0.5;

  void add(CLI::App& app) {
    CLI::App* cmd = app.add_subcommand("gen-fixture", "Render a synthetic LG test image");
    cmd->add_option("-o,--output", output, "Image to write")->required();
    cmd->add_option("--size", size, "Detector width and height in pixels");
    cmd->add_option("--pitch", pitch, "Pixel pitch in meters");
    cmd->add_option("--waist", waist, "Generation waist in meters");
    cmd->add_option("--mode", modes, "L,P[,RE[,IM]] term, repeatable");
    cmd->add_option("--random", random_count, "Add this many random modes");
    cmd->add_option("--l-bound", l_bound, "Random modes: |l| bound");
    cmd->add_option("--p-bound", p_bound, "Random modes: p bound");
    cmd->add_option("--seed", seed, "Random modes: RNG seed");
    cmd->add_option("--ripple-l", ripple_l, "Add an azimuthal cos(l theta) ripple");
    cmd->add_option("--ripple-amplitude", ripple_amplitude, "Ripple amplitude relative to the peak |U|");
    cmd->add_option("--ripple-inner", ripple_inner, "Ripple inner radius as a fraction of the half width");
    cmd->callback([this] { run(); });
  }

  static lgd::ModeTerm parse_mode(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      try {
        std::size_t used = 0;
        v.push_back(std::stod(part, &used));
        if (used != part.size()) throw std::invalid_argument(part);
      } catch (const std::exception&) {
        throw lgd::InputError("bad --mode '" + text + "' (expected L,P[,RE[,IM]])");
      }
    }
    if (v.size() < 2 || v.size() > 4 || v[0] != std::round(v[0]) || v[1] != std::round(v[1]))
      throw lgd::InputError("bad --mode '" + text + "' (expected L,P[,RE[,IM]])");
    const lgd::Complex amp(v.size() > 2 ? v[2] : 1.0, v.size() > 3 ? v[3] : 0.0);
    return {lgd::ModeIndex{static_cast<int>(v[0]), static_cast<int>(v[1])}, amp};
  }

  void run() {
    if (size < 2) throw lgd::InputError("--size must be >= 2");
    if (!(ripple_amplitude >= 0) || !(ripple_inner >= 0 && ripple_inner < 1))
      throw lgd::InputError("ripple amplitude must be >= 0 and inner fraction in [0, 1)");
    std::vector<lgd::ModeTerm> terms;
    for (const auto& m : modes) terms.push_back(parse_mode(m));
    if (random_count > 0) {
      const auto extra = lgd::random_modes(seed, random_count, l_bound, p_bound);
      terms.insert(terms.end(), extra.begin(), extra.end());
    }
    if (terms.empty() && !ripple_l) throw lgd::InputError("gen-fixture: nothing to render (use --mode, --random or --ripple-l)");
    const lgd::DetectorSpec spec = lgd::DetectorSpec::square(size, pitch);
    lgd::CartesianImage img = terms.empty() ? lgd::CartesianImage(size, size)
                                            : lgd::render_modes(terms, lgd::BeamWaist(waist), spec);
    if (ripple_l) {
      double peak = 0;
      for (const auto& v : img.samples) peak = std::max(peak, std::abs(v));
      img = lgd::add_azimuthal_ripple(img, spec, *ripple_l, ripple_amplitude * (peak > 0 ? peak : 1.0), ripple_inner);
    }
    write_image_any(output, img, pitch);
    std::cout << "terms=" << terms.size() << '\n';
  }
};

unsigned threads_from_env() {
  const char* env = std::getenv(kThreadsEnv);
  if (env == nullptr || *env == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw lgd::InputError(std::string(kThreadsEnv) + " must be a non-negative integer");
  return static_cast<unsigned>(v);
}

int report(const char* kind, const std::string& what, int code) {
  std::cerr << "lgdecomp: error kind=" << kind << " exit=" << code << " message=" << what << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laguerre-Gaussian mode decomposition of optical images"};
  app.require_subcommand(1);
  std::optional<unsigned> threads;
  app.add_option("--threads", threads,
                 std::string("Worker threads, 0 = all cores (default: $") + kThreadsEnv + " or 0)");

  DecomposeCmd decompose;
  ReconstructCmd reconstruct;
  AnalyzeWaistCmd analyze;
  CompareFitCmd compare;
  FilterCmd filter;
  FidelityCmd fid;
  GenFixtureCmd gen;
  decompose.add(app);
  reconstruct.add(app);
  analyze.add(app);
  compare.add(app);
  filter.add(app);
  fid.add(app);
  gen.add(app);

  // Runs before any subcommand callback.
  app.parse_complete_callback([&] { lgd::set_thread_count(threads ? *threads : threads_from_env()); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  } catch (const lgd::InputError& e) {
    return report("input", e.what(), kExitConfig);
  } catch (const lgd::PipelineError& e) {
    return report("pipeline", e.what(), kExitPipeline);
  } catch (const lgd::NumericError& e) {
    return report("numeric", e.what(), kExitPipeline);
  } catch (const std::exception& e) {
    return report("internal", e.what(), kExitPipeline);
  }
  return kExitOk;
}
