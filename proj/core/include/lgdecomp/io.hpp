#pragma once

// File formats: LG spectrum text files, detector images (PGM and raw
// float64 with a JSON sidecar) and CSV dumps.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "lgdecomp/decompose_reconstruct.hpp"
#include "lgdecomp/polar_grid.hpp"

namespace lgd {

/// Malformed input file; line() is 1-based, 0 when not line-oriented.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line);
  int line() const { return line_; }

 private:
  int line_;
};

// Spectrum files are UTF-8 text: `key=value` header lines, a `l,p,re,im`
// column line, then one record per mode with 17 significant digits.
// Writing, reading and writing again reproduces the bytes exactly.
void write_spectrum(std::ostream& out, const LGSpectrum& spectrum);
LGSpectrum read_spectrum(std::istream& in);
void write_spectrum_file(const std::filesystem::path& path, const LGSpectrum& spectrum);
LGSpectrum read_spectrum_file(const std::filesystem::path& path);

enum class ImageFormat {
  pgm8,     // binary P5, maxval 255, stores |U|
  pgm16,    // binary P5, maxval 65535, stores |U|
  raw_f64,  // little-endian float64, interleaved re/im, JSON sidecar
};

/// .pgm -> pgm16, .raw / .f64 -> raw_f64.
ImageFormat format_for_path(const std::filesystem::path& path);

/// Sidecar path of a raw image: `<path>.json`.
std::filesystem::path sidecar_path(const std::filesystem::path& path);

struct ImageFile {
  CartesianImage image;
  std::optional<double> pitch;  // raw files carry their pitch
};

/// PGM samples are read as real amplitudes (counts, zero phase).
ImageFile read_image(const std::filesystem::path& path);

/// PGM output is |U| scaled so the largest value maps to maxval. Raw output
/// is lossless; `pitch` goes into the sidecar.
void write_image(const std::filesystem::path& path, const CartesianImage& img, ImageFormat format,
                 double pitch = 0);

/// Two columns: l,power.
void write_l_power_csv(std::ostream& out, const std::vector<std::pair<int, double>>& spectrum);

}  // namespace lgd
