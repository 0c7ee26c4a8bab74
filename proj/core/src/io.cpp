#include "lgdecomp/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace lgd {

ParseError::ParseError(const std::string& what, int line)
    : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

namespace {

constexpr const char* kFormatTag = "lgspectrum-1";
constexpr const char* kColumns = "l,p,re,im";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text, int line) {
  if (text.empty()) throw ParseError("empty number", line);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || !std::isfinite(v)) throw ParseError("bad number '" + text + "'", line);
  return v;
}

int parse_int(const std::string& text, int line) {
  if (text.empty()) throw ParseError("empty integer", line);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw ParseError("bad integer '" + text + "'", line);
  }
  if (used != text.size()) throw ParseError("bad integer '" + text + "'", line);
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

void write_spectrum(std::ostream& out, const LGSpectrum& spectrum) {
  spectrum.validate();
  const Provenance& p = spectrum.provenance;
  out << "format=" << kFormatTag << '\n'
      << "w0_m=" << fmt_double(spectrum.w0.meters()) << '\n'
      << "l_max=" << spectrum.l_max << '\n'
      << "nx=" << p.detector.nx << '\n'
      << "ny=" << p.detector.ny << '\n'
      << "pitch_m=" << fmt_double(p.detector.pitch) << '\n'
      << "center_x=" << fmt_double(p.detector.center_x) << '\n'
      << "center_y=" << fmt_double(p.detector.center_y) << '\n'
      << "waist_forced=" << (p.waist_forced ? 1 : 0) << '\n'
      << "azimuthal_fraction=" << fmt_double(p.azimuthal_fraction) << '\n'
      << "width_fraction_r=" << fmt_double(p.width_fraction_r) << '\n'
      << "width_fraction_f=" << fmt_double(p.width_fraction_f) << '\n'
      << "sample_budget=" << p.sample_budget << '\n'
      << "dropped=" << p.dropped << '\n'
      << "modes=" << spectrum.mode_count() << '\n'
      << kColumns << '\n';
  for (const SubspaceSpectrum& s : spectrum.subspaces) {
    for (int pi = 0; pi <= s.p_trunc(); ++pi) {
      const Complex a = s.amplitudes[pi];
      out << s.l << ',' << pi << ',' << fmt_double(a.real()) << ',' << fmt_double(a.imag()) << '\n';
    }
  }
}

LGSpectrum read_spectrum(std::istream& in) {
  std::map<std::string, std::pair<std::string, int>> header;
  std::string line;
  int line_no = 0;
  bool columns_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == kColumns) {
      columns_seen = true;
      break;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value header line", line_no);
    header[line.substr(0, eq)] = {line.substr(eq + 1), line_no};
  }
  if (!columns_seen) throw ParseError("missing '" + std::string(kColumns) + "' column line", line_no);

  auto field = [&](const char* key) -> const std::pair<std::string, int>& {
    const auto it = header.find(key);
    if (it == header.end()) throw ParseError(std::string("missing header field '") + key + "'", line_no);
    return it->second;
  };
  auto real_field = [&](const char* key) {
    const auto& [v, ln] = field(key);
    return parse_double(v, ln);
  };
  auto int_field = [&](const char* key) {
    const auto& [v, ln] = field(key);
    return parse_int(v, ln);
  };

  if (field("format").first != kFormatTag) throw ParseError("unsupported format tag", field("format").second);

  LGSpectrum spectrum;
  try {
    spectrum.w0 = BeamWaist(real_field("w0_m"));
  } catch (const InputError& e) {
    throw ParseError(e.what(), field("w0_m").second);
  }
  spectrum.l_max = int_field("l_max");
  if (spectrum.l_max < 0 || spectrum.l_max > kDefaultMaxOrder) throw ParseError("l_max out of range", field("l_max").second);

  Provenance& prov = spectrum.provenance;
  prov.detector.nx = int_field("nx");
  prov.detector.ny = int_field("ny");
  prov.detector.pitch = real_field("pitch_m");
  prov.detector.center_x = real_field("center_x");
  prov.detector.center_y = real_field("center_y");
  try {
    prov.detector.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what(), field("nx").second);
  }
  prov.waist_forced = int_field("waist_forced") != 0;
  prov.azimuthal_fraction = real_field("azimuthal_fraction");
  prov.width_fraction_r = real_field("width_fraction_r");
  prov.width_fraction_f = real_field("width_fraction_f");
  prov.sample_budget = int_field("sample_budget");
  prov.dropped = int_field("dropped");
  const int modes = int_field("modes");

  spectrum.subspaces.resize(static_cast<std::size_t>(2 * spectrum.l_max + 1));
  for (int i = 0; i < static_cast<int>(spectrum.subspaces.size()); ++i) spectrum.subspaces[i].l = i - spectrum.l_max;

  int records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cols = split(line, ',');
    if (cols.size() != 4) throw ParseError("expected 4 comma-separated columns", line_no);
    const int l = parse_int(cols[0], line_no);
    const int p = parse_int(cols[1], line_no);
    const Complex a(parse_double(cols[2], line_no), parse_double(cols[3], line_no));
    if (std::abs(l) > spectrum.l_max) throw ParseError("l outside [-l_max, l_max]", line_no);
    SubspaceSpectrum& s = spectrum.subspaces[static_cast<std::size_t>(l + spectrum.l_max)];
    if (p != static_cast<int>(s.amplitudes.size())) throw ParseError("p values must be contiguous from 0", line_no);
    s.amplitudes.push_back(a);
    ++records;
  }
  if (records != modes) throw ParseError("mode count does not match header", line_no);
  try {
    spectrum.validate();
  } catch (const InputError& e) {
    throw ParseError(e.what(), line_no);
  }
  return spectrum;
}

void write_spectrum_file(const std::filesystem::path& path, const LGSpectrum& spectrum) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  write_spectrum(out, spectrum);
  if (!out) throw InputError("failed writing " + path.string());
}

LGSpectrum read_spectrum_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return read_spectrum(in);
}

ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pgm") return ImageFormat::pgm16;
  if (ext == ".raw" || ext == ".f64") return ImageFormat::raw_f64;
  throw InputError("unknown image extension '" + ext + "' (use .pgm, .raw or .f64)");
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

namespace {

// Next whitespace-delimited PGM header token, skipping '#' comments.
std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok += static_cast<char>(c);
  }
  return tok;
}

ImageFile read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  const std::string magic = pgm_token(in);
  if (magic != "P5" && magic != "P2") throw ParseError("not a PGM file: " + path.string(), 1);
  const int w = parse_int(pgm_token(in), 0);
  const int h = parse_int(pgm_token(in), 0);
  const int maxval = parse_int(pgm_token(in), 0);
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535) throw ParseError("bad PGM header in " + path.string(), 0);

  ImageFile file{CartesianImage(w, h), std::nullopt};
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) file.image.samples[i] = parse_int(pgm_token(in), 0);
    return file;
  }
  const std::size_t bytes = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> buf(n * bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw ParseError("truncated PGM data in " + path.string(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bytes == 1 ? buf[i] : (static_cast<unsigned>(buf[2 * i]) << 8) | buf[2 * i + 1];
    file.image.samples[i] = static_cast<double>(v);
  }
  return file;
}

void write_pgm(const std::filesystem::path& path, const CartesianImage& img, int maxval) {
  double peak = 0;
  for (const Complex& v : img.samples) peak = std::max(peak, std::abs(v));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out << "P5\n" << img.width << ' ' << img.height << '\n' << maxval << '\n';
  std::vector<unsigned char> buf;
  buf.reserve(img.samples.size() * (maxval < 256 ? 1 : 2));
  for (const Complex& v : img.samples) {
    const auto q = static_cast<unsigned>(peak > 0 ? std::lround(std::abs(v) / peak * maxval) : 0);
    if (maxval < 256) {
      buf.push_back(static_cast<unsigned char>(q));
    } else {
      buf.push_back(static_cast<unsigned char>(q >> 8));
      buf.push_back(static_cast<unsigned char>(q & 0xff));
    }
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("failed writing " + path.string());
}

double load_le_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | p[b];
  return std::bit_cast<double>(bits);
}

void store_le_double(double v, unsigned char* p) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    p[b] = static_cast<unsigned char>(bits & 0xff);
    bits >>= 8;
  }
}

ImageFile read_raw(const std::filesystem::path& path) {
  std::ifstream meta_in(sidecar_path(path));
  if (!meta_in) throw InputError("missing sidecar " + sidecar_path(path).string());
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad sidecar JSON: ") + e.what(), 0);
  }
  int w = 0, h = 0;
  bool is_complex = true;
  std::optional<double> pitch;
  try {
    w = meta.at("width").get<int>();
    h = meta.at("height").get<int>();
    is_complex = meta.value("complex", true);
    if (meta.contains("pitch")) pitch = meta.at("pitch").get<double>();
    if (meta.value("dtype", std::string("f64le")) != "f64le") throw ParseError("unsupported dtype", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad sidecar fields: ") + e.what(), 0);
  }
  if (w < 1 || h < 1) throw ParseError("sidecar dimensions must be positive", 0);

  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::size_t per = is_complex ? 2 : 1;
  std::vector<unsigned char> buf(n * per * 8);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size()) throw ParseError("raw file shorter than sidecar says", 0);

  ImageFile file{CartesianImage(w, h), pitch};
  for (std::size_t i = 0; i < n; ++i) {
    const double re = load_le_double(&buf[i * per * 8]);
    const double im = is_complex ? load_le_double(&buf[i * per * 8 + 8]) : 0.0;
    file.image.samples[i] = Complex(re, im);
  }
  file.image.validate();
  return file;
}

void write_raw(const std::filesystem::path& path, const CartesianImage& img, double pitch) {
  std::vector<unsigned char> buf(img.samples.size() * 16);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    store_le_double(img.samples[i].real(), &buf[i * 16]);
    store_le_double(img.samples[i].imag(), &buf[i * 16 + 8]);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw InputError("failed writing " + path.string());

  nlohmann::json meta = {{"width", img.width}, {"height", img.height}, {"complex", true}, {"dtype", "f64le"}};
  if (pitch > 0) meta["pitch"] = pitch;
  std::ofstream meta_out(sidecar_path(path));
  if (!meta_out) throw InputError("cannot open " + sidecar_path(path).string() + " for writing");
  meta_out << meta.dump(2) << '\n';
}

}  // namespace

ImageFile read_image(const std::filesystem::path& path) {
  if (format_for_path(path) == ImageFormat::raw_f64) return read_raw(path);
  return read_pgm(path);
}

void write_image(const std::filesystem::path& path, const CartesianImage& img, ImageFormat format, double pitch) {
  img.validate();
  switch (format) {
    case ImageFormat::pgm8:
      write_pgm(path, img, 255);
      return;
    case ImageFormat::pgm16:
      write_pgm(path, img, 65535);
      return;
    case ImageFormat::raw_f64:
      write_raw(path, img, pitch);
      return;
  }
}

void write_l_power_csv(std::ostream& out, const std::vector<std::pair<int, double>>& spectrum) {
  out << "l,power\n";
  for (const auto& [l, power] : spectrum) out << l << ',' << fmt_double(power) << '\n';
}

}  // namespace lgd
