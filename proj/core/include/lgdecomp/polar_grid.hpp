#pragma once

// Resampling between the detector's Cartesian pixel grid and the uniform
// (radius x angle) grid the decomposition runs on. Bilinear both ways.

#include <vector>

#include "lgdecomp/common.hpp"

namespace lgd {

struct DetectorSpec {
  int nx = 0;
  int ny = 0;
  double pitch = 0;     // meters per pixel
  double center_x = 0;  // optical axis, pixel coordinates
  double center_y = 0;

  /// Square detector with the optical axis at the geometric center.
  static DetectorSpec square(int n, double pitch);

  void validate() const;
};

/// Complex field sampled on the detector pixels, row-major (y, x).
struct CartesianImage {
  int width = 0;
  int height = 0;
  std::vector<Complex> samples;

  CartesianImage() = default;
  CartesianImage(int w, int h);

  Complex& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  const Complex& at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }

  void validate() const;
};

/// Complex samples on a uniform polar grid. Ring j sits at (j + 1/2) dr,
/// column k at angle 2 pi k / n_theta. Storage is ring-major.
struct PolarImage {
  int n_r = 0;
  int n_theta = 0;
  double dr = 0;
  std::vector<Complex> samples;

  PolarImage() = default;
  PolarImage(int rings, int angles, double step);

  double radius(int j) const { return (j + 0.5) * dr; }
  double angle(int k) const;

  Complex& at(int j, int k) { return samples[static_cast<std::size_t>(j) * n_theta + k]; }
  const Complex& at(int j, int k) const { return samples[static_cast<std::size_t>(j) * n_theta + k]; }
};

struct GridDimensions {
  int n_r = 0;
  int n_theta = 0;
};

/// n_r = min(nx, ny) / 2 and n_theta = ceil(2 pi n_r), bumped to the next
/// odd integer. 512x512 gives (256, 1609).
GridDimensions grid_dimensions(const DetectorSpec& spec);

/// Bilinear samples of img on the polar grid of spec. Points that fall
/// outside the detector are zero.
PolarImage to_polar(const CartesianImage& img, const DetectorSpec& spec);

/// Bilinear interpolation in (r, theta) back onto the detector pixels.
/// Pixels beyond the outermost ring are zero; pixels inside the first
/// ring take the first ring's value.
CartesianImage from_polar(const PolarImage& polar, const DetectorSpec& spec);

}  // namespace lgd
