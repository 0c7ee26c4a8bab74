#include "lgdecomp/polar_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lgd {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kEdgeSlack = 1e-9;

}  // namespace

DetectorSpec DetectorSpec::square(int n, double pitch) {
  DetectorSpec spec{n, n, pitch, (n - 1) / 2.0, (n - 1) / 2.0};
  spec.validate();
  return spec;
}

void DetectorSpec::validate() const {
  if (nx < 2 || ny < 2) throw InputError("detector: nx and ny must be >= 2");
  if (!(pitch > 0) || !std::isfinite(pitch)) throw InputError("detector: pitch must be positive");
  if (!std::isfinite(center_x) || !std::isfinite(center_y)) throw InputError("detector: center must be finite");
}

CartesianImage::CartesianImage(int w, int h)
    : width(w), height(h), samples(static_cast<std::size_t>(w) * h) {}

void CartesianImage::validate() const {
  if (width < 1 || height < 1) throw InputError("image: empty dimensions");
  if (samples.size() != static_cast<std::size_t>(width) * height)
    throw InputError("image: sample count does not match width x height");
  for (const Complex& v : samples) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("image: non-finite sample");
  }
}

PolarImage::PolarImage(int rings, int angles, double step)
    : n_r(rings), n_theta(angles), dr(step), samples(static_cast<std::size_t>(rings) * angles) {}

double PolarImage::angle(int k) const { return kTwoPi * k / n_theta; }

GridDimensions grid_dimensions(const DetectorSpec& spec) {
  spec.validate();
  GridDimensions dims;
  dims.n_r = std::min(spec.nx, spec.ny) / 2;
  dims.n_theta = static_cast<int>(std::ceil(kTwoPi * dims.n_r));
  if (dims.n_theta % 2 == 0) ++dims.n_theta;
  return dims;
}

PolarImage to_polar(const CartesianImage& img, const DetectorSpec& spec) {
  const GridDimensions dims = grid_dimensions(spec);
  if (img.width != spec.nx || img.height != spec.ny) {
    std::ostringstream msg;
    msg << "to_polar: image is " << img.width << "x" << img.height << " but detector is " << spec.nx << "x"
        << spec.ny;
    throw InputError(msg.str());
  }
  img.validate();

  PolarImage polar(dims.n_r, dims.n_theta, spec.pitch);
  std::vector<double> cos_t(dims.n_theta), sin_t(dims.n_theta);
  for (int k = 0; k < dims.n_theta; ++k) {
    cos_t[k] = std::cos(polar.angle(k));
    sin_t[k] = std::sin(polar.angle(k));
  }

  const double x_max = spec.nx - 1;
  const double y_max = spec.ny - 1;
  parallel_for(static_cast<std::size_t>(dims.n_r), [&](std::size_t jj) {
    const int j = static_cast<int>(jj);
    const double r_px = polar.radius(j) / spec.pitch;
    for (int k = 0; k < dims.n_theta; ++k) {
      double x = spec.center_x + r_px * cos_t[k];
      double y = spec.center_y + r_px * sin_t[k];
      if (x < -kEdgeSlack || y < -kEdgeSlack || x > x_max + kEdgeSlack || y > y_max + kEdgeSlack) {
        polar.at(j, k) = 0.0;
        continue;
      }
      x = std::clamp(x, 0.0, x_max);
      y = std::clamp(y, 0.0, y_max);
      const int x0 = std::min(static_cast<int>(x), spec.nx - 2);
      const int y0 = std::min(static_cast<int>(y), spec.ny - 2);
      const double fx = x - x0;
      const double fy = y - y0;
      polar.at(j, k) = (1 - fy) * ((1 - fx) * img.at(x0, y0) + fx * img.at(x0 + 1, y0)) +
                       fy * ((1 - fx) * img.at(x0, y0 + 1) + fx * img.at(x0 + 1, y0 + 1));
    }
  });
  return polar;
}

CartesianImage from_polar(const PolarImage& polar, const DetectorSpec& spec) {
  spec.validate();
  if (polar.n_r < 1 || polar.n_theta < 1 || !(polar.dr > 0)) throw InputError("from_polar: empty polar image");
  CartesianImage img(spec.nx, spec.ny);
  const double outer = polar.n_r - 1;

  parallel_for(static_cast<std::size_t>(spec.ny), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < spec.nx; ++x) {
      const double dx = (x - spec.center_x) * spec.pitch;
      const double dy = (y - spec.center_y) * spec.pitch;
      const double u = std::max(0.0, std::hypot(dx, dy) / polar.dr - 0.5);
      if (u > outer + kEdgeSlack) {
        img.at(x, y) = 0.0;
        continue;
      }
      double theta = std::atan2(dy, dx);
      if (theta < 0) theta += kTwoPi;

      const int j0 = polar.n_r == 1 ? 0 : std::min(static_cast<int>(u), polar.n_r - 2);
      const int j1 = polar.n_r == 1 ? 0 : j0 + 1;
      const double fu = polar.n_r == 1 ? 0.0 : std::min(1.0, u - j0);

      const double v = theta / kTwoPi * polar.n_theta;
      const int k0 = static_cast<int>(std::floor(v)) % polar.n_theta;
      const int k1 = (k0 + 1) % polar.n_theta;
      const double fv = v - std::floor(v);

      img.at(x, y) = (1 - fu) * ((1 - fv) * polar.at(j0, k0) + fv * polar.at(j0, k1)) +
                     fu * ((1 - fv) * polar.at(j1, k0) + fv * polar.at(j1, k1));
    }
  });
  return img;
}

}  // namespace lgd
