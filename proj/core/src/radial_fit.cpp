#include "lgdecomp/radial_fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

namespace lgd {

namespace {

constexpr double kRankThreshold = 1e-10;

Eigen::MatrixXd design_matrix(const RadialSamples& samples, BeamWaist w0, int p_trunc) {
  const auto n = static_cast<Eigen::Index>(samples.radii.size());
  Eigen::MatrixXd m(n, p_trunc + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<double> row = eval_radial_all(samples.l, p_trunc, w0, samples.radii[i]);
    for (int p = 0; p <= p_trunc; ++p) m(i, p) = row[p];
  }
  return m;
}

}  // namespace

void RadialSamples::validate() const {
  if (radii.size() != values.size()) throw InputError("radial samples: radii and values differ in length");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0) || !std::isfinite(radii[i])) throw InputError("radial samples: radii must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) throw InputError("radial samples: radii must be strictly increasing");
    if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag()))
      throw InputError("radial samples: non-finite value");
  }
}

RadialSamples subspace_row(const AzimuthalSpectrum& spectrum, int l) {
  if (std::abs(l) > spectrum.l_max) throw InputError("subspace_row: l outside spectrum");
  RadialSamples row;
  row.l = l;
  row.radii.resize(spectrum.n_r);
  row.values.resize(spectrum.n_r);
  for (int j = 0; j < spectrum.n_r; ++j) {
    row.radii[j] = spectrum.radius(j);
    row.values[j] = spectrum.at(l, j);
  }
  return row;
}

SubspaceCoefficients fit_radial(const RadialSamples& samples, BeamWaist w0, int p_trunc) {
  samples.validate();
  ModeIndex{samples.l, p_trunc}.validate();
  const auto n = static_cast<Eigen::Index>(samples.radii.size());
  if (n < p_trunc + 1) {
    std::ostringstream msg;
    msg << "fit_radial: " << n << " samples cannot determine " << p_trunc + 1 << " coefficients";
    throw InputError(msg.str());
  }

  Eigen::MatrixXd m = design_matrix(samples, w0, p_trunc);
  Eigen::VectorXd col_scale = m.colwise().norm();
  for (Eigen::Index c = 0; c < col_scale.size(); ++c) {
    if (col_scale[c] == 0) col_scale[c] = 1;
  }
  const Eigen::MatrixXd scaled = m * col_scale.cwiseInverse().asDiagonal();

  Eigen::MatrixXd rhs(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    rhs(i, 0) = samples.values[i].real();
    rhs(i, 1) = samples.values[i].imag();
  }

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(kRankThreshold);
  cod.compute(scaled);
  const Eigen::MatrixXd x = cod.solve(rhs);

  SubspaceCoefficients out{samples.l, w0, {}, 0.0, static_cast<int>(cod.rank()), false};
  out.rank_deficient = out.rank < p_trunc + 1;
  out.amplitudes.resize(p_trunc + 1);
  for (int p = 0; p <= p_trunc; ++p) out.amplitudes[p] = Complex(x(p, 0), x(p, 1)) / col_scale[p];

  const double rhs_norm = rhs.norm();
  out.residual = rhs_norm == 0 ? 0.0 : (scaled * x - rhs).norm() / rhs_norm;
  return out;
}

SubspaceCoefficients integral_project(const RadialSamples& samples, BeamWaist w0, int p_trunc) {
  samples.validate();
  ModeIndex{samples.l, p_trunc}.validate();
  const std::size_t n = samples.radii.size();
  SubspaceCoefficients out{samples.l, w0, std::vector<Complex>(p_trunc + 1, 0.0), 0.0, 0, false};
  if (n < 2) return out;

  // Trapezoid weights on the (possibly non-uniform) radii, times r.
  std::vector<double> weight(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double h = samples.radii[i + 1] - samples.radii[i];
    weight[i] += 0.5 * h;
    weight[i + 1] += 0.5 * h;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> basis = eval_radial_all(samples.l, p_trunc, w0, samples.radii[i]);
    const Complex wb = samples.values[i] * (weight[i] * samples.radii[i] * 2 * std::numbers::pi);
    for (int p = 0; p <= p_trunc; ++p) out.amplitudes[p] += wb * basis[p];
  }
  return out;
}

double decomposition_accuracy(const SubspaceCoefficients& coeffs, const SubspaceCoefficients& truth) {
  if (coeffs.l != truth.l) throw InputError("decomposition_accuracy: subspaces differ in l");
  if (coeffs.amplitudes.size() != truth.amplitudes.size())
    throw InputError("decomposition_accuracy: p ranges differ");
  Complex overlap = 0;
  double norm_c = 0, norm_t = 0;
  for (std::size_t p = 0; p < truth.amplitudes.size(); ++p) {
    overlap += coeffs.amplitudes[p] * std::conj(truth.amplitudes[p]);
    norm_c += std::norm(coeffs.amplitudes[p]);
    norm_t += std::norm(truth.amplitudes[p]);
  }
  if (norm_t == 0) throw InputError("decomposition_accuracy: truth has zero norm");
  if (norm_c == 0) return 0.0;
  return std::min(1.0, std::norm(overlap) / (norm_c * norm_t));
}

}  // namespace lgd
