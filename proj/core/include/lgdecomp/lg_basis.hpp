#pragma once

// Laguerre-Gaussian modes at the beam waist plane.
//
// All high-order evaluation is carried in a scaled/log domain so that
// neither the factorial normalization nor the Laguerre polynomial is ever
// materialized as a plain double. Everything here is a pure function.

#include <vector>

#include "lgdecomp/common.hpp"

namespace lgd {

/// Azimuthal index l and radial index p of one LG basis element.
struct ModeIndex {
  int l = 0;
  int p = 0;

  /// Throws BoundsError when p < 0 or |l|, p exceed max_order.
  void validate(int max_order = kDefaultMaxOrder) const;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
  friend auto operator<=>(const ModeIndex&, const ModeIndex&) = default;
};

/// Gaussian width parameter w0 in meters. Always positive and finite.
class BeamWaist {
 public:
  explicit BeamWaist(double meters);
  double meters() const { return w0_; }

 private:
  double w0_;
};

/// A real number stored as mantissa * 2^exponent. Used where the value
/// itself can leave the double range (high-order Laguerre polynomials).
struct ScaledReal {
  long double mantissa = 0;
  long exponent = 0;

  /// Nearest double; may overflow to +-inf or underflow to 0.
  double to_double() const;
  /// Natural log of |value|; -inf for zero.
  long double log_abs() const;
  int sign() const { return (mantissa > 0) - (mantissa < 0); }
};

/// Generalized Laguerre polynomial L_p^alpha(x) by the three-term
/// recurrence, with running rescaling. Exact for p in {0, 1}.
ScaledReal laguerre_scaled(int p, double alpha, double x,
                           int max_order = kDefaultMaxOrder);

/// L_p^alpha(x) as a double. Overflows to +-inf for extreme arguments;
/// use laguerre_scaled there.
double laguerre(int p, double alpha, double x, int max_order = kDefaultMaxOrder);

/// Radial profile LG_{l,p}(r): normalization, (r*sqrt2/w0)^|l|, Gaussian
/// and Laguerre factors combined in log space.
double eval_radial(ModeIndex mode, BeamWaist w0, double r);

/// Radial profiles LG_{l,p}(r) for every p in [0, p_max], one recurrence
/// pass. Entry p of the result matches eval_radial({l, p}, w0, r).
std::vector<double> eval_radial_all(int l, int p_max, BeamWaist w0, double r);

/// Full field LG_{l,p}(r, theta) = eval_radial * exp(i l theta).
Complex eval_field(ModeIndex mode, BeamWaist w0, double r, double theta);

/// The p zeros of L_p^alpha in increasing order, located by sign-change
/// bracketing on a grid of 32p points in sqrt(x) followed by bisection to
/// full precision. Throws NumericError if the count does not come out
/// as p.
std::vector<double> laguerre_zeros(int p, double alpha);

/// Radii (meters) of the p radial nodes of LG_{l,p}, strictly increasing.
std::vector<double> radial_nodes(ModeIndex mode, BeamWaist w0);

/// The k-th smallest zero (1-based) of L_p^alpha, found by Sturm-count
/// bisection on the Jacobi matrix. O(p) per step, no polynomial values.
double laguerre_zero_sturm(int p, double alpha, int k);

/// Outer part of an LG mode kept after discarding its outermost nodes.
/// Radii are dimensionless (units of w0) and independent of the waist.
struct EffectiveArea {
  double n1 = 0;      // outermost surviving node
  double n2 = 0;      // second outermost surviving node
  int dropped = 0;    // nodes actually removed
  bool degenerate = false;  // fell back to dropped = 0
};

/// Effective area of mode after removing `dropped` outer nodes. When
/// p < dropped + 2 the result falls back to dropped = 0 and is flagged
/// degenerate; p < 2 leaves no pair of nodes and throws InputError.
EffectiveArea effective_area(ModeIndex mode, int dropped = 8);

}  // namespace lgd
