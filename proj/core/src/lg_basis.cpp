#include "lgdecomp/lg_basis.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <utility>
#include <vector>

namespace lgd {

namespace {

constexpr long double kRescaleHigh = 0x1p512L;

void check_laguerre_args(int p, double alpha, double x, int max_order) {
  if (p < 0 || p > max_order) {
    std::ostringstream msg;
    msg << "laguerre: order p=" << p << " outside [0, " << max_order << "]";
    throw BoundsError(msg.str());
  }
  if (!(alpha >= 0) || !std::isfinite(alpha)) throw InputError("laguerre: alpha must be finite and >= 0");
  if (!(x >= 0) || !std::isfinite(x)) throw InputError("laguerre: x must be finite and >= 0");
}

// Moves the common binary exponent of (a, b) into `exponent` once the
// larger magnitude leaves [2^-512, 2^512].
void rescale(long double& a, long double& b, long& exponent) {
  const long double big = std::max(std::fabs(a), std::fabs(b));
  if (big == 0) return;
  if (big > kRescaleHigh || big < 1 / kRescaleHigh) {
    int e = 0;
    std::frexp(big, &e);
    a = std::ldexp(a, -e);
    b = std::ldexp(b, -e);
    exponent += e;
  }
}

// Log of the normalization sqrt(2 p! / (pi (p+|l|)!)).
long double log_norm(int p, int abs_l) {
  const long double ln2 = std::log(2.0L);
  const long double lnpi = std::log(std::numbers::pi_v<long double>);
  return 0.5L * (ln2 - lnpi + std::lgamma(static_cast<long double>(p) + 1) -
                 std::lgamma(static_cast<long double>(p + abs_l) + 1));
}

// Log of the mode-independent part: (1/w0) (r sqrt2/w0)^|l| exp(-r^2/w0^2).
long double log_envelope(int abs_l, double w0, double r) {
  const long double s = static_cast<long double>(r) / w0;
  long double out = -std::log(static_cast<long double>(w0)) - s * s;
  if (abs_l != 0) out += abs_l * std::log(s * std::sqrt(2.0L));
  return out;
}

double combine(long double log_rest, const ScaledReal& lag) {
  if (lag.mantissa == 0) return 0.0;
  const long double total = log_rest + lag.log_abs();
  return static_cast<double>(lag.sign() * std::exp(total));
}

// Upper bound on the largest zero of L_p^alpha (Gershgorin on the Jacobi
// matrix).
double zero_upper_bound(int p, double alpha) {
  const double k = p - 1;
  return 2 * k + alpha + 1 + 2 * std::sqrt(k * (k + alpha)) + 1;
}

std::string mode_label(int p, double alpha) {
  std::ostringstream s;
  s << "(|l|=" << alpha << ", p=" << p << ")";
  return s.str();
}

}  // namespace

void ModeIndex::validate(int max_order) const {
  if (p < 0) throw BoundsError("mode index: p must be >= 0");
  if (p > max_order || std::abs(l) > max_order) {
    std::ostringstream msg;
    msg << "mode index (l=" << l << ", p=" << p << ") exceeds max order " << max_order;
    throw BoundsError(msg.str());
  }
}

BeamWaist::BeamWaist(double meters) : w0_(meters) {
  if (!(meters > 0) || !std::isfinite(meters)) throw InputError("beam waist must be positive and finite");
}

double ScaledReal::to_double() const {
  return static_cast<double>(std::ldexp(mantissa, static_cast<int>(exponent)));
}

long double ScaledReal::log_abs() const {
  if (mantissa == 0) return -std::numeric_limits<long double>::infinity();
  return std::log(std::fabs(mantissa)) + exponent * std::log(2.0L);
}

ScaledReal laguerre_scaled(int p, double alpha, double x, int max_order) {
  check_laguerre_args(p, alpha, x, max_order);
  if (p == 0) return {1, 0};
  const long double a = alpha;
  const long double xl = x;
  long double prev = 1;
  long double cur = 1 + a - xl;
  long exponent = 0;
  for (int k = 1; k < p; ++k) {
    const long double next = ((2 * k + 1 + a - xl) * cur - (k + a) * prev) / (k + 1);
    prev = cur;
    cur = next;
    rescale(cur, prev, exponent);
  }
  return {cur, exponent};
}

double laguerre(int p, double alpha, double x, int max_order) {
  return laguerre_scaled(p, alpha, x, max_order).to_double();
}

double eval_radial(ModeIndex mode, BeamWaist w0, double r) {
  mode.validate();
  if (!(r >= 0) || !std::isfinite(r)) throw InputError("eval_radial: r must be finite and >= 0");
  const int abs_l = std::abs(mode.l);
  if (r == 0 && abs_l != 0) return 0.0;
  const double s = r / w0.meters();
  const ScaledReal lag = laguerre_scaled(mode.p, abs_l, 2 * s * s);
  return combine(log_norm(mode.p, abs_l) + log_envelope(abs_l, w0.meters(), r), lag);
}

// Runs the orthonormal form of the recurrence,
//   q_{k+1} = ((2k+1+a-x) q_k - sqrt(k(k+a)) q_{k-1}) / sqrt((k+1)(k+1+a)),
// on q_k = N_k * envelope * L_k^a(x), so each order costs no special
// functions. The starting value is split into mantissa * 2^exponent.
std::vector<double> eval_radial_all(int l, int p_max, BeamWaist w0, double r) {
  ModeIndex{l, p_max}.validate();
  if (!(r >= 0) || !std::isfinite(r)) throw InputError("eval_radial_all: r must be finite and >= 0");
  const int abs_l = std::abs(l);
  std::vector<double> out(static_cast<std::size_t>(p_max) + 1, 0.0);
  if (r == 0 && abs_l != 0) return out;

  const double s = r / w0.meters();
  const long double x = 2.0L * s * s;
  const long double a = abs_l;
  const long double ln2 = std::log(2.0L);
  const long double log_start = log_envelope(abs_l, w0.meters(), r) + log_norm(0, abs_l);
  long exponent = static_cast<long>(std::floor(log_start / ln2));
  long double cur = std::exp(log_start - exponent * ln2);
  long double prev = 0;

  // Coefficient pairs depend only on (k, |l|); reused across calls.
  thread_local std::vector<std::vector<std::pair<long double, long double>>> cache;
  if (static_cast<int>(cache.size()) <= abs_l) cache.resize(abs_l + 1);
  auto& coef = cache[abs_l];
  for (int k = static_cast<int>(coef.size()); k < p_max; ++k) {
    const long double kk = k;
    coef.emplace_back(std::sqrt(kk * (kk + a)), 1 / std::sqrt((kk + 1) * (kk + 1 + a)));
  }

  auto emit = [&](int k) {
    const long e = exponent;
    if (e < -20000) return;  // far below the double range
    out[k] = static_cast<double>(std::ldexp(cur, static_cast<int>(std::min(e, 20000L))));
  };
  emit(0);
  for (int k = 0; k < p_max; ++k) {
    const long double next = ((2 * k + 1 + a - x) * cur - coef[k].first * prev) * coef[k].second;
    prev = cur;
    cur = next;
    rescale(cur, prev, exponent);
    emit(k + 1);
  }
  return out;
}

Complex eval_field(ModeIndex mode, BeamWaist w0, double r, double theta) {
  return eval_radial(mode, w0, r) * std::polar(1.0, mode.l * theta);
}

std::vector<double> laguerre_zeros(int p, double alpha) {
  check_laguerre_args(p, alpha, 0.0, kDefaultMaxOrder);
  std::vector<double> zeros;
  if (p == 0) return zeros;

  const double s_top = std::sqrt(zero_upper_bound(p, alpha) / 2);
  auto value = [&](double s) { return laguerre_scaled(p, alpha, 2 * s * s); };

  // Magnitude ratio |num| / |den| below 1e-10, compared in log space.
  const long double log_tol = std::log(1e-10L);
  auto small_relative_to = [&](const ScaledReal& num, const ScaledReal& a, const ScaledReal& b) {
    if (num.mantissa == 0) return true;
    return num.log_abs() - std::max(a.log_abs(), b.log_abs()) < log_tol;
  };

  for (int refine = 1; refine <= 64; refine *= 4) {
    zeros.clear();
    const int n = 32 * p * refine;
    const double h = s_top / n;
    double s_prev = 0.0;
    ScaledReal v_prev = value(0.0);
    for (int i = 1; i <= n; ++i) {
      const double s_i = (i == n) ? s_top : h * i;
      const ScaledReal v_i = value(s_i);
      if (v_i.sign() == 0) {
        zeros.push_back(2 * s_i * s_i);
      } else if (v_prev.sign() != 0 && v_i.sign() != v_prev.sign()) {
        double lo = s_prev, hi = s_i;
        const int sign_lo = v_prev.sign();
        ScaledReal v_mid = v_prev;
        double mid = lo;
        for (int it = 0; it < 200; ++it) {
          mid = 0.5 * (lo + hi);
          if (mid <= lo || mid >= hi) break;
          v_mid = value(mid);
          if (v_mid.sign() == 0) break;
          if (v_mid.sign() == sign_lo) lo = mid; else hi = mid;
        }
        if (!small_relative_to(v_mid, v_prev, v_i)) {
          throw NumericError("laguerre_zeros: root failed verification for " + mode_label(p, alpha));
        }
        zeros.push_back(2 * mid * mid);
      }
      s_prev = s_i;
      v_prev = v_i;
    }
    if (static_cast<int>(zeros.size()) == p) return zeros;
  }
  throw NumericError("laguerre_zeros: root bracketing failed for " + mode_label(p, alpha));
}

std::vector<double> radial_nodes(ModeIndex mode, BeamWaist w0) {
  mode.validate();
  std::vector<double> nodes = laguerre_zeros(mode.p, std::abs(mode.l));
  for (double& x : nodes) x = w0.meters() * std::sqrt(x / 2);
  return nodes;
}

double laguerre_zero_sturm(int p, double alpha, int k) {
  check_laguerre_args(p, alpha, 0.0, kDefaultMaxOrder);
  if (k < 1 || k > p) throw InputError("laguerre_zero_sturm: zero index out of range");

  // Number of Jacobi-matrix eigenvalues strictly below x.
  auto count_below = [&](double x) {
    int count = 0;
    double d = 0;
    for (int i = 0; i < p; ++i) {
      const double diag = 2.0 * i + alpha + 1 - x;
      d = (i == 0) ? diag : diag - (i * (i + alpha)) / d;
      if (d == 0) d = -std::numeric_limits<double>::epsilon() * (std::fabs(x) + 1);
      if (d < 0) ++count;
    }
    return count;
  };

  double lo = 0.0;
  double hi = zero_upper_bound(p, alpha) + 1;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (count_below(mid) >= k) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

EffectiveArea effective_area(ModeIndex mode, int dropped) {
  mode.validate();
  if (dropped < 0) throw InputError("effective_area: dropped must be >= 0");
  EffectiveArea area;
  area.dropped = dropped;
  if (mode.p < dropped + 2) {
    if (mode.p < 2) {
      std::ostringstream msg;
      msg << "effective_area: degenerate mode (l=" << mode.l << ", p=" << mode.p
          << ") has fewer than two nodes";
      throw InputError(msg.str());
    }
    area.dropped = 0;
    area.degenerate = true;
  }
  const double alpha = std::abs(mode.l);
  const int outer = mode.p - area.dropped;
  area.n1 = std::sqrt(laguerre_zero_sturm(mode.p, alpha, outer) / 2);
  area.n2 = std::sqrt(laguerre_zero_sturm(mode.p, alpha, outer - 1) / 2);
  return area;
}

}  // namespace lgd
