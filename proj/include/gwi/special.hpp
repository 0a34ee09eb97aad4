#pragma once

#include <array>
#include <cmath>
#include <limits>

namespace gwi {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace special {

/// Tail of the zeta series, sum_{j >= start} j^(-s), for s > 1 and start >= 1.
///
/// Sums the first terms directly and closes with Euler-Maclaurin at a cutoff
/// of at least 64, which keeps the remainder below 1e-17 relative.
inline double zeta_tail(double s, double start) {
  if (!(s > 1.0)) return kInfinity;
  // B_{2k} / (2k)!
  static constexpr std::array<double, 6> kBernoulliOverFactorial = {
      1.0 / 12.0,         -1.0 / 720.0,          1.0 / 30240.0,
      -1.0 / 1209600.0,   1.0 / 47900160.0,      -691.0 / 1307674368000.0};
  constexpr double kCutoff = 64.0;
  double sum = 0.0;
  double j = start;
  for (; j < kCutoff; j += 1.0) sum += std::pow(j, -s);
  // Euler-Maclaurin from j to infinity.
  double tail = std::pow(j, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(j, -s);
  double rising = s;  // s (s+1) ... (s+2k-2)
  double power = std::pow(j, -s - 1.0);
  for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
    tail += kBernoulliOverFactorial[k] * rising * power;
    rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
    power /= j * j;
  }
  return sum + tail;
}

inline double riemann_zeta(double s) { return zeta_tail(s, 1.0); }

/// j^r - (j-1)^r without cancellation for large j.
inline double power_increment(double j, double r) {
  if (j <= 1.0) return std::pow(j, r);
  return -std::pow(j, r) * std::expm1(r * std::log1p(-1.0 / j));
}

/// Coefficients a_m of 1 - (1 - t)^r = sum_{m >= 1} a_m t^m.
inline double binomial_increment_coeff(double r, int m) {
  // a_m = -C(r, m) (-1)^m
  double c = 1.0;
  for (int i = 0; i < m; ++i) c *= (r - i) / (i + 1);
  return (m % 2 == 0) ? -c : c;
}

}  // namespace special
}  // namespace gwi
