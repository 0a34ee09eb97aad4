#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gwi/model.hpp"

namespace gwi {

/// Probability masses on 0..K plus the mass lost above the cutoff.
///
/// The deficit is an upper bound on P(X > K) together with any mass whose
/// location became unknown during propagation, so every survival read from
/// a TruncatedPmf is a bracket rather than a point value.
struct TruncatedPmf {
  std::vector<double> masses;
  double deficit = 0.0;

  std::int64_t cutoff() const { return static_cast<std::int64_t>(masses.size()) - 1; }
  double total_mass() const { return std::accumulate(masses.begin(), masses.end(), 0.0); }

  static TruncatedPmf point_mass(std::int64_t at, std::int64_t cutoff) {
    TruncatedPmf p;
    p.masses.assign(cutoff + 1, 0.0);
    if (at <= cutoff) p.masses[at] = 1.0;
    else p.deficit = 1.0;
    return p;
  }
};

/// Law restricted to 0..K; deficit = S(K).
inline TruncatedPmf truncate(const DiscreteLaw& law, std::int64_t cutoff) {
  if (cutoff < 0) throw std::invalid_argument("truncate: cutoff must be >= 0");
  TruncatedPmf p;
  p.masses.resize(cutoff + 1);
  for (std::int64_t k = 0; k <= cutoff; ++k) p.masses[k] = pmf(law, k);
  p.deficit = survival(law, cutoff);
  return p;
}

namespace detail {

inline std::size_t support_end(std::span<const double> m) {
  std::size_t end = m.size();
  while (end > 0 && m[end - 1] == 0.0) --end;
  return end;
}

// c = a * b on 0..K; returns the product mass that landed above K.
inline double convolve_into(std::span<const double> a, std::span<const double> b, std::size_t cutoff,
                            std::vector<double>& c) {
  c.assign(cutoff + 1, 0.0);
  const std::size_t na = support_end(a);
  const std::size_t nb = support_end(b);
  if (na == 0 || nb == 0) return 0.0;
  for (std::size_t i = 0; i < na && i <= cutoff; ++i) {
    const double ai = a[i];
    if (ai == 0.0) continue;
    const std::size_t jmax = std::min(nb - 1, cutoff - i);
    double* out = c.data() + i;
    for (std::size_t j = 0; j <= jmax; ++j) out[j] += ai * b[j];
  }
  // Dropped mass: sum_i a_i * sum_{j > K - i} b_j, via suffix sums of b.
  std::vector<double> suffix(nb + 1, 0.0);
  for (std::size_t j = nb; j-- > 0;) suffix[j] = suffix[j + 1] + b[j];
  double dropped = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    const std::size_t first = i > cutoff ? 0 : cutoff - i + 1;
    if (first < nb) dropped += a[i] * suffix[first];
  }
  return dropped;
}

}  // namespace detail

/// Law of the independent sum A + B, truncated at `cutoff`.
inline TruncatedPmf convolve(const TruncatedPmf& a, const TruncatedPmf& b, std::int64_t cutoff) {
  TruncatedPmf out;
  const double dropped = detail::convolve_into(a.masses, b.masses, cutoff, out.masses);
  out.deficit = a.deficit + b.deficit - a.deficit * b.deficit + dropped;
  return out;
}

/// Law of sum_{i=1}^{tau} zeta_i with tau ~ count, zeta_i ~ summand i.i.d.,
/// truncated at `cutoff`.
///
/// Horner evaluation sum_c P(tau=c) f^{*c} = p_0 + f * (p_1 + f * (p_2 + ...)).
/// Mass leaves the result only through the summand deficit or the cutoff and
/// is tallied term by term, so the deficit carries no cancellation error.
inline TruncatedPmf compound_pmf(const TruncatedPmf& count, const TruncatedPmf& summand, std::int64_t cutoff) {
  if (cutoff < 0) throw std::invalid_argument("compound_pmf: cutoff must be >= 0");
  TruncatedPmf out;
  const std::size_t nc = detail::support_end(count.masses);
  if (nc == 0) {
    out.masses.assign(cutoff + 1, 0.0);
    out.deficit = count.deficit;
    return out;
  }
  std::vector<double> acc(cutoff + 1, 0.0);
  std::vector<double> next;
  acc[0] = count.masses[nc - 1];
  double lost = 0.0;
  for (std::size_t c = nc - 1; c-- > 0;) {
    const double acc_mass = std::accumulate(acc.begin(), acc.end(), 0.0);
    lost += summand.deficit * acc_mass;
    lost += detail::convolve_into(summand.masses, acc, cutoff, next);
    std::swap(acc, next);
    acc[0] += count.masses[c];
  }
  out.masses = std::move(acc);
  out.deficit = count.deficit + lost;
  return out;
}

/// Reference compound: explicit summand powers f^{*c}, weighted and summed.
/// Quadratic in the count support; used to cross-check compound_pmf.
inline TruncatedPmf compound_pmf_naive(const TruncatedPmf& count, const TruncatedPmf& summand,
                                       std::int64_t cutoff) {
  TruncatedPmf out;
  out.masses.assign(cutoff + 1, 0.0);
  std::vector<double> power(cutoff + 1, 0.0);
  power[0] = 1.0;
  std::vector<double> next;
  double lost = 0.0;
  const std::size_t nc = detail::support_end(count.masses);
  for (std::size_t c = 0; c < nc; ++c) {
    const double pc = count.masses[c];
    double power_mass = 0.0;
    for (std::int64_t k = 0; k <= cutoff; ++k) {
      out.masses[k] += pc * power[k];
      power_mass += power[k];
    }
    lost += pc * (1.0 - power_mass);
    detail::convolve_into(summand.masses, power, cutoff, next);
    std::swap(power, next);
  }
  out.deficit = count.deficit + lost;
  return out;
}

/// Law of X_n by alternating offspring compounding and immigration
/// convolution, starting from the initial law truncated at `cutoff`.
inline TruncatedPmf exact_pmf_X_n(const GWIModel& model, int n, std::int64_t cutoff) {
  if (n < 1) throw std::invalid_argument("exact_pmf_X_n: horizon must be >= 1");
  if (cutoff < 0) throw std::invalid_argument("exact_pmf_X_n: cutoff must be >= 0");
  TruncatedPmf x = truncate(model.initial, cutoff);
  const TruncatedPmf offspring = truncate(model.offspring, cutoff);
  const TruncatedPmf immigration = truncate(model.immigration, cutoff);
  for (int k = 1; k <= n; ++k) {
    x = convolve(compound_pmf(x, offspring, cutoff), immigration, cutoff);
  }
  return x;
}

struct SurvivalBracket {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

/// [sum_{j>k} masses[j], that + deficit]; brackets P(X > k).
inline SurvivalBracket exact_survival(const TruncatedPmf& pmf, std::int64_t k) {
  if (k < 0 || k > pmf.cutoff()) throw std::out_of_range("exact_survival: k outside 0..K");
  double lo = 0.0;
  for (std::int64_t j = pmf.cutoff(); j > k; --j) lo += pmf.masses[j];
  return {lo, lo + pmf.deficit};
}

/// Bin edges for TV comparisons: singletons below 64, then dyadic blocks up
/// to the cutoff, and a final overflow bin (> K). Returns lower edges.
inline std::vector<std::int64_t> tv_bin_edges(std::int64_t cutoff) {
  std::vector<std::int64_t> edges;
  for (std::int64_t k = 0; k <= std::min<std::int64_t>(cutoff, 63); ++k) edges.push_back(k);
  for (std::int64_t lo = 64; lo <= cutoff; lo *= 2) edges.push_back(lo);
  edges.push_back(cutoff + 1);
  return edges;
}

inline std::size_t tv_bin_of(const std::vector<std::int64_t>& edges, Count x) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), static_cast<std::int64_t>(std::min<Count>(x, kMaxCount)));
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

/// Binned total-variation distance between an oracle pmf and a sample. The
/// oracle deficit is assigned to the overflow bin.
inline double binned_tv_distance(const TruncatedPmf& pmf, std::span<const Count> sample) {
  if (sample.empty()) throw std::invalid_argument("binned_tv_distance: empty sample");
  const auto edges = tv_bin_edges(pmf.cutoff());
  std::vector<double> exact(edges.size(), 0.0);
  std::vector<double> empirical(edges.size(), 0.0);
  for (std::int64_t k = 0; k <= pmf.cutoff(); ++k) exact[tv_bin_of(edges, static_cast<Count>(k))] += pmf.masses[k];
  exact.back() += pmf.deficit;
  for (const Count x : sample) empirical[tv_bin_of(edges, x)] += 1.0;
  const double n = static_cast<double>(sample.size());
  double tv = 0.0;
  for (std::size_t b = 0; b < edges.size(); ++b) tv += std::abs(exact[b] - empirical[b] / n);
  return 0.5 * tv;
}

}  // namespace gwi
