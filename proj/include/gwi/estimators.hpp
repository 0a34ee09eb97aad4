#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gwi/tail_theory.hpp"

namespace gwi {

inline constexpr double kWilsonZ95 = 1.959963984540054;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Wilson score interval for a binomial proportion count / n.
inline Interval wilson_interval(std::uint64_t count, std::uint64_t n, double z = kWilsonZ95) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be > 0");
  const double nd = static_cast<double>(n);
  const double p = static_cast<double>(count) / nd;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nd;
  const double center = (p + z2 / (2.0 * nd)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nd + z2 / (4.0 * nd * nd)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

struct SurvivalEstimate {
  double estimate = 0.0;
  std::uint64_t count = 0;
  Interval wilson;
};

/// #{X > x} / N with its Wilson 95% interval.
inline SurvivalEstimate empirical_survival(std::span<const Count> sample, std::int64_t x) {
  if (sample.empty()) throw std::invalid_argument("empirical_survival: empty sample");
  std::uint64_t count = 0;
  for (const Count v : sample)
    if (x < 0 || v > static_cast<Count>(x)) ++count;
  return {static_cast<double>(count) / static_cast<double>(sample.size()), count,
          wilson_interval(count, sample.size())};
}

/// Hill estimator from the k largest strictly positive observations:
/// 1 / (k^-1 sum_{i<=k} log(X_(i) / X_(k+1))).
inline double hill_estimate(std::span<const Count> sample, std::size_t k) {
  if (k < 1) throw std::invalid_argument("hill_estimate: k must be >= 1");
  std::vector<Count> positive;
  positive.reserve(sample.size());
  for (const Count v : sample)
    if (v > 0) positive.push_back(v);
  if (positive.size() < k + 1) throw std::invalid_argument("hill_estimate: k exceeds positive sample size - 1");
  std::partial_sort(positive.begin(), positive.begin() + static_cast<std::ptrdiff_t>(k + 1), positive.end(),
                    std::greater<>());
  const double threshold = std::log(static_cast<double>(positive[k]));
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += std::log(static_cast<double>(positive[i])) - threshold;
  if (!(sum > 0.0)) throw std::invalid_argument("hill_estimate: retained points are all equal");
  return static_cast<double>(k) / sum;
}

struct TailRow {
  std::int64_t x = 0;
  double emp_survival = 0.0;
  std::uint64_t count = 0;
  Interval wilson;
  double pred_survival = 0.0;
  std::optional<double> ratio;  // only where pred_survival > 0
  std::optional<Interval> ratio_band;
};

struct HillPoint {
  std::size_t k = 0;
  double alpha = 0.0;
};

struct ReportMeta {
  std::uint64_t paths = 0;
  std::uint64_t censored = 0;
  std::uint64_t seed = 0;
  std::string model_digest;
  std::string version;
  nlohmann::json extra = nlohmann::json::object();
};

/// Empirical vs predicted survival on an x-grid, plus Hill estimates.
struct TailReport {
  std::vector<TailRow> rows;
  std::vector<HillPoint> hill;
  ReportMeta meta;

  nlohmann::json to_json() const {
    nlohmann::json rj = nlohmann::json::array();
    for (const auto& r : rows) {
      nlohmann::json row{{"x", r.x},
                         {"emp_survival", r.emp_survival},
                         {"count", r.count},
                         {"wilson_lo", r.wilson.lo},
                         {"wilson_hi", r.wilson.hi},
                         {"pred_survival", r.pred_survival}};
      row["ratio"] = r.ratio ? nlohmann::json(*r.ratio) : nlohmann::json(nullptr);
      if (r.ratio_band) {
        row["ratio_lo"] = r.ratio_band->lo;
        row["ratio_hi"] = r.ratio_band->hi;
      }
      rj.push_back(row);
    }
    nlohmann::json hj = nlohmann::json::array();
    for (const auto& h : hill) hj.push_back({{"k", h.k}, {"alpha_hat", h.alpha}});
    nlohmann::json mj{{"paths", meta.paths},
                      {"censored", meta.censored},
                      {"seed", meta.seed},
                      {"model_digest", meta.model_digest},
                      {"version", meta.version}};
    for (const auto& [key, value] : meta.extra.items()) mj[key] = value;
    return {{"rows", rj}, {"hill", hj}, {"meta", mj}};
  }

  std::string to_csv() const {
    std::string out = "x,emp_survival,count,wilson_lo,wilson_hi,pred_survival,ratio\n";
    char buf[512];
    for (const auto& r : rows) {
      std::snprintf(buf, sizeof buf, "%lld,%.17g,%llu,%.17g,%.17g,%.17g,", static_cast<long long>(r.x),
                    r.emp_survival, static_cast<unsigned long long>(r.count), r.wilson.lo, r.wilson.hi,
                    r.pred_survival);
      out += buf;
      if (r.ratio) {
        std::snprintf(buf, sizeof buf, "%.17g", *r.ratio);
        out += buf;
      }
      out += '\n';
    }
    return out;
  }
};

/// Hill tail counts reported with each report: ceil(sqrt N) flanked by its
/// half and its double.
inline std::vector<std::size_t> default_hill_ks(std::size_t n) {
  const auto base = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  return {std::max<std::size_t>(1, base / 2), base, 2 * base};
}

/// Pairs empirical survival from `sample` with `predicted(x)` on the grid.
inline TailReport build_report(std::span<const Count> sample, std::span<const std::int64_t> x_grid,
                               const std::function<double(double)>& predicted) {
  if (sample.empty()) throw std::invalid_argument("build_report: empty sample");
  std::vector<Count> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<std::uint64_t>(sorted.size());

  TailReport report;
  for (const std::int64_t x : x_grid) {
    TailRow row;
    row.x = x;
    const auto above = x < 0 ? sorted.begin() : std::upper_bound(sorted.begin(), sorted.end(), static_cast<Count>(x));
    row.count = static_cast<std::uint64_t>(sorted.end() - above);
    row.emp_survival = static_cast<double>(row.count) / static_cast<double>(n);
    row.wilson = wilson_interval(row.count, n);
    row.pred_survival = predicted(static_cast<double>(x));
    if (row.pred_survival > 0.0) {
      row.ratio = row.emp_survival / row.pred_survival;
      row.ratio_band = Interval{row.wilson.lo / row.pred_survival, row.wilson.hi / row.pred_survival};
    }
    report.rows.push_back(row);
  }
  for (const std::size_t k : default_hill_ks(sorted.size())) {
    try {
      report.hill.push_back({k, hill_estimate(sorted, k)});
    } catch (const std::invalid_argument&) {
      // Too few positive or distinct points for this k.
    }
  }
  report.meta.paths = n;
  return report;
}

/// TailReport for X_n against a tail prediction for the same model.
inline TailReport ratio_curve(std::span<const Count> sample, const TailPrediction& prediction, const GWIModel& model,
                              std::span<const std::int64_t> x_grid) {
  return build_report(sample, x_grid, [&](double x) { return predicted_survival(prediction, model, x); });
}

/// Rows of the largest grid decade [x_top / 10, x_top] where x_top is the
/// largest grid point with at least `min_count` exceedances.
inline std::vector<TailRow> tail_window(const TailReport& report, std::uint64_t min_count = 200) {
  std::optional<std::int64_t> top;
  for (const auto& r : report.rows)
    if (r.count >= min_count) top = r.x;
  std::vector<TailRow> out;
  if (!top) return out;
  for (const auto& r : report.rows)
    if (r.x * 10 >= *top && r.x <= *top) out.push_back(r);
  return out;
}

}  // namespace gwi
