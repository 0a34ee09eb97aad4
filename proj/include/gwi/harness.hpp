#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "gwi/estimators.hpp"
#include "gwi/oracle.hpp"
#include "gwi/simulate.hpp"
#include "gwi/tail_theory.hpp"

namespace gwi {

inline constexpr const char* kVersion = "gwi 0.1.0";

// ---------------------------------------------------------------------------
// x-grid specs

namespace detail {

inline std::int64_t parse_int(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ConfigError("bad integer \"" + std::string(s) + "\"");
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace detail

/// "geometric:<lo>,<hi>,<points>" or a comma-separated integer list.
/// Geometric grids are rounded to integers and deduplicated.
inline std::vector<std::int64_t> parse_x_grid(std::string_view spec) {
  std::vector<std::int64_t> grid;
  constexpr std::string_view kGeometric = "geometric:";
  if (spec.substr(0, kGeometric.size()) == kGeometric) {
    const auto parts = detail::split(spec.substr(kGeometric.size()), ',');
    if (parts.size() != 3) throw ConfigError("geometric x-grid needs lo,hi,points");
    const std::int64_t lo = detail::parse_int(parts[0]);
    const std::int64_t hi = detail::parse_int(parts[1]);
    const std::int64_t points = detail::parse_int(parts[2]);
    if (lo < 1 || hi < lo || points < 1) throw ConfigError("geometric x-grid needs 1 <= lo <= hi and points >= 1");
    if (points == 1) return {lo};
    const double ratio = std::log(static_cast<double>(hi) / static_cast<double>(lo)) / static_cast<double>(points - 1);
    for (std::int64_t i = 0; i < points; ++i) {
      const auto x = static_cast<std::int64_t>(std::llround(static_cast<double>(lo) * std::exp(ratio * static_cast<double>(i))));
      if (grid.empty() || x > grid.back()) grid.push_back(x);
    }
    return grid;
  }
  for (const auto part : detail::split(spec, ',')) grid.push_back(detail::parse_int(part));
  if (grid.empty()) throw ConfigError("empty x-grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1]) throw ConfigError("x-grid must be strictly increasing");
  if (grid.front() < 0) throw ConfigError("x-grid values must be >= 0");
  return grid;
}

// ---------------------------------------------------------------------------
// Configuration

inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ExperimentConfig {
  GWIModel model;
  int n = 1;
  std::uint64_t paths = 1;
  std::uint64_t master_seed = 0;
  std::string x_grid = "geometric:1,1000000,25";
  std::optional<std::int64_t> oracle_cutoff;
  std::string out;
  unsigned workers = 0;  // 0 = hardware concurrency
  std::uint64_t draw_budget = kDefaultDrawBudget;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;

  void validate() const {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (paths < 1) throw ConfigError("paths must be >= 1");
    if (draw_budget < 1) throw ConfigError("draw budget must be >= 1");
    if (oracle_cutoff && *oracle_cutoff < 0) throw ConfigError("oracle cutoff must be >= 0");
    parse_x_grid(x_grid);
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"model", model.to_json()}, {"n", n},        {"paths", paths},
                     {"master_seed", master_seed}, {"x_grid", x_grid}, {"out", out},
                     {"workers", workers},       {"draw_budget", draw_budget}};
    j["oracle_cutoff"] = oracle_cutoff ? nlohmann::json(*oracle_cutoff) : nlohmann::json(nullptr);
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    static const std::vector<std::string> kKnown = {"model", "n", "paths", "master_seed", "x_grid",
                                                    "oracle_cutoff", "out", "workers", "draw_budget"};
    for (const auto& [key, value] : j.items())
      if (std::find(kKnown.begin(), kKnown.end(), key) == kKnown.end())
        throw ConfigError("unknown config field \"" + key + "\"");
    ExperimentConfig c;
    try {
      c.model = GWIModel::from_json(j.at("model"));
      c.n = j.at("n").get<int>();
      if (j.contains("paths")) c.paths = j.at("paths").get<std::uint64_t>();
      if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
      if (j.contains("x_grid")) c.x_grid = j.at("x_grid").get<std::string>();
      if (j.contains("oracle_cutoff") && !j.at("oracle_cutoff").is_null())
        c.oracle_cutoff = j.at("oracle_cutoff").get<std::int64_t>();
      if (j.contains("out")) c.out = j.at("out").get<std::string>();
      if (j.contains("workers")) c.workers = j.at("workers").get<unsigned>();
      if (j.contains("draw_budget")) c.draw_budget = j.at("draw_budget").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("experiment config: ") + e.what());
    }
    c.validate();
    return c;
  }

  /// Digest of everything that determines report contents (not workers or
  /// output paths).
  std::string digest() const {
    const nlohmann::json j{{"model", model.to_json()}, {"n", n},        {"paths", paths},
                           {"master_seed", master_seed}, {"x_grid", x_grid}, {"draw_budget", draw_budget}};
    return fnv1a_hex(j.dump());
  }
};

// ---------------------------------------------------------------------------
// Parallel path runner

inline unsigned resolve_workers(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(i) for i in [0, count) on `workers` threads in contiguous
/// blocks. Bodies must write only to slot i.
template <class Body>
void parallel_for(std::uint64_t count, unsigned workers, Body body) {
  workers = std::max(1u, workers);
  if (workers == 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::uint64_t block = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = w * block;
    const std::uint64_t end = std::min(count, begin + block);
    if (begin >= end) break;
    pool.emplace_back([=, &body] {
      for (std::uint64_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Final values of N simulated paths keyed by (seed, path index).
struct PathBatch {
  std::vector<Count> finals;  // censored paths excluded, path order kept
  std::uint64_t censored = 0;
  std::uint64_t decomposition_violations = 0;
  std::uint64_t requested = 0;

  double censored_fraction() const {
    return requested == 0 ? 0.0 : static_cast<double>(censored) / static_cast<double>(requested);
  }
};

namespace detail {

inline constexpr Count kCensoredSlot = std::numeric_limits<Count>::max();

template <class Simulate>
PathBatch collect_paths(std::uint64_t paths, unsigned workers, Simulate simulate) {
  std::vector<Count> slots(paths);
  std::vector<std::uint8_t> violation(paths, 0);
  parallel_for(paths, resolve_workers(workers), [&](std::uint64_t i) {
    try {
      bool ok = true;
      slots[i] = simulate(i, ok);
      violation[i] = ok ? 0 : 1;
    } catch (const BudgetExceeded&) {
      slots[i] = kCensoredSlot;
    }
  });
  PathBatch batch;
  batch.requested = paths;
  batch.finals.reserve(paths);
  for (std::uint64_t i = 0; i < paths; ++i) {
    batch.decomposition_violations += violation[i];
    if (slots[i] == kCensoredSlot) ++batch.censored;
    else batch.finals.push_back(slots[i]);
  }
  return batch;
}

}  // namespace detail

inline PathBatch run_paths(const GWIModel& model, int n, std::uint64_t paths, std::uint64_t seed, unsigned workers,
                           std::uint64_t budget = kDefaultDrawBudget) {
  return detail::collect_paths(paths, workers, [&](std::uint64_t i, bool& ok) {
    const DecomposedPath p = simulate_path(model, n, seed, i, budget);
    ok = p.decomposition_holds();
    return p.final_value();
  });
}

/// N draws of sum_{i=1}^{tau} zeta_i.
inline PathBatch run_random_sums(const DiscreteLaw& tau, const DiscreteLaw& zeta, std::uint64_t paths,
                                 std::uint64_t seed, unsigned workers, std::uint64_t budget = kDefaultDrawBudget) {
  const bool per_term = !(zeta.is<law::Zero>() || zeta.is<law::Deterministic>() || zeta.is<law::Poisson>());
  return detail::collect_paths(paths, workers, [&](std::uint64_t i, bool&) {
    CounterStream stream(seed, i);
    const Count count = draw(tau, stream);
    if (count >= kMaxCount) throw BudgetExceeded("count overflow");
    if (per_term && count > budget) throw BudgetExceeded("draw budget exceeded");
    const SumDraw s = draw_sum(zeta, count, stream);
    if (s.overflow) throw BudgetExceeded("sum overflow");
    return s.value;
  });
}

// ---------------------------------------------------------------------------
// Experiments

struct VerifyResult {
  TailPrediction prediction;
  TailReport report;
  std::uint64_t decomposition_violations = 0;
  double censored_fraction = 0.0;
};

inline VerifyResult run_verify(const ExperimentConfig& config) {
  config.validate();
  const RegimeClassification cls = classify(config.model);
  VerifyResult out;
  out.prediction = predict_tail(config.model, config.n, cls);
  const auto grid = parse_x_grid(config.x_grid);
  const PathBatch batch =
      run_paths(config.model, config.n, config.paths, config.master_seed, config.workers, config.draw_budget);
  if (batch.finals.empty()) throw BudgetExceeded("every path was censored");
  out.report = ratio_curve(batch.finals, out.prediction, config.model, grid);
  out.decomposition_violations = batch.decomposition_violations;
  out.censored_fraction = batch.censored_fraction();

  auto& meta = out.report.meta;
  meta.paths = config.paths;
  meta.censored = batch.censored;
  meta.seed = config.master_seed;
  meta.model_digest = config.digest();
  meta.version = kVersion;
  meta.extra = {{"n", config.n},
                {"x_grid", config.x_grid},
                {"model", config.model.to_json()},
                {"regime", to_string(out.prediction.regime)},
                {"index", out.prediction.index},
                {"c_xi", out.prediction.c_xi},
                {"c_x0", out.prediction.c_x0},
                {"c_eps", out.prediction.c_eps},
                {"decomposition_violations", batch.decomposition_violations},
                {"effective_paths", batch.finals.size()}};
  return out;
}

struct OracleRow {
  std::int64_t x = 0;
  double emp_survival = 0.0;
  Interval wilson;
  SurvivalBracket exact;
  bool intersects = false;
};

struct OracleComparison {
  double tv_distance = 0.0;
  double deficit = 0.0;
  double exact_mean_lo = 0.0;  // sum k p_k (mass above K not counted)
  double mc_mean = 0.0;
  double mc_standard_error = 0.0;
  std::uint64_t censored = 0;
  std::vector<OracleRow> rows;

  nlohmann::json to_json() const {
    nlohmann::json rj = nlohmann::json::array();
    for (const auto& r : rows)
      rj.push_back({{"x", r.x},
                    {"emp_survival", r.emp_survival},
                    {"wilson_lo", r.wilson.lo},
                    {"wilson_hi", r.wilson.hi},
                    {"survival_lo", r.exact.lo},
                    {"survival_hi", r.exact.hi},
                    {"intersects", r.intersects}});
    return {{"tv_distance", tv_distance}, {"deficit", deficit},     {"exact_mean_lo", exact_mean_lo},
            {"mc_mean", mc_mean},         {"mc_standard_error", mc_standard_error},
            {"censored", censored},       {"rows", rj}};
  }
};

/// Exact propagation needs (n+1) K-length arrays plus O(K) scratch.
inline constexpr std::uint64_t kOracleEvaluationBudget = 2'000'000'000ULL;

inline OracleComparison run_oracle_compare(const ExperimentConfig& config) {
  config.validate();
  if (!config.oracle_cutoff) throw ConfigError("oracle comparison needs a cutoff K");
  const std::int64_t cutoff = *config.oracle_cutoff;
  if (static_cast<std::uint64_t>(config.n + 1) * static_cast<std::uint64_t>(cutoff + 1) > kOracleEvaluationBudget)
    throw ConfigError("oracle guard: (n+1) * K exceeds the evaluation budget");

  const TruncatedPmf exact = exact_pmf_X_n(config.model, config.n, cutoff);
  const PathBatch batch =
      run_paths(config.model, config.n, config.paths, config.master_seed, config.workers, config.draw_budget);
  if (batch.finals.empty()) throw BudgetExceeded("every path was censored");

  OracleComparison out;
  out.tv_distance = binned_tv_distance(exact, batch.finals);
  out.deficit = exact.deficit;
  out.censored = batch.censored;
  for (std::int64_t k = 0; k <= cutoff; ++k) out.exact_mean_lo += static_cast<double>(k) * exact.masses[k];

  long double s1 = 0.0L, s2 = 0.0L;
  for (const Count v : batch.finals) {
    const auto d = static_cast<long double>(v);
    s1 += d;
    s2 += d * d;
  }
  const auto nn = static_cast<long double>(batch.finals.size());
  const long double mu = s1 / nn;
  const long double var = nn > 1 ? (s2 - nn * mu * mu) / (nn - 1) : 0.0L;
  out.mc_mean = static_cast<double>(mu);
  out.mc_standard_error = static_cast<double>(std::sqrt(std::max(0.0L, var) / nn));

  std::vector<Count> sorted = batch.finals;
  std::sort(sorted.begin(), sorted.end());
  for (const std::int64_t x : parse_x_grid(config.x_grid)) {
    if (x > cutoff) continue;
    OracleRow row;
    row.x = x;
    const auto above = std::upper_bound(sorted.begin(), sorted.end(), static_cast<Count>(x));
    const auto count = static_cast<std::uint64_t>(sorted.end() - above);
    row.emp_survival = static_cast<double>(count) / static_cast<double>(sorted.size());
    row.wilson = wilson_interval(count, sorted.size());
    row.exact = exact_survival(exact, x);
    row.intersects = row.wilson.lo <= row.exact.hi && row.exact.lo <= row.wilson.hi;
    out.rows.push_back(row);
  }
  return out;
}

struct RandomSumResult {
  RandomSumPrediction prediction;
  std::optional<TailReport> report;
  double censored_fraction = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j{{"prediction", prediction.to_json()}};
    if (report) j["report"] = report->to_json();
    return j;
  }
};

inline RandomSumResult run_random_sum(const DiscreteLaw& tau, const DiscreteLaw& zeta,
                                      std::optional<std::uint64_t> paths, std::uint64_t seed,
                                      const std::string& x_grid, unsigned workers,
                                      std::uint64_t budget = kDefaultDrawBudget) {
  RandomSumResult out;
  out.prediction = classify_random_sum(tau, zeta);
  if (!paths) return out;
  if (*paths < 1) throw ConfigError("paths must be >= 1");
  const auto grid = parse_x_grid(x_grid);
  const PathBatch batch = run_random_sums(tau, zeta, *paths, seed, workers, budget);
  if (batch.finals.empty()) throw BudgetExceeded("every path was censored");
  const RandomSumPrediction pred = out.prediction;
  out.report = build_report(batch.finals, grid, [&](double x) {
    return pred.regime == RandomSumRegime::Unsupported ? 0.0 : predicted_random_sum_survival(pred, tau, zeta, x);
  });
  out.censored_fraction = batch.censored_fraction();
  auto& meta = out.report->meta;
  meta.paths = *paths;
  meta.censored = batch.censored;
  meta.seed = seed;
  meta.version = kVersion;
  const nlohmann::json id{{"tau", tau.to_json()}, {"zeta", zeta.to_json()}, {"paths", *paths},
                          {"seed", seed},         {"x_grid", x_grid}};
  meta.model_digest = fnv1a_hex(id.dump());
  meta.extra = {{"tau", tau.to_json()}, {"zeta", zeta.to_json()}, {"effective_paths", batch.finals.size()}};
  return out;
}

}  // namespace gwi
