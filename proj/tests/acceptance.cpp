// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gwi/gwi.hpp"

using gwi::DiscreteLaw;
using gwi::GWIModel;

namespace {

// About four grid points per decade.
constexpr const char* kGrid = "geometric:10,10000000000,37";
constexpr std::uint64_t kBigN = 10'000'000;
constexpr unsigned kWorkers = 0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmtd(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Every ratio in the top decade with >= 200 exceedances inside 1 +- tol.
Outcome window_check(const gwi::TailReport& report, double tol) {
  const auto rows = gwi::tail_window(report);
  if (rows.empty()) return {false, "no grid point with 200 exceedances"};
  Outcome o{true, "window"};
  for (const auto& r : rows) {
    if (!r.ratio) {
      o.pass = false;
      o.detail += " x=" + std::to_string(r.x) + ":no-ratio";
      continue;
    }
    o.detail += " x=" + std::to_string(r.x) + ":" + fmtd("%.3f", *r.ratio) + "(n=" + std::to_string(r.count) + ")";
    if (std::abs(*r.ratio - 1.0) > tol) o.pass = false;
  }
  return o;
}

gwi::ExperimentConfig config_for(const GWIModel& model, int n, std::uint64_t seed) {
  gwi::ExperimentConfig c;
  c.model = model;
  c.n = n;
  c.paths = kBigN;
  c.master_seed = seed;
  c.x_grid = kGrid;
  c.workers = kWorkers;
  return c;
}

Outcome verify_ratio(const GWIModel& model, int n, std::uint64_t seed, double want_coeff, double tol) {
  const auto r = gwi::run_verify(config_for(model, n, seed));
  const double c = r.prediction.c_x0 + r.prediction.c_xi + r.prediction.c_eps;
  Outcome o = window_check(r.report, tol);
  o.detail = "c=" + fmtd("%.6g", c) + " (expected " + fmtd("%.6g", want_coeff) + ") censored=" +
             std::to_string(r.report.meta.censored) + " " + o.detail;
  if (std::abs(c - want_coeff) > 1e-9 * want_coeff) o.pass = false;
  return o;
}

const double kZeta15 = gwi::mean(DiscreteLaw::pareto_zeta(1.5));
const GWIModel kCrit4(DiscreteLaw::deterministic(1), DiscreteLaw::pareto_zeta(1.5), DiscreteLaw::zero());
std::string crit4_report_workers1;

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (int n = 1; n <= 10; ++n)
    for (double a : {1.0, 1.2, 1.5, 2.0, 3.0})
      for (double m : {0.3, 0.5, 1.0, 2.0}) {
        const double g = gwi::gw_tail_coeff(n, a, m);
        const double b = gwi::basrak_equiv_coeff(n, a, m);
        worst = std::max(worst, std::abs(g - b) / std::abs(g));
      }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0, "max rel diff " + fmtd("%.3g", worst) + ", " + fmtd("%.3f", secs) + " s"};
}

Outcome c2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto pz = [](double a, double w0 = 0.0) { return DiscreteLaw::pareto_zeta(a, w0); };
  const std::vector<std::pair<GWIModel, int>> models = {
      {{DiscreteLaw::deterministic(1), pz(1.5), DiscreteLaw::poisson(1.0)}, 2},
      {{DiscreteLaw::poisson(2.0), DiscreteLaw::geometric(0.5), pz(1.3)}, 4},
      {{pz(1.5), DiscreteLaw::poisson(0.8), DiscreteLaw::log_damped_pareto(1.5, 1.0)}, 3},
      {{DiscreteLaw::deterministic(0), DiscreteLaw::deterministic(2), pz(1.5)}, 4},
      {{pz(2.0), pz(2.0, 0.5), pz(2.0)}, 3},
  };
  std::uint64_t violations = 0, censored = 0, total = 0;
  std::uint64_t seed = 200;
  for (const auto& [model, n] : models) {
    const auto batch = gwi::run_paths(model, n, 200'000, seed++, kWorkers);
    violations += batch.decomposition_violations;
    censored += batch.censored;
    total += batch.requested;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && total == 1'000'000 && secs < 120.0,
          std::to_string(total) + " paths, " + std::to_string(violations) + " violations, " +
              std::to_string(censored) + " censored, " + fmtd("%.1f", secs) + " s"};
}

Outcome c3() {
  const auto t0 = std::chrono::steady_clock::now();
  gwi::ExperimentConfig c;
  c.model = GWIModel(DiscreteLaw::poisson(1.0), DiscreteLaw::geometric(0.6), DiscreteLaw::poisson(0.5));
  c.n = 2;
  c.paths = 1'000'000;
  c.master_seed = 300;
  c.oracle_cutoff = 2000;
  c.x_grid = "0,1,2,5,10,20";
  c.workers = kWorkers;
  const auto r = gwi::run_oracle_compare(c);
  const double want = gwi::mean_at(c.model, 2);
  const double z = std::abs(r.mc_mean - want) / r.mc_standard_error;
  const double secs = seconds_since(t0);
  return {r.tv_distance < 0.01 && z < 4.0 && secs < 180.0,
          "TV " + fmtd("%.5f", r.tv_distance) + ", mean " + fmtd("%.5f", r.mc_mean) + " vs " + fmtd("%.5f", want) +
              " (" + fmtd("%.2f", z) + " SE), " + fmtd("%.1f", secs) + " s"};
}

Outcome c4() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = config_for(kCrit4, 2, 400);
  cfg.workers = 1;
  const auto r = gwi::run_verify(cfg);
  crit4_report_workers1 = r.report.to_json().dump();
  const double want = kZeta15 * (1.0 + std::sqrt(kZeta15));
  Outcome o = window_check(r.report, 0.25);
  if (std::abs(r.prediction.c_xi - want) > 1e-9 * want) o.pass = false;
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 600.0;
  o.detail = "c=" + fmtd("%.6g", r.prediction.c_xi) + " " + o.detail + ", " + fmtd("%.1f", secs) + " s";
  return o;
}

Outcome c5() {
  const double w0 = 1.0 - 1.0 / kZeta15;
  const GWIModel model(DiscreteLaw::deterministic(1), DiscreteLaw::pareto_zeta(1.5, w0), DiscreteLaw::zero());
  Outcome all{true, "m=" + fmtd("%.12f", gwi::mean(model.offspring))};
  for (int n : {2, 3}) {
    const Outcome o = verify_ratio(model, n, 500 + n, n, 0.25);
    all.pass = all.pass && o.pass;
    all.detail += " | n=" + std::to_string(n) + " " + o.detail;
  }
  return all;
}

Outcome c6() {
  const GWIModel model(DiscreteLaw::deterministic(0), DiscreteLaw::deterministic(2), DiscreteLaw::pareto_zeta(1.5));
  double want = 0.0;
  for (int i = 1; i <= 3; ++i) want += std::pow(2.0, (3 - i) * 1.5);
  return verify_ratio(model, 3, 600, want, 0.20);
}

Outcome c7() {
  const GWIModel model(DiscreteLaw::pareto_zeta(1.5), DiscreteLaw::geometric(0.4), DiscreteLaw::poisson(1.0));
  return verify_ratio(model, 2, 700, 3.375, 0.20);
}

Outcome c8() {
  const std::vector<std::pair<DiscreteLaw, DiscreteLaw>> cases = {
      {DiscreteLaw::pareto_zeta(0.5), DiscreteLaw::poisson(2.0)},
      {DiscreteLaw::poisson(2.0), DiscreteLaw::pareto_zeta(1.5)},
      {DiscreteLaw::pareto_zeta(1.5), DiscreteLaw::pareto_zeta(1.5)},
  };
  Outcome all{true, ""};
  std::uint64_t seed = 800;
  for (const auto& [tau, zeta] : cases) {
    const auto r = gwi::run_random_sum(tau, zeta, kBigN, seed++, kGrid, kWorkers);
    Outcome o = r.report ? window_check(*r.report, 0.25) : Outcome{false, "no report"};
    if (r.prediction.regime == gwi::RandomSumRegime::Unsupported) o.pass = false;
    all.pass = all.pass && o.pass;
    all.detail += std::string(all.detail.empty() ? "" : " | ") + gwi::to_string(r.prediction.regime) + " " + o.detail;
  }
  return all;
}

Outcome c9() {
  const auto t0 = std::chrono::steady_clock::now();
  const double r = gwi::karamata_ratio_exact(DiscreteLaw::pareto_zeta(1.5), 2.0, 100'000);
  const double secs = seconds_since(t0);
  const double rel = std::abs(r - 1.0 / 3.0) / (1.0 / 3.0);
  return {rel < 0.05 && secs < 1.0,
          "ratio " + fmtd("%.5f", r) + " (rel err " + fmtd("%.4f", rel) + "), " + fmtd("%.3f", secs) + " s"};
}

Outcome c10() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t kN = 100'000;
  const auto k = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(kN))));
  Outcome all{true, "k=" + std::to_string(k)};
  for (double alpha : {1.5, 2.0}) {
    const auto law = DiscreteLaw::pareto_zeta(alpha);
    int hits = 0;
    std::vector<gwi::Count> sample(kN);
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
      gwi::CounterStream stream(1000 + static_cast<std::uint64_t>(alpha * 10), rep);
      for (auto& v : sample) v = gwi::draw(law, stream);
      const double a = gwi::hill_estimate(sample, k);
      if (std::abs(a - alpha) <= 0.10 * alpha) ++hits;
    }
    all.pass = all.pass && hits >= 95;
    all.detail += " alpha=" + fmtd("%.1f", alpha) + ": " + std::to_string(hits) + "/100";
  }
  const double secs = seconds_since(t0);
  all.pass = all.pass && secs < 120.0;
  all.detail += ", " + fmtd("%.1f", secs) + " s";
  return all;
}

Outcome c11() {
  if (crit4_report_workers1.empty()) c4();
  auto cfg = config_for(kCrit4, 2, 400);
  cfg.workers = 8;
  const std::string again = gwi::run_verify(cfg).report.to_json().dump();
  const bool same = again == crit4_report_workers1;
  return {same, std::string(same ? "identical" : "different") + " reports (" +
                    std::to_string(again.size()) + " bytes)"};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
