#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gwi/estimators.hpp"
#include "gwi/simulate.hpp"

using gwi::Count;
using gwi::DiscreteLaw;
using gwi::GWIModel;

TEST(Wilson, KnownValues) {
  // 0 of 10: [0, z^2 / (n + z^2)].
  const double z2 = gwi::kWilsonZ95 * gwi::kWilsonZ95;
  const auto a = gwi::wilson_interval(0, 10);
  EXPECT_EQ(a.lo, 0.0);
  EXPECT_NEAR(a.hi, z2 / (10 + z2), 1e-15);
  const auto b = gwi::wilson_interval(10, 10);
  EXPECT_NEAR(b.lo, 10 / (10 + z2), 1e-15);
  EXPECT_NEAR(b.hi, 1.0, 1e-15);
  // p = 1/2: center 1/2, half-width z sqrt(1/(4n) + z^2/(4n^2)) / (1 + z^2/n).
  const auto c = gwi::wilson_interval(50, 100);
  EXPECT_NEAR(0.5 * (c.lo + c.hi), 0.5, 1e-15);
  EXPECT_NEAR(c.hi - 0.5, gwi::kWilsonZ95 * std::sqrt(0.0025 + z2 / 40000.0) / (1.0 + z2 / 100.0), 1e-15);
  EXPECT_NEAR(c.hi - 0.5, 0.0961685, 1e-7);
  EXPECT_THROW(gwi::wilson_interval(0, 0), std::invalid_argument);
}

TEST(EmpiricalSurvival, SpecExamples) {
  const std::vector<Count> s = {1, 2, 3};
  const auto e = gwi::empirical_survival(s, 1);
  EXPECT_DOUBLE_EQ(e.estimate, 2.0 / 3.0);
  EXPECT_EQ(e.count, 2u);
  EXPECT_LE(e.wilson.lo, e.estimate);
  EXPECT_GE(e.wilson.hi, e.estimate);
  EXPECT_EQ(gwi::empirical_survival(s, 0).estimate, 1.0);
  EXPECT_EQ(gwi::empirical_survival(s, 3).estimate, 0.0);
  EXPECT_EQ(gwi::empirical_survival(s, 100).estimate, 0.0);
  EXPECT_THROW(gwi::empirical_survival(std::vector<Count>{}, 1), std::invalid_argument);
}

TEST(Hill, ParetoQuantileGrid) {
  // Pareto(2) quantiles u^(-1/2) at u_i = (i - 0.5)/1000, scaled to integers.
  std::vector<Count> grid;
  for (int i = 1; i <= 1000; ++i) grid.push_back(static_cast<Count>(std::llround(1e6 * std::pow((i - 0.5) / 1000, -0.5))));
  const double a = gwi::hill_estimate(grid, 100);
  EXPECT_GE(a, 1.8);
  EXPECT_LE(a, 2.2);
}

TEST(Hill, ZerosExcludedAndErrors) {
  std::vector<Count> s = {0, 0, 0, 10, 100, 1000};
  // log-spacings over the top 2 relative to 10: (log 100 + log 10)/2 = 1.5 log 10.
  EXPECT_NEAR(gwi::hill_estimate(s, 2), 1.0 / (1.5 * std::log(10.0)), 1e-12);
  EXPECT_THROW(gwi::hill_estimate(s, 3), std::invalid_argument);
  EXPECT_THROW(gwi::hill_estimate(s, 0), std::invalid_argument);
  const std::vector<Count> flat(50, 7);
  EXPECT_THROW(gwi::hill_estimate(flat, 10), std::invalid_argument);
}

TEST(Hill, DefaultTailCounts) {
  EXPECT_EQ(gwi::default_hill_ks(100000), (std::vector<std::size_t>{158, 317, 634}));
  EXPECT_EQ(gwi::default_hill_ks(1), (std::vector<std::size_t>{1, 1, 2}));
}

TEST(Hill, BiasAndSpreadOnSimulatedSamples) {
  // Hill at k has asymptotic sd alpha / sqrt(k).
  constexpr int kReps = 40;
  constexpr std::size_t kK = 317;
  for (const double alpha : {1.5, 2.0}) {
    const auto law = DiscreteLaw::pareto_zeta(alpha);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < kReps; ++r) {
      gwi::CounterStream stream(31 + r, 0);
      std::vector<Count> s(100000);
      for (auto& v : s) v = gwi::draw(law, stream);
      const double a = gwi::hill_estimate(s, kK);
      sum += a;
      sum2 += a * a;
    }
    const double mean = sum / kReps;
    const double sd = std::sqrt(sum2 / kReps - mean * mean);
    EXPECT_NEAR(mean / alpha, 1.0, 0.04) << alpha;
    EXPECT_NEAR(sd / (alpha / std::sqrt(static_cast<double>(kK))), 1.0, 0.35) << alpha;
  }
}

TEST(RatioCurve, SingleGenerationEqualsOffspringLaw) {
  // n = 1, X0 = 1, no immigration: X_1 is one offspring draw, c_xi = 1.
  const GWIModel m(DiscreteLaw::deterministic(1), DiscreteLaw::pareto_zeta(1.5), DiscreteLaw::zero());
  const auto pred = gwi::predict_tail(m, 1);
  EXPECT_EQ(pred.c_xi, 1.0);
  std::vector<Count> s;
  for (std::uint64_t i = 0; i < 1'000'000; ++i) s.push_back(gwi::simulate_path(m, 1, 8, i).final_value());
  const auto grid = std::vector<std::int64_t>{10, 100, 1000, 10000};
  const auto report = gwi::ratio_curve(s, pred, m, grid);
  ASSERT_EQ(report.rows.size(), grid.size());
  for (const auto& r : report.rows) {
    ASSERT_TRUE(r.ratio_band.has_value());
    // Exact law: the Wilson band covers 1 (fails ~5% per row by chance; 4 rows, fixed seed).
    EXPECT_LE(r.ratio_band->lo, 1.0) << r.x;
    EXPECT_GE(r.ratio_band->hi, 1.0) << r.x;
  }
  EXPECT_EQ(report.hill.size(), 3u);
  for (const auto& h : report.hill) EXPECT_NEAR(h.alpha / 1.5, 1.0, 0.15);
}

TEST(RatioCurve, PlumbingAndBeyondMax) {
  const GWIModel m(DiscreteLaw::deterministic(1), DiscreteLaw::deterministic(2), DiscreteLaw::pareto_zeta(1.5));
  const auto pred = gwi::predict_tail(m, 2);
  std::vector<Count> s;
  for (std::uint64_t i = 0; i < 10000; ++i) s.push_back(gwi::simulate_path(m, 2, 4, i).final_value());
  const Count top = *std::max_element(s.begin(), s.end());
  const std::vector<std::int64_t> grid = {0, 5, 50, static_cast<std::int64_t>(top), static_cast<std::int64_t>(top) * 10};
  const auto report = gwi::ratio_curve(s, pred, m, grid);
  for (std::size_t i = 1; i < report.rows.size(); ++i) EXPECT_LE(report.rows[i].count, report.rows[i - 1].count);
  for (const auto& r : report.rows) {
    EXPECT_EQ(r.emp_survival, static_cast<double>(r.count) / s.size());
    EXPECT_TRUE(r.ratio.has_value());
    EXPECT_TRUE(std::isfinite(*r.ratio));
  }
  const auto& last = report.rows.back();
  EXPECT_EQ(last.count, 0u);
  EXPECT_EQ(*last.ratio, 0.0);
  EXPECT_GT(last.wilson.hi, 0.0);
  EXPECT_EQ(report.meta.paths, s.size());
}

TEST(Report, NoRatioWherePredictionVanishes) {
  const std::vector<Count> s = {1, 2, 3, 4};
  const std::vector<std::int64_t> grid = {1, 2};
  const auto report = gwi::build_report(s, grid, [](double) { return 0.0; });
  for (const auto& r : report.rows) EXPECT_FALSE(r.ratio.has_value());
  const auto j = report.to_json();
  EXPECT_TRUE(j["rows"][0]["ratio"].is_null());
  const std::string csv = report.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,emp_survival,count,wilson_lo,wilson_hi,pred_survival,ratio");
  EXPECT_NE(csv.find("\n1,0.75,3,"), std::string::npos);
}

TEST(Report, TailWindow) {
  gwi::TailReport r;
  const std::vector<std::pair<std::int64_t, std::uint64_t>> rows = {
      {10, 100000}, {100, 5000}, {300, 900}, {1000, 250}, {3000, 40}, {10000, 3}};
  for (const auto& [x, c] : rows) {
    gwi::TailRow row;
    row.x = x;
    row.count = c;
    r.rows.push_back(row);
  }
  const auto w = gwi::tail_window(r);
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w.front().x, 100);
  EXPECT_EQ(w.back().x, 1000);
  EXPECT_TRUE(gwi::tail_window(r, 1'000'000).empty());
}
