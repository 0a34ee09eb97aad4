#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gwi/model.hpp"

namespace gwi {

inline constexpr std::uint64_t kDefaultDrawBudget = 100'000'000;

/// One coupled realization of X_0..X_n with its additive decomposition
/// X_n = V^(n)(X_0) + sum_i V_i^(n-i)(eps_i).
struct DecomposedPath {
  int n = 0;
  std::vector<Count> path;                    // X_0 .. X_n
  Count root_component = 0;                   // descendants of X_0 alive at n
  std::vector<Count> immigration_components;  // [i-1] -> descendants of eps_i alive at n
  std::uint64_t draws = 0;

  Count final_value() const { return path.back(); }

  bool decomposition_holds() const {
    const Count sum = std::accumulate(immigration_components.begin(), immigration_components.end(),
                                      root_component);
    return sum == path.back();
  }
};

/// Simulates one path, tagging every individual by ancestor class (root or
/// immigration wave i). Throws BudgetExceeded once more than `budget`
/// variates would be drawn or a count reaches kMaxCount.
inline DecomposedPath simulate_path(const GWIModel& model, int n, CounterStream& stream,
                                    std::uint64_t budget = kDefaultDrawBudget) {
  if (n < 1) throw std::invalid_argument("simulate_path: horizon must be >= 1");
  DecomposedPath out;
  out.n = n;
  out.path.reserve(n + 1);

  // classes[0] = root, classes[i] = wave i.
  std::vector<Count> classes(n + 1, 0);
  classes[0] = draw(model.initial, stream);
  out.draws = 1;
  if (classes[0] >= kMaxCount) throw BudgetExceeded("initial count overflow");
  out.path.push_back(classes[0]);

  auto charge = [&](std::uint64_t cost) {
    if (cost > budget || out.draws > budget - cost) throw BudgetExceeded("draw budget exceeded");
  };

  for (int k = 1; k <= n; ++k) {
    Count total = 0;
    for (int c = 0; c < k; ++c) {
      if (classes[c] == 0) continue;
      // Laws with closed-form sums cost one draw; others one per parent.
      const bool per_parent = !(model.offspring.is<law::Zero>() || model.offspring.is<law::Deterministic>() ||
                                model.offspring.is<law::Poisson>());
      charge(per_parent ? classes[c] : 1);
      const SumDraw s = draw_sum(model.offspring, classes[c], stream);
      out.draws += s.draws;
      if (s.overflow) throw BudgetExceeded("offspring count overflow");
      classes[c] = s.value;
      total += s.value;
      if (total >= kMaxCount) throw BudgetExceeded("population overflow");
    }
    charge(1);
    const Count eps = draw(model.immigration, stream);
    ++out.draws;
    if (eps >= kMaxCount) throw BudgetExceeded("immigration count overflow");
    classes[k] = eps;
    total += eps;
    if (total >= kMaxCount) throw BudgetExceeded("population overflow");
    out.path.push_back(total);
  }

  out.root_component = classes[0];
  out.immigration_components.assign(classes.begin() + 1, classes.end());
  return out;
}

inline DecomposedPath simulate_path(const GWIModel& model, int n, std::uint64_t master_seed,
                                    std::uint64_t path_index, std::uint64_t budget = kDefaultDrawBudget) {
  CounterStream stream(master_seed, path_index);
  return simulate_path(model, n, stream, budget);
}

/// Population at generation n of a Galton-Watson process without immigration
/// started from `ancestors` individuals.
inline Count simulate_gw(const DiscreteLaw& offspring, Count ancestors, int n, CounterStream& stream,
                         std::uint64_t budget = kDefaultDrawBudget) {
  GWIModel m(DiscreteLaw::deterministic(ancestors), offspring, DiscreteLaw::zero());
  if (n == 0) return ancestors;
  return simulate_path(m, n, stream, budget).final_value();
}

namespace detail {

// Extended-real product with 0 * inf = 0 (an absent population has no mean).
inline double ext_mul(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

}  // namespace detail

/// E(X_n) = m_xi^n E(X_0) + m_eps sum_{i=1}^n m_xi^(n-i).
inline double mean_at(const GWIModel& model, int n) {
  if (n < 0) throw std::invalid_argument("mean_at: horizon must be >= 0");
  const double m = model.offspring_mean();
  const double e0 = model.initial_mean();
  const double me = model.immigration_mean();
  double result = n == 0 ? e0 : detail::ext_mul(std::pow(m, n), e0);
  double geometric = 0.0;
  for (int i = 1; i <= n; ++i) geometric += (n - i == 0) ? 1.0 : std::pow(m, n - i);
  result += detail::ext_mul(me, geometric);
  return result;
}

/// Upper bound E(X_0^r) (E(xi^r))^n on E(X_n^r) for a process without
/// immigration, r > 1.
inline double moment_bound(const GWIModel& model, int n, double r) {
  if (!(r > 1.0)) throw std::invalid_argument("moment_bound: order must be > 1");
  if (n < 0) throw std::invalid_argument("moment_bound: horizon must be >= 0");
  if (!is_degenerate_zero(model.immigration))
    throw std::invalid_argument("moment_bound: model must have zero immigration");
  const double base = moment(model.initial, r);
  if (n == 0) return base;
  return detail::ext_mul(base, std::pow(moment(model.offspring, r), n));
}

}  // namespace gwi
