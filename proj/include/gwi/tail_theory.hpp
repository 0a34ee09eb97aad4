#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gwi/model.hpp"

namespace gwi {

enum class Regime {
  OffspringRV,
  InitialRV,
  InitialOffspringRV,
  ImmigrationRV,
  OffspringImmigrationRV,
  InitialImmigrationRV,
  AllThreeRV,
  Unsupported,
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::OffspringRV: return "OffspringRV";
    case Regime::InitialRV: return "InitialRV";
    case Regime::InitialOffspringRV: return "InitialOffspringRV";
    case Regime::ImmigrationRV: return "ImmigrationRV";
    case Regime::OffspringImmigrationRV: return "OffspringImmigrationRV";
    case Regime::InitialImmigrationRV: return "InitialImmigrationRV";
    case Regime::AllThreeRV: return "AllThreeRV";
    case Regime::Unsupported: return "Unsupported";
  }
  return "?";
}

/// Tail metadata of one law, read from its declaration (never from samples).
struct LawFacts {
  std::string name;
  bool regularly_varying = false;
  double index = kInfinity;  // tail index, +inf when light
  double damping = 0.0;      // log-power of the slowly varying factor
  double mean = 0.0;
  bool degenerate_zero = false;

  static LawFacts of(const std::string& name, const DiscreteLaw& law) {
    LawFacts f;
    f.name = name;
    f.regularly_varying = is_regularly_varying(law);
    f.index = moment_order(law);
    f.damping = log_damping_power(law);
    f.mean = gwi::mean(law);
    f.degenerate_zero = is_degenerate_zero(law);
    return f;
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"law", name}, {"regularly_varying", regularly_varying}, {"degenerate_zero", degenerate_zero}};
    j["index"] = regularly_varying ? nlohmann::json(index) : nlohmann::json(nullptr);
    j["mean"] = std::isfinite(mean) ? nlohmann::json(mean) : nlohmann::json("inf");
    if (regularly_varying) j["log_damping"] = damping;
    return j;
  }
};

/// P(A > x) = O(P(B > x)): A has a larger index, or the same index and a
/// slowly varying factor no heavier than B's. Light laws are dominated by
/// every regularly varying law.
inline bool tail_dominated(const LawFacts& a, const LawFacts& b) {
  if (!b.regularly_varying) return false;
  if (!a.regularly_varying) return true;
  if (a.index != b.index) return a.index > b.index;
  return a.damping >= b.damping;
}

/// Some r > threshold with E(A^r) < inf for every listed law.
inline bool moments_beyond(double threshold, std::initializer_list<const LawFacts*> laws) {
  for (const LawFacts* f : laws) {
    if (!(f->index > threshold)) return false;
  }
  return true;
}

inline double moment_witness(double threshold, std::initializer_list<const LawFacts*> laws) {
  double bound = kInfinity;
  for (const LawFacts* f : laws) bound = std::min(bound, f->index);
  return std::isfinite(bound) ? 0.5 * (threshold + bound) : threshold + 1.0;
}

struct Clause {
  std::string text;
  bool holds = false;
};

struct RegimeAttempt {
  Regime regime = Regime::Unsupported;
  std::vector<Clause> clauses;
  std::optional<double> moment_r;  // witness r for the moment clause

  bool applies() const {
    for (const auto& c : clauses)
      if (!c.holds) return false;
    return true;
  }
  const Clause* first_failure() const {
    for (const auto& c : clauses)
      if (!c.holds) return &c;
    return nullptr;
  }
  // The regular-variation structure (first clause) matched.
  bool structure_matches() const { return !clauses.empty() && clauses.front().holds; }
};

struct RegimeClassification {
  Regime regime = Regime::Unsupported;
  double index = kInfinity;
  LawFacts initial, offspring, immigration;
  std::vector<RegimeAttempt> attempts;
  std::string failing_clause;
  std::vector<std::string> flags;

  const RegimeAttempt* selected() const {
    for (const auto& a : attempts)
      if (a.regime == regime) return &a;
    return nullptr;
  }

  nlohmann::json checklist_json() const {
    nlohmann::json j;
    j["laws"] = {{"initial", initial.to_json()},
                 {"offspring", offspring.to_json()},
                 {"immigration", immigration.to_json()}};
    nlohmann::json tried = nlohmann::json::array();
    for (const auto& a : attempts) {
      nlohmann::json clauses = nlohmann::json::array();
      for (const auto& c : a.clauses) clauses.push_back({{"clause", c.text}, {"holds", c.holds}});
      nlohmann::json entry{{"regime", to_string(a.regime)}, {"applies", a.applies()}, {"clauses", clauses}};
      if (a.moment_r) entry["moment_r"] = *a.moment_r;
      tried.push_back(entry);
    }
    j["regimes"] = tried;
    if (!failing_clause.empty()) j["failing_clause"] = failing_clause;
    j["flags"] = flags;
    return j;
  }
};

namespace detail {

inline std::string fmt_num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline Clause positive_finite_mean(const LawFacts& f, const char* symbol) {
  return {std::string(symbol) + " in (0, inf)", f.mean > 0.0 && std::isfinite(f.mean)};
}

}  // namespace detail

/// Decides which tail statement applies to the model, from law metadata.
///
/// Dispatch prefers the most specific regime: all three laws, then the
/// two-law regimes, then the one-law regimes.
inline RegimeClassification classify(const GWIModel& model) {
  using detail::fmt_num;
  RegimeClassification out;
  out.initial = LawFacts::of("X0", model.initial);
  out.offspring = LawFacts::of("xi", model.offspring);
  out.immigration = LawFacts::of("eps", model.immigration);
  const LawFacts& x0 = out.initial;
  const LawFacts& xi = out.offspring;
  const LawFacts& eps = out.immigration;
  const Clause xi_nondegenerate{"P(xi = 0) < 1", !xi.degenerate_zero};

  auto same_index = [](const LawFacts& a, const LawFacts& b) {
    return a.regularly_varying && b.regularly_varying && a.index == b.index;
  };

  // All three laws regularly varying with a common index beta >= 1.
  {
    RegimeAttempt a{Regime::AllThreeRV, {}, {}};
    const double beta = x0.index;
    a.clauses.push_back({"X0, xi, eps regularly varying with a common index beta >= 1",
                         same_index(x0, xi) && same_index(xi, eps) && beta >= 1.0});
    a.clauses.push_back({"P(xi > x) = O(P(X0 > x))", tail_dominated(xi, x0)});
    a.clauses.push_back({"P(xi > x) = O(P(eps > x))", tail_dominated(xi, eps)});
    if (beta == 1.0) {
      a.clauses.push_back(detail::positive_finite_mean(x0, "E(X0)"));
      a.clauses.push_back(detail::positive_finite_mean(xi, "m_xi"));
      a.clauses.push_back({"m_eps in [0, inf)", std::isfinite(eps.mean)});
    }
    out.attempts.push_back(a);
  }
  // X0 and xi with common index beta >= 1.
  {
    RegimeAttempt a{Regime::InitialOffspringRV, {}, {}};
    const double beta = x0.index;
    a.clauses.push_back({"X0, xi regularly varying with a common index beta >= 1", same_index(x0, xi) && beta >= 1.0});
    a.clauses.push_back({"P(xi > x) = O(P(X0 > x))", tail_dominated(xi, x0)});
    a.clauses.push_back({"exists r > " + fmt_num(beta) + " with E(eps^r) < inf", moments_beyond(beta, {&eps})});
    if (a.clauses.back().holds) a.moment_r = moment_witness(beta, {&eps});
    if (beta == 1.0) {
      a.clauses.push_back(detail::positive_finite_mean(x0, "E(X0)"));
      a.clauses.push_back(detail::positive_finite_mean(xi, "m_xi"));
    }
    out.attempts.push_back(a);
  }
  // xi and eps with common index gamma >= 1.
  {
    RegimeAttempt a{Regime::OffspringImmigrationRV, {}, {}};
    const double gamma = xi.index;
    a.clauses.push_back({"xi, eps regularly varying with a common index gamma >= 1", same_index(xi, eps) && gamma >= 1.0});
    a.clauses.push_back({"P(xi > x) = O(P(eps > x))", tail_dominated(xi, eps)});
    a.clauses.push_back({"exists r > " + fmt_num(gamma) + " with E(X0^r) < inf", moments_beyond(gamma, {&x0})});
    if (a.clauses.back().holds) a.moment_r = moment_witness(gamma, {&x0});
    if (gamma == 1.0) {
      a.clauses.push_back(detail::positive_finite_mean(xi, "m_xi"));
      a.clauses.push_back(detail::positive_finite_mean(eps, "m_eps"));
    }
    out.attempts.push_back(a);
  }
  // X0 and eps with common index gamma >= 0.
  {
    RegimeAttempt a{Regime::InitialImmigrationRV, {}, {}};
    const double gamma = x0.index;
    const double t = std::max(1.0, gamma);
    a.clauses.push_back({"X0, eps regularly varying with a common index", same_index(x0, eps)});
    a.clauses.push_back(xi_nondegenerate);
    a.clauses.push_back({"exists r > " + fmt_num(t) + " with E(xi^r) < inf", moments_beyond(t, {&xi})});
    if (a.clauses.back().holds) a.moment_r = moment_witness(t, {&xi});
    out.attempts.push_back(a);
  }
  // xi alone, index alpha >= 1.
  {
    RegimeAttempt a{Regime::OffspringRV, {}, {}};
    const double alpha = xi.index;
    a.clauses.push_back({"xi regularly varying with index alpha >= 1", xi.regularly_varying && alpha >= 1.0});
    a.clauses.push_back({"exists r > " + fmt_num(alpha) + " with E(X0^r) < inf and E(eps^r) < inf",
                         moments_beyond(alpha, {&x0, &eps})});
    if (a.clauses.back().holds) a.moment_r = moment_witness(alpha, {&x0, &eps});
    a.clauses.push_back({"P(X0 = 0) < 1 or P(eps = 0) < 1", !x0.degenerate_zero || !eps.degenerate_zero});
    if (alpha == 1.0) a.clauses.push_back(detail::positive_finite_mean(xi, "m_xi"));
    out.attempts.push_back(a);
  }
  // X0 alone, index beta >= 0.
  {
    RegimeAttempt a{Regime::InitialRV, {}, {}};
    const double t = std::max(1.0, x0.index);
    a.clauses.push_back({"X0 regularly varying", x0.regularly_varying});
    a.clauses.push_back(xi_nondegenerate);
    a.clauses.push_back({"exists r > " + fmt_num(t) + " with E(xi^r) < inf and E(eps^r) < inf",
                         moments_beyond(t, {&xi, &eps})});
    if (a.clauses.back().holds) a.moment_r = moment_witness(t, {&xi, &eps});
    out.attempts.push_back(a);
  }
  // eps alone, index gamma >= 0.
  {
    RegimeAttempt a{Regime::ImmigrationRV, {}, {}};
    const double t = std::max(1.0, eps.index);
    a.clauses.push_back({"eps regularly varying", eps.regularly_varying});
    a.clauses.push_back(xi_nondegenerate);
    a.clauses.push_back({"exists r > " + fmt_num(t) + " with E(xi^r) < inf and E(X0^r) < inf",
                         moments_beyond(t, {&xi, &x0})});
    if (a.clauses.back().holds) a.moment_r = moment_witness(t, {&xi, &x0});
    out.attempts.push_back(a);
  }

  for (const auto& a : out.attempts) {
    if (a.applies()) {
      out.regime = a.regime;
      break;
    }
  }

  switch (out.regime) {
    case Regime::OffspringRV:
    case Regime::OffspringImmigrationRV: out.index = xi.index; break;
    case Regime::InitialRV:
    case Regime::InitialOffspringRV:
    case Regime::InitialImmigrationRV:
    case Regime::AllThreeRV: out.index = x0.index; break;
    case Regime::ImmigrationRV: out.index = eps.index; break;
    case Regime::Unsupported: break;
  }

  if (out.regime == Regime::AllThreeRV && out.index == 1.0) {
    out.flags.push_back(
        "index 1 with all three laws regularly varying: m_eps >= 0 accepted as printed; the two-law statements "
        "require m_eps > 0");
  }

  if (out.regime == Regime::Unsupported) {
    if (xi.degenerate_zero) {
      out.failing_clause = xi_nondegenerate.text;
    } else if (!x0.regularly_varying && !xi.regularly_varying && !eps.regularly_varying) {
      out.failing_clause = "at least one of X0, xi, eps regularly varying";
    } else {
      for (const auto& a : out.attempts) {
        if (a.structure_matches()) {
          out.failing_clause = a.first_failure()->text;
          break;
        }
      }
      if (out.failing_clause.empty()) out.failing_clause = "no tail statement matches the regular-variation pattern";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficients

namespace detail {

inline void check_coeff_args(int n, double alpha, double m) {
  if (n < 1) throw std::invalid_argument("horizon must be >= 1");
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("offspring mean must be positive and finite");
  if (!(alpha >= 1.0)) throw std::invalid_argument("tail index must be >= 1");
}

}  // namespace detail

/// c in P(V_n > x) ~ c P(xi > x) for a single-ancestor process:
/// m^(n-1) sum_{i=0}^{n-1} m^(i(alpha-1)).
inline double gw_tail_coeff(int n, double alpha, double m) {
  detail::check_coeff_args(n, alpha, m);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::pow(m, i * (alpha - 1.0));
  return std::pow(m, n - 1) * sum;
}

/// The same constant in the form m^((n-1)alpha) sum_{i=0}^{n-1} m^(i(1-alpha)).
inline double basrak_equiv_coeff(int n, double alpha, double m) {
  detail::check_coeff_args(n, alpha, m);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::pow(m, i * (1.0 - alpha));
  return std::pow(m, (n - 1) * alpha) * sum;
}

/// sum_{i=1}^{n-1} m^(n-i-1) sum_{j=0}^{n-i-1} m^(j(alpha-1)): offspring-tail
/// weight carried by the immigration waves (per unit of m_eps).
inline double immigrant_offspring_weight(int n, double alpha, double m) {
  double outer = 0.0;
  for (int i = 1; i <= n - 1; ++i) {
    double inner = 0.0;
    for (int j = 0; j <= n - i - 1; ++j) inner += std::pow(m, j * (alpha - 1.0));
    outer += std::pow(m, n - i - 1) * inner;
  }
  return outer;
}

/// sum_{i=1}^{n} m^((n-i) gamma).
inline double immigration_weight(int n, double gamma, double m) {
  double sum = 0.0;
  for (int i = 1; i <= n; ++i) sum += (n - i == 0) ? 1.0 : std::pow(m, (n - i) * gamma);
  return sum;
}

/// P(X_n > x) ~ c_xi P(xi > x) + c_x0 P(X0 > x) + c_eps P(eps > x).
struct TailPrediction {
  int n = 1;
  double index = 0.0;
  double c_xi = 0.0;
  double c_x0 = 0.0;
  double c_eps = 0.0;
  Regime regime = Regime::Unsupported;
  RegimeClassification classification;

  nlohmann::json to_json() const {
    return {{"regime", to_string(regime)}, {"index", index},  {"n", n},
            {"c_xi", c_xi},                {"c_x0", c_x0},     {"c_eps", c_eps},
            {"hypothesis_checklist", classification.checklist_json()}};
  }
};

inline TailPrediction predict_tail([[maybe_unused]] const GWIModel& model, int n, const RegimeClassification& cls) {
  if (n < 1) throw std::invalid_argument("predict_tail: horizon must be >= 1");
  if (cls.regime == Regime::Unsupported) throw UnsupportedRegime(cls.failing_clause);
  TailPrediction p;
  p.n = n;
  p.regime = cls.regime;
  p.index = cls.index;
  p.classification = cls;
  const double m = cls.offspring.mean;
  const double e0 = cls.initial.mean;
  const double me = cls.immigration.mean;
  const double idx = cls.index;

  auto offspring_term = [&] {
    // The root term vanishes when X0 = 0 a.s. and the wave term when eps = 0 a.s.
    double c = 0.0;
    if (e0 > 0.0) c += e0 * gw_tail_coeff(n, idx, m);
    if (me > 0.0) c += me * immigrant_offspring_weight(n, idx, m);
    return c;
  };
  switch (cls.regime) {
    case Regime::OffspringRV: p.c_xi = offspring_term(); break;
    case Regime::InitialRV: p.c_x0 = std::pow(m, n * idx); break;
    case Regime::InitialOffspringRV:
      p.c_xi = offspring_term();
      p.c_x0 = std::pow(m, n * idx);
      break;
    case Regime::ImmigrationRV: p.c_eps = immigration_weight(n, idx, m); break;
    case Regime::OffspringImmigrationRV:
      p.c_xi = offspring_term();
      p.c_eps = immigration_weight(n, idx, m);
      break;
    case Regime::InitialImmigrationRV:
      p.c_x0 = std::pow(m, n * idx);
      p.c_eps = immigration_weight(n, idx, m);
      break;
    case Regime::AllThreeRV:
      p.c_xi = offspring_term();
      p.c_x0 = std::pow(m, n * idx);
      p.c_eps = immigration_weight(n, idx, m);
      break;
    case Regime::Unsupported: break;
  }
  return p;
}

inline TailPrediction predict_tail(const GWIModel& model, int n) { return predict_tail(model, n, classify(model)); }

/// c_xi S_xi(x) + c_x0 S_0(x) + c_eps S_eps(x).
inline double predicted_survival(const TailPrediction& p, const GWIModel& model, double x) {
  double s = 0.0;
  if (p.c_xi > 0.0) s += p.c_xi * survival_at(model.offspring, x);
  if (p.c_x0 > 0.0) s += p.c_x0 * survival_at(model.initial, x);
  if (p.c_eps > 0.0) s += p.c_eps * survival_at(model.immigration, x);
  return s;
}

// ---------------------------------------------------------------------------
// Supercritical series sum_{i=0}^{n-1} m^i S(m^(i+1) x)

inline constexpr int kInfiniteHorizon = -1;

/// Series sum_{i=0}^{n-1} m^i S_xi(m^(i+1) x), S extended to reals by
/// flooring. For n = kInfiniteHorizon the sum stops once a bound on the
/// remaining terms falls below tol.
inline double wdk_series(const DiscreteLaw& offspring, double m, int n, double x, double tol) {
  if (!(m > 1.0)) throw std::invalid_argument("wdk_series: mean must be > 1");
  if (!(tol > 0.0)) throw std::invalid_argument("wdk_series: tol must be > 0");
  if (!(x > 0.0)) throw std::invalid_argument("wdk_series: x must be > 0");
  if (n != kInfiniteHorizon && n < 1) throw std::invalid_argument("wdk_series: horizon must be >= 1");

  const auto idx = tail_index(offspring);
  const double scale = offspring.is<law::ParetoZeta>() ? 1.0 - offspring.as<law::ParetoZeta>().w0 : 1.0;
  const double p = log_damping_power(offspring);
  const double log_m = std::log(m);
  const double log_x = std::log(x);
  // log(m^(i+1) x); past ~4e18 the Pareto survival is evaluated in log space,
  // where (y+1)^-a log(y+e)^-p equals y^-a log(y)^-p to double precision.
  auto log_arg = [&](int i) { return (i + 1) * log_m + log_x; };
  constexpr double kLogDirect = 43.0;
  auto term = [&](int i) {
    const double ly = log_arg(i);
    if (ly < kLogDirect) return std::pow(m, i) * survival_at(offspring, std::exp(ly));
    if (!idx) return 0.0;
    double log_s = std::log(scale) - *idx * ly;
    if (p > 0.0) log_s -= p * std::log(ly);
    return std::exp(i * log_m + log_s);
  };
  if (n != kInfiniteHorizon) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += term(i);
    return sum;
  }

  // Survival bound S(y) <= C y^-alpha (log(y))^-p for y >= 1.
  auto remainder_bound = [&](int i) -> double {
    if (!idx) return kInfinity;
    const double a = *idx;
    const double ly = log_arg(i);
    if (a > 1.0) {
      // Geometric: sum_{j>=i} m^j C (m^(j+1) x)^-a.
      const double ratio = std::pow(m, 1.0 - a);
      return scale * std::exp(i * log_m - a * ly) / (1.0 - ratio);
    }
    if (a == 1.0 && p > 1.0) {
      // sum_{j>=i} (m x)^-1 log(m^(j+1) x)^-p <= integral bound.
      const double base = ly - log_m;
      if (base <= 0.0) return kInfinity;
      return scale / (m * x) * (std::pow(ly, -p) + std::pow(base, 1.0 - p) / ((p - 1.0) * log_m));
    }
    return kInfinity;
  };

  double sum = 0.0;
  double prev = kInfinity;
  for (int i = 0; i < 10'000'000; ++i) {
    if (remainder_bound(i) < tol) break;
    const double t = term(i);
    sum += t;
    // Light-tailed summands: terms decay faster than any power once small.
    if (!idx && t < tol * 1e-3 && t <= prev) break;
    prev = t;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Random sums sum_{i=1}^{tau} zeta_i

enum class RandomSumRegime {
  CountDominated,    // tau heavier: c_tau = (E zeta)^beta
  SummandDominated,  // zeta heavier: c_zeta = E tau
  BalancedTails,     // equal index: both terms
  Unsupported,
};

inline const char* to_string(RandomSumRegime r) {
  switch (r) {
    case RandomSumRegime::CountDominated: return "CountDominated";
    case RandomSumRegime::SummandDominated: return "SummandDominated";
    case RandomSumRegime::BalancedTails: return "BalancedTails";
    case RandomSumRegime::Unsupported: return "Unsupported";
  }
  return "?";
}

/// P(sum > x) ~ c_tau P(tau > x) + c_zeta P(zeta > x).
struct RandomSumPrediction {
  double c_tau = 0.0;
  double c_zeta = 0.0;
  double index = kInfinity;
  RandomSumRegime regime = RandomSumRegime::Unsupported;
  std::string failing_clause;

  nlohmann::json to_json() const {
    nlohmann::json j{{"regime", to_string(regime)}, {"c_tau", c_tau}, {"c_zeta", c_zeta}};
    j["index"] = std::isfinite(index) ? nlohmann::json(index) : nlohmann::json(nullptr);
    if (!failing_clause.empty()) j["failing_clause"] = failing_clause;
    return j;
  }
};

inline RandomSumPrediction classify_random_sum(const DiscreteLaw& tau, const DiscreteLaw& zeta) {
  const LawFacts t = LawFacts::of("tau", tau);
  const LawFacts z = LawFacts::of("zeta", zeta);
  const bool mean_zeta_ok = z.mean > 0.0 && std::isfinite(z.mean);
  const bool mean_tau_ok = t.mean > 0.0 && std::isfinite(t.mean);
  RandomSumPrediction out;

  // Equal index beta >= 1 with P(zeta > x) = O(P(tau > x)).
  if (t.regularly_varying && z.regularly_varying && t.index == z.index && t.index >= 1.0) {
    if (!tail_dominated(z, t)) {
      out.failing_clause =
          "P(zeta > x) = O(P(tau > x)) fails at equal index: the balanced-tails formula can not be applied";
      return out;
    }
    if (t.index == 1.0 && !(mean_tau_ok && mean_zeta_ok)) {
      out.failing_clause = "index 1 requires E(tau), E(zeta) in (0, inf)";
      return out;
    }
    out.regime = RandomSumRegime::BalancedTails;
    out.index = t.index;
    out.c_tau = std::pow(z.mean, t.index);
    out.c_zeta = t.mean;
    return out;
  }
  // Heavy count, summand with enough moments.
  if (t.regularly_varying && mean_zeta_ok && (t.index < 1.0 || z.index > t.index)) {
    out.regime = RandomSumRegime::CountDominated;
    out.index = t.index;
    out.c_tau = std::pow(z.mean, t.index);
    return out;
  }
  // Heavy summand with index >= 1, count with enough moments.
  if (z.regularly_varying && z.index >= 1.0 && !t.degenerate_zero && t.index > z.index &&
      (z.index > 1.0 || mean_zeta_ok)) {
    out.regime = RandomSumRegime::SummandDominated;
    out.index = z.index;
    out.c_zeta = t.mean;
    return out;
  }

  if (!t.regularly_varying && !z.regularly_varying) out.failing_clause = "tau or zeta regularly varying";
  else if (t.regularly_varying && !mean_zeta_ok) out.failing_clause = "E(zeta) in (0, inf)";
  else if (z.regularly_varying && z.index < 1.0) out.failing_clause = "zeta regularly varying with index >= 1";
  else if (t.degenerate_zero) out.failing_clause = "P(tau = 0) < 1";
  else out.failing_clause = "no random-sum statement applies";
  return out;
}

inline double predicted_random_sum_survival(const RandomSumPrediction& p, const DiscreteLaw& tau,
                                            const DiscreteLaw& zeta, double x) {
  double s = 0.0;
  if (p.c_tau > 0.0) s += p.c_tau * survival_at(tau, x);
  if (p.c_zeta > 0.0) s += p.c_zeta * survival_at(zeta, x);
  return s;
}

// ---------------------------------------------------------------------------
// Truncated moments

/// Limit of x^beta P(X>x) / E(X^beta; X<=x) (beta > alpha) or of
/// x^beta P(X>x) / E(X^beta; X>x) (beta < alpha).
inline double karamata_ratio_limit(double alpha, double beta) {
  if (!(alpha > 0.0)) throw std::invalid_argument("karamata_ratio_limit: alpha must be > 0");
  if (beta == alpha) throw std::invalid_argument("karamata_ratio_limit: beta must differ from alpha");
  return beta > alpha ? (beta - alpha) / alpha : (alpha - beta) / alpha;
}

/// E(X^beta 1{X <= x}) by direct summation.
inline double truncated_moment(const DiscreteLaw& law, double beta, std::int64_t x) {
  double sum = 0.0;
  for (std::int64_t k = 1; k <= x; ++k) sum += std::pow(static_cast<double>(k), beta) * pmf(law, k);
  return sum;
}

/// The finite-x ratio whose limit karamata_ratio_limit gives, from exact
/// law quantities.
inline double karamata_ratio_exact(const DiscreteLaw& law, double beta, std::int64_t x) {
  const auto idx = tail_index(law);
  if (!idx) throw std::invalid_argument("karamata_ratio_exact: law must be regularly varying");
  const double head = std::pow(static_cast<double>(x), beta) * survival(law, x);
  const double trunc = truncated_moment(law, beta, x);
  if (beta > *idx) return head / trunc;
  return head / (moment(law, beta) - trunc);
}

}  // namespace gwi
