#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "gwi/errors.hpp"
#include "gwi/philox.hpp"
#include "gwi/special.hpp"

namespace gwi {

using Count = std::uint64_t;

/// Counts at or above this value are treated as overflow and censor a path.
inline constexpr Count kMaxCount = Count{1} << 62;

namespace law {

/// Survival (1 - w0) (k+1)^(-alpha) for k >= 0.
struct ParetoZeta {
  double alpha = 1.0;
  double w0 = 0.0;
};

/// Survival (k+1)^(-alpha) (log(k+e))^(-p) for k >= 0.
struct LogDampedPareto {
  double alpha = 1.0;
  double p = 2.0;
};

struct Poisson {
  double lambda = 1.0;
};

/// Failures before the first success: pmf prob (1-prob)^k on {0, 1, ...}.
struct Geometric {
  double prob = 0.5;
};

struct Deterministic {
  Count value = 0;
};

struct Zero {};

}  // namespace law

/// Non-negative integer-valued distribution with exact survival function.
class DiscreteLaw {
 public:
  using Variant = std::variant<law::ParetoZeta, law::LogDampedPareto, law::Poisson,
                               law::Geometric, law::Deterministic, law::Zero>;

  DiscreteLaw() : v_(law::Zero{}) {}

  static DiscreteLaw pareto_zeta(double alpha, double w0 = 0.0) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("pareto_zeta: alpha must be > 0");
    if (!(w0 >= 0.0 && w0 < 1.0)) throw ConfigError("pareto_zeta: w0 must lie in [0, 1)");
    return DiscreteLaw(law::ParetoZeta{alpha, w0});
  }
  static DiscreteLaw log_damped_pareto(double alpha, double p = 2.0) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("log_damped_pareto: alpha must be > 0");
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("log_damped_pareto: p must be >= 0");
    return DiscreteLaw(law::LogDampedPareto{alpha, p});
  }
  static DiscreteLaw poisson(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("poisson: lambda must be >= 0");
    return DiscreteLaw(law::Poisson{lambda});
  }
  static DiscreteLaw geometric(double prob) {
    if (!(prob > 0.0 && prob <= 1.0)) throw ConfigError("geometric: prob must lie in (0, 1]");
    return DiscreteLaw(law::Geometric{prob});
  }
  static DiscreteLaw deterministic(Count value) {
    if (value >= kMaxCount) throw ConfigError("deterministic: value out of range");
    return DiscreteLaw(law::Deterministic{value});
  }
  static DiscreteLaw zero() { return DiscreteLaw(law::Zero{}); }

  const Variant& variant() const { return v_; }

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v_);
  }
  template <class T>
  const T& as() const {
    return std::get<T>(v_);
  }

  friend bool operator==(const DiscreteLaw& a, const DiscreteLaw& b) {
    return a.to_json() == b.to_json();
  }

  nlohmann::json to_json() const;
  static DiscreteLaw from_json(const nlohmann::json& j);
  std::string describe() const;

 private:
  explicit DiscreteLaw(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

namespace detail {

inline double log_damping(double k, double p) {
  return p == 0.0 ? 1.0 : std::pow(std::log(k + M_E), -p);
}

// Continuous extension of the survival function used for the Pareto tails.
inline double pareto_survival_real(const DiscreteLaw& law, double k) {
  if (law.is<law::ParetoZeta>()) {
    const auto& pz = law.as<law::ParetoZeta>();
    return (1.0 - pz.w0) * std::pow(k + 1.0, -pz.alpha);
  }
  const auto& ld = law.as<law::LogDampedPareto>();
  return std::pow(k + 1.0, -ld.alpha) * log_damping(k, ld.p);
}

inline double poisson_pmf(double lambda, double k) {
  if (lambda == 0.0) return k == 0.0 ? 1.0 : 0.0;
  return std::exp(k * std::log(lambda) - lambda - std::lgamma(k + 1.0));
}

}  // namespace detail

/// P(X > k) for integer k >= -1; S(-1) = 1.
inline double survival(const DiscreteLaw& law, std::int64_t k) {
  if (k < 0) return 1.0;
  const double kd = static_cast<double>(k);
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, law::ParetoZeta> || std::is_same_v<T, law::LogDampedPareto>) {
          return detail::pareto_survival_real(law, kd);
        } else if constexpr (std::is_same_v<T, law::Poisson>) {
          if (d.lambda == 0.0) return 0.0;
          return boost::math::gamma_p(kd + 1.0, d.lambda);
        } else if constexpr (std::is_same_v<T, law::Geometric>) {
          return std::pow(1.0 - d.prob, kd + 1.0);
        } else if constexpr (std::is_same_v<T, law::Deterministic>) {
          return static_cast<Count>(k) < d.value ? 1.0 : 0.0;
        } else {
          return 0.0;
        }
      },
      law.variant());
}

/// Survival at a real argument, S(x) := S(floor(x)).
inline double survival_at(const DiscreteLaw& law, double x) {
  if (x < 0.0) return 1.0;
  const double fl = std::floor(x);
  if (fl > 4.0e18) {
    if (law.is<law::ParetoZeta>() || law.is<law::LogDampedPareto>())
      return detail::pareto_survival_real(law, fl);
    return 0.0;
  }
  return survival(law, static_cast<std::int64_t>(fl));
}

/// P(X = k) = S(k-1) - S(k), evaluated without cancellation where possible.
inline double pmf(const DiscreteLaw& law, std::int64_t k) {
  if (k < 0) return 0.0;
  const double kd = static_cast<double>(k);
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, law::ParetoZeta>) {
          if (k == 0) return d.w0;
          // (1-w0) [k^-a - (k+1)^-a] = (1-w0) k^-a [1 - (1+1/k)^-a]
          return -(1.0 - d.w0) * std::pow(kd, -d.alpha) * std::expm1(-d.alpha * std::log1p(1.0 / kd));
        } else if constexpr (std::is_same_v<T, law::LogDampedPareto>) {
          return std::max(0.0, survival(law, k - 1) - survival(law, k));
        } else if constexpr (std::is_same_v<T, law::Poisson>) {
          return detail::poisson_pmf(d.lambda, kd);
        } else if constexpr (std::is_same_v<T, law::Geometric>) {
          return d.prob * std::pow(1.0 - d.prob, kd);
        } else if constexpr (std::is_same_v<T, law::Deterministic>) {
          return static_cast<Count>(k) == d.value ? 1.0 : 0.0;
        } else {
          return k == 0 ? 1.0 : 0.0;
        }
      },
      law.variant());
}

/// Inverse-transform sample: the unique k with S(k) < u <= S(k-1).
///
/// Values that would reach kMaxCount are returned as kMaxCount.
inline Count sample(const DiscreteLaw& law, double u) {
  return std::visit(
      [&](const auto& d) -> Count {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, law::ParetoZeta>) {
          if (u > 1.0 - d.w0) return 0;
          const double t = std::pow((1.0 - d.w0) / u, 1.0 / d.alpha);
          if (!(t < static_cast<double>(kMaxCount) / 2)) return kMaxCount;
          auto k = static_cast<std::int64_t>(std::floor(t));
          while (survival(law, k) >= u) ++k;
          while (k > 0 && survival(law, k - 1) < u) --k;
          return static_cast<Count>(k);
        } else if constexpr (std::is_same_v<T, law::LogDampedPareto>) {
          // S(k) <= (k+1)^-alpha, so hi satisfies S(hi) < u.
          const double t = std::ceil(std::pow(u, -1.0 / d.alpha));
          if (!(t < static_cast<double>(kMaxCount) / 2)) return kMaxCount;
          std::int64_t lo = -1;
          auto hi = static_cast<std::int64_t>(t);
          while (survival(law, hi) >= u) hi *= 2;
          while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (survival(law, mid) < u) hi = mid;
            else lo = mid;
          }
          return static_cast<Count>(hi);
        } else if constexpr (std::is_same_v<T, law::Poisson>) {
          if (d.lambda == 0.0) return 0;
          if (d.lambda < 30.0) {
            // Sequential search on the running survival.
            double p = std::exp(-d.lambda);
            double s = 1.0 - p;
            Count k = 0;
            while (s >= u && p > 0.0) {
              ++k;
              p *= d.lambda / static_cast<double>(k);
              s -= p;
            }
            return k;
          }
          namespace bm = boost::math;
          const double q = bm::quantile(bm::complement(bm::poisson_distribution<>(d.lambda), u));
          auto k = static_cast<std::int64_t>(std::max(0.0, std::floor(q)));
          while (survival(law, k) >= u) ++k;
          while (k > 0 && survival(law, k - 1) < u) --k;
          return static_cast<Count>(k);
        } else if constexpr (std::is_same_v<T, law::Geometric>) {
          if (d.prob == 1.0) return 0;
          const double t = std::floor(std::log(u) / std::log1p(-d.prob));
          if (!(t < static_cast<double>(kMaxCount) / 2)) return kMaxCount;
          auto k = static_cast<std::int64_t>(std::max(0.0, t));
          while (survival(law, k) >= u) ++k;
          while (k > 0 && survival(law, k - 1) < u) --k;
          return static_cast<Count>(k);
        } else if constexpr (std::is_same_v<T, law::Deterministic>) {
          return d.value;
        } else {
          return 0;
        }
      },
      law.variant());
}

/// Regular-variation index; empty for light-tailed laws.
inline std::optional<double> tail_index(const DiscreteLaw& law) {
  if (law.is<law::ParetoZeta>()) return law.as<law::ParetoZeta>().alpha;
  if (law.is<law::LogDampedPareto>()) return law.as<law::LogDampedPareto>().alpha;
  return std::nullopt;
}

inline bool is_regularly_varying(const DiscreteLaw& law) { return tail_index(law).has_value(); }

/// Power p of the log(x)^(-p) slowly varying factor (0 for ParetoZeta).
inline double log_damping_power(const DiscreteLaw& law) {
  if (law.is<law::LogDampedPareto>()) return law.as<law::LogDampedPareto>().p;
  return 0.0;
}

/// Supremum of the finite moment orders: the tail index, or +inf when light.
inline double moment_order(const DiscreteLaw& law) {
  return tail_index(law).value_or(kInfinity);
}

/// Whether E(X^r) < inf. At r equal to the tail index the answer is
/// variant-specific: ParetoZeta diverges (harmonic-type series) while
/// LogDampedPareto converges iff p > 1.
inline bool moment_finite(const DiscreteLaw& law, double r) {
  const auto idx = tail_index(law);
  if (!idx) return true;
  if (r < *idx) return true;
  if (r > *idx) return false;
  return law.is<law::LogDampedPareto>() && law.as<law::LogDampedPareto>().p > 1.0;
}

/// P(X = 0) = 1.
inline bool is_degenerate_zero(const DiscreteLaw& law) { return pmf(law, 0) == 1.0; }

namespace detail {

inline double pareto_zeta_moment(const law::ParetoZeta& d, double r) {
  // E X^r = (1-w0) sum_{j>=1} (j^r - (j-1)^r) j^-a. Direct terms up to J,
  // then the binomial expansion of j^r - (j-1)^r against zeta tails.
  constexpr int kDirect = 1000;
  double sum = 0.0;
  for (int j = 1; j <= kDirect; ++j) {
    const double jd = j;
    sum += special::power_increment(jd, r) * std::pow(jd, -d.alpha);
  }
  for (int m = 1; m <= 40; ++m) {
    const double a = special::binomial_increment_coeff(r, m);
    if (a == 0.0) break;
    const double term = a * special::zeta_tail(d.alpha - r + m, kDirect + 1.0);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return (1.0 - d.w0) * sum;
}

inline double log_damped_moment(const law::LogDampedPareto& d, double r) {
  // E X^r = sum_{k>=0} ((k+1)^r - k^r) S(k); direct terms, then
  // Euler-Maclaurin with the tail integral in u = log(x).
  constexpr double kDirect = 20000.0;
  auto f = [&](double x) {
    return special::power_increment(x + 1.0, r) * std::pow(x + 1.0, -d.alpha) * log_damping(x, d.p);
  };
  double sum = 0.0;
  for (double k = 0.0; k < kDirect; k += 1.0) sum += f(k);
  auto g = [&](double u) {
    // Far out, (x+1)^r - x^r ~ r x^(r-1); stay in log space to avoid overflow.
    if (u > 35.0) return r * std::exp((r - d.alpha) * u) * std::pow(u, -d.p);
    const double x = std::exp(u);
    return f(x) * x;
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  const double integral = integrator.integrate(
      [&](double t) { return g(std::log(kDirect) + t); }, 0.0, kInfinity);
  const double h = kDirect / 100.0;
  const double fprime = (f(kDirect + h) - f(kDirect - h)) / (2.0 * h);
  return sum + integral + 0.5 * f(kDirect) - fprime / 12.0;
}

inline double geometric_moment(double prob, double r) {
  const double q = 1.0 - prob;
  // Terms k^r q^k peak near k = r / -log(q) and decay geometrically after.
  const double mode = r / -std::log(q);
  double sum = 0.0;
  for (double k = 1.0;; k += 1.0) {
    const double t = std::pow(k, r) * prob * std::pow(q, k);
    sum += t;
    if ((k > mode && t <= 1e-18 * sum) || t == 0.0) break;
  }
  return sum;
}

}  // namespace detail

/// E(X^r) for r > 0; +inf when the series diverges.
inline double moment(const DiscreteLaw& law, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("moment: order must be > 0");
  if (!moment_finite(law, r)) return kInfinity;
  return std::visit(
      [&](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, law::ParetoZeta>) {
          return detail::pareto_zeta_moment(d, r);
        } else if constexpr (std::is_same_v<T, law::LogDampedPareto>) {
          return detail::log_damped_moment(d, r);
        } else if constexpr (std::is_same_v<T, law::Poisson>) {
          if (d.lambda == 0.0) return 0.0;
          if (r == 1.0) return d.lambda;
          // Terms past the mode decay geometrically.
          double sum = 0.0;
          const double kmax = d.lambda + 40.0 * std::sqrt(d.lambda) + 60.0;
          for (double k = 1.0; k <= kmax; k += 1.0) sum += std::pow(k, r) * detail::poisson_pmf(d.lambda, k);
          return sum;
        } else if constexpr (std::is_same_v<T, law::Geometric>) {
          const double q = 1.0 - d.prob;
          if (q == 0.0) return 0.0;
          if (r == 1.0) return q / d.prob;
          return detail::geometric_moment(d.prob, r);
        } else if constexpr (std::is_same_v<T, law::Deterministic>) {
          return std::pow(static_cast<double>(d.value), r);
        } else {
          return 0.0;
        }
      },
      law.variant());
}

/// E(X); shares the moment() code path.
inline double mean(const DiscreteLaw& law) { return moment(law, 1.0); }

namespace detail {

// Transformed-rejection Poisson sampler (Hormann 1993) for large means.
inline Count poisson_ptrs(double lambda, CounterStream& stream) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double U = stream.next_uniform() - 0.5;
    const double V = stream.next_uniform();
    const double us = 0.5 - std::abs(U);
    const double k = std::floor((2.0 * a / us + b) * U + lambda + 0.43);
    if (us >= 0.07 && V <= vr) return k >= static_cast<double>(kMaxCount) ? kMaxCount : static_cast<Count>(k);
    if (k < 0.0 || (us < 0.013 && V > us)) continue;
    if (std::log(V) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -lambda + k * loglam - std::lgamma(k + 1.0)) {
      return k >= static_cast<double>(kMaxCount) ? kMaxCount : static_cast<Count>(k);
    }
  }
}

}  // namespace detail

/// Draws one value from the stream.
inline Count draw(const DiscreteLaw& law, CounterStream& stream) {
  if (law.is<law::Deterministic>()) return law.as<law::Deterministic>().value;
  if (law.is<law::Zero>()) return 0;
  return sample(law, stream.next_uniform());
}

struct SumDraw {
  Count value = 0;
  std::uint64_t draws = 0;  // individual variates generated
  bool overflow = false;    // value reached kMaxCount
};

/// Sum of `count` i.i.d. draws. Zero, Deterministic and Poisson use their
/// exact closed-form sum laws; everything else draws each term.
inline SumDraw draw_sum(const DiscreteLaw& law, Count count, CounterStream& stream) {
  SumDraw out;
  if (count == 0 || law.is<law::Zero>()) return out;
  if (law.is<law::Deterministic>()) {
    const Count v = law.as<law::Deterministic>().value;
    if (v != 0 && count >= kMaxCount / v) {
      out.overflow = true;
      out.value = kMaxCount;
    } else {
      out.value = v * count;
    }
    return out;
  }
  if (law.is<law::Poisson>()) {
    const double lambda = law.as<law::Poisson>().lambda * static_cast<double>(count);
    out.draws = 1;
    if (lambda == 0.0) return out;
    out.value = lambda < 30.0 ? sample(DiscreteLaw::poisson(lambda), stream.next_uniform())
                              : detail::poisson_ptrs(lambda, stream);
    out.overflow = out.value >= kMaxCount;
    return out;
  }
  for (Count i = 0; i < count; ++i) {
    const Count x = sample(law, stream.next_uniform());
    ++out.draws;
    if (x >= kMaxCount - out.value) {
      out.overflow = true;
      out.value = kMaxCount;
      return out;
    }
    out.value += x;
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON descriptors

inline nlohmann::json DiscreteLaw::to_json() const {
  return std::visit(
      [](const auto& d) -> nlohmann::json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, law::ParetoZeta>) {
          return {{"family", "pareto_zeta"}, {"alpha", d.alpha}, {"w0", d.w0}};
        } else if constexpr (std::is_same_v<T, law::LogDampedPareto>) {
          return {{"family", "log_damped_pareto"}, {"alpha", d.alpha}, {"p", d.p}};
        } else if constexpr (std::is_same_v<T, law::Poisson>) {
          return {{"family", "poisson"}, {"lambda", d.lambda}};
        } else if constexpr (std::is_same_v<T, law::Geometric>) {
          return {{"family", "geometric"}, {"prob", d.prob}};
        } else if constexpr (std::is_same_v<T, law::Deterministic>) {
          return {{"family", "deterministic"}, {"value", d.value}};
        } else {
          return {{"family", "zero"}};
        }
      },
      v_);
}

inline DiscreteLaw DiscreteLaw::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("law descriptor must be a JSON object");
  if (!j.contains("family") || !j.at("family").is_string()) throw ConfigError("law descriptor needs a string \"family\"");
  const std::string family = j.at("family").get<std::string>();

  auto check_fields = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
      if (key == "family") continue;
      if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end())
        throw ConfigError("unknown field \"" + key + "\" for family " + family);
    }
  };
  auto number = [&](const char* key, std::optional<double> fallback) -> double {
    if (!j.contains(key)) {
      if (fallback) return *fallback;
      throw ConfigError(std::string("missing field \"") + key + "\" for family " + family);
    }
    if (!j.at(key).is_number()) throw ConfigError(std::string("field \"") + key + "\" must be a number");
    return j.at(key).get<double>();
  };

  if (family == "pareto_zeta") {
    check_fields({"alpha", "w0"});
    return pareto_zeta(number("alpha", std::nullopt), number("w0", 0.0));
  }
  if (family == "log_damped_pareto") {
    check_fields({"alpha", "p"});
    return log_damped_pareto(number("alpha", std::nullopt), number("p", 2.0));
  }
  if (family == "poisson") {
    check_fields({"lambda"});
    return poisson(number("lambda", std::nullopt));
  }
  if (family == "geometric") {
    check_fields({"prob"});
    return geometric(number("prob", std::nullopt));
  }
  if (family == "deterministic") {
    check_fields({"value"});
    if (!j.contains("value") || !j.at("value").is_number_unsigned())
      throw ConfigError("deterministic: \"value\" must be a non-negative integer");
    return deterministic(j.at("value").get<Count>());
  }
  if (family == "zero") {
    check_fields({});
    return zero();
  }
  throw ConfigError("unknown law family \"" + family + "\"");
}

inline std::string DiscreteLaw::describe() const {
  std::ostringstream os;
  os.precision(10);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, law::ParetoZeta>) os << "ParetoZeta(" << d.alpha << ", " << d.w0 << ")";
        else if constexpr (std::is_same_v<T, law::LogDampedPareto>) os << "LogDampedPareto(" << d.alpha << ", " << d.p << ")";
        else if constexpr (std::is_same_v<T, law::Poisson>) os << "Poisson(" << d.lambda << ")";
        else if constexpr (std::is_same_v<T, law::Geometric>) os << "Geometric(" << d.prob << ")";
        else if constexpr (std::is_same_v<T, law::Deterministic>) os << "Deterministic(" << d.value << ")";
        else os << "Zero";
      },
      v_);
  return os.str();
}

}  // namespace gwi
