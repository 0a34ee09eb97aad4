#pragma once

#include <stdexcept>
#include <string>

namespace gwi {

/// Malformed model, law or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No tail proposition applies; `clause` names the failing hypothesis.
class UnsupportedRegime : public std::runtime_error {
 public:
  explicit UnsupportedRegime(std::string clause)
      : std::runtime_error("unsupported regime: " + clause), clause_(std::move(clause)) {}
  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

/// A simulated path exceeded its draw budget (or a count left the
/// representable range) and was censored.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gwi
