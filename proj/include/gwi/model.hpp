#pragma once

#include <nlohmann/json.hpp>

#include "gwi/laws.hpp"

namespace gwi {

/// Galton-Watson process with immigration: X_k = sum_{i <= X_{k-1}} xi_{k,i} + eps_k.
struct GWIModel {
  DiscreteLaw initial;      // X_0
  DiscreteLaw offspring;    // xi
  DiscreteLaw immigration;  // eps

  GWIModel() = default;
  GWIModel(DiscreteLaw x0, DiscreteLaw xi, DiscreteLaw eps)
      : initial(std::move(x0)), offspring(std::move(xi)), immigration(std::move(eps)) {}

  double offspring_mean() const { return mean(offspring); }
  double immigration_mean() const { return mean(immigration); }
  double initial_mean() const { return mean(initial); }

  friend bool operator==(const GWIModel&, const GWIModel&) = default;

  nlohmann::json to_json() const {
    return {{"initial", initial.to_json()},
            {"offspring", offspring.to_json()},
            {"immigration", immigration.to_json()}};
  }

  static GWIModel from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("model must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key != "initial" && key != "offspring" && key != "immigration")
        throw ConfigError("unknown model field \"" + key + "\"");
    }
    for (const char* key : {"initial", "offspring", "immigration"}) {
      if (!j.contains(key)) throw ConfigError(std::string("model is missing \"") + key + "\"");
    }
    return GWIModel(DiscreteLaw::from_json(j.at("initial")), DiscreteLaw::from_json(j.at("offspring")),
                    DiscreteLaw::from_json(j.at("immigration")));
  }
};

}  // namespace gwi
