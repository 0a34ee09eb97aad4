// Command-line front end: predict, simulate, verify, oracle, randsum.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gwi/gwi.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUnsupported = 2;
constexpr int kExitConfig = 3;
constexpr int kExitBudget = 4;
constexpr double kCensoredLimit = 0.01;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw gwi::ConfigError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw gwi::ConfigError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out) throw IoError("write failed for " + path);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_predict(const std::string& model_path, int n, const std::string& out) {
  const gwi::GWIModel model = gwi::GWIModel::from_json(read_json(model_path));
  if (n < 1) throw gwi::ConfigError("--n must be >= 1");
  const gwi::RegimeClassification cls = gwi::classify(model);
  if (cls.regime == gwi::Regime::Unsupported) {
    const nlohmann::json j{{"regime", "Unsupported"},
                           {"n", n},
                           {"failing_clause", cls.failing_clause},
                           {"hypothesis_checklist", cls.checklist_json()}};
    write_text(out, j.dump(2) + "\n");
    std::cerr << "unsupported regime: " << cls.failing_clause << "\n";
    return kExitUnsupported;
  }
  write_text(out, gwi::predict_tail(model, n, cls).to_json().dump(2) + "\n");
  return kExitOk;
}

int cmd_simulate(const std::string& model_path, int n, std::uint64_t paths, std::uint64_t seed,
                 const std::string& out) {
  const gwi::GWIModel model = gwi::GWIModel::from_json(read_json(model_path));
  if (n < 1) throw gwi::ConfigError("--n must be >= 1");
  std::ostringstream os;
  os << "path";
  for (int k = 0; k <= n; ++k) os << ",X_" << k;
  os << ",root";
  for (int i = 1; i <= n; ++i) os << ",imm_" << i;
  os << ",censored\n";
  std::uint64_t censored = 0;
  for (std::uint64_t i = 0; i < paths; ++i) {
    os << i;
    try {
      const gwi::DecomposedPath p = gwi::simulate_path(model, n, seed, i);
      for (const auto x : p.path) os << ',' << x;
      os << ',' << p.root_component;
      for (const auto c : p.immigration_components) os << ',' << c;
      os << ",0\n";
    } catch (const gwi::BudgetExceeded&) {
      ++censored;
      for (int k = 0; k < 2 * n + 2; ++k) os << ',';
      os << "1\n";
    }
  }
  write_text(out, os.str());
  if (paths > 0 && static_cast<double>(censored) / static_cast<double>(paths) > kCensoredLimit) return kExitBudget;
  return kExitOk;
}

int cmd_verify(const gwi::ExperimentConfig& config) {
  const gwi::VerifyResult r = gwi::run_verify(config);
  write_text(config.out, ends_with(config.out, ".csv") ? r.report.to_csv() : r.report.to_json().dump(2) + "\n");
  if (r.censored_fraction > kCensoredLimit) {
    std::cerr << "more than 1% of paths censored\n";
    return kExitBudget;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& model_path, int n, std::int64_t kmax, const std::string& out) {
  const gwi::GWIModel model = gwi::GWIModel::from_json(read_json(model_path));
  if (n < 1) throw gwi::ConfigError("--n must be >= 1");
  if (kmax < 0) throw gwi::ConfigError("--kmax must be >= 0");
  if (static_cast<std::uint64_t>(n + 1) * static_cast<std::uint64_t>(kmax + 1) > gwi::kOracleEvaluationBudget)
    throw gwi::ConfigError("oracle guard: (n+1) * K exceeds the evaluation budget");
  const gwi::TruncatedPmf pmf = gwi::exact_pmf_X_n(model, n, kmax);
  std::string csv = "k,pmf,survival_lo,survival_hi\n";
  double tail = 0.0;
  std::vector<double> lo(pmf.masses.size());
  for (std::int64_t k = pmf.cutoff(); k >= 0; --k) {
    lo[k] = tail;
    tail += pmf.masses[k];
  }
  for (std::int64_t k = 0; k <= pmf.cutoff(); ++k) {
    csv += std::to_string(k) + "," + fmt(pmf.masses[k]) + "," + fmt(lo[k]) + "," + fmt(lo[k] + pmf.deficit) + "\n";
  }
  csv += "deficit," + fmt(pmf.deficit) + ",,\n";
  write_text(out, csv);
  return kExitOk;
}

int cmd_randsum(const std::string& tau_path, const std::string& zeta_path, std::optional<std::uint64_t> paths,
                std::uint64_t seed, const std::string& grid, unsigned workers, const std::string& out) {
  const gwi::DiscreteLaw tau = gwi::DiscreteLaw::from_json(read_json(tau_path));
  const gwi::DiscreteLaw zeta = gwi::DiscreteLaw::from_json(read_json(zeta_path));
  const gwi::RandomSumResult r = gwi::run_random_sum(tau, zeta, paths, seed, grid, workers);
  write_text(out, r.to_json().dump(2) + "\n");
  if (r.prediction.regime == gwi::RandomSumRegime::Unsupported) {
    std::cerr << "unsupported regime: " << r.prediction.failing_clause << "\n";
    return kExitUnsupported;
  }
  if (r.censored_fraction > kCensoredLimit) return kExitBudget;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail asymptotics of Galton-Watson processes with immigration"};
  app.set_version_flag("--version", gwi::kVersion);
  app.require_subcommand(1);

  std::string model_path, out, grid = "geometric:1,1000000,25", tau_path, zeta_path;
  int n = 1;
  std::uint64_t paths = 0, seed = 0;
  std::int64_t kmax = 0;
  unsigned workers = 0;

  auto* predict = app.add_subcommand("predict", "Classify a model and print its tail coefficients");
  predict->add_option("--model", model_path, "Model JSON file")->required();
  predict->add_option("--n", n, "Horizon")->required();
  predict->add_option("--out", out, "Output JSON file (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Simulate decomposed paths to CSV");
  simulate->add_option("--model", model_path)->required();
  simulate->add_option("--n", n)->required();
  simulate->add_option("--paths", paths)->required();
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--out", out)->required();

  auto* verify = app.add_subcommand("verify", "Monte Carlo tail report against the prediction");
  verify->add_option("--model", model_path)->required();
  verify->add_option("--n", n)->required();
  verify->add_option("--paths", paths)->required();
  verify->add_option("--seed", seed)->required();
  verify->add_option("--x-grid", grid, "geometric:<lo>,<hi>,<points> or comma-separated integers")->required();
  verify->add_option("--workers", workers, "Worker threads (0 = auto)");
  verify->add_option("--out", out, "Report file (.csv for the flat table, JSON otherwise)")->required();

  auto* oracle = app.add_subcommand("oracle", "Exact pmf of X_n by mass propagation");
  oracle->add_option("--model", model_path)->required();
  oracle->add_option("--n", n)->required();
  oracle->add_option("--kmax", kmax, "Cutoff K")->required();
  oracle->add_option("--out", out)->required();

  std::optional<std::uint64_t> rs_paths;
  auto* randsum = app.add_subcommand("randsum", "Random-sum tail prediction and optional Monte Carlo check");
  randsum->add_option("--tau", tau_path, "Count law JSON")->required();
  randsum->add_option("--zeta", zeta_path, "Summand law JSON")->required();
  randsum->add_option("--paths", rs_paths);
  randsum->add_option("--seed", seed);
  randsum->add_option("--x-grid", grid);
  randsum->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*predict) return cmd_predict(model_path, n, out);
    if (*simulate) return cmd_simulate(model_path, n, paths, seed, out);
    if (*verify) {
      gwi::ExperimentConfig config;
      config.model = gwi::GWIModel::from_json(read_json(model_path));
      config.n = n;
      config.paths = paths;
      config.master_seed = seed;
      config.x_grid = grid;
      config.workers = workers;
      config.out = out;
      return cmd_verify(config);
    }
    if (*oracle) return cmd_oracle(model_path, n, kmax, out);
    if (*randsum) return cmd_randsum(tau_path, zeta_path, rs_paths, seed, grid, workers, out);
  } catch (const gwi::UnsupportedRegime& e) {
    std::cerr << e.what() << "\n";
    return kExitUnsupported;
  } catch (const gwi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const gwi::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kExitBudget;
  } catch (const IoError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
