// Experiment runner. One subcommand per experiment kind plus `replay`.
//
// Exit codes: 0 success, 2 invalid config, 3 cap exceeded, 4 non-convergence,
// 5 replay mismatch, 1 internal error.

#include <omp.h>

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "reclab/experiment.hpp"
#include "reclab/kernels.hpp"
#include "reclab/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfigInvalid = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitReplayMismatch = 5;

reclab::Json load_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw reclab::ConfigError("cannot open file: " + path);
  reclab::Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw reclab::ConfigError("invalid JSON in " + path + ": " + e.what());
  }
  return j;
}

struct GlobalFlags {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool exact = false;
  bool use_float = false;
  int threads = 0;
};

int run_kind(const std::string& kind, const GlobalFlags& flags) {
  reclab::Json cfg = flags.config_path.empty() ? reclab::Json::object() : load_json(flags.config_path);
  if (cfg.contains("kind")) {
    if (cfg.at("kind").get<std::string>() != kind)
      throw reclab::ConfigError("config kind '" + cfg.at("kind").get<std::string>() +
                                "' does not match subcommand '" + kind + "'");
  } else {
    cfg["kind"] = kind;
  }
  if (flags.seed) cfg["seeds"]["master_seed"] = *flags.seed;
  if (flags.exact) cfg["mode"] = "exact";
  if (flags.use_float) cfg["mode"] = "float";

  auto outcome = reclab::run_and_write(cfg, flags.out_dir);
  std::cout << "wrote " << flags.out_dir << "/record.json";
  for (const auto& [name, content] : outcome.csv_files) {
    (void)content;
    std::cout << " " << flags.out_dir << "/" << name;
  }
  std::cout << "\n";
  for (const auto& w : outcome.record.at("warnings"))
    std::cout << "warning: " << w.get<std::string>() << "\n";
  return outcome.partial ? kExitCapExceeded : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(reclab::kArtifactName) + " " + reclab::kArtifactVersion +
               " - survival, escape-rate and recurrence-rate experiments"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "experiment configuration (JSON)");
  app.add_option("--out", flags.out_dir, "output directory");
  app.add_option("--seed", flags.seed, "master seed override");
  auto* exact_flag = app.add_flag("--exact", flags.exact, "exact rational mode");
  app.add_flag("--float", flags.use_float, "floating-point mode")->excludes(exact_flag);
  app.add_option("--threads", flags.threads, "OpenMP thread count (0 = default)");

  const std::vector<std::string> kinds = {"survival",    "escape-rate", "theta",
                                          "lcurve",      "lzero",       "union-check",
                                          "hypotheses",  "phi",         "ball",
                                          "product-relation"};
  for (const auto& kind : kinds) app.add_subcommand(kind, "run the '" + kind + "' experiment");

  std::string record_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a record and verify its payload");
  replay_cmd->add_option("record", record_path, "path to record.json")->required();

  CLI11_PARSE(app, argc, argv);

  if (flags.threads > 0) omp_set_num_threads(flags.threads);
  if (flags.threads == 1) reclab::kernel_settings().parallel = false;

  try {
    if (replay_cmd->parsed()) {
      auto record = load_json(record_path);
      if (flags.seed) {
        auto recorded = record.at("config").at("seeds").at("master_seed").get<std::uint64_t>();
        if (recorded != *flags.seed) {
          std::cerr << "replay refused: --seed " << *flags.seed
                    << " differs from the recorded master_seed " << recorded
                    << " (a seed change is a config change)\n";
          return kExitConfigInvalid;
        }
      }
      auto result = reclab::replay_record(record);
      if (result.match) {
        std::cout << "replay: results payload reproduced\n";
        return kExitOk;
      }
      std::cout << "replay: MISMATCH at " << result.first_divergence << "\n";
      return kExitReplayMismatch;
    }
    for (const auto& kind : kinds)
      if (app.get_subcommand(kind)->parsed()) return run_kind(kind, flags);
    throw reclab::ConfigError("no subcommand selected");
  } catch (const reclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigInvalid;
  } catch (const reclab::CapExceededError& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const reclab::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
