#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "smhgc/graphdata/synth.hpp"
#include "smhgc/model/smhgc.hpp"

namespace smhgc::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumeric = 3;

// Settings every command accepts. Echoed to <out>/run.json.
struct RunConfig {
  std::filesystem::path dataset;
  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  int threads = 1;
  SmhgcConfig model;  // model.seed follows `seed`
};

struct SynthOptions {
  std::vector<double> hr_grid;
  // Generate the source instead of loading --dataset.
  bool planted = false;
  PlantedSpec planted_spec;
};

struct BaselineOptions {
  int orders = 2;
  std::string graph = "both";  // raw | sim_enhanced | both
  std::vector<double> hr_grid;
};

struct EvalOptions {
  std::filesystem::path assignment;
  std::filesystem::path checkpoint;
};

struct SweepOptions {
  std::vector<int> k_grid;
  std::vector<int> order_grid;
  std::vector<double> gamma_sim_grid;
  std::vector<double> gamma_r_grid;
  std::vector<double> hr_grid;
};

nlohmann::json to_json(const RunConfig& config);

// Each command writes into config.out and returns an exit code; fatal
// problems are thrown as smhgc errors.
int cmd_synth(const RunConfig& config, const SynthOptions& options);
int cmd_analyze(const RunConfig& config);
int cmd_baseline(const RunConfig& config, const BaselineOptions& options);
int cmd_train(const RunConfig& config);
int cmd_eval(const RunConfig& config, const EvalOptions& options);
int cmd_sweep(const RunConfig& config, const SweepOptions& options);

// Parses argv, runs the selected command and maps errors onto exit codes.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

// Directory name used by synth for one grid point, e.g. "hr_0.3".
std::string hr_directory_name(double hr);

// "node,cluster" CSV.
void write_assignment(const Labels& assignment, const std::filesystem::path& path);
Labels read_assignment(const std::filesystem::path& path);

}  // namespace smhgc::cli
