#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pitch3d::cli {

/// Process exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfigError = 2,
  kIoError = 3,
  kDiverged = 4,
  kSchemaMismatch = 5,
  kAllRowsDropped = 6,
};

struct Options {
  std::optional<std::string> config;
  std::optional<std::string> dataset;
  std::optional<std::string> checkpoint;
  std::optional<std::string> in;
  std::optional<std::string> out;
  std::optional<std::string> tracks;
  std::optional<double> eps;
  std::optional<std::uint64_t> seed;
};

/// generate: --config, --out (dataset JSONL); optional --tracks (tracker-schema CSV dump).
int cmd_generate(const Options& opts);
/// train: --config, --dataset, --checkpoint; history CSV at --out or <checkpoint>.history.csv.
int cmd_train(const Options& opts);
/// eval: --checkpoint, --dataset, optional --eps/--config, optional --out comparison CSV.
int cmd_eval(const Options& opts);
/// predict: --checkpoint, --in tracker CSV, --out predictions CSV.
int cmd_predict(const Options& opts);

/// Full command line, including the program name in args[0].
int run(const std::vector<std::string>& args);

}  // namespace pitch3d::cli
