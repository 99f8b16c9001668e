#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "pitch3d/dataset.hpp"
#include "pitch3d/nn.hpp"

namespace pitch3d::config {

struct Seeds {
  std::uint64_t generate = 1;
  std::uint64_t split = 2;
  std::uint64_t init = 3;
  std::uint64_t shuffle = 4;
};

/// Every section is optional and falls back to the defaults; unknown keys are
/// rejected with Error(InvalidConfig).
struct RunConfig {
  dataset::GenerationSpec generation;  // physics, camera, references, noise, counts
  nn::MlpConfig mlp;
  nn::AdamConfig adam;
  nn::TrainConfig training;
  double eval_eps = 0.10;
  Seeds seeds;

  void validate() const;

  /// Generation spec with the seed section applied.
  dataset::GenerationSpec generation_spec() const;
  nn::MlpConfig mlp_config() const;
  nn::TrainConfig train_config() const;
};

RunConfig parse(const nlohmann::json& doc);
RunConfig load(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace pitch3d::config
