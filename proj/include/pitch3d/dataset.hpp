#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pitch3d/camera.hpp"
#include "pitch3d/physics.hpp"

namespace pitch3d::dataset {

inline constexpr std::size_t kFeatureCount = 13;
inline constexpr std::size_t kTargetCount = 3;
inline constexpr int kFormatVersion = 1;

using Features = std::array<double, kFeatureCount>;
using Target = std::array<double, kTargetCount>;

/// Feature column order. The tracker CSV header is "frame," followed by these names.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "t",       "ball_u",  "ball_v",  "ref1_u",  "ref1_v",  "ref2_u", "ref2_v",
    "ref3_u",  "ref3_v",  "ref4_u",  "ref4_v",  "ref5_u",  "ref5_v"};

struct Sample {
  Features features{};
  std::optional<Target> target;  // absent for inference-only (tracked) data
  std::int64_t trajectory_id = 0;

  bool operator==(const Sample&) const = default;
};

struct Dataset {
  std::vector<Sample> samples;
  nlohmann::json metadata = nlohmann::json::object();

  bool operator==(const Dataset&) const = default;
  std::size_t trajectory_count() const;
};

struct NormStats {
  Features mean{};
  Features std{};

  bool operator==(const NormStats&) const = default;
};

inline constexpr double kStdFloor = 1e-8;

Sample assemble(const camera::Observation& obs, const Vec3& target, std::int64_t trajectory_id);
camera::Observation unpack(const Sample& sample);

/// Population mean/std per feature over `train`, std floored at kStdFloor.
NormStats fit_norm_stats(const Dataset& train);

Features normalize(const Features& x, const NormStats& stats);
Features denormalize(const Features& z, const NormStats& stats);

struct Split {
  Dataset train;
  Dataset val;
};

/// Partitions by trajectory id; the validation side gets
/// clamp(round(val_fraction * n_traj), 1, n_traj - 1) trajectories.
Split split(const Dataset& ds, double val_fraction, std::uint64_t seed);

/// Throws Error(EmptyDataset) if the dataset cannot be used for training or evaluation.
void require_labeled(const Dataset& ds);

void save(const Dataset& ds, const std::filesystem::path& path);
Dataset load(const std::filesystem::path& path);

struct GenerationSpec {
  physics::SimulationSettings simulation;
  physics::SamplingRanges ranges;
  camera::CameraModel camera = camera::default_camera();
  camera::ReferenceSet references = camera::default_references();
  camera::NoiseConfig noise;
  std::size_t n_trajectories = 100;
  std::uint64_t seed = 1;
};

/// Serializable digest of a generation spec, stored as the dataset metadata line.
nlohmann::json describe(const GenerationSpec& spec);

/// Simulates and observes `n_trajectories` pitches. Trajectory i draws from
/// the stream mix_seed(seed, i), so the output is independent of evaluation order.
Dataset generate(const GenerationSpec& spec);

/// Tracker ingest schema. Rows with any blank cell count as tracking loss.
struct TrackedData {
  std::vector<std::int64_t> frames;
  Dataset dataset;  // samples carry no target
  std::size_t dropped = 0;
};

std::string tracker_csv_header();
TrackedData ingest_tracker_csv(const std::filesystem::path& path);

/// Writes samples in the tracker schema; frame index = position within its trajectory.
void write_tracker_csv(std::span<const Sample> samples, const std::filesystem::path& path);

}  // namespace pitch3d::dataset
