#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "pitch3d/dataset.hpp"
#include "pitch3d/vec3.hpp"

namespace pitch3d::nn {

enum class Activation { Relu };

struct MlpConfig {
  /// fc1..fc7 for the default profile.
  std::vector<std::size_t> layer_sizes{13, 64, 128, 128, 64, 32, 16, 3};
  Activation activation = Activation::Relu;
  std::uint64_t init_seed = 0;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> biases;   // out
};

struct MlpModel {
  MlpConfig config;
  std::vector<DenseLayer> layers;

  std::size_t input_size() const { return layers.front().in; }
  std::size_t output_size() const { return layers.back().out; }
  std::size_t parameter_count() const;
  bool all_finite() const;
};

/// He-uniform weights (bound sqrt(6 / fan_in)) and zero biases.
MlpModel init(const MlpConfig& config);

/// Activations of one forward pass over a batch. post[0] is the input,
/// pre[l] / post[l + 1] the pre-/post-activation of layer l. The output layer
/// is linear, so post.back() aliases the values of pre.back().
struct ForwardCache {
  std::size_t batch = 0;
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
  std::vector<std::vector<double>> packed_weights;  // per-layer in x out scratch

  std::span<const double> output() const { return post.back(); }
};

/// Batched forward pass; `x` is batch x input_size, row-major. Reuses the
/// buffers in `cache`.
void forward_batch(const MlpModel& model, std::span<const double> x, std::size_t batch, ForwardCache& cache);

struct ForwardResult {
  std::vector<double> y;
  ForwardCache cache;
};

ForwardResult forward(const MlpModel& model, std::span<const double> x);

/// Mean over all batch elements and output components of (pred - target)^2.
double mse_loss(std::span<const double> pred, std::span<const double> target, std::size_t width = 3);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;
};

Gradients zero_gradients(const MlpModel& model);

/// Exact gradients of mse_loss(cache.output(), target) with respect to all
/// parameters. `grads` is overwritten.
void backward(const MlpModel& model, const ForwardCache& cache, std::span<const double> target, Gradients& grads);
Gradients backward(const MlpModel& model, const ForwardCache& cache, std::span<const double> target);

struct AdamConfig {
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct AdamState {
  std::vector<std::vector<double>> m_weights, v_weights;
  std::vector<std::vector<double>> m_biases, v_biases;
  std::uint64_t step_count = 0;

  static AdamState zeros_like(const MlpModel& model);
};

void adam_update(MlpModel& model, const Gradients& grads, AdamState& state, const AdamConfig& config);

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  std::uint64_t shuffle_seed = 0;
  double val_fraction = 0.2;
  std::optional<std::size_t> early_stop_patience;

  void validate() const;
};

struct EpochLoss {
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool operator==(const EpochLoss&) const = default;
};

struct TrainHistory {
  std::vector<EpochLoss> epochs;
  bool operator==(const TrainHistory&) const = default;
};

struct TrainResult {
  MlpModel model;
  TrainHistory history;
  std::uint64_t optimizer_steps = 0;
  std::size_t best_epoch = 0;  // 1-based epoch of the returned model
};

/// Optional per-epoch observer (epoch is 1-based).
using EpochCallback = std::function<void(std::size_t epoch, const EpochLoss&)>;

TrainResult train(const dataset::Dataset& train_ds, const dataset::Dataset& val_ds, const dataset::NormStats& stats,
                  const MlpConfig& mlp_config, const AdamConfig& adam_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch = {});

Vec3 predict(const MlpModel& model, const dataset::NormStats& stats, const dataset::Features& raw_features);

/// Batched predict over raw feature rows; same results as predict() per row.
std::vector<Vec3> predict_all(const MlpModel& model, const dataset::NormStats& stats,
                              std::span<const dataset::Sample> samples);

struct Checkpoint {
  MlpModel model;
  dataset::NormStats stats;
  AdamConfig adam;
  nlohmann::json train_meta = nlohmann::json::object();
};

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace pitch3d::nn
