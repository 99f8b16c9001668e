#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>

#include <json.hpp>

#include "pitch3d/dataset.hpp"
#include "pitch3d/nn.hpp"

namespace pitch3d::eval {

inline constexpr double kDefaultEps = 0.10;

struct Metrics {
  double mse_loss = 0.0;
  double mean_squared_distance = 0.0;  // m^2
  double rmse = 0.0;                   // m
  double hit_rate_at_eps = 0.0;
  double eps = kDefaultEps;
  std::array<double, 3> per_axis_mae{};  // m
  double max_error = 0.0;                // m
  std::size_t n_samples = 0;
};

double squared_distance(const Vec3& pred, const Vec3& actual);

/// Aggregates metrics from paired predictions and labeled samples.
Metrics compute_metrics(std::span<const Vec3> predictions, std::span<const dataset::Sample> samples, double eps);

Metrics evaluate(const nn::MlpModel& model, const dataset::NormStats& stats, const dataset::Dataset& ds,
                 double eps = kDefaultEps);

nlohmann::json to_json(const Metrics& m);

/// CSV `traj,t,true_x,true_y,true_z,pred_x,pred_y,pred_z,err_m`, rows ordered by (traj, t).
void export_comparison(const nn::MlpModel& model, const dataset::NormStats& stats, const dataset::Dataset& ds,
                       const std::filesystem::path& path);

}  // namespace pitch3d::eval
