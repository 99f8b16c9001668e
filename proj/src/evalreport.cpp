#include "pitch3d/evalreport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pitch3d/error.hpp"
#include "pitch3d/io.hpp"

namespace pitch3d::eval {

double squared_distance(const Vec3& pred, const Vec3& actual) {
  const Vec3 d = pred - actual;
  return d.x * d.x + d.y * d.y + d.z * d.z;
}

Metrics compute_metrics(std::span<const Vec3> predictions, std::span<const dataset::Sample> samples, double eps) {
  if (samples.empty()) throw Error(ErrorCode::EmptyDataset, "cannot evaluate an empty dataset");
  if (predictions.size() != samples.size()) throw Error(ErrorCode::ShapeMismatch, "prediction count mismatch");
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "eps must be > 0");

  Metrics m;
  m.eps = eps;
  m.n_samples = samples.size();
  std::vector<double> pred_flat;
  std::vector<double> true_flat;
  pred_flat.reserve(3 * samples.size());
  true_flat.reserve(3 * samples.size());

  double sd_sum = 0.0;
  std::size_t hits = 0;
  std::array<double, 3> abs_sum{};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].target) throw Error(ErrorCode::FormatError, "evaluation sample has no target");
    const auto& t = *samples[i].target;
    const Vec3 actual{t[0], t[1], t[2]};
    const Vec3& p = predictions[i];
    const double sd = squared_distance(p, actual);
    sd_sum += sd;
    const double err = std::sqrt(sd);
    if (err <= eps) ++hits;
    m.max_error = std::max(m.max_error, err);
    abs_sum[0] += std::abs(p.x - actual.x);
    abs_sum[1] += std::abs(p.y - actual.y);
    abs_sum[2] += std::abs(p.z - actual.z);
    pred_flat.insert(pred_flat.end(), {p.x, p.y, p.z});
    true_flat.insert(true_flat.end(), t.begin(), t.end());
  }
  const double n = static_cast<double>(samples.size());
  m.mean_squared_distance = sd_sum / n;
  m.rmse = std::sqrt(m.mean_squared_distance);
  m.hit_rate_at_eps = static_cast<double>(hits) / n;
  for (int a = 0; a < 3; ++a) m.per_axis_mae[a] = abs_sum[a] / n;
  m.mse_loss = nn::mse_loss(pred_flat, true_flat);
  return m;
}

Metrics evaluate(const nn::MlpModel& model, const dataset::NormStats& stats, const dataset::Dataset& ds, double eps) {
  if (ds.samples.empty()) throw Error(ErrorCode::EmptyDataset, "cannot evaluate an empty dataset");
  const auto predictions = nn::predict_all(model, stats, ds.samples);
  return compute_metrics(predictions, ds.samples, eps);
}

nlohmann::json to_json(const Metrics& m) {
  return {
      {"mse_loss", m.mse_loss},
      {"mean_squared_distance", m.mean_squared_distance},
      {"rmse", m.rmse},
      {"hit_rate_at_eps", m.hit_rate_at_eps},
      {"eps", m.eps},
      {"per_axis_mae", {m.per_axis_mae[0], m.per_axis_mae[1], m.per_axis_mae[2]}},
      {"max_error", m.max_error},
      {"n_samples", m.n_samples},
  };
}

void export_comparison(const nn::MlpModel& model, const dataset::NormStats& stats, const dataset::Dataset& ds,
                       const std::filesystem::path& path) {
  dataset::require_labeled(ds);
  const auto predictions = nn::predict_all(model, stats, ds.samples);
  std::vector<std::size_t> order(ds.samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = ds.samples[a];
    const auto& sb = ds.samples[b];
    if (sa.trajectory_id != sb.trajectory_id) return sa.trajectory_id < sb.trajectory_id;
    return sa.features[0] < sb.features[0];
  });

  io::write_atomic(path, [&](std::ostream& os) {
    os << "traj,t,true_x,true_y,true_z,pred_x,pred_y,pred_z,err_m\n";
    std::string line;
    for (std::size_t idx : order) {
      const auto& s = ds.samples[idx];
      const auto& t = *s.target;
      const Vec3& p = predictions[idx];
      line = std::to_string(s.trajectory_id);
      for (double v : {s.features[0], t[0], t[1], t[2], p.x, p.y, p.z,
                       std::sqrt(squared_distance(p, Vec3{t[0], t[1], t[2]}))}) {
        line.push_back(',');
        io::append_real(line, v);
      }
      line.push_back('\n');
      os << line;
    }
  });
}

}  // namespace pitch3d::eval
