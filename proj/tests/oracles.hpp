#pragma once

// Independent reference computations for tests. Nothing here calls into the
// code path it is used to check.

#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "pitch3d/camera.hpp"
#include "pitch3d/dataset.hpp"
#include "pitch3d/nn.hpp"
#include "pitch3d/physics.hpp"

namespace oracle {

using pitch3d::Vec3;

/// Gravity + quadratic drag + constant-coefficient Magnus, written out per component.
inline std::array<double, 3> accel(const std::array<double, 3>& v, const pitch3d::physics::PitchParams& p) {
  const double area = std::numbers::pi * (p.diameter / 2) * (p.diameter / 2);
  const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  std::array<double, 3> a{0.0, 0.0, -9.81};
  if (speed == 0.0) return a;
  const double drag = 0.5 * p.air_density * p.drag_coefficient * area * speed / p.mass;
  for (int i = 0; i < 3; ++i) a[i] -= drag * v[i];
  if (p.spin_rate > 0.0) {
    const double lift = 0.5 * p.air_density * p.lift_coefficient * area * speed * speed / p.mass;
    const double s[3] = {p.spin_axis.x, p.spin_axis.y, p.spin_axis.z};
    const double u[3] = {v[0] / speed, v[1] / speed, v[2] / speed};
    a[0] += lift * (s[1] * u[2] - s[2] * u[1]);
    a[1] += lift * (s[2] * u[0] - s[0] * u[2]);
    a[2] += lift * (s[0] * u[1] - s[1] * u[0]);
  }
  return a;
}

struct EulerState {
  double t;
  std::array<double, 3> p;
  std::array<double, 3> v;
};

/// Semi-implicit-free forward Euler over `duration` with step h.
inline EulerState euler_advance(EulerState s, double duration, double h, const pitch3d::physics::PitchParams& params) {
  const auto steps = static_cast<long>(std::llround(duration / h));
  for (long n = 0; n < steps; ++n) {
    const auto a = accel(s.v, params);
    for (int i = 0; i < 3; ++i) {
      s.p[i] += h * s.v[i];
      s.v[i] += h * a[i];
    }
    s.t += h;
  }
  return s;
}

/// Forward Euler until y <= plate_y, then linear interpolation onto the plane.
inline EulerState euler_crossing(const pitch3d::physics::PitchParams& params, double h, double plate_y = 0.0) {
  EulerState s{0.0,
               {params.release_position.x, params.release_position.y, params.release_position.z},
               {params.release_velocity.x, params.release_velocity.y, params.release_velocity.z}};
  while (true) {
    EulerState next = s;
    const auto a = accel(s.v, params);
    for (int i = 0; i < 3; ++i) {
      next.p[i] += h * s.v[i];
      next.v[i] += h * a[i];
    }
    next.t += h;
    if (next.p[1] <= plate_y) {
      const double w = (s.p[1] - plate_y) / (s.p[1] - next.p[1]);
      EulerState out;
      out.t = s.t + w * h;
      for (int i = 0; i < 3; ++i) {
        out.p[i] = s.p[i] + w * (next.p[i] - s.p[i]);
        out.v[i] = s.v[i] + w * (next.v[i] - s.v[i]);
      }
      return out;
    }
    s = next;
  }
}

/// Classical RK4 in long double, ending with a Newton-truncated step onto y = plate_y.
/// Used as a high-precision integration reference.
struct LongState {
  long double t;
  long double p[3];
  long double v[3];
};

inline void accel_ld(const pitch3d::physics::PitchParams& pp, const long double* v, long double* a) {
  const long double r = static_cast<long double>(pp.diameter) / 2;
  const long double q = 0.5L * pp.air_density * std::numbers::pi_v<long double> * r * r / pp.mass;
  const long double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  a[0] = 0;
  a[1] = 0;
  a[2] = -9.81L;
  for (int i = 0; i < 3; ++i) a[i] -= q * pp.drag_coefficient * speed * v[i];
  if (pp.spin_rate > 0.0) {
    const long double s[3] = {pp.spin_axis.x, pp.spin_axis.y, pp.spin_axis.z};
    const long double c[3] = {s[1] * v[2] - s[2] * v[1], s[2] * v[0] - s[0] * v[2], s[0] * v[1] - s[1] * v[0]};
    for (int i = 0; i < 3; ++i) a[i] += q * pp.lift_coefficient * speed * c[i];
  }
}

inline LongState rk4_ld(const pitch3d::physics::PitchParams& pp, const LongState& s, long double h) {
  long double k1[3], k2[3], k3[3], k4[3], v2[3], v3[3], v4[3];
  accel_ld(pp, s.v, k1);
  for (int i = 0; i < 3; ++i) v2[i] = s.v[i] + h / 2 * k1[i];
  accel_ld(pp, v2, k2);
  for (int i = 0; i < 3; ++i) v3[i] = s.v[i] + h / 2 * k2[i];
  accel_ld(pp, v3, k3);
  for (int i = 0; i < 3; ++i) v4[i] = s.v[i] + h * k3[i];
  accel_ld(pp, v4, k4);
  LongState o;
  o.t = s.t + h;
  for (int i = 0; i < 3; ++i) {
    o.p[i] = s.p[i] + h / 6 * (s.v[i] + 2 * v2[i] + 2 * v3[i] + v4[i]);
    o.v[i] = s.v[i] + h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return o;
}

inline LongState rk4_crossing_ld(const pitch3d::physics::PitchParams& pp, long double h, long double plate_y = 0) {
  LongState s{0,
              {pp.release_position.x, pp.release_position.y, pp.release_position.z},
              {pp.release_velocity.x, pp.release_velocity.y, pp.release_velocity.z}};
  while (true) {
    const LongState n = rk4_ld(pp, s, h);
    if (n.p[1] <= plate_y) {
      long double tau = h * (s.p[1] - plate_y) / (s.p[1] - n.p[1]);
      for (int it = 0; it < 60; ++it) {
        const LongState m = rk4_ld(pp, s, tau);
        tau -= (m.p[1] - plate_y) / m.v[1];
      }
      return rk4_ld(pp, s, tau);
    }
    s = n;
  }
}

/// Distance between a simulated endpoint and the long double reference endpoint.
inline double endpoint_distance(const pitch3d::Vec3& p, const LongState& ref) {
  const long double dx = p.x - ref.p[0], dy = p.y - ref.p[1], dz = p.z - ref.p[2];
  return static_cast<double>(std::sqrt(dx * dx + dy * dy + dz * dz));
}

/// u ~ P X with P = K [R | t] as a 3x4 matrix and X homogeneous.
inline pitch3d::camera::PixelCoord project_homogeneous(const pitch3d::camera::CameraModel& c, const Vec3& x) {
  const double K[3][3] = {{c.fx, 0, c.cx}, {0, c.fy, c.cy}, {0, 0, 1}};
  double Rt[3][4];
  for (int r = 0; r < 3; ++r) {
    for (int k = 0; k < 3; ++k) Rt[r][k] = c.rotation[r][k];
  }
  Rt[0][3] = c.translation.x;
  Rt[1][3] = c.translation.y;
  Rt[2][3] = c.translation.z;
  double P[3][4] = {};
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 4; ++col)
      for (int k = 0; k < 3; ++k) P[r][col] += K[r][k] * Rt[k][col];
  const double X[4] = {x.x, x.y, x.z, 1.0};
  double h[3] = {};
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 4; ++col) h[r] += P[r][col] * X[col];
  return {h[0] / h[2], h[1] / h[2]};
}

/// Plain triple-loop forward pass without fused multiply-adds.
inline std::vector<double> naive_forward(const pitch3d::nn::MlpModel& m, const std::vector<double>& x) {
  std::vector<double> a = x;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const auto& L = m.layers[l];
    std::vector<double> z(L.out);
    for (std::size_t o = 0; o < L.out; ++o) {
      double s = L.biases[o];
      for (std::size_t i = 0; i < L.in; ++i) s += L.weights[o * L.in + i] * a[i];
      z[o] = (l + 1 < m.layers.size()) ? std::max(s, 0.0) : s;
    }
    a = z;
  }
  return a;
}

/// Mean squared error of the naive forward pass over a batch.
inline double naive_loss(const pitch3d::nn::MlpModel& m, const std::vector<double>& x, const std::vector<double>& y,
                         std::size_t batch) {
  const std::size_t in = m.layers.front().in;
  const std::size_t out = m.layers.back().out;
  double sum = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const std::vector<double> xb(x.begin() + b * in, x.begin() + (b + 1) * in);
    const auto pred = naive_forward(m, xb);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = pred[o] - y[b * out + o];
      sum += d * d;
    }
  }
  return sum / static_cast<double>(batch * out);
}

/// Population mean and std per column computed in two passes.
inline pitch3d::dataset::NormStats two_pass_stats(const pitch3d::dataset::Dataset& ds) {
  pitch3d::dataset::NormStats s;
  const double n = static_cast<double>(ds.samples.size());
  for (std::size_t j = 0; j < pitch3d::dataset::kFeatureCount; ++j) {
    double sum = 0.0;
    for (const auto& smp : ds.samples) sum += smp.features[j];
    const double mean = sum / n;
    double sq = 0.0;
    for (const auto& smp : ds.samples) sq += (smp.features[j] - mean) * (smp.features[j] - mean);
    s.mean[j] = mean;
    s.std[j] = std::max(std::sqrt(sq / n), 1e-8);
  }
  return s;
}

/// Random dataset of `n_traj` trajectories with `per_traj` samples each.
inline pitch3d::dataset::Dataset random_dataset(std::size_t n_traj, std::size_t per_traj, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  pitch3d::dataset::Dataset ds;
  for (std::size_t t = 0; t < n_traj; ++t) {
    for (std::size_t k = 0; k < per_traj; ++k) {
      pitch3d::dataset::Sample s;
      s.trajectory_id = static_cast<std::int64_t>(t);
      for (std::size_t j = 0; j < pitch3d::dataset::kFeatureCount; ++j) s.features[j] = g(rng) * (j + 1) + j;
      s.features[0] = 0.01 * static_cast<double>(k);
      s.target = pitch3d::dataset::Target{g(rng), g(rng), g(rng)};
      ds.samples.push_back(s);
    }
  }
  ds.metadata = {{"format_version", 1}};
  return ds;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("pitch3d_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
