#pragma once

#include <cstdint>
#include <vector>

#include "pitch3d/rng.hpp"
#include "pitch3d/vec3.hpp"

namespace pitch3d::physics {

inline constexpr double kGravity = 9.81;
inline constexpr double kRubberY = 18.44;

/// World frame: origin at the back apex of home plate on the ground, +y toward
/// the rubber, +z up, +x to the catcher's right.
struct PitchParams {
  Vec3 release_position{0.0, 17.0, 1.8};
  Vec3 release_velocity{0.0, -40.0, 0.0};
  Vec3 spin_axis{1.0, 0.0, 0.0};
  double spin_rate = 0.0;  // rad/s
  double drag_coefficient = 0.35;
  double lift_coefficient = 0.20;
  double mass = 0.145;        // kg
  double diameter = 0.0732;   // m
  double air_density = 1.225; // kg/m^3

  /// Throws Error(InvalidParams) when an invariant is violated.
  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  Vec3 position;
  Vec3 velocity;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  PitchParams params;

  double duration() const { return points.empty() ? 0.0 : points.back().t; }
};

struct SimulationSettings {
  double dt = 1.0 / 240.0;
  double plate_y = 0.0;
  double t_max = 2.0;
};

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Per-field uniform sampling ranges. The release direction is a cone around -y:
/// `direction_angle_deg` is the off-axis angle, `direction_azimuth_deg` the
/// rotation of the deviation about the -y axis (0 deg = toward +x).
struct SamplingRanges {
  Range speed{31.0, 45.0};
  Range release_x{-0.6, 0.6};
  Range release_y{16.5, 17.5};
  Range release_z{1.5, 2.0};
  Range spin_rate{100.0, 300.0};
  Range direction_angle_deg{0.0, 5.0};
  Range direction_azimuth_deg{0.0, 360.0};
  Range drag_coefficient{0.35, 0.35};
  Range lift_coefficient{0.20, 0.20};
  double mass = 0.145;
  double diameter = 0.0732;
  double air_density = 1.225;

  /// Throws Error(InvalidRanges) on lo > hi or non-finite bounds.
  void validate() const;
};

Vec3 acceleration(const Vec3& position, const Vec3& velocity, const PitchParams& params);

TrajectoryPoint rk4_step(const TrajectoryPoint& point, double dt, const PitchParams& params);

/// Integrates until the ball reaches the plate plane. The final step is
/// truncated so the last point lies on y = plate_y.
Trajectory simulate(const PitchParams& params, const SimulationSettings& settings);

PitchParams sample_params(Rng& rng, const SamplingRanges& ranges);

}  // namespace pitch3d::physics
