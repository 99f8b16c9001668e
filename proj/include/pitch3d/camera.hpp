#pragma once

#include <array>
#include <string>
#include <vector>

#include "pitch3d/physics.hpp"
#include "pitch3d/rng.hpp"
#include "pitch3d/vec3.hpp"

namespace pitch3d::camera {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr std::size_t kReferenceCount = 5;

/// Pinhole camera: p_cam = R p_world + t, u = cx + fx x/z, v = cy + fy y/z.
struct CameraModel {
  double fx = 1500.0;
  double fy = 1500.0;
  double cx = 640.0;
  double cy = 360.0;
  Mat3 rotation{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};  // world -> camera
  Vec3 translation;                                  // world -> camera
  int image_width = 1280;
  int image_height = 720;
  double frame_rate = 240.0;

  void validate() const;
  Vec3 to_camera(const Vec3& world) const;
};

/// Builds the rotation and translation for a camera at `position` looking at
/// `target` with world +z as the up hint (image v grows downward).
CameraModel look_at(const Vec3& position, const Vec3& target, double fx, double fy, double cx, double cy,
                    int width, int height, double frame_rate);

/// Behind-home broadcast pose: (0, -15, 3) looking along +y, 1280x720, 240 Hz.
CameraModel default_camera();

struct ReferenceSet {
  std::array<Vec3, kReferenceCount> world_points;
  std::array<std::string, kReferenceCount> labels;

  void validate() const;
};

/// Four home-plate corners and the front center of the pitching rubber.
ReferenceSet default_references();

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
  bool operator==(const PixelCoord&) const = default;
};

struct NoiseConfig {
  double sigma_ball_px = 1.0;
  double sigma_ref_px = 0.5;
  double sigma_t = 0.001;

  static NoiseConfig none() { return {0.0, 0.0, 0.0}; }
  void validate() const;
};

struct Observation {
  double t = 0.0;
  PixelCoord ball_px;
  std::array<PixelCoord, kReferenceCount> ref_px;
};

struct LabeledObservation {
  Observation observation;
  Vec3 target;  // noiseless world position at the frame instant
};

/// Throws Error(BehindCamera) when the point is not in front of the camera.
PixelCoord project(const CameraModel& camera, const Vec3& point);

/// Number of camera frames in [0, duration] at the given rate.
std::size_t frame_count(double duration, double frame_rate);

/// Linear interpolation of the trajectory position at time t (clamped to its span).
Vec3 position_at(const physics::Trajectory& traj, double t);

std::vector<LabeledObservation> observe_trajectory(const CameraModel& camera, const physics::Trajectory& traj,
                                                   const ReferenceSet& refs, const NoiseConfig& noise, Rng& rng);

}  // namespace pitch3d::camera
