#include "pitch3d/camera.hpp"

#include <algorithm>
#include <cmath>

#include "pitch3d/error.hpp"

namespace pitch3d::camera {

namespace {

Vec3 row(const Mat3& m, int r) { return {m[r][0], m[r][1], m[r][2]}; }

}  // namespace

void CameraModel::validate() const {
  if (!(fx > 0.0 && fy > 0.0 && std::isfinite(fx) && std::isfinite(fy))) {
    throw Error(ErrorCode::InvalidConfig, "camera focal lengths must be > 0");
  }
  if (!(std::isfinite(cx) && std::isfinite(cy) && is_finite(translation))) {
    throw Error(ErrorCode::InvalidConfig, "camera principal point and translation must be finite");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw Error(ErrorCode::InvalidConfig, "camera image size must be positive");
  }
  if (!(frame_rate > 0.0 && std::isfinite(frame_rate))) {
    throw Error(ErrorCode::InvalidConfig, "camera frame_rate must be > 0");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double d = dot(row(rotation, i), row(rotation, j));
      if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-9) {
        throw Error(ErrorCode::InvalidConfig, "camera rotation must be orthonormal");
      }
    }
  }
  if (dot(cross(row(rotation, 0), row(rotation, 1)), row(rotation, 2)) < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "camera rotation must have det = +1");
  }
}

Vec3 CameraModel::to_camera(const Vec3& world) const {
  return Vec3{dot(row(rotation, 0), world), dot(row(rotation, 1), world), dot(row(rotation, 2), world)} +
         translation;
}

CameraModel look_at(const Vec3& position, const Vec3& target, double fx, double fy, double cx, double cy,
                    int width, int height, double frame_rate) {
  const Vec3 forward_raw = target - position;
  if (norm(forward_raw) == 0.0) throw Error(ErrorCode::InvalidConfig, "look_at target equals camera position");
  const Vec3 forward = forward_raw / norm(forward_raw);
  const Vec3 up{0.0, 0.0, 1.0};
  Vec3 right = cross(forward, up);
  if (norm(right) < 1e-12) throw Error(ErrorCode::InvalidConfig, "camera cannot look straight up or down");
  right = right / norm(right);
  const Vec3 down = cross(forward, right);

  CameraModel cam;
  cam.fx = fx;
  cam.fy = fy;
  cam.cx = cx;
  cam.cy = cy;
  cam.rotation = {{{right.x, right.y, right.z}, {down.x, down.y, down.z}, {forward.x, forward.y, forward.z}}};
  cam.translation = -Vec3{dot(right, position), dot(down, position), dot(forward, position)};
  cam.image_width = width;
  cam.image_height = height;
  cam.frame_rate = frame_rate;
  return cam;
}

CameraModel default_camera() {
  return look_at({0.0, -15.0, 3.0}, {0.0, physics::kRubberY, 3.0}, 1500.0, 1500.0, 640.0, 360.0, 1280, 720, 240.0);
}

void ReferenceSet::validate() const {
  for (std::size_t i = 0; i < kReferenceCount; ++i) {
    if (!is_finite(world_points[i])) throw Error(ErrorCode::InvalidConfig, "reference point must be finite");
    for (std::size_t j = i + 1; j < kReferenceCount; ++j) {
      if (world_points[i] == world_points[j]) {
        throw Error(ErrorCode::InvalidConfig, "reference points must be pairwise distinct");
      }
    }
  }
}

ReferenceSet default_references() {
  constexpr double half = 0.2159;
  ReferenceSet refs;
  refs.world_points = {Vec3{-half, half, 0.0}, Vec3{half, half, 0.0}, Vec3{-half, 2 * half, 0.0},
                       Vec3{half, 2 * half, 0.0}, Vec3{0.0, physics::kRubberY, 0.25}};
  refs.labels = {"plate_left_front", "plate_right_front", "plate_left_back", "plate_right_back", "rubber_front"};
  return refs;
}

void NoiseConfig::validate() const {
  for (double s : {sigma_ball_px, sigma_ref_px, sigma_t}) {
    if (!(s >= 0.0 && std::isfinite(s))) throw Error(ErrorCode::InvalidConfig, "noise sigmas must be >= 0");
  }
}

PixelCoord project(const CameraModel& camera, const Vec3& point) {
  if (!is_finite(point)) throw Error(ErrorCode::InvalidParams, "projected point must be finite");
  const Vec3 pc = camera.to_camera(point);
  if (pc.z <= 1e-9) throw Error(ErrorCode::BehindCamera, "point is behind the camera");
  return {camera.cx + camera.fx * pc.x / pc.z, camera.cy + camera.fy * pc.y / pc.z};
}

std::size_t frame_count(double duration, double frame_rate) {
  return static_cast<std::size_t>(std::floor(duration * frame_rate + 1e-9)) + 1;
}

Vec3 position_at(const physics::Trajectory& traj, double t) {
  const auto& pts = traj.points;
  if (pts.empty()) throw Error(ErrorCode::EmptyTrajectory, "trajectory has no points");
  if (t <= pts.front().t) return pts.front().position;
  if (t >= pts.back().t) return pts.back().position;
  const auto hi = std::upper_bound(pts.begin(), pts.end(), t,
                                   [](double value, const physics::TrajectoryPoint& p) { return value < p.t; });
  const auto lo = hi - 1;
  const double w = (t - lo->t) / (hi->t - lo->t);
  return lo->position + (hi->position - lo->position) * w;
}

std::vector<LabeledObservation> observe_trajectory(const CameraModel& camera, const physics::Trajectory& traj,
                                                   const ReferenceSet& refs, const NoiseConfig& noise, Rng& rng) {
  if (traj.points.empty()) throw Error(ErrorCode::EmptyTrajectory, "trajectory has no points");
  camera.validate();
  noise.validate();

  std::array<PixelCoord, kReferenceCount> ref_clean;
  for (std::size_t i = 0; i < kReferenceCount; ++i) ref_clean[i] = project(camera, refs.world_points[i]);

  const double interval = 1.0 / camera.frame_rate;
  const std::size_t frames = frame_count(traj.duration(), camera.frame_rate);
  const double min_gap = 1e-3 * interval;
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<LabeledObservation> out;
  out.reserve(frames);
  double prev_t = 0.0;
  for (std::size_t k = 0; k < frames; ++k) {
    const double t_true = static_cast<double>(k) / camera.frame_rate;
    const Vec3 target = position_at(traj, t_true);
    const PixelCoord ball = project(camera, target);

    LabeledObservation lo;
    lo.target = target;
    Observation& obs = lo.observation;

    double t = t_true + noise.sigma_t * gauss(rng);
    if (k == 0) {
      t = std::max(t, 0.0);
    } else {
      t = std::max(t, prev_t + min_gap);
    }
    obs.t = t;
    prev_t = t;

    obs.ball_px.u = ball.u + noise.sigma_ball_px * gauss(rng);
    obs.ball_px.v = ball.v + noise.sigma_ball_px * gauss(rng);
    for (std::size_t i = 0; i < kReferenceCount; ++i) {
      obs.ref_px[i].u = ref_clean[i].u + noise.sigma_ref_px * gauss(rng);
      obs.ref_px[i].v = ref_clean[i].v + noise.sigma_ref_px * gauss(rng);
    }
    out.push_back(lo);
  }
  return out;
}

}  // namespace pitch3d::camera
