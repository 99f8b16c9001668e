#include "pitch3d/physics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pitch3d/error.hpp"

namespace pitch3d::physics {

namespace {

void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) throw Error(code, what);
}

double uniform(Rng& rng, const Range& r) {
  if (r.lo == r.hi) return r.lo;
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

struct Derivative {
  Vec3 dp;
  Vec3 dv;
};

Derivative evaluate(const Vec3& p, const Vec3& v, const PitchParams& params) {
  return {v, acceleration(p, v, params)};
}

}  // namespace

void PitchParams::validate() const {
  require(is_finite(release_position) && is_finite(release_velocity) && is_finite(spin_axis),
          ErrorCode::InvalidParams, "non-finite vector");
  require(std::isfinite(spin_rate) && spin_rate >= 0.0, ErrorCode::InvalidParams, "spin_rate must be >= 0");
  if (spin_rate > 0.0) {
    require(std::abs(norm(spin_axis) - 1.0) <= 1e-9, ErrorCode::InvalidParams, "spin_axis must be unit length");
  }
  require(mass > 0.0, ErrorCode::InvalidParams, "mass must be > 0");
  require(diameter > 0.0, ErrorCode::InvalidParams, "diameter must be > 0");
  require(air_density >= 0.0, ErrorCode::InvalidParams, "air_density must be >= 0");
  require(drag_coefficient >= 0.0, ErrorCode::InvalidParams, "drag_coefficient must be >= 0");
  require(std::isfinite(lift_coefficient), ErrorCode::InvalidParams, "lift_coefficient must be finite");
}

void SamplingRanges::validate() const {
  const Range* all[] = {&speed,           &release_x,           &release_y,
                        &release_z,       &spin_rate,           &direction_angle_deg,
                        &direction_azimuth_deg, &drag_coefficient, &lift_coefficient};
  for (const Range* r : all) {
    require(std::isfinite(r->lo) && std::isfinite(r->hi) && r->lo <= r->hi, ErrorCode::InvalidRanges,
            "range bounds must be finite with lo <= hi");
  }
  require(speed.lo > 0.0, ErrorCode::InvalidRanges, "speed must be positive");
  require(spin_rate.lo >= 0.0, ErrorCode::InvalidRanges, "spin_rate must be >= 0");
  require(drag_coefficient.lo >= 0.0, ErrorCode::InvalidRanges, "drag_coefficient must be >= 0");
  require(direction_angle_deg.lo >= 0.0 && direction_angle_deg.hi < 90.0, ErrorCode::InvalidRanges,
          "direction_angle_deg must lie in [0, 90)");
  require(mass > 0.0 && diameter > 0.0 && air_density >= 0.0, ErrorCode::InvalidRanges,
          "mass, diameter must be > 0 and air_density >= 0");
}

Vec3 acceleration(const Vec3& position, const Vec3& velocity, const PitchParams& params) {
  (void)position;
  Vec3 a{0.0, 0.0, -kGravity};
  const double speed = norm(velocity);
  if (speed == 0.0) return a;

  const double radius = 0.5 * params.diameter;
  const double area = std::numbers::pi * radius * radius;
  const double q = 0.5 * params.air_density * area / params.mass;

  // F_drag / m = -q Cd |v| v
  a += velocity * (-q * params.drag_coefficient * speed);

  // F_magnus / m = q Cl |v|^2 (s x v_hat) = q Cl |v| (s x v); no spin, no lift.
  if (params.spin_rate > 0.0 && params.lift_coefficient != 0.0) {
    a += cross(params.spin_axis, velocity) * (q * params.lift_coefficient * speed);
  }
  return a;
}

TrajectoryPoint rk4_step(const TrajectoryPoint& point, double dt, const PitchParams& params) {
  const Vec3& p = point.position;
  const Vec3& v = point.velocity;
  const double h = 0.5 * dt;

  const Derivative k1 = evaluate(p, v, params);
  const Derivative k2 = evaluate(p + k1.dp * h, v + k1.dv * h, params);
  const Derivative k3 = evaluate(p + k2.dp * h, v + k2.dv * h, params);
  const Derivative k4 = evaluate(p + k3.dp * dt, v + k3.dv * dt, params);

  const double w = dt / 6.0;
  TrajectoryPoint out;
  out.t = point.t + dt;
  out.position = p + (k1.dp + k2.dp * 2.0 + k3.dp * 2.0 + k4.dp) * w;
  out.velocity = v + (k1.dv + k2.dv * 2.0 + k3.dv * 2.0 + k4.dv) * w;
  return out;
}

Trajectory simulate(const PitchParams& params, const SimulationSettings& settings) {
  params.validate();
  require(settings.dt > 0.0 && std::isfinite(settings.dt), ErrorCode::InvalidParams, "dt must be > 0");
  require(settings.t_max > 0.0, ErrorCode::InvalidParams, "t_max must be > 0");
  require(std::isfinite(settings.plate_y) && params.release_position.y > settings.plate_y,
          ErrorCode::InvalidParams, "release must be beyond the plate plane");

  Trajectory traj;
  traj.params = params;
  traj.points.push_back({0.0, params.release_position, params.release_velocity});

  const double plate = settings.plate_y;
  for (std::size_t k = 1;; ++k) {
    const TrajectoryPoint& cur = traj.points.back();
    if (cur.t >= settings.t_max) {
      throw Error(ErrorCode::NonConvergent, "t_max reached before the plate crossing");
    }
    TrajectoryPoint next = rk4_step(cur, settings.dt, params);
    next.t = static_cast<double>(k) * settings.dt;
    if (!is_finite(next.position) || !is_finite(next.velocity)) {
      throw Error(ErrorCode::NonConvergent, "state diverged");
    }
    if (next.position.y > plate) {
      traj.points.push_back(next);
      continue;
    }

    // Truncated final step: solve y(tau) = plate by Newton on tau, seeded
    // with the linear estimate between cur and next.
    const double y0 = cur.position.y;
    double tau = settings.dt * (y0 - plate) / (y0 - next.position.y);
    TrajectoryPoint last = next;
    if (next.position.y != plate) {
      for (int it = 0; it < 50; ++it) {
        last = rk4_step(cur, tau, params);
        const double f = last.position.y - plate;
        const double vy = last.velocity.y;
        if (vy == 0.0) break;
        double step = f / vy;
        double updated = tau - step;
        if (updated <= 0.0) updated = 0.5 * tau;
        if (updated > settings.dt) updated = settings.dt;
        const bool done = std::abs(updated - tau) <= 1e-15 * settings.dt;
        tau = updated;
        if (done) break;
      }
      last = rk4_step(cur, tau, params);
    } else {
      tau = settings.dt;
    }
    last.t = cur.t + tau;
    last.position.y = plate;
    if (last.t > cur.t) {
      traj.points.push_back(last);
    } else {
      traj.points.back().position.y = plate;
    }
    if (traj.points.size() < 2) {
      throw Error(ErrorCode::NonConvergent, "trajectory collapsed to a single point");
    }
    return traj;
  }
}

PitchParams sample_params(Rng& rng, const SamplingRanges& ranges) {
  ranges.validate();
  PitchParams p;
  p.mass = ranges.mass;
  p.diameter = ranges.diameter;
  p.air_density = ranges.air_density;

  p.release_position = {uniform(rng, ranges.release_x), uniform(rng, ranges.release_y),
                        uniform(rng, ranges.release_z)};
  const double speed = uniform(rng, ranges.speed);
  const double off_axis = deg2rad(uniform(rng, ranges.direction_angle_deg));
  const double azimuth = deg2rad(uniform(rng, ranges.direction_azimuth_deg));
  const double lateral = std::sin(off_axis);
  p.release_velocity = Vec3{lateral * std::cos(azimuth), -std::cos(off_axis), lateral * std::sin(azimuth)} * speed;

  p.spin_rate = uniform(rng, ranges.spin_rate);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 axis;
  double len = 0.0;
  do {
    axis = {gauss(rng), gauss(rng), gauss(rng)};
    len = norm(axis);
  } while (len < 1e-12);
  p.spin_axis = axis / len;

  p.drag_coefficient = uniform(rng, ranges.drag_coefficient);
  p.lift_coefficient = uniform(rng, ranges.lift_coefficient);
  return p;
}

}  // namespace pitch3d::physics
