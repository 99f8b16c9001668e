#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pitch3d/error.hpp"
#include "pitch3d/physics.hpp"

using namespace pitch3d;
using namespace pitch3d::physics;

namespace {

// 0.5 * 1.225 * 0.35 * pi * 0.0366^2 * 40^2 / 0.145, evaluated by hand.
constexpr double kDragAccelAt40 = 9.954928870894216;

PitchParams gravity_only() {
  PitchParams p;
  p.drag_coefficient = 0.0;
  p.lift_coefficient = 0.0;
  p.spin_rate = 0.0;
  return p;
}

PitchParams fastball() {
  PitchParams p;
  p.release_position = {0.1, 17.0, 1.8};
  p.release_velocity = {-0.5, -40.0, -1.0};
  p.spin_axis = {-1.0, 0.0, 0.0};
  p.spin_rate = 220.0;
  return p;
}


}  // namespace

TEST_CASE("acceleration: gravity only at rest") {
  PitchParams p;
  const Vec3 a = acceleration({0, 10, 1}, {0, 0, 0}, p);
  CHECK(a == Vec3{0, 0, -kGravity});
}

TEST_CASE("acceleration: aerodynamic terms vanish with zero coefficients") {
  PitchParams p = gravity_only();
  p.spin_rate = 150.0;
  for (const Vec3 v : {Vec3{0, -40, 0}, Vec3{3, -35, 2}, Vec3{-1, 5, 9}}) {
    CHECK(acceleration({}, v, p) == Vec3{0, 0, -kGravity});
  }
}

TEST_CASE("acceleration: quadratic drag opposes motion") {
  PitchParams p;
  p.lift_coefficient = 0.0;
  const Vec3 a = acceleration({}, {0, -40, 0}, p);
  CHECK(a.x == 0.0);
  CHECK(a.y == doctest::Approx(kDragAccelAt40).epsilon(1e-13));
  CHECK(a.z == -kGravity);
}

TEST_CASE("acceleration: backspin lifts a pitch moving toward the plate") {
  PitchParams p;
  p.drag_coefficient = 0.0;
  p.spin_axis = {-1, 0, 0};
  p.spin_rate = 200.0;
  const Vec3 a = acceleration({}, {0, -40, 0}, p);
  // Same |v|^2 prefactor as drag with Cl in place of Cd.
  CHECK(a.z == doctest::Approx(-kGravity + kDragAccelAt40 * 0.20 / 0.35).epsilon(1e-13));
}

TEST_CASE("rk4_step: exact for constant acceleration") {
  const PitchParams p = gravity_only();
  TrajectoryPoint s{0.0, {0.2, 17.0, 1.8}, {0.5, -38.0, 2.0}};
  const double dt = 0.01;
  const TrajectoryPoint n = rk4_step(s, dt, p);
  CHECK(n.t == doctest::Approx(dt));
  CHECK(n.position.x == doctest::Approx(0.2 + 0.5 * dt).epsilon(1e-15));
  CHECK(n.position.y == doctest::Approx(17.0 - 38.0 * dt).epsilon(1e-15));
  CHECK(n.position.z == doctest::Approx(1.8 + 2.0 * dt - 0.5 * kGravity * dt * dt).epsilon(1e-15));
  CHECK(n.velocity.z == doctest::Approx(2.0 - kGravity * dt).epsilon(1e-15));
}

TEST_CASE("rk4_step: free fall from rest") {
  const PitchParams p = gravity_only();
  const TrajectoryPoint n = rk4_step({0.0, {0, 17, 1.8}, {0, 0, 0}}, 0.1, p);
  CHECK(std::abs(n.position.z - 1.75095) <= 1e-12);
}

TEST_CASE("rk4_step: drag-on state matches a 1000x finer Euler oracle") {
  const PitchParams p = fastball();
  const TrajectoryPoint s{0.0, p.release_position, p.release_velocity};
  const TrajectoryPoint n = rk4_step(s, 1e-3, p);
  const oracle::EulerState e = oracle::euler_advance(
      {0.0, {s.position.x, s.position.y, s.position.z}, {s.velocity.x, s.velocity.y, s.velocity.z}}, 1e-3, 1e-6, p);
  CHECK(std::abs(n.position.x - e.p[0]) <= 1e-6);
  CHECK(std::abs(n.position.y - e.p[1]) <= 1e-6);
  CHECK(std::abs(n.position.z - e.p[2]) <= 1e-6);
}

TEST_CASE("simulate: gravity-only crossing matches closed-form ballistics") {
  PitchParams p = gravity_only();
  p.release_position = {0.0, 18.44, 1.8};
  p.release_velocity = {0.0, -41.0, 0.0};
  const Trajectory traj = simulate(p, {});
  const TrajectoryPoint& last = traj.points.back();
  const double t_cross = 18.44 / 41.0;
  CHECK(std::abs(last.t - t_cross) <= 1e-12);
  CHECK(std::abs(last.position.z - (1.8 - 0.5 * kGravity * t_cross * t_cross)) <= 1e-9);
  CHECK(last.position.z == doctest::Approx(0.8078139155264723).epsilon(1e-12));
  CHECK(last.position.y == 0.0);
}

TEST_CASE("simulate: pitch moving away never crosses") {
  PitchParams p;
  p.release_velocity = {0, 10, 0};
  CHECK_THROWS_AS(simulate(p, {}), Error);
  try {
    simulate(p, {});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonConvergent);
  }
}

TEST_CASE("simulate: invalid preconditions") {
  PitchParams p;
  const auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Diverged;
  };
  CHECK(code_of([&] { simulate(p, {0.0, 0.0, 2.0}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { simulate(p, {1.0 / 240, 0.0, 0.0}); }) == ErrorCode::InvalidParams);
  CHECK(code_of([&] { simulate(p, {1.0 / 240, 20.0, 2.0}); }) == ErrorCode::InvalidParams);
  PitchParams bad = p;
  bad.spin_rate = 100.0;
  bad.spin_axis = {1, 1, 0};
  CHECK(code_of([&] { simulate(bad, {}); }) == ErrorCode::InvalidParams);
  bad = p;
  bad.mass = 0.0;
  CHECK(code_of([&] { simulate(bad, {}); }) == ErrorCode::InvalidParams);
}

TEST_CASE("simulate: drag and Magnus crossing matches a fine-step Euler oracle") {
  for (const PitchParams& p : {PitchParams{}, fastball()}) {
    const Trajectory traj = simulate(p, {});
    const oracle::EulerState e = oracle::euler_crossing(p, 1e-6);
    const Vec3 end = traj.points.back().position;
    CHECK(std::abs(end.x - e.p[0]) <= 1e-4);
    CHECK(std::abs(end.z - e.p[2]) <= 1e-4);
    CHECK(std::abs(traj.points.back().t - e.t) <= 1e-5);
  }
}

TEST_CASE("simulate: trajectory invariants on sampled pitches") {
  const SamplingRanges ranges;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Rng rng = make_rng(seed, 7);
    const PitchParams p = sample_params(rng, ranges);
    const SimulationSettings settings;
    const Trajectory traj = simulate(p, settings);
    REQUIRE(traj.points.size() >= 2);
    CHECK(traj.points.front().t == 0.0);
    CHECK(traj.points.front().position == p.release_position);
    CHECK(std::abs(traj.points.back().position.y - settings.plate_y) <= 1e-9);
    for (std::size_t i = 1; i < traj.points.size(); ++i) {
      CHECK(traj.points[i].t > traj.points[i - 1].t);
      CHECK(traj.points[i].position.y < traj.points[i - 1].position.y);
      if (i + 1 < traj.points.size()) {
        CHECK(traj.points[i].t - traj.points[i - 1].t == doctest::Approx(settings.dt).epsilon(1e-9));
      }
    }
    CHECK(traj.points.back().t - traj.points[traj.points.size() - 2].t <= settings.dt * (1 + 1e-12));

    const Trajectory again = simulate(p, settings);
    REQUIRE(again.points.size() == traj.points.size());
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
      CHECK(again.points[i].position == traj.points[i].position);
      CHECK(again.points[i].velocity == traj.points[i].velocity);
      CHECK(again.points[i].t == traj.points[i].t);
    }
  }
}

TEST_CASE("simulate: mechanical energy conserved without aerodynamics") {
  SamplingRanges ranges;
  ranges.drag_coefficient = {0, 0};
  ranges.lift_coefficient = {0, 0};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng = make_rng(seed, 3);
    const PitchParams p = sample_params(rng, ranges);
    const Trajectory traj = simulate(p, {});
    const auto energy = [](const TrajectoryPoint& pt) {
      return 0.5 * dot(pt.velocity, pt.velocity) + kGravity * pt.position.z;
    };
    const double e0 = energy(traj.points.front());
    for (const auto& pt : traj.points) CHECK(std::abs(energy(pt) - e0) <= 1e-9 * std::abs(e0));
  }
}

TEST_CASE("simulate: fourth-order convergence of the endpoint") {
  for (const PitchParams& p : {PitchParams{}, fastball()}) {
    const oracle::LongState ref = oracle::rk4_crossing_ld(p, 1.0L / 245760);
    const double e1 = oracle::endpoint_distance(simulate(p, {1.0 / 240.0, 0.0, 2.0}).points.back().position, ref);
    const double e2 = oracle::endpoint_distance(simulate(p, {1.0 / 480.0, 0.0, 2.0}).points.back().position, ref);
    INFO("e(1/240) = " << e1 << ", e(1/480) = " << e2);
    CHECK(e1 / e2 >= 12.0);
  }
}

TEST_CASE("sample_params: degenerate ranges return the bounds") {
  SamplingRanges r;
  r.speed = {40, 40};
  r.release_x = {0.1, 0.1};
  r.release_y = {17, 17};
  r.release_z = {1.9, 1.9};
  r.spin_rate = {150, 150};
  r.direction_angle_deg = {0, 0};
  r.direction_azimuth_deg = {90, 90};
  r.drag_coefficient = {0.3, 0.3};
  r.lift_coefficient = {0.1, 0.1};
  Rng rng(99);
  const PitchParams p = sample_params(rng, r);
  CHECK(p.release_position == Vec3{0.1, 17, 1.9});
  CHECK(p.release_velocity.x == 0.0);
  CHECK(p.release_velocity.y == -40.0);
  CHECK(p.release_velocity.z == 0.0);
  CHECK(p.spin_rate == 150.0);
  CHECK(p.drag_coefficient == 0.3);
  CHECK(p.lift_coefficient == 0.1);
  CHECK(norm(p.spin_axis) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("sample_params: deterministic for a seed and inside the cone") {
  const SamplingRanges r;
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) {
    const PitchParams pa = sample_params(a, r);
    const PitchParams pb = sample_params(b, r);
    CHECK(pa.release_velocity == pb.release_velocity);
    CHECK(pa.spin_axis == pb.spin_axis);
    CHECK(pa.release_position == pb.release_position);
    const double speed = norm(pa.release_velocity);
    const double angle = std::acos(-pa.release_velocity.y / speed) * 180.0 / std::numbers::pi;
    CHECK(angle <= 5.0 + 1e-9);
    CHECK(pa.release_velocity.y < 0.0);
    CHECK(std::abs(norm(pa.spin_axis) - 1.0) <= 1e-9);
  }
}

TEST_CASE("sample_params: mean speed over 10000 draws") {
  const SamplingRanges r;
  Rng rng(2024);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += norm(sample_params(rng, r).release_velocity);
  CHECK(std::abs(sum / 10000 - 38.0) <= 0.01 * 38.0);
}

TEST_CASE("sample_params: malformed ranges") {
  SamplingRanges r;
  r.speed = {45, 31};
  Rng rng(1);
  try {
    sample_params(rng, r);
    FAIL("expected InvalidRanges");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidRanges);
  }
}
