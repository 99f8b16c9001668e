#include "pitch3d/serialize.hpp"

namespace pitch3d {

using nlohmann::json;

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json to_json(const physics::Range& r) { return json::array({r.lo, r.hi}); }

json to_json(const physics::SamplingRanges& r) {
  return {
      {"speed", to_json(r.speed)},
      {"release_x", to_json(r.release_x)},
      {"release_y", to_json(r.release_y)},
      {"release_z", to_json(r.release_z)},
      {"spin_rate", to_json(r.spin_rate)},
      {"direction_angle_deg", to_json(r.direction_angle_deg)},
      {"direction_azimuth_deg", to_json(r.direction_azimuth_deg)},
      {"drag_coefficient", to_json(r.drag_coefficient)},
      {"lift_coefficient", to_json(r.lift_coefficient)},
      {"mass", r.mass},
      {"diameter", r.diameter},
      {"air_density", r.air_density},
  };
}

json to_json(const physics::SimulationSettings& s) {
  return {{"dt", s.dt}, {"plate_y", s.plate_y}, {"t_max", s.t_max}};
}

json to_json(const camera::CameraModel& c) {
  json rot = json::array();
  for (const auto& row : c.rotation) rot.push_back(json::array({row[0], row[1], row[2]}));
  return {
      {"fx", c.fx},
      {"fy", c.fy},
      {"cx", c.cx},
      {"cy", c.cy},
      {"rotation", rot},
      {"translation", to_json(c.translation)},
      {"image_width", c.image_width},
      {"image_height", c.image_height},
      {"frame_rate", c.frame_rate},
  };
}

json to_json(const camera::ReferenceSet& refs) {
  json out = json::array();
  for (std::size_t i = 0; i < camera::kReferenceCount; ++i) {
    out.push_back({{"label", refs.labels[i]}, {"position", to_json(refs.world_points[i])}});
  }
  return out;
}

json to_json(const camera::NoiseConfig& n) {
  return {{"sigma_ball_px", n.sigma_ball_px}, {"sigma_ref_px", n.sigma_ref_px}, {"sigma_t", n.sigma_t}};
}

}  // namespace pitch3d
