#pragma once

#include <json.hpp>

#include "pitch3d/camera.hpp"
#include "pitch3d/physics.hpp"

namespace pitch3d {

// JSON views of the configuration types, shared by dataset metadata and run configs.
nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const physics::Range& r);
nlohmann::json to_json(const physics::SamplingRanges& r);
nlohmann::json to_json(const physics::SimulationSettings& s);
nlohmann::json to_json(const camera::CameraModel& c);
nlohmann::json to_json(const camera::ReferenceSet& refs);
nlohmann::json to_json(const camera::NoiseConfig& n);

}  // namespace pitch3d
