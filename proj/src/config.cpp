#include "pitch3d/config.hpp"

#include <set>
#include <string>

#include "pitch3d/error.hpp"
#include "pitch3d/io.hpp"
#include "pitch3d/serialize.hpp"

namespace pitch3d::config {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

/// Reads keys from one JSON object and rejects any key it was not asked about.
class Section {
 public:
  Section(const json& doc, std::string where) : doc_(doc), where_(std::move(where)) {
    if (!doc_.is_object()) fail(where_, "must be an object");
  }

  bool has(const char* key) {
    seen_.insert(key);
    return doc_.contains(key);
  }

  const json& raw(const char* key) {
    seen_.insert(key);
    return doc_.at(key);
  }

  void real(const char* key, double& out) {
    if (!has(key)) return;
    const json& v = doc_.at(key);
    if (!v.is_number()) fail(path(key), "must be a number");
    out = v.get<double>();
  }

  template <typename Int>
  void integer(const char* key, Int& out) {
    if (!has(key)) return;
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) fail(path(key), "must be an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.get<std::int64_t>() < 0) fail(path(key), "must be non-negative");
      out = static_cast<Int>(v.get<std::uint64_t>());
    } else {
      out = static_cast<Int>(v.get<std::int64_t>());
    }
  }

  void vec3(const char* key, Vec3& out) {
    if (!has(key)) return;
    out = parse_vec3(doc_.at(key), path(key));
  }

  void range(const char* key, physics::Range& out) {
    if (!has(key)) return;
    const json& v = doc_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(path(key), "must be [lo, hi]");
    }
    out = {v[0].get<double>(), v[1].get<double>()};
  }

  void finish() const {
    for (const auto& [key, value] : doc_.items()) {
      if (!seen_.count(key)) fail(where_, "unknown key '" + key + "'");
    }
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  static Vec3 parse_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail(where, "must be [x, y, z]");
    for (const auto& c : v) {
      if (!c.is_number()) fail(where, "must hold numbers");
    }
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }

 private:
  const json& doc_;
  std::string where_;
  std::set<std::string> seen_;
};

void parse_physics(const json& doc, RunConfig& cfg) {
  Section s(doc, "physics");
  auto& sim = cfg.generation.simulation;
  s.real("dt", sim.dt);
  s.real("plate_y", sim.plate_y);
  s.real("t_max", sim.t_max);
  if (s.has("ranges")) {
    Section r(s.raw("ranges"), "physics.ranges");
    auto& rg = cfg.generation.ranges;
    r.range("speed", rg.speed);
    r.range("release_x", rg.release_x);
    r.range("release_y", rg.release_y);
    r.range("release_z", rg.release_z);
    r.range("spin_rate", rg.spin_rate);
    r.range("direction_angle_deg", rg.direction_angle_deg);
    r.range("direction_azimuth_deg", rg.direction_azimuth_deg);
    r.range("drag_coefficient", rg.drag_coefficient);
    r.range("lift_coefficient", rg.lift_coefficient);
    r.real("mass", rg.mass);
    r.real("diameter", rg.diameter);
    r.real("air_density", rg.air_density);
    r.finish();
  }
  s.finish();
}

void parse_camera(const json& doc, RunConfig& cfg) {
  Section s(doc, "camera");
  camera::CameraModel& cam = cfg.generation.camera;
  double fx = cam.fx, fy = cam.fy, cx = cam.cx, cy = cam.cy;
  int width = cam.image_width, height = cam.image_height;
  s.real("fx", fx);
  s.real("fy", fy);
  s.real("cx", cx);
  s.real("cy", cy);
  s.integer("image_width", width);
  s.integer("image_height", height);

  const bool explicit_pose = s.has("rotation") || s.has("translation");
  const bool look_at_pose = s.has("position") || s.has("look_at");
  if (explicit_pose && look_at_pose) fail("camera", "give either rotation/translation or position/look_at");

  if (explicit_pose) {
    if (!s.has("rotation") || !s.has("translation")) fail("camera", "rotation and translation go together");
    const json& rot = s.raw("rotation");
    if (!rot.is_array() || rot.size() != 3) fail("camera.rotation", "must be a 3x3 array");
    for (int r = 0; r < 3; ++r) {
      const Vec3 row = Section::parse_vec3(rot[r], "camera.rotation");
      cam.rotation[r] = {row.x, row.y, row.z};
    }
    s.vec3("translation", cam.translation);
    cam.fx = fx;
    cam.fy = fy;
    cam.cx = cx;
    cam.cy = cy;
    cam.image_width = width;
    cam.image_height = height;
  } else {
    Vec3 position{0.0, -15.0, 3.0};
    Vec3 target{0.0, physics::kRubberY, 3.0};
    s.vec3("position", position);
    s.vec3("look_at", target);
    const double rate = cam.frame_rate;
    cam = camera::look_at(position, target, fx, fy, cx, cy, width, height, rate);
  }
  s.finish();
}

void parse_references(const json& doc, RunConfig& cfg) {
  if (!doc.is_array() || doc.size() != camera::kReferenceCount) {
    fail("references", "must list exactly 5 points");
  }
  for (std::size_t i = 0; i < camera::kReferenceCount; ++i) {
    Section p(doc[i], "references[" + std::to_string(i) + "]");
    if (p.has("label")) {
      const json& label = p.raw("label");
      if (!label.is_string()) fail(p.path("label"), "must be a string");
      cfg.generation.references.labels[i] = label.get<std::string>();
    }
    if (!p.has("position")) fail(p.path("position"), "is required");
    p.vec3("position", cfg.generation.references.world_points[i]);
    p.finish();
  }
}

}  // namespace

void RunConfig::validate() const {
  const auto wrap = [](const auto& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidConfig) throw;
      throw Error(ErrorCode::InvalidConfig, e.what());
    }
  };
  wrap([&] { generation.ranges.validate(); });
  wrap([&] { generation.camera.validate(); });
  wrap([&] { generation.references.validate(); });
  wrap([&] { generation.noise.validate(); });
  const auto& sim = generation.simulation;
  if (!(sim.dt > 0.0) || !(sim.t_max > 0.0)) fail("physics", "dt and t_max must be > 0");
  if (!(generation.ranges.release_y.lo > sim.plate_y)) fail("physics", "release_y must lie beyond plate_y");
  if (generation.n_trajectories < 1) fail("dataset.n_trajectories", "must be >= 1");
  wrap([&] { mlp.validate(); });
  wrap([&] { adam.validate(); });
  wrap([&] { training.validate(); });
  if (!(eval_eps > 0.0)) fail("eval.eps", "must be > 0");
}

dataset::GenerationSpec RunConfig::generation_spec() const {
  dataset::GenerationSpec spec = generation;
  spec.seed = seeds.generate;
  return spec;
}

nn::MlpConfig RunConfig::mlp_config() const {
  nn::MlpConfig c = mlp;
  c.init_seed = seeds.init;
  return c;
}

nn::TrainConfig RunConfig::train_config() const {
  nn::TrainConfig c = training;
  c.shuffle_seed = seeds.shuffle;
  return c;
}

RunConfig parse(const json& doc) {
  RunConfig cfg;
  try {
    Section top(doc, "config");
    // The frame rate lives in the dataset section; read it first so the camera uses it.
    if (top.has("dataset")) {
      Section d(top.raw("dataset"), "dataset");
      d.integer("n_trajectories", cfg.generation.n_trajectories);
      d.real("frame_rate", cfg.generation.camera.frame_rate);
      d.finish();
    }
    const double frame_rate = cfg.generation.camera.frame_rate;
    if (top.has("physics")) parse_physics(top.raw("physics"), cfg);
    if (top.has("camera")) parse_camera(top.raw("camera"), cfg);
    cfg.generation.camera.frame_rate = frame_rate;
    if (top.has("references")) parse_references(top.raw("references"), cfg);
    if (top.has("noise")) {
      Section n(top.raw("noise"), "noise");
      n.real("sigma_ball_px", cfg.generation.noise.sigma_ball_px);
      n.real("sigma_ref_px", cfg.generation.noise.sigma_ref_px);
      n.real("sigma_t", cfg.generation.noise.sigma_t);
      n.finish();
    }
    if (top.has("mlp")) {
      Section m(top.raw("mlp"), "mlp");
      if (m.has("layer_sizes")) {
        const json& sizes = m.raw("layer_sizes");
        if (!sizes.is_array()) fail("mlp.layer_sizes", "must be an array");
        cfg.mlp.layer_sizes.clear();
        for (const auto& v : sizes) {
          if (!v.is_number_unsigned()) fail("mlp.layer_sizes", "must hold positive integers");
          cfg.mlp.layer_sizes.push_back(v.get<std::size_t>());
        }
      }
      if (m.has("activation") && m.raw("activation") != "relu") fail("mlp.activation", "only 'relu' is supported");
      m.finish();
    }
    if (top.has("adam")) {
      Section a(top.raw("adam"), "adam");
      a.real("alpha", cfg.adam.alpha);
      a.real("beta1", cfg.adam.beta1);
      a.real("beta2", cfg.adam.beta2);
      a.real("epsilon", cfg.adam.epsilon);
      a.finish();
    }
    if (top.has("training")) {
      Section t(top.raw("training"), "training");
      t.integer("epochs", cfg.training.epochs);
      t.integer("batch_size", cfg.training.batch_size);
      t.real("val_fraction", cfg.training.val_fraction);
      if (t.has("early_stop_patience")) {
        const json& p = t.raw("early_stop_patience");
        if (p.is_null()) {
          cfg.training.early_stop_patience.reset();
        } else if (p.is_number_unsigned()) {
          cfg.training.early_stop_patience = p.get<std::size_t>();
        } else {
          fail("training.early_stop_patience", "must be a positive integer or null");
        }
      }
      t.finish();
    }
    if (top.has("eval")) {
      Section e(top.raw("eval"), "eval");
      e.real("eps", cfg.eval_eps);
      e.finish();
    }
    if (top.has("seeds")) {
      Section sd(top.raw("seeds"), "seeds");
      sd.integer("generate", cfg.seeds.generate);
      sd.integer("split", cfg.seeds.split);
      sd.integer("init", cfg.seeds.init);
      sd.integer("shuffle", cfg.seeds.shuffle);
      sd.finish();
    }
    top.finish();
  } catch (const json::exception& e) {
    fail("config", e.what());
  }
  cfg.validate();
  return cfg;
}

RunConfig load(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return parse(doc);
}

json to_json(const RunConfig& cfg) {
  const auto& g = cfg.generation;
  json rot = json::array();
  for (const auto& row : g.camera.rotation) rot.push_back(json::array({row[0], row[1], row[2]}));
  json ranges = pitch3d::to_json(g.ranges);
  return {
      {"physics",
       {{"dt", g.simulation.dt}, {"plate_y", g.simulation.plate_y}, {"t_max", g.simulation.t_max}, {"ranges", ranges}}},
      {"camera",
       {{"fx", g.camera.fx},
        {"fy", g.camera.fy},
        {"cx", g.camera.cx},
        {"cy", g.camera.cy},
        {"image_width", g.camera.image_width},
        {"image_height", g.camera.image_height},
        {"rotation", rot},
        {"translation", pitch3d::to_json(g.camera.translation)}}},
      {"references", pitch3d::to_json(g.references)},
      {"noise", pitch3d::to_json(g.noise)},
      {"dataset", {{"n_trajectories", g.n_trajectories}, {"frame_rate", g.camera.frame_rate}}},
      {"mlp", {{"layer_sizes", cfg.mlp.layer_sizes}, {"activation", "relu"}}},
      {"adam",
       {{"alpha", cfg.adam.alpha}, {"beta1", cfg.adam.beta1}, {"beta2", cfg.adam.beta2}, {"epsilon", cfg.adam.epsilon}}},
      {"training",
       {{"epochs", cfg.training.epochs},
        {"batch_size", cfg.training.batch_size},
        {"val_fraction", cfg.training.val_fraction},
        {"early_stop_patience",
         cfg.training.early_stop_patience ? json(*cfg.training.early_stop_patience) : json(nullptr)}}},
      {"eval", {{"eps", cfg.eval_eps}}},
      {"seeds",
       {{"generate", cfg.seeds.generate},
        {"split", cfg.seeds.split},
        {"init", cfg.seeds.init},
        {"shuffle", cfg.seeds.shuffle}}},
  };
}

}  // namespace pitch3d::config
