#include "pitch3d/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "pitch3d/error.hpp"
#include "pitch3d/io.hpp"
#include "pitch3d/serialize.hpp"

namespace pitch3d::dataset {

using nlohmann::json;

std::size_t Dataset::trajectory_count() const {
  std::set<std::int64_t> ids;
  for (const Sample& s : samples) ids.insert(s.trajectory_id);
  return ids.size();
}

Sample assemble(const camera::Observation& obs, const Vec3& target, std::int64_t trajectory_id) {
  Sample s;
  s.features[0] = obs.t;
  s.features[1] = obs.ball_px.u;
  s.features[2] = obs.ball_px.v;
  for (std::size_t i = 0; i < camera::kReferenceCount; ++i) {
    s.features[3 + 2 * i] = obs.ref_px[i].u;
    s.features[4 + 2 * i] = obs.ref_px[i].v;
  }
  s.target = Target{target.x, target.y, target.z};
  s.trajectory_id = trajectory_id;
  return s;
}

camera::Observation unpack(const Sample& sample) {
  camera::Observation obs;
  obs.t = sample.features[0];
  obs.ball_px = {sample.features[1], sample.features[2]};
  for (std::size_t i = 0; i < camera::kReferenceCount; ++i) {
    obs.ref_px[i] = {sample.features[3 + 2 * i], sample.features[4 + 2 * i]};
  }
  return obs;
}

NormStats fit_norm_stats(const Dataset& train) {
  if (train.samples.empty()) throw Error(ErrorCode::EmptyDataset, "cannot fit normalization on an empty dataset");
  const double n = static_cast<double>(train.samples.size());

  // Welford's update per column.
  Features mean{};
  Features m2{};
  std::size_t count = 0;
  for (const Sample& s : train.samples) {
    ++count;
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const double delta = s.features[j] - mean[j];
      mean[j] += delta / static_cast<double>(count);
      m2[j] += delta * (s.features[j] - mean[j]);
    }
  }
  NormStats stats;
  stats.mean = mean;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    stats.std[j] = std::max(std::sqrt(m2[j] / n), kStdFloor);
  }
  return stats;
}

Features normalize(const Features& x, const NormStats& stats) {
  Features z{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) z[j] = (x[j] - stats.mean[j]) / stats.std[j];
  return z;
}

Features denormalize(const Features& z, const NormStats& stats) {
  Features x{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) x[j] = z[j] * stats.std[j] + stats.mean[j];
  return x;
}

Split split(const Dataset& ds, double val_fraction, std::uint64_t seed) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "val_fraction must lie in (0, 1)");
  }
  std::vector<std::int64_t> ids;
  {
    std::set<std::int64_t> unique;
    for (const Sample& s : ds.samples) unique.insert(s.trajectory_id);
    ids.assign(unique.begin(), unique.end());
  }
  if (ids.size() < 2) throw Error(ErrorCode::TooFewTrajectories, "need at least 2 trajectories to split");

  Rng rng = make_rng(seed, 0);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto total = static_cast<std::int64_t>(ids.size());
  const auto wanted = static_cast<std::int64_t>(std::llround(val_fraction * static_cast<double>(total)));
  const auto n_val = std::clamp<std::int64_t>(wanted, 1, total - 1);
  const std::set<std::int64_t> val_ids(ids.begin(), ids.begin() + n_val);

  Split out;
  out.train.metadata = ds.metadata;
  out.val.metadata = ds.metadata;
  for (const Sample& s : ds.samples) {
    (val_ids.count(s.trajectory_id) ? out.val : out.train).samples.push_back(s);
  }
  return out;
}

void require_labeled(const Dataset& ds) {
  if (ds.samples.empty()) throw Error(ErrorCode::EmptyDataset, "dataset has no samples");
  for (const Sample& s : ds.samples) {
    if (!s.target) throw Error(ErrorCode::FormatError, "dataset sample has no target");
  }
}

// ---------------------------------------------------------------------------
// JSON Lines persistence

void save(const Dataset& ds, const std::filesystem::path& path) {
  json meta = ds.metadata.is_object() ? ds.metadata : json::object();
  meta["format_version"] = kFormatVersion;
  io::write_atomic(path, [&](std::ostream& os) {
    os << io::dump_json(meta) << '\n';
    std::string line;
    for (const Sample& s : ds.samples) {
      line.clear();
      line += "{\"traj\":";
      line += std::to_string(s.trajectory_id);
      line += ",\"features\":[";
      for (std::size_t j = 0; j < kFeatureCount; ++j) {
        if (j) line.push_back(',');
        io::append_real(line, s.features[j]);
      }
      line.push_back(']');
      if (s.target) {
        line += ",\"target\":[";
        for (std::size_t j = 0; j < kTargetCount; ++j) {
          if (j) line.push_back(',');
          io::append_real(line, (*s.target)[j]);
        }
        line.push_back(']');
      }
      line += "}\n";
      os << line;
    }
  });
}

namespace {

template <std::size_t N>
std::array<double, N> read_fixed(const json& j, const char* what, std::size_t line_no) {
  if (!j.is_array() || j.size() != N) {
    throw Error(ErrorCode::FormatError,
                "line " + std::to_string(line_no) + ": '" + what + "' must hold " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": not a number");
    out[i] = j[i].get<double>();
  }
  return out;
}

}  // namespace

Dataset load(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  std::istringstream in(text);
  std::string line;
  Dataset ds;
  std::size_t line_no = 0;
  bool have_meta = false;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (!have_meta) {
        if (!j.is_object() || !j.contains("format_version")) {
          throw Error(ErrorCode::FormatError, "first line must be the metadata object");
        }
        if (j.at("format_version") != kFormatVersion) {
          throw Error(ErrorCode::FormatError, "unsupported format_version " + j.at("format_version").dump());
        }
        ds.metadata = j;
        have_meta = true;
        continue;
      }
      if (!j.is_object() || !j.contains("traj") || !j.contains("features") || !j.at("traj").is_number_integer()) {
        throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": malformed sample");
      }
      Sample s;
      s.trajectory_id = j.at("traj").get<std::int64_t>();
      s.features = read_fixed<kFeatureCount>(j.at("features"), "features", line_no);
      if (auto it = j.find("target"); it != j.end()) s.target = read_fixed<kTargetCount>(*it, "target", line_no);
      ds.samples.push_back(s);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_meta) throw Error(ErrorCode::FormatError, path.string() + ": missing metadata line");
  return ds;
}

// ---------------------------------------------------------------------------
// Generation

json describe(const GenerationSpec& spec) {
  return {
      {"format_version", kFormatVersion},
      {"seed", spec.seed},
      {"n_trajectories", spec.n_trajectories},
      {"camera", to_json(spec.camera)},
      {"references", to_json(spec.references)},
      {"noise", to_json(spec.noise)},
      {"ranges", to_json(spec.ranges)},
      {"simulation", to_json(spec.simulation)},
  };
}

Dataset generate(const GenerationSpec& spec) {
  spec.ranges.validate();
  spec.camera.validate();
  spec.references.validate();
  spec.noise.validate();

  Dataset ds;
  ds.metadata = describe(spec);
  for (std::size_t i = 0; i < spec.n_trajectories; ++i) {
    Rng rng = make_rng(spec.seed, i);
    const physics::PitchParams params = physics::sample_params(rng, spec.ranges);
    const physics::Trajectory traj = physics::simulate(params, spec.simulation);
    const auto observed = camera::observe_trajectory(spec.camera, traj, spec.references, spec.noise, rng);
    for (const auto& lo : observed) {
      ds.samples.push_back(assemble(lo.observation, lo.target, static_cast<std::int64_t>(i)));
    }
  }
  ds.metadata["n_samples"] = ds.samples.size();
  return ds;
}

// ---------------------------------------------------------------------------
// Tracker CSV

std::string tracker_csv_header() {
  std::string h = "frame";
  for (std::string_view name : kFeatureNames) {
    h.push_back(',');
    h += name;
  }
  return h;
}

namespace {

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view cell, std::size_t line_no) {
  const std::string buf(cell);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty() || !std::isfinite(v)) {
    throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": bad number '" + buf + "'");
  }
  return v;
}

}  // namespace

TrackedData ingest_tracker_csv(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::FormatError, path.string() + ": empty file");
  if (trim(line) != tracker_csv_header()) {
    throw Error(ErrorCode::FormatError, path.string() + ": header mismatch, expected '" + tracker_csv_header() + "'");
  }

  TrackedData out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != kFeatureCount + 1) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(kFeatureCount + 1) + " columns");
    }
    const bool lost = std::any_of(cells.begin(), cells.end(), [](std::string_view c) { return trim(c).empty(); });
    if (lost) {
      ++out.dropped;
      continue;
    }
    const std::string_view frame_cell = trim(cells[0]);
    std::int64_t frame = 0;
    const auto [ptr, ec] = std::from_chars(frame_cell.data(), frame_cell.data() + frame_cell.size(), frame);
    if (ec != std::errc() || ptr != frame_cell.data() + frame_cell.size()) {
      throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": bad frame index");
    }
    Sample s;
    for (std::size_t j = 0; j < kFeatureCount; ++j) s.features[j] = parse_double(trim(cells[j + 1]), line_no);
    out.frames.push_back(frame);
    out.dataset.samples.push_back(s);
  }
  out.dataset.metadata = {{"format_version", kFormatVersion}, {"source", path.string()}};
  return out;
}

void write_tracker_csv(std::span<const Sample> samples, const std::filesystem::path& path) {
  io::write_atomic(path, [&](std::ostream& os) {
    os << tracker_csv_header() << '\n';
    std::string line;
    std::int64_t frame = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (i > 0 && samples[i].trajectory_id != samples[i - 1].trajectory_id) frame = 0;
      line = std::to_string(frame++);
      for (double f : samples[i].features) {
        line.push_back(',');
        io::append_real(line, f);
      }
      line.push_back('\n');
      os << line;
    }
  });
}

}  // namespace pitch3d::dataset
