#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>

#include "oracles.hpp"
#include "pitch3d/dataset.hpp"
#include "pitch3d/error.hpp"

using namespace pitch3d;
using namespace pitch3d::dataset;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::InvalidParams;
}

camera::Observation example_observation() {
  camera::Observation obs;
  obs.t = 0.5;
  obs.ball_px = {100, 200};
  for (std::size_t i = 0; i < camera::kReferenceCount; ++i) {
    obs.ref_px[i] = {static_cast<double>(2 * i + 1), static_cast<double>(2 * i + 2)};
  }
  return obs;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

std::set<std::int64_t> ids_of(const Dataset& ds) {
  std::set<std::int64_t> ids;
  for (const auto& s : ds.samples) ids.insert(s.trajectory_id);
  return ids;
}

GenerationSpec small_spec(std::size_t n) {
  GenerationSpec spec;
  spec.n_trajectories = n;
  spec.seed = 42;
  return spec;
}

}  // namespace

TEST_CASE("assemble: fixed feature order") {
  const Sample s = assemble(example_observation(), {0, 9, 1}, 7);
  const Features expected{0.5, 100, 200, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(s.features == expected);
  REQUIRE(s.target.has_value());
  CHECK(*s.target == Target{0, 9, 1});
  CHECK(s.trajectory_id == 7);
}

TEST_CASE("assemble: zero observation and unpack round-trip") {
  CHECK(assemble(camera::Observation{}, {}, 0).features == Features{});
  const camera::Observation obs = example_observation();
  const camera::Observation back = unpack(assemble(obs, {}, 0));
  CHECK(back.t == obs.t);
  CHECK(back.ball_px == obs.ball_px);
  CHECK(back.ref_px == obs.ref_px);
}

TEST_CASE("feature names agree with the tracker header") {
  std::string expected = "frame";
  for (auto name : kFeatureNames) expected += "," + std::string(name);
  CHECK(tracker_csv_header() == expected);
  CHECK(tracker_csv_header() ==
        "frame,t,ball_u,ball_v,ref1_u,ref1_v,ref2_u,ref2_v,ref3_u,ref3_v,ref4_u,ref4_v,ref5_u,ref5_v");
}

TEST_CASE("fit_norm_stats: small examples") {
  Dataset ds;
  Sample a, b, c;
  a.features.fill(5);
  b.features.fill(5);
  c.features.fill(5);
  a.features[0] = 0;
  b.features[0] = 2;
  ds.samples = {a, b};
  NormStats s = fit_norm_stats(ds);
  CHECK(s.mean[0] == 1.0);
  CHECK(s.std[0] == 1.0);
  ds.samples = {a, b, c};
  s = fit_norm_stats(ds);
  CHECK(s.mean[1] == 5.0);
  CHECK(s.std[1] == kStdFloor);
}

TEST_CASE("fit_norm_stats: agrees with a two-pass computation") {
  const Dataset ds = oracle::random_dataset(50, 20, 8);
  const NormStats a = fit_norm_stats(ds);
  const NormStats b = oracle::two_pass_stats(ds);
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    CHECK(std::abs(a.mean[j] - b.mean[j]) <= 1e-12 * std::max(1.0, std::abs(b.mean[j])));
    CHECK(std::abs(a.std[j] - b.std[j]) <= 1e-12 * std::max(1.0, b.std[j]));
  }
}

TEST_CASE("fit_norm_stats: empty dataset") {
  CHECK(code_of([] { fit_norm_stats(Dataset{}); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("normalize and denormalize") {
  const Dataset ds = oracle::random_dataset(10, 10, 2);
  const NormStats s = fit_norm_stats(ds);
  const Features z = normalize(s.mean, s);
  for (double v : z) CHECK(v == 0.0);
  Features x;
  for (std::size_t j = 0; j < kFeatureCount; ++j) x[j] = s.mean[j] + s.std[j];
  for (double v : normalize(x, s)) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  for (const auto& smp : ds.samples) {
    const Features back = denormalize(normalize(smp.features, s), s);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      CHECK(std::abs(back[j] - smp.features[j]) <= 1e-12 * std::max(1.0, std::abs(smp.features[j])));
    }
  }
}

TEST_CASE("split: partition by trajectory") {
  const Dataset ds = oracle::random_dataset(100, 5, 1);
  const Split sp = split(ds, 0.2, 9);
  const auto tr = ids_of(sp.train), va = ids_of(sp.val);
  CHECK(tr.size() == 80);
  CHECK(va.size() == 20);
  std::vector<std::int64_t> both;
  std::set_intersection(tr.begin(), tr.end(), va.begin(), va.end(), std::back_inserter(both));
  CHECK(both.empty());
  CHECK(sp.train.samples.size() + sp.val.samples.size() == ds.samples.size());
  auto all = tr;
  all.insert(va.begin(), va.end());
  CHECK(all == ids_of(ds));
}

TEST_CASE("split: deterministic for a seed") {
  const Dataset ds = oracle::random_dataset(30, 3, 1);
  CHECK(split(ds, 0.3, 4).val == split(ds, 0.3, 4).val);
  CHECK(split(ds, 0.3, 4).train == split(ds, 0.3, 4).train);
  CHECK(ids_of(split(ds, 0.3, 4).val) != ids_of(split(ds, 0.3, 5).val));
}

TEST_CASE("split: clamping and preconditions") {
  const Dataset two = oracle::random_dataset(2, 4, 1);
  for (double f : {0.01, 0.99}) {
    const Split sp = split(two, f, 1);
    CHECK(ids_of(sp.train).size() == 1);
    CHECK(ids_of(sp.val).size() == 1);
  }
  CHECK(code_of([] { split(oracle::random_dataset(1, 4, 1), 0.5, 1); }) == ErrorCode::TooFewTrajectories);
  CHECK_THROWS_AS(split(two, 0.0, 1), Error);
  CHECK_THROWS_AS(split(two, 1.0, 1), Error);
}

TEST_CASE("no leakage: normalization fitted on train differs from train+val") {
  GenerationSpec spec = small_spec(20);
  const Dataset ds = generate(spec);
  const Split sp = split(ds, 0.2, 3);
  const NormStats train_only = fit_norm_stats(sp.train);
  const NormStats all = fit_norm_stats(ds);
  CHECK(train_only != all);
  CHECK(train_only == fit_norm_stats(split(ds, 0.2, 3).train));
}

TEST_CASE("save/load round-trip") {
  const auto dir = oracle::temp_dir("dataset_rt");
  Dataset ds = oracle::random_dataset(100, 10, 3);
  ds.metadata["note"] = "x";
  ds.samples[5].target.reset();
  save(ds, dir / "a.jsonl");
  const Dataset back = load(dir / "a.jsonl");
  CHECK(back == ds);
  CHECK(back.samples.size() == 1000);
}

TEST_CASE("save/load: empty dataset loads but cannot be used") {
  const auto dir = oracle::temp_dir("dataset_empty");
  Dataset ds;
  save(ds, dir / "e.jsonl");
  const Dataset back = load(dir / "e.jsonl");
  CHECK(back.samples.empty());
  CHECK(code_of([&] { require_labeled(back); }) == ErrorCode::EmptyDataset);
}

TEST_CASE("load: schema violations") {
  const auto dir = oracle::temp_dir("dataset_bad");
  const std::string meta = "{\"format_version\":1}\n";
  const std::string twelve = "[1,2,3,4,5,6,7,8,9,10,11,12]";
  write_file(dir / "12.jsonl", meta + "{\"traj\":0,\"features\":" + twelve + ",\"target\":[0,0,0]}\n");
  CHECK(code_of([&] { load(dir / "12.jsonl"); }) == ErrorCode::FormatError);
  write_file(dir / "v2.jsonl", "{\"format_version\":2}\n");
  CHECK(code_of([&] { load(dir / "v2.jsonl"); }) == ErrorCode::FormatError);
  write_file(dir / "nometa.jsonl", "");
  CHECK(code_of([&] { load(dir / "nometa.jsonl"); }) == ErrorCode::FormatError);
  write_file(dir / "garbage.jsonl", meta + "{not json\n");
  CHECK(code_of([&] { load(dir / "garbage.jsonl"); }) == ErrorCode::FormatError);
  CHECK(code_of([&] { load(dir / "missing.jsonl"); }) == ErrorCode::IoError);
}

TEST_CASE("generate: metadata, determinism and labels") {
  const GenerationSpec spec = small_spec(6);
  const Dataset a = generate(spec);
  const Dataset b = generate(spec);
  CHECK(a == b);
  CHECK(a.trajectory_count() == 6);
  CHECK(a.metadata.at("format_version") == kFormatVersion);
  CHECK(a.metadata.at("seed") == 42);
  CHECK(a.metadata.at("n_trajectories") == 6);
  CHECK(a.metadata.contains("camera"));
  CHECK(a.metadata.contains("noise"));
  CHECK(a.metadata.contains("ranges"));
  for (const auto& s : a.samples) {
    REQUIRE(s.target.has_value());
    CHECK((*s.target)[1] >= -1e-9);
    CHECK((*s.target)[1] <= 17.5 + 1e-9);
  }
  GenerationSpec other = spec;
  other.seed = 43;
  CHECK(generate(other).samples != a.samples);
}

TEST_CASE("generate: trajectory streams do not depend on the count") {
  const Dataset few = generate(small_spec(3));
  const Dataset many = generate(small_spec(5));
  std::vector<Sample> prefix;
  for (const auto& s : many.samples)
    if (s.trajectory_id < 3) prefix.push_back(s);
  CHECK(prefix == few.samples);
}

TEST_CASE("tracker CSV: write then ingest") {
  const auto dir = oracle::temp_dir("tracker_rt");
  const Dataset ds = generate(small_spec(2));
  write_tracker_csv(ds.samples, dir / "t.csv");
  const TrackedData td = ingest_tracker_csv(dir / "t.csv");
  CHECK(td.dropped == 0);
  REQUIRE(td.dataset.samples.size() == ds.samples.size());
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    CHECK(td.dataset.samples[i].features == ds.samples[i].features);
    CHECK_FALSE(td.dataset.samples[i].target.has_value());
  }
  CHECK(td.frames.front() == 0);
}

TEST_CASE("tracker CSV: blank cells drop rows") {
  const auto dir = oracle::temp_dir("tracker_blank");
  std::string text = tracker_csv_header() + "\n";
  for (int f = 0; f < 100; ++f) {
    text += std::to_string(f);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      const bool blank = (f == 10 && j == 1) || (f == 50 && j == 12) || (f == 77 && j == 6);
      text += ",";
      if (!blank) text += std::to_string(j == 0 ? f / 240.0 : 100.0 + f + j);
    }
    text += "\n";
  }
  write_file(dir / "t.csv", text);
  const TrackedData td = ingest_tracker_csv(dir / "t.csv");
  CHECK(td.dropped == 3);
  CHECK(td.dataset.samples.size() == 97);
  CHECK(td.frames.size() == 97);
  CHECK(std::find(td.frames.begin(), td.frames.end(), 50) == td.frames.end());
  CHECK(td.dataset.samples[10].features[1] == doctest::Approx(100.0 + 11 + 1));
}

TEST_CASE("tracker CSV: schema errors") {
  const auto dir = oracle::temp_dir("tracker_bad");
  write_file(dir / "h.csv", "frame,t,u,v\n0,0,1,2\n");
  CHECK(code_of([&] { ingest_tracker_csv(dir / "h.csv"); }) == ErrorCode::FormatError);
  write_file(dir / "n.csv", tracker_csv_header() + "\n0,0,1,2,3,4,5,6,7,8,9,10,11,abc\n");
  CHECK(code_of([&] { ingest_tracker_csv(dir / "n.csv"); }) == ErrorCode::FormatError);
  write_file(dir / "c.csv", tracker_csv_header() + "\n0,0,1,2\n");
  CHECK(code_of([&] { ingest_tracker_csv(dir / "c.csv"); }) == ErrorCode::FormatError);
  CHECK(code_of([&] { ingest_tracker_csv(dir / "none.csv"); }) == ErrorCode::IoError);
}
