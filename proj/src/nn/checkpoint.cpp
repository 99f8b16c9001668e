#include <cmath>
#include <string>

#include "pitch3d/error.hpp"
#include "pitch3d/io.hpp"
#include "pitch3d/nn.hpp"

namespace pitch3d::nn {

using nlohmann::json;

namespace {

constexpr int kCheckpointVersion = 1;

template <typename Container>
json real_array(const Container& values) {
  json arr = json::array();
  for (double v : values) arr.push_back(v);
  return arr;
}

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::FormatError, "checkpoint: " + what); }

std::vector<double> read_reals(const json& j, std::size_t expected, const std::string& what) {
  if (!j.is_array() || j.size() != expected) {
    bad(what + " must hold " + std::to_string(expected) + " numbers");
  }
  std::vector<double> out;
  out.reserve(expected);
  for (const auto& v : j) {
    if (!v.is_number()) bad(what + " contains a non-number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) bad(what + " contains a non-finite value");
    out.push_back(d);
  }
  return out;
}

const json& field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

void save_checkpoint(const Checkpoint& ck, const std::filesystem::path& path) {
  if (!ck.model.all_finite()) throw Error(ErrorCode::Diverged, "refusing to save non-finite parameters");
  json weights = json::array();
  json biases = json::array();
  for (const auto& l : ck.model.layers) {
    weights.push_back(real_array(l.weights));
    biases.push_back(real_array(l.biases));
  }
  json doc = {
      {"format_version", kCheckpointVersion},
      {"layer_sizes", ck.model.config.layer_sizes},
      {"activation", "relu"},
      {"init_seed", ck.model.config.init_seed},
      {"weights", weights},
      {"biases", biases},
      {"norm_mean", real_array(ck.stats.mean)},
      {"norm_std", real_array(ck.stats.std)},
      {"adam_config",
       {{"alpha", ck.adam.alpha}, {"beta1", ck.adam.beta1}, {"beta2", ck.adam.beta2}, {"epsilon", ck.adam.epsilon}}},
      {"train_meta", ck.train_meta.is_null() ? json::object() : ck.train_meta},
  };
  const std::string text = io::dump_json(doc);
  io::write_atomic(path, [&](std::ostream& os) { os << text << '\n'; });
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) bad("document must be an object");

  try {
    if (field(doc, "format_version") != kCheckpointVersion) bad("unsupported format_version");
    if (field(doc, "activation") != "relu") bad("unsupported activation");

    Checkpoint ck;
    MlpConfig cfg;
    const json& sizes = field(doc, "layer_sizes");
    if (!sizes.is_array()) bad("layer_sizes must be an array");
    cfg.layer_sizes.clear();
    for (const auto& s : sizes) {
      if (!s.is_number_unsigned()) bad("layer_sizes must hold positive integers");
      cfg.layer_sizes.push_back(s.get<std::size_t>());
    }
    if (auto it = doc.find("init_seed"); it != doc.end()) cfg.init_seed = it->get<std::uint64_t>();
    try {
      cfg.validate();
    } catch (const Error& e) {
      bad(e.what());
    }

    const json& weights = field(doc, "weights");
    const json& biases = field(doc, "biases");
    const std::size_t n_layers = cfg.layer_sizes.size() - 1;
    if (!weights.is_array() || weights.size() != n_layers) bad("weights must hold one array per layer");
    if (!biases.is_array() || biases.size() != n_layers) bad("biases must hold one array per layer");

    ck.model.config = cfg;
    for (std::size_t l = 0; l < n_layers; ++l) {
      DenseLayer layer;
      layer.in = cfg.layer_sizes[l];
      layer.out = cfg.layer_sizes[l + 1];
      layer.weights = read_reals(weights[l], layer.in * layer.out, "weights[" + std::to_string(l) + "]");
      layer.biases = read_reals(biases[l], layer.out, "biases[" + std::to_string(l) + "]");
      ck.model.layers.push_back(std::move(layer));
    }

    const auto mean = read_reals(field(doc, "norm_mean"), dataset::kFeatureCount, "norm_mean");
    const auto stdev = read_reals(field(doc, "norm_std"), dataset::kFeatureCount, "norm_std");
    for (std::size_t i = 0; i < dataset::kFeatureCount; ++i) {
      if (!(stdev[i] > 0.0)) bad("norm_std entries must be > 0");
      ck.stats.mean[i] = mean[i];
      ck.stats.std[i] = stdev[i];
    }

    const json& adam = field(doc, "adam_config");
    ck.adam.alpha = field(adam, "alpha").get<double>();
    ck.adam.beta1 = field(adam, "beta1").get<double>();
    ck.adam.beta2 = field(adam, "beta2").get<double>();
    ck.adam.epsilon = field(adam, "epsilon").get<double>();
    if (auto it = doc.find("train_meta"); it != doc.end()) ck.train_meta = *it;
    return ck;
  } catch (const json::exception& e) {
    bad(e.what());
  }
}

}  // namespace pitch3d::nn
