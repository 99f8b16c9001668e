#include <algorithm>
#include <cmath>
#include <string>

#include "pitch3d/error.hpp"
#include "pitch3d/kernels.hpp"
#include "pitch3d/nn.hpp"
#include "pitch3d/rng.hpp"

namespace pitch3d::nn {

void MlpConfig::validate() const {
  if (layer_sizes.size() < 2) throw Error(ErrorCode::InvalidConfig, "layer_sizes needs at least 2 entries");
  if (layer_sizes.front() != dataset::kFeatureCount) {
    throw Error(ErrorCode::InvalidConfig, "first layer size must be " + std::to_string(dataset::kFeatureCount));
  }
  if (layer_sizes.back() != dataset::kTargetCount) {
    throw Error(ErrorCode::InvalidConfig, "last layer size must be " + std::to_string(dataset::kTargetCount));
  }
  for (std::size_t n : layer_sizes) {
    if (n == 0) throw Error(ErrorCode::InvalidConfig, "layer sizes must be positive");
  }
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.biases.size();
  return n;
}

bool MlpModel::all_finite() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(layers.begin(), layers.end(), [&](const DenseLayer& l) {
    return std::all_of(l.weights.begin(), l.weights.end(), finite) &&
           std::all_of(l.biases.begin(), l.biases.end(), finite);
  });
}

MlpModel init(const MlpConfig& config) {
  config.validate();
  MlpModel model;
  model.config = config;
  Rng rng = make_rng(config.init_seed, 0);
  for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
    DenseLayer layer;
    layer.in = config.layer_sizes[l];
    layer.out = config.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    layer.weights.resize(layer.in * layer.out);
    for (double& w : layer.weights) w = dist(rng);
    layer.biases.assign(layer.out, 0.0);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

void forward_batch(const MlpModel& model, std::span<const double> x, std::size_t batch, ForwardCache& cache) {
  const std::size_t n_layers = model.layers.size();
  if (n_layers == 0) throw Error(ErrorCode::ShapeMismatch, "model has no layers");
  if (batch == 0 || x.size() != batch * model.input_size()) {
    throw Error(ErrorCode::ShapeMismatch, "input of size " + std::to_string(x.size()) + " does not match batch " +
                                              std::to_string(batch) + " x " + std::to_string(model.input_size()));
  }
  const kernels::KernelTable& k = kernels::active_kernels();

  cache.batch = batch;
  cache.pre.resize(n_layers);
  cache.post.resize(n_layers + 1);
  cache.packed_weights.resize(n_layers);
  cache.post[0].assign(x.begin(), x.end());

  for (std::size_t l = 0; l < n_layers; ++l) {
    const DenseLayer& layer = model.layers[l];
    std::vector<double>& wt = cache.packed_weights[l];
    wt.resize(layer.in * layer.out);
    k.transpose(layer.out, layer.in, layer.weights.data(), wt.data());

    std::vector<double>& z = cache.pre[l];
    z.resize(batch * layer.out);
    for (std::size_t b = 0; b < batch; ++b) std::copy(layer.biases.begin(), layer.biases.end(), z.begin() + b * layer.out);

    const std::vector<double>& input = cache.post[l];
    k.gemm_acc(batch, layer.out, layer.in, input.data(), layer.in, 1, wt.data(), layer.out, z.data(), layer.out);

    std::vector<double>& a = cache.post[l + 1];
    a.resize(z.size());
    if (l + 1 < n_layers) {
      k.relu(z.data(), a.data(), z.size());
    } else {
      std::copy(z.begin(), z.end(), a.begin());
    }
  }
}

ForwardResult forward(const MlpModel& model, std::span<const double> x) {
  if (model.layers.empty() || x.size() != model.input_size()) {
    throw Error(ErrorCode::ShapeMismatch, "forward expects " +
                                              std::to_string(model.layers.empty() ? 0 : model.input_size()) +
                                              " inputs, got " + std::to_string(x.size()));
  }
  ForwardResult r;
  forward_batch(model, x, 1, r.cache);
  r.y.assign(r.cache.output().begin(), r.cache.output().end());
  return r;
}

double mse_loss(std::span<const double> pred, std::span<const double> target, std::size_t width) {
  if (pred.size() != target.size() || width == 0 || pred.size() % width != 0) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and target shapes differ");
  }
  if (pred.empty()) throw Error(ErrorCode::EmptyBatch, "mse_loss on an empty batch");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    sum += d * d;
  }
  return sum / static_cast<double>(pred.size());
}

Gradients zero_gradients(const MlpModel& model) {
  Gradients g;
  for (const auto& l : model.layers) {
    g.weights.emplace_back(l.weights.size(), 0.0);
    g.biases.emplace_back(l.biases.size(), 0.0);
  }
  return g;
}

void backward(const MlpModel& model, const ForwardCache& cache, std::span<const double> target, Gradients& grads) {
  const std::size_t n_layers = model.layers.size();
  const std::size_t batch = cache.batch;
  if (cache.pre.size() != n_layers || cache.post.size() != n_layers + 1) {
    throw Error(ErrorCode::ShapeMismatch, "cache does not match the model");
  }
  const std::span<const double> pred = cache.output();
  if (target.size() != pred.size() || pred.size() != batch * model.output_size()) {
    throw Error(ErrorCode::ShapeMismatch, "target shape does not match the prediction");
  }
  if (grads.weights.size() != n_layers || grads.biases.size() != n_layers) grads = zero_gradients(model);

  const kernels::KernelTable& k = kernels::active_kernels();

  // dL/dz for the linear output layer.
  const double scale = 2.0 / static_cast<double>(pred.size());
  std::vector<double> delta(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) delta[i] = scale * (pred[i] - target[i]);

  std::vector<double> upstream;
  for (std::size_t l = n_layers; l-- > 0;) {
    const DenseLayer& layer = model.layers[l];
    std::vector<double>& dw = grads.weights[l];
    std::vector<double>& db = grads.biases[l];
    dw.assign(layer.weights.size(), 0.0);
    db.assign(layer.out, 0.0);

    // dW = delta^T * input: A(o, b) = delta[b * out + o].
    const std::vector<double>& input = cache.post[l];
    k.gemm_acc(layer.out, layer.in, batch, delta.data(), 1, layer.out, input.data(), layer.in, dw.data(), layer.in);
    k.col_sum_acc(batch, layer.out, delta.data(), layer.out, db.data());

    if (l == 0) break;
    // d(input) = delta * W, then through the ReLU of the previous layer.
    upstream.assign(batch * layer.in, 0.0);
    k.gemm_acc(batch, layer.in, layer.out, delta.data(), layer.out, 1, layer.weights.data(), layer.in,
               upstream.data(), layer.in);
    k.relu_mask(cache.pre[l - 1].data(), upstream.data(), upstream.size());
    delta.swap(upstream);
  }
}

Gradients backward(const MlpModel& model, const ForwardCache& cache, std::span<const double> target) {
  Gradients g = zero_gradients(model);
  backward(model, cache, target, g);
  return g;
}

Vec3 predict(const MlpModel& model, const dataset::NormStats& stats, const dataset::Features& raw_features) {
  const dataset::Features z = dataset::normalize(raw_features, stats);
  const ForwardResult r = forward(model, z);
  if (r.y.size() != 3) throw Error(ErrorCode::ShapeMismatch, "model output must have 3 components");
  return {r.y[0], r.y[1], r.y[2]};
}

std::vector<Vec3> predict_all(const MlpModel& model, const dataset::NormStats& stats,
                              std::span<const dataset::Sample> samples) {
  if (model.layers.empty() || model.input_size() != dataset::kFeatureCount || model.output_size() != 3) {
    throw Error(ErrorCode::ShapeMismatch, "model shape does not match 13 -> 3");
  }
  constexpr std::size_t kChunk = 256;
  std::vector<Vec3> out;
  out.reserve(samples.size());
  ForwardCache cache;
  std::vector<double> x;
  for (std::size_t start = 0; start < samples.size(); start += kChunk) {
    const std::size_t n = std::min(kChunk, samples.size() - start);
    x.resize(n * dataset::kFeatureCount);
    for (std::size_t i = 0; i < n; ++i) {
      const dataset::Features z = dataset::normalize(samples[start + i].features, stats);
      std::copy(z.begin(), z.end(), x.begin() + i * dataset::kFeatureCount);
    }
    forward_batch(model, x, n, cache);
    const auto y = cache.output();
    for (std::size_t i = 0; i < n; ++i) out.push_back({y[3 * i], y[3 * i + 1], y[3 * i + 2]});
  }
  return out;
}

}  // namespace pitch3d::nn
