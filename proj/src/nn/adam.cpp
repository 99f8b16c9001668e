#include <cmath>

#include "pitch3d/error.hpp"
#include "pitch3d/kernels.hpp"
#include "pitch3d/nn.hpp"

namespace pitch3d::nn {

void AdamConfig::validate() const {
  if (!(alpha > 0.0 && std::isfinite(alpha))) throw Error(ErrorCode::InvalidConfig, "adam alpha must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw Error(ErrorCode::InvalidConfig, "adam beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw Error(ErrorCode::InvalidConfig, "adam beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0 && std::isfinite(epsilon))) throw Error(ErrorCode::InvalidConfig, "adam epsilon must be > 0");
}

AdamState AdamState::zeros_like(const MlpModel& model) {
  AdamState s;
  for (const auto& l : model.layers) {
    s.m_weights.emplace_back(l.weights.size(), 0.0);
    s.v_weights.emplace_back(l.weights.size(), 0.0);
    s.m_biases.emplace_back(l.biases.size(), 0.0);
    s.v_biases.emplace_back(l.biases.size(), 0.0);
  }
  return s;
}

void adam_update(MlpModel& model, const Gradients& grads, AdamState& state, const AdamConfig& config) {
  config.validate();
  const std::size_t n = model.layers.size();
  if (grads.weights.size() != n || grads.biases.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "gradient layer count does not match the model");
  }
  if (state.step_count == 0 && state.m_weights.empty()) state = AdamState::zeros_like(model);
  if (state.m_weights.size() != n || state.v_weights.size() != n || state.m_biases.size() != n ||
      state.v_biases.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "optimizer state does not match the model");
  }
  for (std::size_t l = 0; l < n; ++l) {
    const auto& layer = model.layers[l];
    if (grads.weights[l].size() != layer.weights.size() || grads.biases[l].size() != layer.biases.size() ||
        state.m_weights[l].size() != layer.weights.size() || state.v_weights[l].size() != layer.weights.size() ||
        state.m_biases[l].size() != layer.biases.size() || state.v_biases[l].size() != layer.biases.size()) {
      throw Error(ErrorCode::ShapeMismatch, "layer " + std::to_string(l) + " shape mismatch");
    }
  }

  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const kernels::AdamCoeffs coeffs{config.alpha,
                                   config.beta1,
                                   config.beta2,
                                   config.epsilon,
                                   1.0 - std::pow(config.beta1, t),
                                   1.0 - std::pow(config.beta2, t)};
  const kernels::KernelTable& k = kernels::active_kernels();
  for (std::size_t l = 0; l < n; ++l) {
    auto& layer = model.layers[l];
    k.adam_step(layer.weights.data(), grads.weights[l].data(), state.m_weights[l].data(), state.v_weights[l].data(),
                layer.weights.size(), coeffs);
    k.adam_step(layer.biases.data(), grads.biases[l].data(), state.m_biases[l].data(), state.v_biases[l].data(),
                layer.biases.size(), coeffs);
  }
}

}  // namespace pitch3d::nn
