#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pitch3d/error.hpp"
#include "pitch3d/kernels.hpp"
#include "pitch3d/nn.hpp"
#include "pitch3d/rng.hpp"

namespace pitch3d::nn {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "val_fraction must lie in (0, 1)");
  }
  if (early_stop_patience && *early_stop_patience < 1) {
    throw Error(ErrorCode::InvalidConfig, "early_stop_patience must be >= 1");
  }
}

namespace {

struct Matrix {
  std::vector<double> x;  // n x 13, normalized
  std::vector<double> y;  // n x 3
  std::size_t rows = 0;
};

Matrix pack(const dataset::Dataset& ds, const dataset::NormStats& stats) {
  dataset::require_labeled(ds);
  Matrix m;
  m.rows = ds.samples.size();
  m.x.reserve(m.rows * dataset::kFeatureCount);
  m.y.reserve(m.rows * dataset::kTargetCount);
  for (const auto& s : ds.samples) {
    const auto z = dataset::normalize(s.features, stats);
    m.x.insert(m.x.end(), z.begin(), z.end());
    m.y.insert(m.y.end(), s.target->begin(), s.target->end());
  }
  return m;
}

// Mean squared error over the whole matrix, accumulated in fixed chunk order.
double full_pass_loss(const MlpModel& model, const Matrix& m, ForwardCache& cache) {
  constexpr std::size_t kChunk = 512;
  constexpr std::size_t nf = dataset::kFeatureCount;
  constexpr std::size_t nt = dataset::kTargetCount;
  double sum = 0.0;
  for (std::size_t start = 0; start < m.rows; start += kChunk) {
    const std::size_t n = std::min(kChunk, m.rows - start);
    forward_batch(model, std::span<const double>(m.x).subspan(start * nf, n * nf), n, cache);
    const auto pred = cache.output();
    const std::span<const double> target = std::span<const double>(m.y).subspan(start * nt, n * nt);
    sum += mse_loss(pred, target) * static_cast<double>(n * nt);
  }
  return sum / static_cast<double>(m.rows * nt);
}

}  // namespace

TrainResult train(const dataset::Dataset& train_ds, const dataset::Dataset& val_ds, const dataset::NormStats& stats,
                  const MlpConfig& mlp_config, const AdamConfig& adam_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch) {
  mlp_config.validate();
  adam_config.validate();
  train_config.validate();
  if (train_ds.samples.empty()) throw Error(ErrorCode::EmptyDataset, "training set is empty");
  const kernels::ScopedFlushDenormals ftz;
  if (val_ds.samples.empty()) throw Error(ErrorCode::EmptyDataset, "validation set is empty");

  constexpr std::size_t nf = dataset::kFeatureCount;
  constexpr std::size_t nt = dataset::kTargetCount;
  const Matrix tr = pack(train_ds, stats);
  const Matrix va = pack(val_ds, stats);

  TrainResult result;
  result.model = init(mlp_config);
  MlpModel& model = result.model;
  AdamState state = AdamState::zeros_like(model);
  Gradients grads = zero_gradients(model);
  ForwardCache cache;

  std::vector<std::size_t> order(tr.rows);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng = make_rng(train_config.shuffle_seed, 0);

  const std::size_t bs = train_config.batch_size;
  std::vector<double> xb;
  std::vector<double> yb;

  MlpModel best_model = model;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < tr.rows; start += bs) {
      const std::size_t n = std::min(bs, tr.rows - start);
      xb.resize(n * nf);
      yb.resize(n * nt);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = order[start + i];
        std::copy_n(tr.x.begin() + r * nf, nf, xb.begin() + i * nf);
        std::copy_n(tr.y.begin() + r * nt, nt, yb.begin() + i * nt);
      }
      forward_batch(model, xb, n, cache);
      const double loss = mse_loss(cache.output(), yb);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::Diverged, "non-finite training loss at epoch " + std::to_string(epoch));
      }
      loss_sum += loss * static_cast<double>(n);
      backward(model, cache, yb, grads);
      adam_update(model, grads, state, adam_config);
    }
    result.optimizer_steps = state.step_count;

    if (!model.all_finite()) {
      throw Error(ErrorCode::Diverged, "non-finite parameters after epoch " + std::to_string(epoch));
    }
    EpochLoss el;
    el.train_loss = loss_sum / static_cast<double>(tr.rows);
    el.val_loss = full_pass_loss(model, va, cache);
    if (!std::isfinite(el.val_loss)) {
      throw Error(ErrorCode::Diverged, "non-finite validation loss at epoch " + std::to_string(epoch));
    }
    result.history.epochs.push_back(el);
    if (on_epoch) on_epoch(epoch, el);

    if (el.val_loss < best_val) {
      best_val = el.val_loss;
      result.best_epoch = epoch;
      since_best = 0;
      if (train_config.early_stop_patience) best_model = model;
    } else {
      ++since_best;
    }
    if (train_config.early_stop_patience && since_best >= *train_config.early_stop_patience) break;
  }

  if (train_config.early_stop_patience) {
    model = std::move(best_model);
  } else {
    result.best_epoch = result.history.epochs.size();
  }
  return result;
}

}  // namespace pitch3d::nn
