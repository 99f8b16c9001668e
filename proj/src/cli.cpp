#include "pitch3d/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "pitch3d/config.hpp"
#include "pitch3d/dataset.hpp"
#include "pitch3d/error.hpp"
#include "pitch3d/evalreport.hpp"
#include "pitch3d/io.hpp"
#include "pitch3d/kernels.hpp"
#include "pitch3d/nn.hpp"

namespace pitch3d::cli {

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("PITCH3D_LOG");
  const std::string v = env ? env : "info";
  if (v == "error") return LogLevel::Error;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void log(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::cerr << "[pitch3d " << names[static_cast<int>(level)] << "] " << msg << '\n';
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::IoError: return kIoError;
    case ErrorCode::Diverged: return kDiverged;
    case ErrorCode::FormatError:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::EmptyDataset:
    case ErrorCode::EmptyBatch: return kSchemaMismatch;
    default: return kConfigError;
  }
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    log(LogLevel::Error, e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    log(LogLevel::Error, e.what());
    return kIoError;
  }
}

const std::string& require(const std::optional<std::string>& v, const char* flag) {
  if (!v) throw Error(ErrorCode::InvalidConfig, std::string("missing required option ") + flag);
  return *v;
}

config::RunConfig load_config(const Options& opts) {
  config::RunConfig cfg = opts.config ? config::load(*opts.config) : config::parse(nlohmann::json::object());
  if (opts.seed) {
    cfg.seeds.generate = *opts.seed;
    cfg.seeds.split = *opts.seed;
    cfg.seeds.init = *opts.seed;
    cfg.seeds.shuffle = *opts.seed;
  }
  return cfg;
}

double elapsed_s(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int cmd_generate(const Options& opts) {
  return guarded([&] {
    const auto start = std::chrono::steady_clock::now();
    const config::RunConfig cfg = load_config(opts);
    const std::string& out = opts.out ? *opts.out : require(opts.dataset, "--out");
    const dataset::Dataset ds = dataset::generate(cfg.generation_spec());
    dataset::save(ds, out);
    if (opts.tracks) dataset::write_tracker_csv(ds.samples, *opts.tracks);

    double total_flight = 0.0;
    std::int64_t last_id = -1;
    double last_t = 0.0;
    for (const auto& s : ds.samples) {
      if (s.trajectory_id != last_id) {
        total_flight += last_t;
        last_id = s.trajectory_id;
      }
      last_t = s.features[0];
    }
    total_flight += last_t;
    std::cout << "trajectories: " << ds.trajectory_count() << "\n"
              << "samples: " << ds.samples.size() << "\n"
              << "mean_flight_s: " << (ds.trajectory_count() ? total_flight / ds.trajectory_count() : 0.0) << "\n"
              << "elapsed_s: " << elapsed_s(start) << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_train(const Options& opts) {
  return guarded([&] {
    const auto start = std::chrono::steady_clock::now();
    const config::RunConfig cfg = load_config(opts);
    const std::string& ds_path = require(opts.dataset, "--dataset");
    const std::string& ck_path = require(opts.checkpoint, "--checkpoint");
    const std::string history_path = opts.out ? *opts.out : ck_path + ".history.csv";

    const dataset::Dataset ds = dataset::load(ds_path);
    dataset::require_labeled(ds);
    const nn::TrainConfig tc = cfg.train_config();
    const dataset::Split parts = dataset::split(ds, tc.val_fraction, cfg.seeds.split);
    const dataset::NormStats stats = dataset::fit_norm_stats(parts.train);
    log(LogLevel::Info, "training on " + std::to_string(parts.train.samples.size()) + " samples, validating on " +
                            std::to_string(parts.val.samples.size()) + " (kernels: " +
                            kernels::active_kernels().name + ")");

    const nn::TrainResult result =
        nn::train(parts.train, parts.val, stats, cfg.mlp_config(), cfg.adam, tc, [](std::size_t epoch, const nn::EpochLoss& el) {
          log(LogLevel::Debug, "epoch " + std::to_string(epoch) + " train " + io::format_real(el.train_loss) +
                                   " val " + io::format_real(el.val_loss));
        });

    nn::Checkpoint ck;
    ck.model = result.model;
    ck.stats = stats;
    ck.adam = cfg.adam;
    ck.train_meta = {
        {"epochs_completed", result.history.epochs.size()},
        {"best_epoch", result.best_epoch},
        {"optimizer_steps", result.optimizer_steps},
        {"batch_size", tc.batch_size},
        {"val_fraction", tc.val_fraction},
        {"seeds", {{"split", cfg.seeds.split}, {"init", cfg.seeds.init}, {"shuffle", cfg.seeds.shuffle}}},
        {"final_train_loss", result.history.epochs.back().train_loss},
        {"final_val_loss", result.history.epochs.back().val_loss},
        {"n_train", parts.train.samples.size()},
        {"n_val", parts.val.samples.size()},
    };
    nn::save_checkpoint(ck, ck_path);
    io::write_atomic(history_path, [&](std::ostream& os) {
      os << "epoch,train_loss,val_loss\n";
      for (std::size_t i = 0; i < result.history.epochs.size(); ++i) {
        const auto& el = result.history.epochs[i];
        os << (i + 1) << ',' << io::format_real(el.train_loss) << ',' << io::format_real(el.val_loss) << '\n';
      }
    });
    std::cout << "epochs: " << result.history.epochs.size() << "\n"
              << "final_train_loss: " << io::format_real(result.history.epochs.back().train_loss) << "\n"
              << "final_val_loss: " << io::format_real(result.history.epochs.back().val_loss) << "\n"
              << "elapsed_s: " << elapsed_s(start) << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_eval(const Options& opts) {
  return guarded([&] {
    const nn::Checkpoint ck = nn::load_checkpoint(require(opts.checkpoint, "--checkpoint"));
    const dataset::Dataset ds = dataset::load(require(opts.dataset, "--dataset"));
    double eps = eval::kDefaultEps;
    if (opts.config) eps = config::load(*opts.config).eval_eps;
    if (opts.eps) eps = *opts.eps;
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidConfig, "--eps must be > 0");
    const eval::Metrics m = eval::evaluate(ck.model, ck.stats, ds, eps);
    if (opts.out) eval::export_comparison(ck.model, ck.stats, ds, *opts.out);
    std::cout << io::dump_json(eval::to_json(m)) << std::endl;
    return static_cast<int>(kOk);
  });
}

int cmd_predict(const Options& opts) {
  return guarded([&] {
    const nn::Checkpoint ck = nn::load_checkpoint(require(opts.checkpoint, "--checkpoint"));
    const dataset::TrackedData tracked = dataset::ingest_tracker_csv(require(opts.in, "--in"));
    const std::string& out = require(opts.out, "--out");
    log(LogLevel::Info, "dropped " + std::to_string(tracked.dropped) + " rows with tracking loss");
    std::cout << "rows: " << tracked.frames.size() << "\n"
              << "dropped: " << tracked.dropped << "\n";
    if (tracked.frames.empty()) {
      log(LogLevel::Error, "every row was dropped; nothing to predict");
      return static_cast<int>(kAllRowsDropped);
    }
    const auto preds = nn::predict_all(ck.model, ck.stats, tracked.dataset.samples);
    io::write_atomic(out, [&](std::ostream& os) {
      os << "frame,t,pred_x,pred_y,pred_z\n";
      std::string line;
      for (std::size_t i = 0; i < preds.size(); ++i) {
        line = std::to_string(tracked.frames[i]);
        for (double v : {tracked.dataset.samples[i].features[0], preds[i].x, preds[i].y, preds[i].z}) {
          line.push_back(',');
          io::append_real(line, v);
        }
        line.push_back('\n');
        os << line;
      }
    });
    return static_cast<int>(kOk);
  });
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"pitch3d: monocular 3D pitch trajectory reconstruction"};
  app.require_subcommand(1);
  Options opts;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Run configuration JSON");
    sub->add_option("--dataset", opts.dataset, "Dataset JSON Lines file");
    sub->add_option("--checkpoint", opts.checkpoint, "Model checkpoint JSON");
    sub->add_option("--in", opts.in, "Input file");
    sub->add_option("--out", opts.out, "Output file");
    sub->add_option("--eps", opts.eps, "Hit-rate radius in meters");
    sub->add_option("--seed", opts.seed, "Override every seed in the config");
  };
  CLI::App* gen = app.add_subcommand("generate", "Simulate pitches and write a dataset");
  add_common(gen);
  gen->add_option("--tracks", opts.tracks, "Also write the observations as tracker-schema CSV");
  CLI::App* tr = app.add_subcommand("train", "Train the network on a dataset");
  add_common(tr);
  CLI::App* ev = app.add_subcommand("eval", "Print evaluation metrics as JSON");
  add_common(ev);
  CLI::App* pr = app.add_subcommand("predict", "Reconstruct 3D positions from a tracker CSV");
  add_common(pr);

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return kConfigError;
  }
  if (gen->parsed()) return cmd_generate(opts);
  if (tr->parsed()) return cmd_train(opts);
  if (ev->parsed()) return cmd_eval(opts);
  if (pr->parsed()) return cmd_predict(opts);
  return kUsage;
}

}  // namespace pitch3d::cli
