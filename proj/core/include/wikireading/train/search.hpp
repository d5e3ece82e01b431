#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wikireading/models/config.hpp"
#include "wikireading/random.hpp"
#include "wikireading/train/trainer.hpp"

namespace wikireading::train {

/// exp(uniform(log lo, log hi)). Requires 0 < lo <= hi.
double sample_loguniform(double lo, double hi, Rng& rng);

struct SearchSpace {
  double learning_rate_lo = 1e-5;
  double learning_rate_hi = 1e-2;
  double clip_lo = 1e-3;
  double clip_hi = 1e1;
  // Only sampled for the memory network.
  double entropy_weight_lo = 1e-4;
  double entropy_weight_hi = 1e-1;
};

/// Hyperparameters of one trial, drawn from its own seed.
HyperParams sample_hyperparams(const SearchSpace& space, models::Architecture architecture, std::uint64_t trial_seed);

struct TrialResult {
  std::size_t index = 0;
  TrainResult run;
  std::optional<std::filesystem::path> checkpoint;
};

/// Winner: highest validation Mean F1 among trials that did not fail, ties
/// going to the lower learning rate and then the lower index. Empty when
/// every trial failed.
std::optional<std::size_t> select_best(std::span<const TrialResult> trials);

struct SearchOptions {
  SearchSpace space;
  /// Newline-delimited JSON, one line per finished trial. Trials already
  /// present are replayed instead of rerun.
  std::optional<std::filesystem::path> ledger;
  /// Where each trial's best parameters are written, as trial-<i>.ckpt.
  std::optional<std::filesystem::path> checkpoint_dir;
};

struct SearchResult {
  std::vector<TrialResult> trials;
  std::optional<std::size_t> best;  // index into trials
  /// The winner's model when it was trained or loaded in this run.
  std::unique_ptr<models::Model> best_model;
};

/// Trial i uses seed base_seed + i for both its hyperparameters and its
/// training run, so results do not depend on the order trials run in.
SearchResult hyperparameter_search(const models::ModelConfig& config, std::span<const data::Instance> training,
                                   std::span<const data::Instance> validation, const Schedule& schedule,
                                   std::size_t trials, std::uint64_t base_seed, const SearchOptions& options = {});

std::string trial_to_json(const TrialResult& trial);
TrialResult trial_from_json(std::string_view line);
std::vector<TrialResult> read_ledger(const std::filesystem::path& path);

}  // namespace wikireading::train
