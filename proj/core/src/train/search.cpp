#include "wikireading/train/search.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace wikireading::train {

double sample_loguniform(double lo, double hi, Rng& rng) {
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("sample_loguniform: need 0 < lo <= hi");
  if (lo == hi) return lo;
  const double v = std::exp(rng.uniform(std::log(lo), std::log(hi)));
  return std::clamp(v, lo, hi);
}

HyperParams sample_hyperparams(const SearchSpace& space, models::Architecture architecture, std::uint64_t trial_seed) {
  Rng rng(mix64(trial_seed ^ 0x4a7d));
  HyperParams hp;
  hp.learning_rate = sample_loguniform(space.learning_rate_lo, space.learning_rate_hi, rng);
  hp.clip = sample_loguniform(space.clip_lo, space.clip_hi, rng);
  if (architecture == models::Architecture::kMemoryNetwork) {
    hp.entropy_weight = sample_loguniform(space.entropy_weight_lo, space.entropy_weight_hi, rng);
  }
  return hp;
}

namespace {

bool better(const TrialResult& a, const TrialResult& b) {
  if (a.run.validation_f1 != b.run.validation_f1) return a.run.validation_f1 > b.run.validation_f1;
  if (a.run.hyper.learning_rate != b.run.hyper.learning_rate) {
    return a.run.hyper.learning_rate < b.run.hyper.learning_rate;
  }
  return a.index < b.index;
}

}  // namespace

std::optional<std::size_t> select_best(std::span<const TrialResult> trials) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].run.failed) continue;
    if (!best || better(trials[i], trials[*best])) best = i;
  }
  return best;
}

std::string trial_to_json(const TrialResult& trial) {
  const auto& r = trial.run;
  nlohmann::json j;
  j["trial"] = trial.index;
  j["seed"] = r.seed;
  j["learning_rate"] = r.hyper.learning_rate;
  j["clip"] = r.hyper.clip;
  j["entropy_weight"] = r.hyper.entropy_weight ? nlohmann::json(*r.hyper.entropy_weight) : nlohmann::json();
  j["failed"] = r.failed;
  if (r.failed) j["failure"] = r.failure;
  j["steps"] = r.steps;
  j["best_step"] = r.best_step;
  j["validation_f1"] = r.validation_f1;
  j["steps_to_target"] = r.steps_to_target ? nlohmann::json(*r.steps_to_target) : nlohmann::json();
  nlohmann::json losses = nlohmann::json::array();
  for (double l : r.losses) losses.push_back(std::isfinite(l) ? nlohmann::json(l) : nlohmann::json());
  j["curve"] = std::move(losses);
  nlohmann::json evaluations = nlohmann::json::array();
  for (const auto& e : r.evaluations) evaluations.push_back({e.step, e.mean_f1});
  j["evaluations"] = std::move(evaluations);
  j["checkpoint"] = trial.checkpoint ? nlohmann::json(trial.checkpoint->string()) : nlohmann::json();
  return j.dump();
}

TrialResult trial_from_json(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    TrialResult t;
    t.index = j.at("trial").get<std::size_t>();
    auto& r = t.run;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.hyper.learning_rate = j.at("learning_rate").get<double>();
    r.hyper.clip = j.at("clip").get<double>();
    if (!j.at("entropy_weight").is_null()) r.hyper.entropy_weight = j["entropy_weight"].get<double>();
    r.failed = j.at("failed").get<bool>();
    r.failure = j.value("failure", "");
    r.steps = j.at("steps").get<std::size_t>();
    r.best_step = j.at("best_step").get<std::size_t>();
    r.validation_f1 = j.at("validation_f1").get<double>();
    if (!j.at("steps_to_target").is_null()) r.steps_to_target = j["steps_to_target"].get<std::size_t>();
    for (const auto& l : j.at("curve")) r.losses.push_back(l.is_null() ? std::nan("") : l.get<double>());
    for (const auto& e : j.at("evaluations")) r.evaluations.push_back({e.at(0).get<std::size_t>(), e.at(1).get<double>()});
    if (!j.at("checkpoint").is_null()) t.checkpoint = j["checkpoint"].get<std::string>();
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw data::DataError(std::string("trial ledger: ") + e.what());
  }
}

std::vector<TrialResult> read_ledger(const std::filesystem::path& path) {
  std::vector<TrialResult> out;
  std::ifstream in(path);
  if (!in) return out;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(trial_from_json(lines[i]));
    } catch (const data::DataError&) {
      // A run killed mid-write leaves a partial last line; that trial reruns.
      if (i + 1 != lines.size()) throw;
    }
  }
  return out;
}

SearchResult hyperparameter_search(const models::ModelConfig& config, std::span<const data::Instance> training,
                                   std::span<const data::Instance> validation, const Schedule& schedule,
                                   std::size_t trials, std::uint64_t base_seed, const SearchOptions& options) {
  if (trials == 0) throw std::invalid_argument("hyperparameter_search: need at least one trial");
  config.validate();

  std::map<std::size_t, TrialResult> replayed;
  if (options.ledger) {
    auto previous = read_ledger(*options.ledger);
    if (std::filesystem::exists(*options.ledger)) {
      // Rewrite without any torn final line so new trials start on a fresh line.
      std::ofstream clean(*options.ledger, std::ios::trunc);
      for (const auto& t : previous) clean << trial_to_json(t) << '\n';
      if (!clean) throw data::DataError("cannot rewrite trial ledger " + options.ledger->string());
    }
    for (auto& t : previous) {
      if (t.index >= trials) continue;
      if (t.run.seed != base_seed + t.index) {
        throw data::DataError("trial ledger " + options.ledger->string() + " was written with a different seed");
      }
      replayed[t.index] = std::move(t);
    }
  }
  if (options.checkpoint_dir) std::filesystem::create_directories(*options.checkpoint_dir);

  SearchResult result;
  std::optional<std::ofstream> ledger;
  if (options.ledger) {
    ledger.emplace(*options.ledger, std::ios::app);
    if (!*ledger) throw data::DataError("cannot open trial ledger " + options.ledger->string());
  }

  for (std::size_t i = 0; i < trials; ++i) {
    if (auto it = replayed.find(i); it != replayed.end()) {
      result.trials.push_back(std::move(it->second));
      continue;
    }
    const std::uint64_t seed = base_seed + i;
    TrialResult trial;
    trial.index = i;
    const auto hp = sample_hyperparams(options.space, config.architecture, seed);
    auto trial_config = config;
    if (hp.entropy_weight) trial_config.entropy_weight = *hp.entropy_weight;
    auto model = models::create_model(trial_config, training, seed);
    trial.run = train(*model, training, validation, hp, schedule, seed);
    if (options.checkpoint_dir && !trial.run.failed) {
      trial.checkpoint = *options.checkpoint_dir / ("trial-" + std::to_string(i) + ".ckpt");
      models::save_model(*model, *trial.checkpoint);
    }
    if (ledger) *ledger << trial_to_json(trial) << '\n' << std::flush;
    const bool wins = !trial.run.failed && (!result.best_model || better(trial, result.trials[*result.best]));
    result.trials.push_back(std::move(trial));
    if (wins) {
      result.best = result.trials.size() - 1;
      result.best_model = std::move(model);
    }
  }

  result.best = select_best(result.trials);
  if (result.best) {
    const auto& winner = result.trials[*result.best];
    const bool trained_here = !replayed.contains(winner.index);
    if (!trained_here) {
      result.best_model.reset();
      if (winner.checkpoint && std::filesystem::exists(*winner.checkpoint)) {
        result.best_model = models::load_model(*winner.checkpoint);
      }
    }
  } else {
    result.best_model.reset();
  }
  return result;
}

}  // namespace wikireading::train
