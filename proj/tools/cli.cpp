#include "cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wikireading/data/stats.hpp"
#include "wikireading/data/synthetic.hpp"
#include "wikireading/eval/bounds.hpp"
#include "wikireading/eval/report.hpp"
#include "wikireading/models/model.hpp"
#include "wikireading/nn/tensor.hpp"
#include "wikireading/train/search.hpp"
#include "wikireading/train/trainer.hpp"

namespace wikireading::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kDefaultSeed = 1234;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string exact(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] == '-') throw std::invalid_argument("negative");
    v = std::stoull(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size()) throw UsageError(key + ": expected a non-negative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != value.size()) throw UsageError(key + ": expected a number, got '" + value + "'");
  return v;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw UsageError(key + ": expected true or false, got '" + value + "'");
}

std::vector<double> parse_reals(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream in(value);
  for (std::string item; std::getline(in, item, ',');) out.push_back(parse_real(key, trim(item)));
  return out;
}

/// Everything a command can be configured with.
struct RunConfig {
  models::ModelConfig model;
  train::HyperParams hyper;
  train::Schedule schedule;
  data::SyntheticSpec synthetic;
};

struct SyntheticCounts {
  std::size_t categorical = 1, categorical_values = 3, relational = 1, relational_values = 1, relational_tokens = 1,
              dates = 0;
  std::vector<double> categorical_weights{8.0, 1.0, 1.0};
};

bool apply_training_key(RunConfig& rc, const std::string& key, const std::string& value) {
  if (key == "learning_rate") rc.hyper.learning_rate = parse_real(key, value);
  else if (key == "clip") rc.hyper.clip = parse_real(key, value);
  else if (key == "batch_size") rc.schedule.batch_size = parse_count(key, value);
  else if (key == "max_steps") rc.schedule.max_steps = parse_count(key, value);
  else if (key == "eval_every") rc.schedule.eval_every = parse_count(key, value);
  else if (key == "patience") rc.schedule.patience = parse_count(key, value);
  else if (key == "target_f1") rc.schedule.target_f1 = parse_real(key, value);
  else if (key == "pretrain") rc.schedule.pretrain = parse_flag(key, value);
  else return false;
  return true;
}

bool apply_synthetic_key(RunConfig& rc, SyntheticCounts& counts, const std::string& key, const std::string& value) {
  if (key == "documents") rc.synthetic.documents = parse_count(key, value);
  else if (key == "categorical_properties") counts.categorical = parse_count(key, value);
  else if (key == "categorical_values") {
    counts.categorical_values = parse_count(key, value);
    counts.categorical_weights.clear();  // uniform unless weights follow
  } else if (key == "categorical_weights") counts.categorical_weights = parse_reals(key, value);
  else if (key == "relational_properties") counts.relational = parse_count(key, value);
  else if (key == "relational_values") counts.relational_values = parse_count(key, value);
  else if (key == "relational_tokens") counts.relational_tokens = parse_count(key, value);
  else if (key == "date_properties") counts.dates = parse_count(key, value);
  else if (key == "filler_sentences") rc.synthetic.filler_sentences = parse_count(key, value);
  else return false;
  return true;
}

/// File settings first, then --set overrides. The preset picks the base
/// model sizes; the architecture can come from any layer.
RunConfig resolve_config(const std::optional<fs::path>& config_file, const std::vector<std::string>& overrides,
                         const std::string& preset, const std::optional<std::string>& architecture_flag) {
  Settings settings;
  if (config_file) settings = read_settings(*config_file);
  for (const auto& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + item + "'");
    settings.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
  }
  if (architecture_flag) settings.emplace_back("architecture", *architecture_flag);

  auto architecture = models::Architecture::kSparseBow;
  for (const auto& [key, value] : settings) {
    if (key == "architecture") {
      try {
        architecture = models::parse_architecture(value);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
    }
  }
  RunConfig rc;
  if (preset == "desk") rc.model = models::ModelConfig::desk(architecture);
  else if (preset == "paper") rc.model = models::ModelConfig::paper(architecture);
  else throw UsageError("--preset must be desk or paper, got '" + preset + "'");

  SyntheticCounts counts;
  for (const auto& [key, value] : settings) {
    if (key == "architecture" || apply_training_key(rc, key, value) || apply_synthetic_key(rc, counts, key, value)) {
      continue;
    }
    try {
      if (!rc.model.set(key, value)) throw UsageError("unknown config key '" + key + "'");
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  try {
    rc.model.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  for (std::size_t i = 1; i <= counts.categorical; ++i) {
    rc.synthetic.categorical.push_back({"category " + std::to_string(i), counts.categorical_values,
                                        counts.categorical_weights});
  }
  for (std::size_t i = 1; i <= counts.relational; ++i) {
    rc.synthetic.relational.push_back({"relation " + std::to_string(i), counts.relational_values,
                                       counts.relational_tokens});
  }
  for (std::size_t i = 1; i <= counts.dates; ++i) rc.synthetic.dates.push_back({"date " + std::to_string(i)});
  return rc;
}

std::vector<data::Instance> load_nonempty(const fs::path& path) {
  auto instances = data::read_instances(path);
  if (instances.empty()) throw data::DataError(path.string() + ": no instances");
  return instances;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw data::DataError("cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw data::DataError("cannot open " + path.string() + " for writing");
  out << text;
}

std::string instance_id(const data::Instance& instance, std::size_t index) {
  return instance.source_id.value_or(std::to_string(index));
}

// ---------------------------------------------------------------------------
// stats

std::string stats_report(std::span<const data::Instance> instances) {
  const auto stats = data::compute_property_stats(instances);
  const auto s = data::summarize_corpus(instances, stats);
  std::string out = eval::stats_tsv(stats);
  out += "\nmeasure\tvalue\n";
  out += "instances\t" + std::to_string(s.instances) + "\n";
  out += "properties\t" + std::to_string(s.properties) + "\n";
  out += "documents\t" + std::to_string(s.documents) + "\n";
  out += "instances_per_document_mean\t" + fixed(s.instances_per_document_mean) + "\n";
  out += "instances_per_document_median\t" + fixed(s.instances_per_document_median) + "\n";
  out += "instances_per_document_max\t" + std::to_string(s.instances_per_document_max) + "\n";
  out += "document_length_mean\t" + fixed(s.document_length_mean) + "\n";
  out += "document_length_median\t" + fixed(s.document_length_median) + "\n";
  out += "categorical_instance_share\t" + fixed(s.categorical_instance_share) + "\n";
  out += "answer_uniqueness_rate\t" + fixed(s.answer_uniqueness_rate) + "\n";
  out += "verbatim_answer_rate\t" + fixed(s.verbatim_answer_rate) + "\n";
  return out;
}

int cmd_stats(const fs::path& input, const std::optional<fs::path>& out_dir, std::ostream& out) {
  const auto instances = load_nonempty(input);
  const auto report = stats_report(instances);
  if (out_dir) {
    ensure_dir(*out_dir);
    write_text(*out_dir / "stats.tsv", report);
  }
  out << report;
  return kSuccess;
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const RunConfig& rc, std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  if (rc.synthetic.documents == 0) throw UsageError("generate: set documents to a positive count");
  const auto corpus = data::generate_synthetic(rc.synthetic, seed);
  const auto split = data::split_dataset(corpus.instances, seed);
  ensure_dir(out_dir);
  data::write_instances(out_dir / "instances.jsonl", corpus.instances);
  data::write_instances(out_dir / "train.jsonl", split.train);
  data::write_instances(out_dir / "validation.jsonl", split.validation);
  data::write_instances(out_dir / "test.jsonl", split.test);
  write_text(out_dir / "truth.tsv", eval::stats_tsv(corpus.truth));
  out << "instances\t" << corpus.instances.size() << "\ntrain\t" << split.train.size() << "\nvalidation\t"
      << split.validation.size() << "\ntest\t" << split.test.size() << "\n";
  return kSuccess;
}

// ---------------------------------------------------------------------------
// train / search

void print_trial_header(std::ostream& out) {
  out << "trial\tseed\tlearning_rate\tclip\tentropy_weight\tsteps\tbest_step\tvalidation_f1\tstatus\n";
}

void print_trial(std::ostream& out, const train::TrialResult& t) {
  const auto& r = t.run;
  out << t.index << '\t' << r.seed << '\t' << exact(r.hyper.learning_rate) << '\t' << exact(r.hyper.clip) << '\t'
      << (r.hyper.entropy_weight ? exact(*r.hyper.entropy_weight) : "-") << '\t' << r.steps << '\t' << r.best_step
      << '\t' << fixed(r.validation_f1) << '\t' << (r.failed ? "failed" : "ok") << '\n';
}

int cmd_train(const RunConfig& rc, std::uint64_t seed, const fs::path& train_path,
              const std::optional<fs::path>& validation_path, const fs::path& out_dir, std::ostream& out) {
  const auto training = load_nonempty(train_path);
  const auto validation = validation_path ? load_nonempty(*validation_path) : training;
  auto model = models::create_model(rc.model, training, seed);
  train::TrialResult trial;
  trial.run = train::train(*model, training, validation, rc.hyper, rc.schedule, seed);
  ensure_dir(out_dir);
  if (!trial.run.failed) {
    trial.checkpoint = out_dir / "model.ckpt";
    models::save_model(*model, *trial.checkpoint);
  }
  write_text(out_dir / "ledger.jsonl", train::trial_to_json(trial) + "\n");
  print_trial_header(out);
  print_trial(out, trial);
  if (trial.run.failed) throw train::DivergenceError(trial.run.failure);
  return kSuccess;
}

int cmd_search(const RunConfig& rc, std::uint64_t seed, std::size_t trials, const fs::path& train_path,
               const std::optional<fs::path>& validation_path, const fs::path& out_dir, std::ostream& out) {
  const auto training = load_nonempty(train_path);
  const auto validation = validation_path ? load_nonempty(*validation_path) : training;
  ensure_dir(out_dir);
  train::SearchOptions options;
  options.ledger = out_dir / "ledger.jsonl";
  options.checkpoint_dir = out_dir / "trials";
  const auto result = train::hyperparameter_search(rc.model, training, validation, rc.schedule, trials, seed, options);
  print_trial_header(out);
  for (const auto& t : result.trials) print_trial(out, t);
  if (!result.best) throw train::DivergenceError("every trial diverged");
  out << "best\t" << result.trials[*result.best].index << '\n';
  if (result.best_model) models::save_model(*result.best_model, out_dir / "best.ckpt");
  return kSuccess;
}

// ---------------------------------------------------------------------------
// eval

std::vector<std::vector<std::string>> read_predictions(const fs::path& path,
                                                       std::span<const data::Instance> gold) {
  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!index.emplace(instance_id(gold[i], i), i).second) {
      throw data::DataError("duplicate instance id '" + instance_id(gold[i], i) + "' in gold instances");
    }
  }
  std::ifstream in(path);
  if (!in) throw data::DataError("cannot open prediction file " + path.string());
  std::vector<std::vector<std::string>> predictions(gold.size());
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw data::DataError(where + e.what());
    }
    if (!j.is_object() || !j.contains("instance_id")) throw data::DataError(where + "missing instance_id");
    const auto& id_field = j["instance_id"];
    const std::string id = id_field.is_string() ? id_field.get<std::string>() : id_field.dump();
    const auto it = index.find(id);
    if (it == index.end()) throw data::DataError(where + "unknown instance_id " + id);
    auto& slot = predictions[it->second];
    const auto answer = j.value("predicted_answer", nlohmann::json());
    if (answer.is_string()) {
      slot.push_back(answer.get<std::string>());
    } else if (answer.is_array()) {
      for (const auto& a : answer) {
        if (!a.is_string()) throw data::DataError(where + "predicted_answer entries must be strings");
        slot.push_back(a.get<std::string>());
      }
    } else if (!answer.is_null()) {
      throw data::DataError(where + "predicted_answer must be a string, an array or null");
    }
  }
  return predictions;
}

std::string predictions_jsonl(const models::Model& model, std::span<const data::Instance> instances,
                              std::vector<std::vector<std::string>>& predictions) {
  std::string text;
  predictions.clear();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto decoded = model.predict(model.encode(instances[i]));
    nlohmann::json j = {{"instance_id", instance_id(instances[i], i)},
                        {"predicted_answer", decoded.answer.empty() ? nlohmann::json() : nlohmann::json(decoded.answer)},
                        {"confidence", decoded.confidence}};
    text += j.dump() + "\n";
    predictions.push_back(decoded.answer.empty() ? std::vector<std::string>{} : std::vector{decoded.answer});
  }
  return text;
}

int cmd_eval(const fs::path& instances_path, const std::optional<fs::path>& checkpoint,
             const std::optional<fs::path>& predictions_path, const std::optional<fs::path>& stats_path,
             const std::optional<fs::path>& out_dir, std::ostream& out) {
  if (checkpoint.has_value() == predictions_path.has_value()) {
    throw UsageError("eval: give exactly one of --checkpoint and --predictions");
  }
  const auto gold = load_nonempty(instances_path);
  const auto stats = data::compute_property_stats(stats_path ? load_nonempty(*stats_path) : gold);

  std::vector<std::vector<std::string>> predictions;
  std::string method, prediction_text;
  std::optional<double> bound;
  if (checkpoint) {
    const auto model = models::load_model(*checkpoint);
    method = models::to_string(model->config().architecture);
    prediction_text = predictions_jsonl(*model, gold, predictions);
    bound = eval::method_bound(model->method_class(), gold, model->bound_context());
  } else {
    predictions = read_predictions(*predictions_path, gold);
    method = predictions_path->stem().string();
  }
  auto report = eval::per_property_report(predictions, gold, stats);
  report.method = method;
  report.bound = bound;

  const auto summary = eval::summary_tsv(std::span(&report, 1));
  const auto properties = eval::property_tsv(report);
  if (out_dir) {
    ensure_dir(*out_dir);
    write_text(*out_dir / "summary.tsv", summary);
    write_text(*out_dir / "properties.tsv", properties);
    write_text(*out_dir / "report.json", eval::report_json(report) + "\n");
    if (!prediction_text.empty()) write_text(*out_dir / "predictions.jsonl", prediction_text);
  }
  out << summary << '\n' << properties;
  return kSuccess;
}

}  // namespace

Settings parse_settings(std::string_view text) {
  Settings out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
    auto key = trim(std::string_view(line).substr(0, eq));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), trim(std::string_view(line).substr(eq + 1)));
  }
  return out;
}

Settings read_settings(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_settings(buffer.str());
  } catch (const UsageError& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

std::string error_line(int code, std::string_view kind, std::string_view message) {
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped += c;
  }
  return "error: code=" + std::to_string(code) + " kind=" + std::string(kind) + " message=\"" + escaped + "\"";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Property-value reading over documents: corpus statistics, training and evaluation.", "wikireading"};
  app.require_subcommand(1);

  std::optional<fs::path> config_file, out_dir, validation_path, checkpoint, predictions_path, stats_path;
  std::vector<std::string> overrides;
  std::optional<std::string> architecture;
  std::string preset = "desk";
  std::uint64_t seed = kDefaultSeed;
  std::size_t trials = 1;
  fs::path input, train_path;

  auto add_config_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key = value settings file");
    cmd->add_option("--set", overrides, "override one setting, key=value (repeatable)");
    cmd->add_option("--preset", preset, "base model sizes: desk or paper");
    cmd->add_option("--architecture", architecture, "model architecture");
    cmd->add_option("--seed", seed, "random seed");
  };

  auto* stats = app.add_subcommand("stats", "property frequency, entropy and corpus measures");
  stats->add_option("instances", input, "instance file (JSON lines)")->required();
  stats->add_option("--out", out_dir, "directory for stats.tsv");

  auto* generate = app.add_subcommand("generate", "write a synthetic corpus with train/validation/test splits");
  add_config_flags(generate);
  generate->add_option("--out", out_dir, "output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "train one model");
  add_config_flags(train_cmd);
  train_cmd->add_option("--train", train_path, "training instances")->required();
  train_cmd->add_option("--validation", validation_path, "validation instances (default: training set)");
  train_cmd->add_option("--out", out_dir, "output directory")->required();

  auto* search = app.add_subcommand("search", "random hyperparameter search");
  add_config_flags(search);
  search->add_option("--train", train_path, "training instances")->required();
  search->add_option("--validation", validation_path, "validation instances (default: training set)");
  search->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
  search->add_option("--out", out_dir, "output directory")->required();

  auto* eval_cmd = app.add_subcommand("eval", "score a model or a prediction file");
  eval_cmd->add_option("--instances", input, "gold instances")->required();
  eval_cmd->add_option("--checkpoint", checkpoint, "trained model");
  eval_cmd->add_option("--predictions", predictions_path, "prediction file (JSON lines)");
  eval_cmd->add_option("--stats", stats_path, "instances used to classify properties (default: gold)");
  eval_cmd->add_option("--out", out_dir, "directory for reports and predictions");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      const auto subs = app.get_subcommands();
      out << (subs.empty() ? app.help() : subs.back()->help());
      return kSuccess;
    } catch (const CLI::ParseError& e) {
      throw UsageError(e.what());
    }

    auto config = [&] { return resolve_config(config_file, overrides, preset, architecture); };
    if (stats->parsed()) return cmd_stats(input, out_dir, out);
    if (generate->parsed()) return cmd_generate(config(), seed, *out_dir, out);
    if (train_cmd->parsed()) return cmd_train(config(), seed, train_path, validation_path, *out_dir, out);
    if (search->parsed()) return cmd_search(config(), seed, trials, train_path, validation_path, *out_dir, out);
    if (eval_cmd->parsed()) return cmd_eval(input, checkpoint, predictions_path, stats_path, out_dir, out);
    throw UsageError("no command given");
  } catch (const UsageError& e) {
    err << error_line(kUsage, "usage", e.what()) << '\n';
    return kUsage;
  } catch (const train::DivergenceError& e) {
    err << error_line(kDivergence, "divergence", e.what()) << '\n';
    return kDivergence;
  } catch (const data::DataError& e) {
    err << error_line(kData, "data", e.what()) << '\n';
    return kData;
  } catch (const nn::ShapeError& e) {
    err << error_line(kData, "data", e.what()) << '\n';
    return kData;
  } catch (const std::invalid_argument& e) {
    err << error_line(kUsage, "usage", e.what()) << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << error_line(kData, "runtime", e.what()) << '\n';
    return kData;
  }
}

}  // namespace wikireading::cli
