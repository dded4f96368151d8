#include "emocnn/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "emocnn/persist.hpp"
#include "emocnn/pipeline.hpp"

namespace emocnn::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failure on " + path.string());
}

// ---------------------------------------------------------------------------
// Shared training flags

struct TrainFlags {
  std::string data;
  std::string out;
  std::string mode = "emoticon";
  std::string lexicon;
  std::string config;
  std::string precision = "f64";
  std::size_t batch_size = 32;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  std::size_t max_len = 64;
  std::size_t vocab_cap = 0;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double epsilon = 1e-7;
  bool verbose = false;

  // Config-file key -> the option that overrides it.
  std::map<std::string, CLI::Option*> overridable;
};

void add_train_flags(CLI::App* app, TrainFlags& f, bool with_mode) {
  app->add_option("--data", f.data, "Dataset CSV with header text,label")->required();
  app->add_option("--out", f.out, "Output directory")->required();
  if (with_mode) {
    f.overridable["mode"] = app->add_option("--mode", f.mode, "emoticon | text-only")
                                ->check(CLI::IsMember({"emoticon", "text-only"}));
  }
  f.overridable["batch_size"] = app->add_option("--batch-size", f.batch_size, "Minibatch size")
                                    ->check(CLI::PositiveNumber);
  f.overridable["epochs"] = app->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
  f.overridable["seed"] = app->add_option("--seed", f.seed, "Seed for split, init and shuffling");
  f.overridable["max_len"] = app->add_option("--max-len", f.max_len, "Maximum padded sequence length")
                                 ->check(CLI::Range(std::size_t{10}, std::size_t{1} << 20));
  f.overridable["vocab_cap"] = app->add_option("--vocab-cap", f.vocab_cap,
                                               "Vocabulary size cap including reserved ids (0 = none)");
  f.overridable["learning_rate"] = app->add_option("--lr", f.learning_rate, "RMSProp learning rate");
  f.overridable["rho"] = app->add_option("--rho", f.rho, "RMSProp decay");
  f.overridable["epsilon"] = app->add_option("--epsilon", f.epsilon, "RMSProp epsilon");
  f.overridable["precision"] = app->add_option("--precision", f.precision, "f64 | f32")
                                   ->check(CLI::IsMember({"f64", "f32"}));
  f.overridable["lexicon"] = app->add_option("--lexicon", f.lexicon, "Emoticon lexicon TSV");
  app->add_option("--config", f.config, "JSON file with default values for the flags above");
  app->add_flag("--verbose", f.verbose, "Print one line per epoch");
}

struct ResolvedTraining {
  PipelineOptions options;
  std::optional<fs::path> lexicon_path;
};

ResolvedTraining resolve(const TrainFlags& f, std::ostream& err) {
  json config = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw std::runtime_error("cannot open config " + f.config);
    try {
      config = json::parse(in);
    } catch (const json::exception& e) {
      throw std::runtime_error("config " + f.config + " is not valid JSON: " + e.what());
    }
    if (!config.is_object()) throw std::runtime_error("config must be a JSON object");
    for (const auto& [key, value] : config.items()) {
      if (key != "split_ratio" && !f.overridable.contains(key)) {
        throw std::runtime_error("unknown config key: " + key);
      }
    }
  }

  // A flag given on the command line wins over the config file.
  auto from_flag = [&](const std::string& key) {
    const auto it = f.overridable.find(key);
    const bool flag_set = it != f.overridable.end() && it->second->count() > 0;
    if (flag_set && config.contains(key)) {
      err << "warning: " << it->second->get_name() << " overrides config value for " << key << "\n";
    }
    return flag_set || !config.contains(key);
  };

  ResolvedTraining r;
  auto& o = r.options;
  auto& t = o.train;
  t.mode = parse_mode(from_flag("mode") ? f.mode : config.at("mode").get<std::string>());
  t.batch_size = from_flag("batch_size") ? f.batch_size : config.at("batch_size").get<std::size_t>();
  t.epochs = from_flag("epochs") ? f.epochs : config.at("epochs").get<std::size_t>();
  t.seed = from_flag("seed") ? f.seed : config.at("seed").get<std::uint64_t>();
  t.optimizer.learning_rate =
      from_flag("learning_rate") ? f.learning_rate : config.at("learning_rate").get<double>();
  t.optimizer.rho = from_flag("rho") ? f.rho : config.at("rho").get<double>();
  t.optimizer.epsilon = from_flag("epsilon") ? f.epsilon : config.at("epsilon").get<double>();
  if (config.contains("split_ratio")) t.split_ratio = config.at("split_ratio").get<double>();
  o.max_len = from_flag("max_len") ? f.max_len : config.at("max_len").get<std::size_t>();
  const std::size_t cap = from_flag("vocab_cap") ? f.vocab_cap : config.at("vocab_cap").get<std::size_t>();
  if (cap > 0) o.vocab_cap = cap;
  o.precision = parse_precision(from_flag("precision") ? f.precision : config.at("precision").get<std::string>());
  const std::string lexicon = from_flag("lexicon") ? f.lexicon : config.at("lexicon").get<std::string>();
  if (!lexicon.empty()) r.lexicon_path = lexicon;
  o.validate();
  return r;
}

// ---------------------------------------------------------------------------
// Training runs

struct RunSummary {
  std::optional<double> final_accuracy;
  double best_accuracy = 0;
  std::size_t best_epoch = 0;
  std::optional<std::string> failure;
};

template <typename Scalar>
RunSummary train_into(const std::vector<Tweet>& data, const EmoticonLexicon& lexicon,
                      const PipelineOptions& options, const fs::path& dir, bool verbose, std::ostream& out) {
  EpochObserver observer;
  if (verbose) {
    observer = [&out](const EpochRecord& r) {
      out << "epoch " << r.epoch << "  loss " << number(r.train_loss) << "  train_acc "
          << number(r.train_accuracy) << "  test_acc " << number(r.test_accuracy) << "\n";
    };
  }
  auto run = run_pipeline<Scalar>(data, lexicon, options, observer);

  fs::create_directories(dir);
  write_text(dir / "history.csv", format_history_csv(run.history));
  write_text(dir / "test.csv", format_dataset(run.test_split));

  RunSummary s;
  for (const auto& r : run.history) {
    if (r.test_accuracy > s.best_accuracy || s.best_epoch == 0) {
      s.best_accuracy = r.test_accuracy;
      s.best_epoch = r.epoch;
    }
  }
  if (run.failure) {
    s.failure = run.failure;
    return s;
  }
  save_model(run.trained, dir);
  write_text(dir / "confusion.csv", format_confusion_csv(run.final_evaluation->confusion));
  s.final_accuracy = run.final_evaluation->accuracy;
  return s;
}

RunSummary train_dispatch(const std::vector<Tweet>& data, const EmoticonLexicon& lexicon,
                          const PipelineOptions& options, const fs::path& dir, bool verbose, std::ostream& out) {
  return options.precision == Precision::f64 ? train_into<double>(data, lexicon, options, dir, verbose, out)
                                             : train_into<float>(data, lexicon, options, dir, verbose, out);
}

int cmd_train(const TrainFlags& flags, std::ostream& out, std::ostream& err) {
  const auto resolved = resolve(flags, err);
  const auto lexicon = EmoticonLexicon::load_or_default(resolved.lexicon_path);
  const auto data = load_dataset(flags.data);
  const auto summary = train_dispatch(data, lexicon, resolved.options, flags.out, flags.verbose, out);
  if (summary.failure) {
    err << "error: training diverged: " << *summary.failure << "\n";
    return kExitFailure;
  }
  out << "test accuracy: " << number(*summary.final_accuracy) << "\n";
  return kExitOk;
}

int cmd_ablate(TrainFlags flags, std::ostream& out, std::ostream& err) {
  auto resolved = resolve(flags, err);
  const auto lexicon = EmoticonLexicon::load_or_default(resolved.lexicon_path);
  const auto data = load_dataset(flags.data);
  const fs::path root = flags.out;
  fs::create_directories(root);

  std::string csv = "mode,final_test_acc,best_test_acc,best_epoch\n";
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %15s %14s %11s\n", "mode", "final_test_acc", "best_test_acc",
                "best_epoch");
  std::string table = line;
  bool failed = false;

  for (InputMode mode : {InputMode::emoticon_text, InputMode::text_only}) {
    resolved.options.train.mode = mode;
    const std::string name(mode_name(mode));
    const auto s = train_dispatch(data, lexicon, resolved.options, root / name, flags.verbose, out);
    fs::copy_file(root / name / "history.csv", root / ("history_" + name + ".csv"),
                  fs::copy_options::overwrite_existing);

    const std::string final_acc = s.final_accuracy ? number(*s.final_accuracy) : "failed";
    csv += name + "," + final_acc + "," + number(s.best_accuracy) + "," + std::to_string(s.best_epoch) + "\n";
    std::snprintf(line, sizeof line, "%-10s %15s %14s %11zu\n", name.c_str(), final_acc.c_str(),
                  number(s.best_accuracy).c_str(), s.best_epoch);
    table += line;
    if (s.failure) {
      failed = true;
      err << "error: " << name << " run diverged: " << *s.failure << "\n";
    }
  }
  write_text(root / "ablation.csv", csv);
  out << table;
  return failed ? kExitFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// Inference commands

int cmd_eval(const std::string& model_dir, const std::string& data_path, const std::string& out_dir,
             std::ostream& out) {
  const auto loaded = load_model(model_dir);
  const auto data = load_dataset(data_path);
  if (data.empty()) throw std::runtime_error("dataset " + data_path + " has no records");

  const Evaluation e = std::visit(
      [&](const auto& trained) {
        std::vector<Example> examples;
        examples.reserve(data.size());
        for (const auto& t : data) examples.push_back(make_example(trained, t));
        return evaluate(trained.model, examples);
      },
      loaded);

  const fs::path dir = out_dir.empty() ? fs::path(model_dir) : fs::path(out_dir);
  fs::create_directories(dir);
  write_text(dir / "confusion.csv", format_confusion_csv(e.confusion));
  out << "test accuracy: " << number(e.accuracy) << "\n" << format_confusion_table(e.confusion);
  return kExitOk;
}

int cmd_predict(const std::string& model_dir, const std::string& text, std::ostream& out) {
  const auto loaded = load_model(model_dir);
  const Prediction p = std::visit(
      [&](const auto& trained) {
        const Example ex = make_example(trained, Tweet{text, Emotion::sad});
        return predict(trained.model, ex.ids);
      },
      loaded);

  out << "predicted: " << emotion_name(p.category) << "\n";
  char line[64];
  for (int i = 0; i < kNumEmotions; ++i) {
    std::snprintf(line, sizeof line, "  %-6s %.9f\n", std::string(emotion_name(emotion_from_index(i))).c_str(),
                  p.probabilities[static_cast<std::size_t>(i)]);
    out << line;
  }
  return kExitOk;
}

int cmd_synth(std::size_t n, std::uint64_t seed, const std::string& path, bool text_signal, std::ostream& out) {
  const auto tweets = generate_synthetic(n, seed, !text_signal);
  save_dataset(path, tweets);
  out << "wrote " << tweets.size() << " records to " << path << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emotion recognition for microblog posts with emoticon normalization and a 1D CNN",
               args.empty() ? "emocnn" : args[0]};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train a model and write it to --out");
  add_train_flags(train, train_flags, true);

  TrainFlags ablate_flags;
  auto* ablate = app.add_subcommand("ablate", "Train emoticon and text-only models side by side");
  add_train_flags(ablate, ablate_flags, false);

  std::string model_dir, data_path, eval_out, text;
  auto* eval = app.add_subcommand("eval", "Accuracy and confusion matrix of a saved model");
  eval->add_option("--model", model_dir, "Model directory")->required();
  eval->add_option("--data", data_path, "Dataset CSV")->required();
  eval->add_option("--out", eval_out, "Directory for confusion.csv (default: the model directory)");

  auto* predict_cmd = app.add_subcommand("predict", "Classify one post");
  predict_cmd->add_option("--model", model_dir, "Model directory")->required();
  predict_cmd->add_option("--text", text, "Post text")->required();

  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string synth_out;
  bool text_signal = false;
  auto* synth = app.add_subcommand("synth", "Write a synthetic labelled dataset");
  synth->add_option("--n", n, "Number of records (at least 4)")
      ->required()
      ->check(CLI::Validator(
          [](const std::string& v) {
            std::size_t n = 0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
            const bool ok = ec == std::errc{} && ptr == v.data() + v.size() && n >= 4;
            return ok ? std::string() : std::string("--n must be an integer of at least 4");
          },
          ">= 4"));
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--out", synth_out, "Output CSV")->required();
  synth->add_flag("--text-signal", text_signal, "Put the label signal in the words instead of emoticons");

  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*train) return cmd_train(train_flags, out, err);
    if (*ablate) return cmd_ablate(ablate_flags, out, err);
    if (*eval) return cmd_eval(model_dir, data_path, eval_out, out);
    if (*predict_cmd) return cmd_predict(model_dir, text, out);
    if (*synth) return cmd_synth(n, seed, synth_out, text_signal, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace emocnn::cli
