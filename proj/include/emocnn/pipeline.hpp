// End-to-end preprocessing and training used by the command-line tool.
#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "emocnn/corpus.hpp"
#include "emocnn/encode.hpp"
#include "emocnn/model.hpp"
#include "emocnn/train.hpp"

namespace emocnn {

enum class Precision { f64, f32 };

std::string_view precision_name(Precision p);
Precision parse_precision(std::string_view name);

struct PipelineOptions {
  TrainConfig train;
  /// Upper bound on the padded sequence length.
  std::size_t max_len = 64;
  std::optional<std::size_t> vocab_cap;
  Precision precision = Precision::f64;

  void validate() const;
};

/// Everything needed to reproduce preprocessing and inference.
template <typename Scalar>
struct TrainedModel {
  Model<Scalar> model;
  Vocabulary vocab;
  EmoticonLexicon lexicon;
  PipelineOptions options;
};

std::vector<std::string> normalize_all(const std::vector<Tweet>& tweets, const EmoticonLexicon& lexicon,
                                       InputMode mode);

/// Normalizes, encodes and pads every tweet to `length`.
std::vector<Example> make_examples(const std::vector<Tweet>& tweets, const EmoticonLexicon& lexicon,
                                   InputMode mode, const Vocabulary& vocab, std::size_t length);

/// Padded length for a training corpus: the shortest length >= the longest
/// sequence whose conv/pool chain covers every position, capped at the
/// longest such length <= max_len.
std::size_t choose_padded_length(const std::vector<TokenSequence>& sequences, std::size_t max_len,
                                 const ModelConfig& architecture = {});

template <typename Scalar>
Example make_example(const TrainedModel<Scalar>& trained, const Tweet& tweet) {
  const auto text = normalize(tweet.text, trained.lexicon, trained.options.train.mode);
  return Example{pad(encode(text, trained.vocab), static_cast<std::size_t>(trained.model.config.seq_len)),
                 tweet.label};
}

template <typename Scalar>
struct TrainRun {
  TrainedModel<Scalar> trained;
  History history;
  std::vector<Tweet> train_split;
  std::vector<Tweet> test_split;
  /// Final-epoch model on the test split; empty when training diverged.
  std::optional<Evaluation> final_evaluation;
  std::optional<std::string> failure;
};

/// split -> normalize -> fit vocabulary on the train split -> encode/pad ->
/// init -> train -> evaluate. Divergence is reported through `failure`.
template <typename Scalar>
TrainRun<Scalar> run_pipeline(const std::vector<Tweet>& data, const EmoticonLexicon& lexicon,
                              const PipelineOptions& options, const EpochObserver& observer = {}) {
  options.validate();
  TrainRun<Scalar> run;
  std::tie(run.train_split, run.test_split) =
      split_dataset(data, options.train.split_ratio, options.train.seed);
  if (run.train_split.empty() || run.test_split.empty()) {
    throw std::invalid_argument("dataset of " + std::to_string(data.size()) +
                                " records is too small to split");
  }

  const InputMode mode = options.train.mode;
  const auto train_texts = normalize_all(run.train_split, lexicon, mode);
  Vocabulary vocab = fit_vocabulary(train_texts, options.vocab_cap);

  std::vector<TokenSequence> train_seqs;
  train_seqs.reserve(train_texts.size());
  for (const auto& t : train_texts) train_seqs.push_back(encode(t, vocab));
  const std::size_t length = choose_padded_length(train_seqs, options.max_len);

  std::vector<Example> train_examples;
  train_examples.reserve(train_seqs.size());
  for (std::size_t i = 0; i < train_seqs.size(); ++i) {
    train_examples.push_back(Example{pad(train_seqs[i], length), run.train_split[i].label});
  }
  const auto test_examples = make_examples(run.test_split, lexicon, mode, vocab, length);

  ModelConfig config;
  config.seq_len = static_cast<Index>(length);
  config.vocab_size = static_cast<Index>(vocab.size());
  run.trained = TrainedModel<Scalar>{init_model<Scalar>(config, options.train.seed), std::move(vocab),
                                     lexicon, options};
  try {
    run.history = train_model(run.trained.model, train_examples, test_examples, options.train, observer);
    run.final_evaluation = evaluate(run.trained.model, test_examples);
  } catch (const TrainingDiverged& e) {
    run.history = e.history();
    run.failure = e.what();
  }
  return run;
}

}  // namespace emocnn
