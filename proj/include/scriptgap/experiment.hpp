#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scriptgap/metrics.hpp"
#include "scriptgap/mixer.hpp"
#include "scriptgap/romanizer.hpp"
#include "scriptgap/synthetic.hpp"
#include "scriptgap/toy_encoder.hpp"

namespace scriptgap::toy {

/// Desk-scale transliterate-train experiment: one synthetic corpus, a
/// held-out evaluation query set, and one encoder per training
/// configuration, all evaluated on native and romanized eval queries.
struct ExperimentConfig {
  SyntheticConfig corpus;        // n_queries is the number of eval queries
  std::size_t n_train_queries = 1000;
  std::size_t hash_dim = std::size_t{1} << 15;
  std::size_t emb_dim = 64;
  int ngram_n = 3;
  std::uint64_t init_seed = 0;
  TrainConfig train;
  std::uint64_t mix_seed = 0;
  std::size_t rank_depth = 1000;
  std::size_t bonferroni_m = 3;
  unsigned threads = 1;
};

struct ConfigOutcome {
  MixMode mode = MixMode::Native;
  TrainLog log;
  PerQueryScores native;    // MRR@10 of native eval queries
  PerQueryScores romanized; // MRR@10 of romanized eval queries
};

struct ExperimentResult {
  SyntheticCorpus corpus;
  std::vector<Query> eval_native;
  std::vector<Query> eval_romanized;
  std::vector<TrainingTriple> train_triples;
  std::vector<ConfigOutcome> outcomes;  // in the order requested

  const ConfigOutcome& outcome(MixMode mode) const;
};

/// The first `corpus.n_queries` generated queries are held out for
/// evaluation; the next `n_train_queries` provide the training triples.
ExperimentResult run_experiment(const ExperimentConfig& config, const Romanizer& tables,
                                const std::vector<MixMode>& modes);

}  // namespace scriptgap::toy
