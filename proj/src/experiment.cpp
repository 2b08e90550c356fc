#include "scriptgap/experiment.hpp"

#include "scriptgap/error.hpp"

namespace scriptgap::toy {

const ConfigOutcome& ExperimentResult::outcome(MixMode mode) const {
  for (const auto& o : outcomes)
    if (o.mode == mode) return o;
  throw ValidationError("experiment has no outcome for configuration " + std::string(mix_mode_name(mode)));
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Romanizer& tables,
                                const std::vector<MixMode>& modes) {
  SyntheticConfig gen = config.corpus;
  const std::size_t n_eval = gen.n_queries;
  gen.n_queries = n_eval + config.n_train_queries;

  ExperimentResult result;
  result.corpus = gen_synthetic_corpus(gen);
  const auto& all_queries = result.corpus.queries;
  result.eval_native.assign(all_queries.begin(), all_queries.begin() + static_cast<std::ptrdiff_t>(n_eval));
  result.train_triples.assign(result.corpus.triples.begin() + static_cast<std::ptrdiff_t>(n_eval),
                              result.corpus.triples.end());
  result.eval_romanized =
      build_mixed_queries(result.eval_native, {MixMode::Transliterated, 0, false, std::nullopt}, tables);

  std::vector<std::string> eval_qids;
  for (const auto& q : result.eval_native) eval_qids.push_back(q.qid);
  const EvalScope scope{eval_qids};
  const auto init = EncoderParams::init(config.hash_dim, config.emb_dim, config.ngram_n, config.init_seed);

  for (MixMode mode : modes) {
    ConfigOutcome outcome;
    outcome.mode = mode;
    MixConfig mix{mode, config.mix_seed, false, std::nullopt};
    auto triples = build_training_triples(result.train_triples, mix, tables);
    auto model = train(triples, result.corpus.collection, init, config.train, &outcome.log);
    auto native_run = encode_and_rank(model, result.eval_native, result.corpus.collection, config.rank_depth,
                                      config.threads);
    auto romanized_run = encode_and_rank(model, result.eval_romanized, result.corpus.collection,
                                         config.rank_depth, config.threads);
    outcome.native = mrr_at_k(native_run, result.corpus.qrels, 10, 1, scope);
    outcome.romanized = mrr_at_k(romanized_run, result.corpus.qrels, 10, 1, scope);
    result.outcomes.push_back(std::move(outcome));
  }
  return result;
}

}  // namespace scriptgap::toy
