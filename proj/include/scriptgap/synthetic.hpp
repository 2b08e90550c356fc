#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scriptgap/corpus_io.hpp"

namespace scriptgap::toy {

enum class SyntheticScript { Cyrillic, Han };

struct SyntheticConfig {
  std::uint64_t seed = 0;
  std::size_t n_docs = 500;
  std::size_t doc_len = 30;
  std::size_t n_queries = 200;
  std::size_t query_len = 4;
  std::size_t vocab_size = 2000;
  SyntheticScript script = SyntheticScript::Cyrillic;
};

/// A desk-scale retrieval dataset in which every query is a handful of
/// words copied from its single relevant document.
struct SyntheticCorpus {
  std::vector<Document> collection;
  std::vector<Query> queries;
  Qrels qrels;
  std::vector<TrainingTriple> triples;
  std::vector<std::string> vocabulary;
};

/// The 20-letter alphabets the pseudo-words are spelled with.
const std::vector<std::u32string>& synthetic_alphabet(SyntheticScript script);

/// Deterministic in the config. The collection is drawn first, then
/// queries one at a time, so a larger `n_queries` extends the query list of
/// a smaller one without changing it.
SyntheticCorpus gen_synthetic_corpus(const SyntheticConfig& config);

}  // namespace scriptgap::toy
