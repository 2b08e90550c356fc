#include "scriptgap/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_set>

#include "scriptgap/error.hpp"
#include "scriptgap/hashing.hpp"
#include "scriptgap/unicode.hpp"

namespace scriptgap::toy {

namespace {

std::vector<std::u32string> letters(std::u32string_view chars) {
  std::vector<std::u32string> out;
  for (char32_t c : chars) out.emplace_back(1, c);
  return out;
}

std::string padded_id(char prefix, std::size_t i, std::size_t total) {
  int width = 1;
  for (std::size_t t = total > 0 ? total - 1 : 0; t >= 10; t /= 10) ++width;
  width = std::max(width, 5);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

const std::vector<std::u32string>& synthetic_alphabet(SyntheticScript script) {
  static const auto cyrillic = letters(U"абвгдежзиклмнопрстух");
  // Twenty common characters with pairwise distinct readings.
  static const auto han = letters(U"花生米山水木火土金月日天人大小中国心手口");
  return script == SyntheticScript::Han ? han : cyrillic;
}

SyntheticCorpus gen_synthetic_corpus(const SyntheticConfig& config) {
  if (config.n_docs < 2) throw ValidationError("synthetic corpus needs at least two documents");
  if (config.query_len == 0 || config.query_len > config.doc_len)
    throw ValidationError("query length must be between 1 and the document length");
  if (config.vocab_size == 0) throw ValidationError("vocabulary must not be empty");

  const auto& alphabet = synthetic_alphabet(config.script);
  const std::size_t min_len = config.script == SyntheticScript::Han ? 2 : 3;
  const std::size_t max_len = config.script == SyntheticScript::Han ? 4 : 8;

  SplitMix64 rng(config.seed);
  SyntheticCorpus corpus;

  std::unordered_set<std::string> seen;
  std::size_t attempts = 0;
  while (corpus.vocabulary.size() < config.vocab_size) {
    if (++attempts > config.vocab_size * 100) throw ValidationError("cannot draw enough distinct pseudo-words");
    std::size_t len = min_len + rng.below(max_len - min_len + 1);
    std::u32string word;
    for (std::size_t i = 0; i < len; ++i) word += alphabet[rng.below(alphabet.size())];
    auto utf8 = unicode::to_utf8(word);
    if (seen.insert(utf8).second) corpus.vocabulary.push_back(std::move(utf8));
  }

  std::vector<std::vector<std::size_t>> doc_words(config.n_docs);
  for (std::size_t d = 0; d < config.n_docs; ++d) {
    std::string text;
    for (std::size_t w = 0; w < config.doc_len; ++w) {
      auto id = rng.below(corpus.vocabulary.size());
      doc_words[d].push_back(id);
      if (w) text += ' ';
      text += corpus.vocabulary[id];
    }
    corpus.collection.push_back({padded_id('d', d, config.n_docs), std::move(text)});
  }

  std::vector<std::size_t> positions(config.doc_len);
  for (std::size_t q = 0; q < config.n_queries; ++q) {
    const std::size_t source = rng.below(config.n_docs);
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    seeded_shuffle(positions.begin(), positions.end(), rng);
    std::vector<std::size_t> picked(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(config.query_len));
    std::sort(picked.begin(), picked.end());
    std::string text;
    for (std::size_t k = 0; k < picked.size(); ++k) {
      if (k) text += ' ';
      text += corpus.vocabulary[doc_words[source][picked[k]]];
    }
    std::size_t negative = rng.below(config.n_docs - 1);
    if (negative >= source) ++negative;

    const std::string qid = padded_id('q', q, config.n_queries);
    const std::string& pos = corpus.collection[source].docno;
    corpus.queries.push_back({qid, text, std::nullopt});
    corpus.qrels[qid][pos] = 1;
    corpus.triples.push_back({qid, text, pos, corpus.collection[negative].docno});
  }
  return corpus;
}

}  // namespace scriptgap::toy
