#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scriptgap/corpus_io.hpp"

namespace scriptgap {

enum class TokenizerMode : std::uint8_t { Word = 0, HanChar = 1, CharNgram = 2 };

struct Tokenizer {
  TokenizerMode mode = TokenizerMode::Word;
  int ngram_n = 3;  // CharNgram only, 2..5
  bool lowercase = true;

  /// Throws ValidationError when ngram_n is out of range.
  void validate() const;
  std::string describe() const;

  friend bool operator==(const Tokenizer&, const Tokenizer&) = default;
};

/// Parses "word", "han_char" or "char_ngram:<n>" / "ngram<n>".
Tokenizer parse_tokenizer(std::string_view spec);

std::vector<std::string> tokenize(std::string_view text, const Tokenizer& tokenizer);

struct Bm25Params {
  double k1 = 0.9;
  double b = 0.4;

  void validate() const;
};

struct Posting {
  std::uint32_t doc;
  std::uint32_t tf;

  friend bool operator==(const Posting&, const Posting&) = default;
};

/// Immutable once built. Postings are sorted by document ordinal.
class InvertedIndex {
 public:
  InvertedIndex() = default;

  static InvertedIndex build(const std::vector<Document>& docs, const Tokenizer& tokenizer,
                             const Bm25Params& params = {});

  const Tokenizer& tokenizer() const noexcept { return tokenizer_; }
  const Bm25Params& default_params() const noexcept { return params_; }
  std::size_t size() const noexcept { return docnos_.size(); }
  double avgdl() const noexcept { return avgdl_; }
  const std::vector<std::string>& docnos() const noexcept { return docnos_; }
  const std::vector<std::uint64_t>& doc_lengths() const noexcept { return doc_lengths_; }
  const std::unordered_map<std::string, std::vector<Posting>>& postings() const noexcept {
    return postings_;
  }
  /// Empty list for unknown terms.
  const std::vector<Posting>& postings(const std::string& term) const;

  /// Little-endian binary: "SGIX", version byte, tokenizer, BM25
  /// defaults, document table, then terms in byte order.
  std::string serialize() const;
  static InvertedIndex deserialize(std::string_view bytes);

  /// Human-readable listing of the whole index.
  std::string dump() const;

 private:
  Tokenizer tokenizer_;
  Bm25Params params_;
  std::vector<std::string> docnos_;
  std::vector<std::uint64_t> doc_lengths_;
  std::unordered_map<std::string, std::vector<Posting>> postings_;
  double avgdl_ = 0.0;
};

using ScoredDoc = std::pair<std::string, double>;

/// BM25 top-k. Documents without any query term are left out; ties go to
/// the lexicographically smaller docno.
std::vector<ScoredDoc> search(const InvertedIndex& index, std::string_view query_text, std::size_t k,
                              const Bm25Params& params);

/// Runs every query, optionally on several threads. The result does not
/// depend on the thread count.
Run search_all(const InvertedIndex& index, const std::vector<Query>& queries, std::size_t k,
               const Bm25Params& params, unsigned threads = 1);

}  // namespace scriptgap
