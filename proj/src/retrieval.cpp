#include "scriptgap/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "binary_io.hpp"
#include "scriptgap/error.hpp"
#include "scriptgap/script.hpp"
#include "scriptgap/unicode.hpp"

namespace scriptgap {

namespace {

constexpr std::string_view kIndexMagic = "SGIX";
constexpr std::uint8_t kIndexVersion = 1;

// Whitespace-separated runs of code points, lowercased when requested.
std::vector<std::u32string> whitespace_runs(std::string_view text, bool lowercase) {
  std::vector<std::u32string> runs;
  std::u32string cur;
  for (const auto& c : unicode::decode(text)) {
    if (unicode::is_whitespace(c.value)) {
      if (!cur.empty()) runs.push_back(std::move(cur));
      cur.clear();
      continue;
    }
    cur.push_back(lowercase ? unicode::to_lower(c.value) : c.value);
  }
  if (!cur.empty()) runs.push_back(std::move(cur));
  return runs;
}

void push_stripped(std::u32string_view word, std::vector<std::string>& out) {
  std::size_t b = 0, e = word.size();
  while (b < e && unicode::is_punctuation(word[b])) ++b;
  while (e > b && unicode::is_punctuation(word[e - 1])) --e;
  if (b < e) out.push_back(unicode::to_utf8(word.substr(b, e - b)));
}

bool is_han(char32_t cp) { return classify(cp) == ScriptClass::Han; }

}  // namespace

void Tokenizer::validate() const {
  if (mode == TokenizerMode::CharNgram && (ngram_n < 2 || ngram_n > 5))
    throw ValidationError("char n-gram size must be in 2..5, got " + std::to_string(ngram_n));
}

std::string Tokenizer::describe() const {
  std::string s;
  switch (mode) {
    case TokenizerMode::Word: s = "word"; break;
    case TokenizerMode::HanChar: s = "han_char"; break;
    case TokenizerMode::CharNgram: s = "char_ngram:" + std::to_string(ngram_n); break;
  }
  if (!lowercase) s += ",cased";
  return s;
}

Tokenizer parse_tokenizer(std::string_view spec) {
  Tokenizer t;
  if (spec == "word") {
    t.mode = TokenizerMode::Word;
  } else if (spec == "han_char" || spec == "han") {
    t.mode = TokenizerMode::HanChar;
  } else {
    std::string_view digits;
    if (spec.substr(0, 11) == "char_ngram:") digits = spec.substr(11);
    else if (spec.substr(0, 5) == "ngram") digits = spec.substr(5);
    else throw ValidationError("unknown tokenizer '" + std::string(spec) + "'");
    if (digits.size() != 1 || digits[0] < '0' || digits[0] > '9')
      throw ValidationError("bad n-gram size in '" + std::string(spec) + "'");
    t.mode = TokenizerMode::CharNgram;
    t.ngram_n = digits[0] - '0';
  }
  t.validate();
  return t;
}

std::vector<std::string> tokenize(std::string_view text, const Tokenizer& tokenizer) {
  std::vector<std::string> out;
  for (const auto& run : whitespace_runs(text, tokenizer.lowercase)) {
    switch (tokenizer.mode) {
      case TokenizerMode::Word:
        push_stripped(run, out);
        break;
      case TokenizerMode::HanChar: {
        std::size_t start = 0;
        for (std::size_t i = 0; i < run.size(); ++i) {
          if (!is_han(run[i])) continue;
          push_stripped(std::u32string_view(run).substr(start, i - start), out);
          out.push_back(unicode::to_utf8(std::u32string_view(run).substr(i, 1)));
          start = i + 1;
        }
        push_stripped(std::u32string_view(run).substr(start), out);
        break;
      }
      case TokenizerMode::CharNgram: {
        std::u32string padded = U"^" + run + U"$";
        auto n = static_cast<std::size_t>(tokenizer.ngram_n);
        if (padded.size() <= n) {
          out.push_back(unicode::to_utf8(padded));
          break;
        }
        for (std::size_t i = 0; i + n <= padded.size(); ++i)
          out.push_back(unicode::to_utf8(std::u32string_view(padded).substr(i, n)));
        break;
      }
    }
  }
  return out;
}

void Bm25Params::validate() const {
  if (!(k1 > 0) || !std::isfinite(k1)) throw ValidationError("BM25 k1 must be positive");
  if (!(b >= 0 && b <= 1)) throw ValidationError("BM25 b must lie in [0, 1]");
}

InvertedIndex InvertedIndex::build(const std::vector<Document>& docs, const Tokenizer& tokenizer,
                                   const Bm25Params& params) {
  tokenizer.validate();
  params.validate();
  InvertedIndex index;
  index.tokenizer_ = tokenizer;
  index.params_ = params;
  std::unordered_map<std::string, std::uint32_t> seen;
  std::uint64_t total = 0;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!seen.emplace(docs[d].docno, static_cast<std::uint32_t>(d)).second)
      throw ValidationError("duplicate docno '" + docs[d].docno + "'");
    auto terms = tokenize(docs[d].text, tokenizer);
    std::unordered_map<std::string, std::uint32_t> tf;
    for (auto& t : terms) ++tf[t];
    for (auto& [term, count] : tf)
      index.postings_[term].push_back({static_cast<std::uint32_t>(d), count});
    index.docnos_.push_back(docs[d].docno);
    index.doc_lengths_.push_back(terms.size());
    total += terms.size();
  }
  index.avgdl_ = docs.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs.size());
  return index;
}

const std::vector<Posting>& InvertedIndex::postings(const std::string& term) const {
  static const std::vector<Posting> kEmpty;
  auto it = postings_.find(term);
  return it == postings_.end() ? kEmpty : it->second;
}

std::string InvertedIndex::serialize() const {
  detail::ByteWriter w;
  w.bytes(kIndexMagic);
  w.u8(kIndexVersion);
  w.u8(static_cast<std::uint8_t>(tokenizer_.mode));
  w.u8(static_cast<std::uint8_t>(tokenizer_.ngram_n));
  w.u8(tokenizer_.lowercase ? 1 : 0);
  w.f64(params_.k1);
  w.f64(params_.b);
  w.u64(docnos_.size());
  for (std::size_t d = 0; d < docnos_.size(); ++d) {
    w.str(docnos_[d]);
    w.u64(doc_lengths_[d]);
  }
  std::vector<const std::string*> terms;
  terms.reserve(postings_.size());
  for (const auto& [term, list] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
  w.u64(terms.size());
  for (const auto* term : terms) {
    const auto& list = postings_.at(*term);
    w.str(*term);
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
      w.u32(p.doc);
      w.u32(p.tf);
    }
  }
  return w.take();
}

InvertedIndex InvertedIndex::deserialize(std::string_view bytes) {
  detail::ByteReader r(bytes, "index");
  if (r.bytes(4) != kIndexMagic) throw ParseError(0, "index: bad magic (not an SGIX file)");
  if (auto v = r.u8(); v != kIndexVersion)
    throw ParseError(0, "index: unsupported format version " + std::to_string(v));
  InvertedIndex index;
  auto mode = r.u8();
  if (mode > 2) throw ParseError(0, "index: unknown tokenizer mode");
  index.tokenizer_.mode = static_cast<TokenizerMode>(mode);
  index.tokenizer_.ngram_n = r.u8();
  index.tokenizer_.lowercase = r.u8() != 0;
  index.params_.k1 = r.f64();
  index.params_.b = r.f64();
  try {
    index.tokenizer_.validate();
    index.params_.validate();
  } catch (const ValidationError& e) {
    throw ParseError(0, std::string("index: ") + e.what());
  }

  auto n = r.u64();
  if (n > r.remaining()) throw ParseError(0, "index: implausible document count");
  std::uint64_t total = 0;
  for (std::uint64_t d = 0; d < n; ++d) {
    index.docnos_.push_back(r.str());
    index.doc_lengths_.push_back(r.u64());
    total += index.doc_lengths_.back();
  }
  std::vector<std::uint64_t> tf_sum(n, 0);
  auto terms = r.u64();
  if (terms > r.remaining()) throw ParseError(0, "index: implausible term count");
  for (std::uint64_t t = 0; t < terms; ++t) {
    auto term = r.str();
    auto count = r.u32();
    std::vector<Posting> list;
    list.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      Posting p{r.u32(), r.u32()};
      if (p.doc >= n || (!list.empty() && p.doc <= list.back().doc) || p.tf == 0)
        throw ParseError(0, "index: corrupt postings for term '" + term + "'");
      tf_sum[p.doc] += p.tf;
      list.push_back(p);
    }
    index.postings_.emplace(std::move(term), std::move(list));
  }
  if (!r.at_end()) throw ParseError(0, "index: trailing bytes");
  for (std::uint64_t d = 0; d < n; ++d)
    if (tf_sum[d] != index.doc_lengths_[d]) throw ParseError(0, "index: document length mismatch");
  index.avgdl_ = n ? static_cast<double>(total) / static_cast<double>(n) : 0.0;
  return index;
}

std::string InvertedIndex::dump() const {
  std::string out;
  char buf[128];
  out += "format\tSGIX v" + std::to_string(kIndexVersion) + "\n";
  out += "tokenizer\t" + tokenizer_.describe() + "\n";
  std::snprintf(buf, sizeof buf, "bm25\tk1=%.6g b=%.6g\n", params_.k1, params_.b);
  out += buf;
  std::snprintf(buf, sizeof buf, "documents\t%zu\navgdl\t%.6f\n", docnos_.size(), avgdl_);
  out += buf;
  for (std::size_t d = 0; d < docnos_.size(); ++d)
    out += "doc\t" + std::to_string(d) + "\t" + docnos_[d] + "\t" + std::to_string(doc_lengths_[d]) + "\n";
  std::vector<const std::string*> terms;
  for (const auto& [term, list] : postings_) terms.push_back(&term);
  std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
  out += "terms\t" + std::to_string(terms.size()) + "\n";
  for (const auto* term : terms) {
    out += "term\t" + *term;
    for (const auto& p : postings_.at(*term)) out += "\t" + std::to_string(p.doc) + ":" + std::to_string(p.tf);
    out += "\n";
  }
  return out;
}

std::vector<ScoredDoc> search(const InvertedIndex& index, std::string_view query_text, std::size_t k,
                              const Bm25Params& params) {
  if (k == 0) throw ValidationError("search: k must be at least 1");
  params.validate();
  const auto n = static_cast<double>(index.size());
  if (index.size() == 0) return {};

  std::vector<double> scores(index.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto& term : tokenize(query_text, index.tokenizer())) {
    const auto& list = index.postings(term);
    if (list.empty()) continue;
    const double df = static_cast<double>(list.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& p : list) {
      const double tf = p.tf;
      const double dl = static_cast<double>(index.doc_lengths()[p.doc]);
      const double norm = params.k1 * (1.0 - params.b + params.b * dl / index.avgdl());
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + norm);
    }
  }

  std::vector<ScoredDoc> hits;
  hits.reserve(touched.size());
  for (auto d : touched)
    if (scores[d] > 0.0) hits.emplace_back(index.docnos()[d], scores[d]);
  auto better = [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  std::size_t keep = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);
  hits.resize(keep);
  return hits;
}

Run search_all(const InvertedIndex& index, const std::vector<Query>& queries, std::size_t k,
               const Bm25Params& params, unsigned threads) {
  if (k == 0) throw ValidationError("search: k must be at least 1");
  params.validate();
  std::vector<std::vector<ScoredDoc>> results(queries.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(queries.size())));
  auto work = [&](std::size_t stripe) {
    for (std::size_t i = stripe; i < queries.size(); i += threads)
      results[i] = search(index, queries[i].text, k, params);
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  Run run;
  for (std::size_t i = 0; i < queries.size(); ++i)
    if (!results[i].empty()) set_ranking(run, queries[i].qid, results[i]);
  return run;
}

}  // namespace scriptgap
