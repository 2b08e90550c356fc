#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptgap/script.hpp"

namespace scriptgap {

struct Query {
  std::string qid;
  std::string text;
  /// Which form the text holds, when known (native script or Latin).
  std::optional<ScriptClass> script_tag;

  friend bool operator==(const Query&, const Query&) = default;
};

struct Document {
  std::string docno;
  std::string text;

  friend bool operator==(const Document&, const Document&) = default;
};

/// qid -> docno -> grade. Absent pairs have grade 0.
using Qrels = std::map<std::string, std::map<std::string, int>>;

struct RunEntry {
  std::string docno;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
};

/// qid -> ranked list. Ranks are 1..n, scores non-increasing.
using Run = std::map<std::string, std::vector<RunEntry>>;

struct TrainingTriple {
  std::string qid;
  std::string query_text;
  std::string pos_docno;
  std::string neg_docno;

  friend bool operator==(const TrainingTriple&, const TrainingTriple&) = default;
};

/// Splits on '\n', dropping a trailing '\r' from each line. A final empty
/// line (after the last newline) is not reported.
std::vector<std::string_view> split_lines(std::string_view bytes);

/// `qid<TAB>text` per line. Blank lines are skipped.
std::vector<Query> read_queries(std::string_view bytes);
std::string write_queries(const std::vector<Query>& queries);

/// `docno<TAB>text` per line.
std::vector<Document> read_collection(std::string_view bytes);
std::string write_collection(const std::vector<Document>& docs);

/// TREC qrels: `qid iter docno grade`. Later lines overwrite earlier ones.
Qrels read_qrels(std::string_view bytes);
std::string write_qrels(const Qrels& qrels);

/// TREC run: `qid Q0 docno rank score tag`, scores with six decimals,
/// qids in lexicographic order.
std::string write_run(const Run& run, std::string_view tag);

struct RunReadOptions {
  /// Rank gaps and score inversions are errors rather than warnings.
  bool strict = false;
};

struct RunReadResult {
  Run run;
  std::vector<std::string> warnings;
};

/// In lenient mode, entries are re-sorted by their stated rank and
/// renumbered 1..n, and every repair is reported in `warnings`.
RunReadResult read_run_checked(std::string_view bytes, const RunReadOptions& options = {});
Run read_run(std::string_view bytes, const RunReadOptions& options = {});

/// Builds a Run from (docno, score) lists already in rank order.
void set_ranking(Run& run, const std::string& qid,
                 const std::vector<std::pair<std::string, double>>& ranked);

/// `qid<TAB>pos_docno<TAB>neg_docno`, resolved against queries and docs.
std::vector<TrainingTriple> read_triples(std::string_view bytes, const std::vector<Query>& queries,
                                         const std::vector<Document>& docs);
std::string write_triples(const std::vector<TrainingTriple>& triples);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace scriptgap
