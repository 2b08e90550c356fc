#include "scriptgap/corpus_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "scriptgap/error.hpp"

namespace scriptgap {

namespace {

bool blank(std::string_view line) {
  return line.find_first_not_of(" \t") == std::string_view::npos;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_double(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Splits `id<TAB>rest` at the first tab.
std::pair<std::string_view, std::string_view> key_and_text(std::string_view line, std::size_t line_no,
                                                           const char* what) {
  auto tab = line.find('\t');
  if (tab == std::string_view::npos)
    throw ParseError(line_no, std::string("expected ") + what + "<TAB>text");
  auto key = line.substr(0, tab);
  if (key.empty()) throw ParseError(line_no, std::string("empty ") + what);
  return {key, line.substr(tab + 1)};
}

}  // namespace

std::vector<std::string_view> split_lines(std::string_view bytes) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    auto nl = bytes.find('\n', pos);
    auto line = bytes.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return lines;
}

std::vector<Query> read_queries(std::string_view bytes) {
  std::vector<Query> out;
  std::unordered_set<std::string> seen;
  auto lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    auto [qid, text] = key_and_text(lines[i], i + 1, "qid");
    if (!seen.emplace(qid).second) throw ParseError(i + 1, "duplicate qid '" + std::string(qid) + "'");
    out.push_back({std::string(qid), std::string(text), std::nullopt});
  }
  return out;
}

std::string write_queries(const std::vector<Query>& queries) {
  std::string out;
  for (const auto& q : queries) out.append(q.qid).append("\t").append(q.text).append("\n");
  return out;
}

std::vector<Document> read_collection(std::string_view bytes) {
  std::vector<Document> out;
  std::unordered_set<std::string> seen;
  auto lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    auto [docno, text] = key_and_text(lines[i], i + 1, "docno");
    if (!seen.emplace(docno).second)
      throw ParseError(i + 1, "duplicate docno '" + std::string(docno) + "'");
    out.push_back({std::string(docno), std::string(text)});
  }
  return out;
}

std::string write_collection(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) out.append(d.docno).append("\t").append(d.text).append("\n");
  return out;
}

Qrels read_qrels(std::string_view bytes) {
  Qrels qrels;
  auto lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    auto f = split_ws(lines[i]);
    if (f.size() < 4) throw ParseError(i + 1, "qrels line needs 'qid iter docno grade'");
    auto grade = parse_int<int>(f[3]);
    if (!grade) throw ParseError(i + 1, "grade '" + std::string(f[3]) + "' is not an integer");
    qrels[std::string(f[0])][std::string(f[2])] = *grade;
  }
  return qrels;
}

std::string write_qrels(const Qrels& qrels) {
  std::string out;
  for (const auto& [qid, judged] : qrels)
    for (const auto& [docno, grade] : judged)
      out.append(qid).append(" 0 ").append(docno).append(" ").append(std::to_string(grade)).append("\n");
  return out;
}

std::string write_run(const Run& run, std::string_view tag) {
  std::string out;
  char score[64];
  for (const auto& [qid, entries] : run) {
    for (const auto& e : entries) {
      std::snprintf(score, sizeof score, "%.6f", e.score);
      out.append(qid).append(" Q0 ").append(e.docno).append(" ").append(std::to_string(e.rank));
      out.append(" ").append(score).append(" ").append(tag).append("\n");
    }
  }
  return out;
}

RunReadResult read_run_checked(std::string_view bytes, const RunReadOptions& options) {
  struct Pending {
    RunEntry entry;
    std::size_t line;
  };
  std::map<std::string, std::vector<Pending>> grouped;
  auto lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    auto f = split_ws(lines[i]);
    if (f.size() != 6) throw ParseError(i + 1, "run line needs 'qid Q0 docno rank score tag'");
    auto rank = parse_int<std::size_t>(f[3]);
    if (!rank || *rank == 0) throw ParseError(i + 1, "rank '" + std::string(f[3]) + "' is not a positive integer");
    auto score = parse_double(f[4]);
    if (!score) throw ParseError(i + 1, "score '" + std::string(f[4]) + "' is not a finite number");
    grouped[std::string(f[0])].push_back({{std::string(f[2]), *score, *rank}, i + 1});
  }

  RunReadResult result;
  for (auto& [qid, pending] : grouped) {
    std::stable_sort(pending.begin(), pending.end(),
                     [](const Pending& a, const Pending& b) { return a.entry.rank < b.entry.rank; });
    std::unordered_set<std::string> docnos;
    auto& entries = result.run[qid];
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& p = pending[i];
      if (!docnos.insert(p.entry.docno).second)
        throw ParseError(p.line, "docno '" + p.entry.docno + "' repeated for qid '" + qid + "'");
      if (p.entry.rank != i + 1) {
        std::string msg = "qid '" + qid + "': expected rank " + std::to_string(i + 1) + ", found " +
                          std::to_string(p.entry.rank);
        if (options.strict) throw ParseError(p.line, "rank gap: " + msg);
        result.warnings.push_back("line " + std::to_string(p.line) + ": rank gap: " + msg + " (renumbered)");
      }
      if (i > 0 && p.entry.score > pending[i - 1].entry.score) {
        std::string msg = "qid '" + qid + "': score increases at rank " + std::to_string(p.entry.rank);
        if (options.strict) throw ParseError(p.line, msg);
        result.warnings.push_back("line " + std::to_string(p.line) + ": " + msg);
      }
      entries.push_back({p.entry.docno, p.entry.score, i + 1});
    }
  }
  return result;
}

Run read_run(std::string_view bytes, const RunReadOptions& options) {
  return read_run_checked(bytes, options).run;
}

void set_ranking(Run& run, const std::string& qid,
                 const std::vector<std::pair<std::string, double>>& ranked) {
  auto& entries = run[qid];
  entries.clear();
  entries.reserve(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i)
    entries.push_back({ranked[i].first, ranked[i].second, i + 1});
}

std::vector<TrainingTriple> read_triples(std::string_view bytes, const std::vector<Query>& queries,
                                         const std::vector<Document>& docs) {
  std::unordered_map<std::string_view, const Query*> by_qid;
  for (const auto& q : queries) by_qid.emplace(q.qid, &q);
  std::unordered_set<std::string_view> docnos;
  for (const auto& d : docs) docnos.insert(d.docno);

  std::vector<TrainingTriple> out;
  auto lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      auto tab = lines[i].find('\t', start);
      f.push_back(lines[i].substr(start, tab == std::string_view::npos ? tab : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty())
      throw ParseError(i + 1, "expected qid<TAB>pos_docno<TAB>neg_docno");
    auto q = by_qid.find(f[0]);
    if (q == by_qid.end()) throw ParseError(i + 1, "unknown qid '" + std::string(f[0]) + "'");
    for (int k = 1; k <= 2; ++k)
      if (!docnos.count(f[k])) throw ParseError(i + 1, "unknown docno '" + std::string(f[k]) + "'");
    if (f[1] == f[2]) throw ParseError(i + 1, "positive and negative document are the same");
    out.push_back({std::string(f[0]), q->second->text, std::string(f[1]), std::string(f[2])});
  }
  return out;
}

std::string write_triples(const std::vector<TrainingTriple>& triples) {
  std::string out;
  for (const auto& t : triples)
    out.append(t.qid).append("\t").append(t.pos_docno).append("\t").append(t.neg_docno).append("\n");
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(0, "cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ParseError(0, "write to '" + path + "' failed");
}

}  // namespace scriptgap
