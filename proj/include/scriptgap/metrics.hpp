#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptgap/corpus_io.hpp"

namespace scriptgap {

enum class MetricName { MRR, Recall, NDCG };
enum class Gain { Linear, Exponential };

struct MetricSpec {
  MetricName name = MetricName::MRR;
  std::size_t cutoff = 10;
  int rel_threshold = 1;
  Gain gain = Gain::Linear;

  std::string describe() const;  // "mrr@10", "ndcg@20", ...
};

/// Parses "mrr@10", "recall@1000", "r@1000", "ndcg@20", "ndcg_exp@20".
MetricSpec parse_metric(std::string_view spec);

/// Per-query scores over the evaluated query set, plus the queries that
/// could not be scored because they have no relevant judgment.
struct PerQueryScores {
  std::map<std::string, double> scores;
  std::vector<std::string> skipped;

  /// Mean over `scores`, summed in qid order. 0 when empty.
  double mean() const;
};

/// Which queries to evaluate. By default every qid in the run or the
/// qrels; queries in the qrels that the run never returned score 0.
struct EvalScope {
  std::optional<std::vector<std::string>> qids;
};

PerQueryScores mrr_at_k(const Run& run, const Qrels& qrels, std::size_t k, int rel_threshold = 1,
                        const EvalScope& scope = {});
PerQueryScores recall_at_k(const Run& run, const Qrels& qrels, std::size_t k, int rel_threshold = 1,
                           const EvalScope& scope = {});
PerQueryScores ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, Gain gain = Gain::Linear,
                         const EvalScope& scope = {});
PerQueryScores evaluate(const Run& run, const Qrels& qrels, const MetricSpec& metric,
                        const EvalScope& scope = {});

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Two-sided tail probability P(|T| >= |t|) for Student's t with `dof`
/// degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  double mean_diff = 0.0;
  std::size_t n = 0;
};

/// Two-sided paired t-test on a - b. Both inputs must cover the same
/// qids, at least two of them.
TTestResult paired_t_test_detail(const PerQueryScores& a, const PerQueryScores& b);
double paired_t_test(const PerQueryScores& a, const PerQueryScores& b);

/// min(1, m * p).
double bonferroni(double raw_p, std::size_t m);

struct GapReport {
  MetricSpec metric;
  double native_mean = 0.0;
  double translit_mean = 0.0;
  double relative_drop = 0.0;
  double t = 0.0;
  double raw_p = 1.0;
  double corrected_p = 1.0;
  std::size_t m = 1;
  std::size_t n_queries = 0;
  std::vector<std::string> skipped;
  std::string test_name = "paired-t (two-sided)";
};

/// (native - translit) / native, or 0 when native is 0.
double relative_drop(double native_mean, double translit_mean);

GapReport gap_report(const Run& native_run, const Run& translit_run, const Qrels& qrels,
                     const MetricSpec& metric, std::size_t m, const EvalScope& scope = {});

struct OverlapReport {
  std::size_t k = 10;
  std::size_t threshold = 3;
  std::map<std::string, std::size_t> per_query;
  /// histogram[v] = number of queries whose overlap is v, for v in 0..k.
  std::vector<std::size_t> histogram;
  std::size_t at_or_below_threshold = 0;
};

/// |top-k(a) ∩ top-k(b)| per query over the union of both runs' qids.
OverlapReport topk_overlap(const Run& a, const Run& b, std::size_t k, std::size_t threshold = 3);

/// `measure<TAB>qid<TAB>value` lines, per query then `ALL`.
std::string format_scores(const std::string& measure, const PerQueryScores& scores);
std::string format_gap_report(const GapReport& report);
std::string format_overlap(const OverlapReport& report);

}  // namespace scriptgap
