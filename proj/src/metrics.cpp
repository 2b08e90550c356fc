#include "scriptgap/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "scriptgap/error.hpp"

namespace scriptgap {

namespace {

std::set<std::string> universe(const Run& run, const Qrels& qrels, const EvalScope& scope) {
  if (scope.qids) return {scope.qids->begin(), scope.qids->end()};
  std::set<std::string> qids;
  for (const auto& [qid, _] : run) qids.insert(qid);
  for (const auto& [qid, _] : qrels) qids.insert(qid);
  return qids;
}

const std::vector<RunEntry>& ranking(const Run& run, const std::string& qid) {
  static const std::vector<RunEntry> kEmpty;
  auto it = run.find(qid);
  return it == run.end() ? kEmpty : it->second;
}

int grade_of(const std::map<std::string, int>& judged, const std::string& docno) {
  auto it = judged.find(docno);
  return it == judged.end() ? 0 : it->second;
}

// Calls `score(ranking, judged)` for every evaluable query; queries
// without a judgment at or above `min_grade` are skipped.
template <typename F>
PerQueryScores per_query(const Run& run, const Qrels& qrels, const EvalScope& scope, int min_grade,
                         F score) {
  PerQueryScores out;
  for (const auto& qid : universe(run, qrels, scope)) {
    auto judged = qrels.find(qid);
    bool has_relevant = judged != qrels.end() &&
                        std::any_of(judged->second.begin(), judged->second.end(),
                                    [&](const auto& kv) { return kv.second >= min_grade; });
    if (!has_relevant) {
      out.skipped.push_back(qid);
      continue;
    }
    out.scores[qid] = score(ranking(run, qid), judged->second);
  }
  return out;
}

double gain_of(int grade, Gain gain) {
  if (grade <= 0) return 0.0;
  return gain == Gain::Linear ? grade : std::exp2(grade) - 1.0;
}

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

std::string MetricSpec::describe() const {
  std::string base;
  switch (name) {
    case MetricName::MRR: base = "mrr"; break;
    case MetricName::Recall: base = "recall"; break;
    case MetricName::NDCG: base = gain == Gain::Exponential ? "ndcg_exp" : "ndcg"; break;
  }
  return base + "@" + std::to_string(cutoff);
}

MetricSpec parse_metric(std::string_view spec) {
  std::string lower(spec);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  auto at = lower.find('@');
  if (at == std::string::npos) throw ValidationError("metric '" + lower + "' needs a cutoff, e.g. mrr@10");
  std::string name = lower.substr(0, at);
  std::size_t cutoff = 0;
  auto digits = std::string_view(lower).substr(at + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cutoff);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || cutoff == 0)
    throw ValidationError("metric '" + lower + "': cutoff must be a positive integer");
  MetricSpec m;
  m.cutoff = cutoff;
  if (name == "mrr" || name == "rr") m.name = MetricName::MRR;
  else if (name == "recall" || name == "r") m.name = MetricName::Recall;
  else if (name == "ndcg") m.name = MetricName::NDCG;
  else if (name == "ndcg_exp") {
    m.name = MetricName::NDCG;
    m.gain = Gain::Exponential;
  } else {
    throw ValidationError("unknown metric '" + name + "'");
  }
  return m;
}

double PerQueryScores::mean() const {
  if (scores.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [qid, v] : scores) sum += v;
  return sum / static_cast<double>(scores.size());
}

PerQueryScores mrr_at_k(const Run& run, const Qrels& qrels, std::size_t k, int rel_threshold,
                        const EvalScope& scope) {
  if (k == 0) throw ValidationError("cutoff must be at least 1");
  return per_query(run, qrels, scope, rel_threshold, [&](const auto& ranked, const auto& judged) {
    for (const auto& e : ranked) {
      if (e.rank > k) break;
      if (grade_of(judged, e.docno) >= rel_threshold) return 1.0 / static_cast<double>(e.rank);
    }
    return 0.0;
  });
}

PerQueryScores recall_at_k(const Run& run, const Qrels& qrels, std::size_t k, int rel_threshold,
                           const EvalScope& scope) {
  if (k == 0) throw ValidationError("cutoff must be at least 1");
  return per_query(run, qrels, scope, rel_threshold, [&](const auto& ranked, const auto& judged) {
    std::size_t relevant = 0, found = 0;
    for (const auto& [docno, grade] : judged)
      if (grade >= rel_threshold) ++relevant;
    for (const auto& e : ranked)
      if (e.rank <= k && grade_of(judged, e.docno) >= rel_threshold) ++found;
    return static_cast<double>(found) / static_cast<double>(relevant);
  });
}

PerQueryScores ndcg_at_k(const Run& run, const Qrels& qrels, std::size_t k, Gain gain,
                         const EvalScope& scope) {
  if (k == 0) throw ValidationError("cutoff must be at least 1");
  return per_query(run, qrels, scope, 1, [&](const auto& ranked, const auto& judged) {
    double dcg = 0.0;
    for (const auto& e : ranked) {
      if (e.rank > k) break;
      dcg += gain_of(grade_of(judged, e.docno), gain) / std::log2(static_cast<double>(e.rank) + 1.0);
    }
    std::vector<int> grades;
    for (const auto& [docno, grade] : judged) grades.push_back(grade);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < grades.size() && i < k; ++i)
      idcg += gain_of(grades[i], gain) / std::log2(static_cast<double>(i) + 2.0);
    return idcg > 0.0 ? dcg / idcg : 0.0;
  });
}

PerQueryScores evaluate(const Run& run, const Qrels& qrels, const MetricSpec& metric, const EvalScope& scope) {
  switch (metric.name) {
    case MetricName::MRR: return mrr_at_k(run, qrels, metric.cutoff, metric.rel_threshold, scope);
    case MetricName::Recall: return recall_at_k(run, qrels, metric.cutoff, metric.rel_threshold, scope);
    case MetricName::NDCG: return ndcg_at_k(run, qrels, metric.cutoff, metric.gain, scope);
  }
  throw ValidationError("unknown metric");
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ValidationError("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0)) throw ValidationError("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(dof / 2.0, 0.5, dof / (dof + t * t));
}

TTestResult paired_t_test_detail(const PerQueryScores& a, const PerQueryScores& b) {
  if (a.scores.size() != b.scores.size())
    throw ValidationError("paired test: query sets differ in size");
  std::vector<double> d;
  d.reserve(a.scores.size());
  for (auto ia = a.scores.begin(), ib = b.scores.begin(); ia != a.scores.end(); ++ia, ++ib) {
    if (ia->first != ib->first) throw ValidationError("paired test: query sets differ ('" + ia->first + "')");
    d.push_back(ia->second - ib->second);
  }
  if (d.size() < 2) throw ValidationError("paired test needs at least two queries");

  TTestResult r;
  r.n = d.size();
  const double n = static_cast<double>(d.size());
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  r.mean_diff = mean;
  if (sd == 0.0) {
    r.t = mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), mean);
    r.p = mean == 0.0 ? 1.0 : 0.0;
    return r;
  }
  r.t = mean / (sd / std::sqrt(n));
  r.p = student_t_two_sided_p(r.t, n - 1.0);
  return r;
}

double paired_t_test(const PerQueryScores& a, const PerQueryScores& b) {
  return paired_t_test_detail(a, b).p;
}

double bonferroni(double raw_p, std::size_t m) {
  if (m == 0) throw ValidationError("Bonferroni family size must be at least 1");
  if (!(raw_p >= 0.0 && raw_p <= 1.0)) throw ValidationError("p-value must lie in [0, 1]");
  return std::min(1.0, static_cast<double>(m) * raw_p);
}

double relative_drop(double native_mean, double translit_mean) {
  return native_mean > 0.0 ? (native_mean - translit_mean) / native_mean : 0.0;
}

GapReport gap_report(const Run& native_run, const Run& translit_run, const Qrels& qrels,
                     const MetricSpec& metric, std::size_t m, const EvalScope& scope) {
  EvalScope shared = scope;
  if (!shared.qids) {
    std::set<std::string> all = universe(native_run, qrels, {});
    for (const auto& [qid, _] : translit_run) all.insert(qid);
    shared.qids = std::vector<std::string>(all.begin(), all.end());
  }
  auto native = evaluate(native_run, qrels, metric, shared);
  auto translit = evaluate(translit_run, qrels, metric, shared);
  auto test = paired_t_test_detail(native, translit);

  GapReport g;
  g.metric = metric;
  g.native_mean = native.mean();
  g.translit_mean = translit.mean();
  g.relative_drop = relative_drop(g.native_mean, g.translit_mean);
  g.t = test.t;
  g.raw_p = test.p;
  g.m = m;
  g.corrected_p = bonferroni(test.p, m);
  g.n_queries = test.n;
  g.skipped = native.skipped;
  return g;
}

OverlapReport topk_overlap(const Run& a, const Run& b, std::size_t k, std::size_t threshold) {
  if (k == 0) throw ValidationError("overlap cutoff must be at least 1");
  OverlapReport r;
  r.k = k;
  r.threshold = threshold;
  r.histogram.assign(k + 1, 0);
  auto top = [&](const Run& run, const std::string& qid) {
    std::set<std::string> docs;
    for (const auto& e : ranking(run, qid))
      if (e.rank <= k) docs.insert(e.docno);
    return docs;
  };
  std::set<std::string> qids;
  for (const auto& [qid, _] : a) qids.insert(qid);
  for (const auto& [qid, _] : b) qids.insert(qid);
  for (const auto& qid : qids) {
    auto ta = top(a, qid), tb = top(b, qid);
    std::size_t common = 0;
    for (const auto& d : ta) common += tb.count(d);
    r.per_query[qid] = common;
    ++r.histogram[common];
    if (common <= threshold) ++r.at_or_below_threshold;
  }
  return r;
}

std::string format_scores(const std::string& measure, const PerQueryScores& scores) {
  std::string out;
  char buf[64];
  for (const auto& [qid, v] : scores.scores) {
    std::snprintf(buf, sizeof buf, "%.4f", v);
    out += measure + "\t" + qid + "\t" + buf + "\n";
  }
  std::snprintf(buf, sizeof buf, "%.4f", scores.mean());
  out += measure + "\tALL\t" + buf + "\n";
  out += "num_q\tALL\t" + std::to_string(scores.scores.size()) + "\n";
  if (!scores.skipped.empty()) out += "num_skipped\tALL\t" + std::to_string(scores.skipped.size()) + "\n";
  return out;
}

std::string format_gap_report(const GapReport& g) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "metric\tALL\t%s\nnative_mean\tALL\t%.6f\ntranslit_mean\tALL\t%.6f\n"
                "relative_drop\tALL\t%.6f\nt\tALL\t%.6f\nraw_p\tALL\t%.6g\ncorrected_p\tALL\t%.6g\n"
                "m\tALL\t%zu\nnum_q\tALL\t%zu\ntest\tALL\t%s\n",
                g.metric.describe().c_str(), g.native_mean, g.translit_mean, g.relative_drop, g.t, g.raw_p,
                g.corrected_p, g.m, g.n_queries, g.test_name.c_str());
  return buf;
}

std::string format_overlap(const OverlapReport& r) {
  std::string out;
  std::string measure = "overlap@" + std::to_string(r.k);
  for (const auto& [qid, v] : r.per_query) out += measure + "\t" + qid + "\t" + std::to_string(v) + "\n";
  for (std::size_t v = 0; v < r.histogram.size(); ++v)
    out += "histogram\t" + std::to_string(v) + "\t" + std::to_string(r.histogram[v]) + "\n";
  out += "at_or_below_" + std::to_string(r.threshold) + "\tALL\t" + std::to_string(r.at_or_below_threshold) + "\n";
  out += "num_q\tALL\t" + std::to_string(r.per_query.size()) + "\n";
  return out;
}

}  // namespace scriptgap
