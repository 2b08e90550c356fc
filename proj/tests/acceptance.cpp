// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "metric_oracle.hpp"
#include "scriptgap/corpus_io.hpp"
#include "scriptgap/experiment.hpp"
#include "scriptgap/hashing.hpp"
#include "scriptgap/metrics.hpp"
#include "scriptgap/mixer.hpp"
#include "scriptgap/retrieval.hpp"
#include "scriptgap/romanizer.hpp"
#include "scriptgap/synthetic.hpp"
#include "scriptgap/toy_encoder.hpp"
#include "test_support.hpp"

#ifdef SCRIPTGAP_HAVE_BOOST_MATH
#include <boost/math/distributions/students_t.hpp>
#endif

using namespace scriptgap;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// 1. Golden romanizations.
void golden_vectors(Outcome& o) {
  const auto& tables = testing::shipped_tables();
  const std::pair<const char*, const char*> cases[] = {
      {"Александр", "Aleksandr"},
      {"花生過敏的治療", "huashengguomindezhiliao"},
      {"乌克兰总统候选人泽连斯基", "wukelanzongtonghouxuanrenzeliansiji"},
  };
  auto t0 = Clock::now();
  for (auto [in, want] : cases) {
    auto got = romanize_text(in, tables).output;
    o.require(got == want, std::string(in) + " -> " + got);
  }
  const double s = seconds_since(t0);
  o.require(s < 1.0, "runtime");
  o.detail << "3/3 vectors exact";
}

// 2. Headline drops from the published table means.
void gap_arithmetic(Outcome& o) {
  const double zh = relative_drop(0.2342, 0.0078), ru = relative_drop(0.2444, 0.1244);
  o.require(std::fabs(zh - 0.9667) <= 0.0005, "zh drop");
  o.require(std::fabs(ru - 0.4910) <= 0.0005, "ru drop");
  o.require(std::lround(zh * 100) == 97 && std::lround(ru * 100) == 49, "rounded percentages");
  char buf[96];
  std::snprintf(buf, sizeof buf, "zh %.4f (97%%), ru %.4f (49%%)", zh, ru);
  o.detail << buf;
}

// 3. Library metrics versus the brute-force oracle.
void metric_oracle(Outcome& o) {
  SplitMix64 rng(20250301);
  auto t0 = Clock::now();
  double worst = 0.0;
  std::size_t compared = 0;
  auto compare = [&](const std::map<std::string, double>& want, const PerQueryScores& got) {
    if (want.size() != got.scores.size()) {
      worst = 1.0;
      return;
    }
    for (const auto& [qid, v] : want) {
      auto it = got.scores.find(qid);
      worst = std::max(worst, it == got.scores.end() ? 1.0 : std::fabs(it->second - v));
      ++compared;
    }
  };
  for (int i = 0; i < 200; ++i) {
    auto inst = oracle::random_instance(rng);
    compare(oracle::evaluate(inst, oracle::Measure::RR, 10, 1), mrr_at_k(inst.run, inst.qrels, 10));
    compare(oracle::evaluate(inst, oracle::Measure::Recall, 1000, 1), recall_at_k(inst.run, inst.qrels, 1000));
    compare(oracle::evaluate(inst, oracle::Measure::NDCG, 20, 1), ndcg_at_k(inst.run, inst.qrels, 20));
  }
  const double s = seconds_since(t0);
  o.require(worst <= 1e-9, "max deviation");
  o.require(s < 10.0, "runtime");
  o.detail << "200 instances, " << compared << " per-query values, max |diff| " << worst << ", " << s << " s";
}

// 4. Paired t-test against a reference implementation.
void significance(Outcome& o) {
#ifdef SCRIPTGAP_HAVE_BOOST_MATH
  SplitMix64 rng(4242);
  double worst = 0.0;
  for (int v = 0; v < 50; ++v) {
    const auto n = 5 + rng.below(96);
    PerQueryScores a, b;
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) {
      const auto qid = "q" + std::to_string(i);
      a.scores[qid] = rng.uniform();
      b.scores[qid] = std::min(1.0, std::max(0.0, a.scores[qid] - rng.uniform(-0.3, 0.35)));
      d.push_back(a.scores[qid] - b.scores[qid]);
    }
    double mean = 0.0;
    for (double x : d) mean += x;
    mean /= double(n);
    double ss = 0.0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / double(n - 1));
    const double t = mean / (sd / std::sqrt(double(n)));
    boost::math::students_t dist(double(n - 1));
    const double want = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
    worst = std::max(worst, std::fabs(paired_t_test(a, b) - want));
  }
  o.require(worst <= 1e-6, "t-test p deviation");
  bool exact = true;
  for (int i = 0; i < 1000; ++i) {
    const double p = rng.uniform();
    const std::size_t m = 1 + rng.below(50);
    exact = exact && bonferroni(p, m) == std::min(1.0, double(m) * p);
  }
  o.require(exact, "bonferroni");
  o.detail << "50 vectors, max |p - reference| " << worst << "; bonferroni exact on 1000 draws";
#else
  o.require(false, "reference statistics library unavailable");
#endif
}

// 5. BM25 on the synthetic corpus: native versus romanized queries.
void lexical_gap(Outcome& o) {
  auto t0 = Clock::now();
  toy::SyntheticConfig cfg;
  cfg.seed = 1;
  auto corpus = toy::gen_synthetic_corpus(cfg);
  auto roman = build_mixed_queries(corpus.queries, {MixMode::Transliterated, 0, false, std::nullopt},
                                   testing::shipped_tables());
  auto idx = InvertedIndex::build(corpus.collection, {TokenizerMode::Word, 3, true});
  const Bm25Params params;
  const double native = mrr_at_k(search_all(idx, corpus.queries, 1000, params, 4), corpus.qrels, 10).mean();
  const double romanized = mrr_at_k(search_all(idx, roman, 1000, params, 4), corpus.qrels, 10).mean();
  const double s = seconds_since(t0);
  o.require(native >= 0.9, "native MRR@10");
  o.require(romanized == 0.0, "romanized MRR@10");
  o.require(s < 30.0, "runtime");
  o.detail << "native MRR@10 " << native << ", romanized " << romanized << ", " << s << " s";
}

// 6. Gradient check.
void gradient(Outcome& o) {
  auto t0 = Clock::now();
  toy::SyntheticConfig cfg;
  cfg.seed = 6;
  cfg.n_docs = 100;
  cfg.n_queries = 32;
  auto corpus = toy::gen_synthetic_corpus(cfg);
  auto params = toy::EncoderParams::init(std::size_t{1} << 15, 64, 3, 6);
  auto batch = toy::prepare_items(params, corpus.triples, corpus.collection);
  toy::GradCheckOptions opt;
  opt.step = 1e-4;
  opt.samples = 200;
  opt.seed = 6;
  const double err = toy::grad_check(params, batch, opt);
  const double s = seconds_since(t0);
  o.require(err < 1e-4, "max relative error");
  o.require(s < 10.0, "runtime");
  o.detail << "200 entries, batch 32, max relative error " << err << ", " << s << " s";
}

// 7. Transliterate-train replication on the synthetic corpus.
//
// Margins frozen from calibration runs at seeds 1, 2, 3 (10 epochs, batch
// 32, lr 0.05, tau 0.05, 1000 training and 200 held-out queries):
//   N native - N romanized:        0.684 0.675 0.700
//   50 romanized - N romanized:    0.120 0.125 0.106
//   50 native - N native:         -0.020 0.018 0.004
constexpr double kMinScriptGap = 0.50;
constexpr double kMinClosure = 0.05;
constexpr double kMaxNativeLoss = 0.05;

void replication(Outcome& o) {
  auto t0 = Clock::now();
  const auto& tables = testing::shipped_tables();
  for (std::uint64_t seed : {1, 2, 3}) {
    toy::ExperimentConfig cfg;
    cfg.corpus.seed = seed;
    cfg.init_seed = seed;
    cfg.mix_seed = seed;
    cfg.train.seed = seed;
    cfg.train.epochs = 10;
    cfg.train.batch_size = 32;
    cfg.train.learning_rate = 0.05;
    cfg.train.temperature = 0.05;
    cfg.threads = 4;
    auto result = toy::run_experiment(cfg, tables, {MixMode::Native, MixMode::Mixed50});
    const auto& n = result.outcome(MixMode::Native);
    const auto& m = result.outcome(MixMode::Mixed50);

    auto a = paired_t_test_detail(n.native, n.romanized);
    auto b = paired_t_test_detail(m.romanized, n.romanized);
    auto c = paired_t_test_detail(m.native, n.native);
    const double pa = bonferroni(a.p, cfg.bonferroni_m), pb = bonferroni(b.p, cfg.bonferroni_m),
                 pc = bonferroni(c.p, cfg.bonferroni_m);
    const std::string tag = "seed " + std::to_string(seed) + " ";
    o.require(a.mean_diff > 0 && pa < 0.05 && a.mean_diff >= kMinScriptGap, tag + "(a)");
    o.require(b.mean_diff > 0 && pb < 0.05 && b.mean_diff >= kMinClosure, tag + "(b)");
    // "Worse" means lower and significant; a significant gain is not a loss.
    o.require(!(c.mean_diff < 0 && pc < 0.05) && c.mean_diff >= -kMaxNativeLoss, tag + "(c)");
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%sseed %llu: N %.3f/%.3f (p %.1e), 50 %.3f/%.3f (b p %.1e, c p %.2f)",
                  seed == 1 ? "" : "; ", static_cast<unsigned long long>(seed), n.native.mean(),
                  n.romanized.mean(), pa, m.native.mean(), m.romanized.mean(), pb, pc);
    o.detail << buf;
  }
  const double s = seconds_since(t0);
  o.require(s < 300.0, "runtime");
  o.detail << "; " << s << " s";
}

// 8. Mixer determinism and balance.
//
// Digest of write_queries(Mixed50(seed 20250101)) over the first 1000
// synthetic queries of corpus seed 8, frozen on first run.
constexpr std::uint64_t kMixDigest = 0xfe1dfa7065018d33ULL;

void mixer(Outcome& o) {
  toy::SyntheticConfig cfg;
  cfg.seed = 8;
  cfg.n_queries = 1000;
  auto queries = toy::gen_synthetic_corpus(cfg).queries;
  const MixConfig mix{MixMode::Mixed50, 20250101, false, std::nullopt};
  MixStats stats;
  const auto first = write_queries(build_mixed_queries(queries, mix, testing::shipped_tables(), &stats));
  const auto second = write_queries(build_mixed_queries(queries, mix, testing::shipped_tables()));
  std::size_t coin = 0;
  for (const auto& q : queries) coin += (splitmix64(mix.seed ^ fnv1a64(q.qid)) & 1) == 1;
  const auto digest = fnv1a64(first);
  o.require(first == second, "byte-identical re-run");
  o.require(stats.romanized == coin, "count matches the hash rule");
  o.require(stats.romanized >= 450 && stats.romanized <= 550, "500 +- 50");
  o.require(digest == kMixDigest, "frozen digest");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  o.detail << stats.romanized << " of 1000 romanized, digest " << buf;
}

// 9. Top-k overlap.
void overlap(Outcome& o) {
  Run same, other, a, b;
  for (int q = 0; q < 5; ++q) {
    std::vector<std::pair<std::string, double>> x, y;
    for (int i = 0; i < 10; ++i) {
      x.emplace_back("d" + std::to_string(i), 20 - i);
      y.emplace_back("e" + std::to_string(i), 20 - i);
    }
    set_ranking(same, "q" + std::to_string(q), x);
    set_ranking(other, "q" + std::to_string(q), y);
  }
  auto id = topk_overlap(same, same, 10), dis = topk_overlap(same, other, 10);
  for (const auto& [q, v] : id.per_query) o.require(v == 10, "identical runs");
  for (const auto& [q, v] : dis.per_query) o.require(v == 0, "disjoint runs");
  // Overlaps 0..10 at k = 10, one query each.
  for (int q = 0; q <= 10; ++q) {
    std::vector<std::pair<std::string, double>> x, y;
    for (int i = 0; i < 10; ++i) {
      x.emplace_back("d" + std::to_string(i), 20 - i);
      y.emplace_back(i < q ? "d" + std::to_string(9 - i) : "z" + std::to_string(i), 20 - i);
    }
    set_ranking(a, "q" + std::to_string(q), x);
    set_ranking(b, "q" + std::to_string(q), y);
  }
  auto rep = topk_overlap(a, b, 10, 3);
  for (int q = 0; q <= 10; ++q) o.require(rep.per_query.at("q" + std::to_string(q)) == std::size_t(q), "constructed overlap");
  o.require(rep.at_or_below_threshold == 4, "<= 3 count");
  o.require(rep.histogram == std::vector<std::size_t>(11, 1), "histogram");
  o.detail << "identical 10, disjoint 0, " << rep.at_or_below_threshold << " of 11 constructed queries at <= 3";
}

// 10. Persistence round-trips.
void round_trips(Outcome& o) {
  toy::SyntheticConfig cfg;
  cfg.seed = 10;
  cfg.n_docs = 200;
  cfg.n_queries = 50;
  auto corpus = toy::gen_synthetic_corpus(cfg);
  auto idx = InvertedIndex::build(corpus.collection, {TokenizerMode::CharNgram, 3, true});
  auto run = search_all(idx, corpus.queries, 100, {});
  const auto run_bytes = write_run(run, "bm25");
  auto run_back = read_run(run_bytes);
  o.require(write_run(run_back, "bm25") == run_bytes, "run bytes");
  o.require(mrr_at_k(run_back, corpus.qrels, 10).scores == mrr_at_k(run, corpus.qrels, 10).scores, "run metrics");

  auto idx_back = InvertedIndex::deserialize(idx.serialize());
  o.require(write_run(search_all(idx_back, corpus.queries, 100, {}), "bm25") == run_bytes, "index search");

  auto params = toy::EncoderParams::init(std::size_t{1} << 12, 16, 3, 10);
  toy::TrainConfig tc;
  tc.epochs = 1;
  tc.seed = 10;
  auto model = toy::train(corpus.triples, corpus.collection, params, tc);
  auto model_back = toy::EncoderParams::deserialize(model.serialize());
  o.require(write_run(toy::encode_and_rank(model_back, corpus.queries, corpus.collection, 100), "toy") ==
                write_run(toy::encode_and_rank(model, corpus.queries, corpus.collection, 100), "toy"),
            "checkpoint ranking");
  o.detail << "run file, index and checkpoint reproduce downstream output exactly";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"romanization golden vectors", golden_vectors},
      {"gap arithmetic", gap_arithmetic},
      {"metric oracle equivalence", metric_oracle},
      {"significance machinery", significance},
      {"lexical script gap (BM25)", lexical_gap},
      {"toy encoder gradient check", gradient},
      {"transliterate-train replication", replication},
      {"mixer determinism", mixer},
      {"overlap analysis", overlap},
      {"round-trips", round_trips},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
