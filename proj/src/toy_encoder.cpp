#include "scriptgap/toy_encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "binary_io.hpp"
#include "scriptgap/error.hpp"
#include "scriptgap/hashing.hpp"
#include "scriptgap/retrieval.hpp"

namespace scriptgap::toy {

namespace {

constexpr std::string_view kCheckpointMagic = "SGTE";
constexpr std::uint8_t kCheckpointVersion = 1;

bool power_of_two(std::size_t v) { return v && !(v & (v - 1)); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct Embedded {
  std::vector<double> e;
  double norm = 0.0;
};

Embedded embed_with_norm(const EncoderParams& params, const UnitFeatures& x) {
  Embedded out{embed(params, x), 0.0};
  out.norm = std::sqrt(dot(out.e, out.e));
  return out;
}

// Candidate pool: all positives, then all explicit negatives.
const UnitFeatures& candidate(const Batch& batch, std::size_t j) {
  const std::size_t b = batch.size();
  return j < b ? batch[j].positive : batch[j - b].negative;
}

struct Forward {
  std::vector<Embedded> queries;
  std::vector<Embedded> pool;
  std::vector<std::vector<double>> cos;    // [query][candidate]
  std::vector<std::vector<double>> probs;  // softmax over candidates
  double loss = 0.0;
};

Forward forward(const EncoderParams& params, const Batch& batch, double temperature) {
  Forward f;
  const std::size_t b = batch.size();
  if (b == 0) return f;
  for (const auto& item : batch) f.queries.push_back(embed_with_norm(params, item.query));
  for (std::size_t j = 0; j < 2 * b; ++j) f.pool.push_back(embed_with_norm(params, candidate(batch, j)));

  f.cos.assign(b, std::vector<double>(2 * b, 0.0));
  f.probs.assign(b, std::vector<double>(2 * b, 0.0));
  double total = 0.0;
  for (std::size_t i = 0; i < b; ++i) {
    const auto& q = f.queries[i];
    double max_logit = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < 2 * b; ++j) {
      const auto& c = f.pool[j];
      f.cos[i][j] = (q.norm > 0.0 && c.norm > 0.0) ? dot(q.e, c.e) / (q.norm * c.norm) : 0.0;
      max_logit = std::max(max_logit, f.cos[i][j] / temperature);
    }
    double z = 0.0;
    for (std::size_t j = 0; j < 2 * b; ++j) {
      f.probs[i][j] = std::exp(f.cos[i][j] / temperature - max_logit);
      z += f.probs[i][j];
    }
    for (auto& p : f.probs[i]) p /= z;
    total += max_logit + std::log(z) - f.cos[i][i] / temperature;
  }
  f.loss = total / static_cast<double>(b);
  return f;
}

// d cos(u, v) / du, scaled by `g`, accumulated into `out`.
void add_cos_grad(const Embedded& u, const Embedded& v, double cos, double g, std::vector<double>& out) {
  if (u.norm == 0.0 || v.norm == 0.0 || g == 0.0) return;
  const double a = g / (u.norm * v.norm);
  const double c = g * cos / (u.norm * u.norm);
  for (std::size_t r = 0; r < out.size(); ++r) out[r] += a * v.e[r] - c * u.e[r];
}

void scatter(const UnitFeatures& x, const std::vector<double>& de, SparseGradient& grad) {
  for (std::size_t k = 0; k < x.index.size(); ++k) {
    auto& col = grad[x.index[k]];
    if (col.empty()) col.assign(de.size(), 0.0);
    for (std::size_t r = 0; r < de.size(); ++r) col[r] += de[r] * x.weight[k];
  }
}

}  // namespace

SparseFeatures featurize(std::string_view text, int ngram_n, std::size_t hash_dim) {
  if (!power_of_two(hash_dim)) throw ValidationError("hash_dim must be a power of two");
  if (ngram_n < 1) throw ValidationError("ngram_n must be positive");
  Tokenizer t{TokenizerMode::CharNgram, ngram_n, true};
  SparseFeatures out;
  for (const auto& window : tokenize(text, t))
    ++out[static_cast<std::uint32_t>(fnv1a64(window) & (hash_dim - 1))];
  return out;
}

UnitFeatures normalize(const SparseFeatures& features) {
  UnitFeatures u;
  double ss = 0.0;
  for (const auto& [idx, count] : features) ss += static_cast<double>(count) * count;
  if (ss == 0.0) return u;
  const double inv = 1.0 / std::sqrt(ss);
  for (const auto& [idx, count] : features) {
    if (count == 0) continue;
    u.index.push_back(idx);
    u.weight.push_back(count * inv);
  }
  return u;
}

EncoderParams EncoderParams::init(std::size_t hash_dim, std::size_t emb_dim, int ngram_n, std::uint64_t seed) {
  if (!power_of_two(hash_dim)) throw ValidationError("hash_dim must be a power of two");
  if (emb_dim == 0) throw ValidationError("emb_dim must be positive");
  if (ngram_n < 1) throw ValidationError("ngram_n must be positive");
  EncoderParams p;
  p.hash_dim_ = hash_dim;
  p.emb_dim_ = emb_dim;
  p.ngram_n_ = ngram_n;
  p.seed_ = seed;
  p.w_.resize(hash_dim * emb_dim);
  SplitMix64 rng(seed);
  for (auto& w : p.w_) w = rng.uniform(-0.05, 0.05);
  return p;
}

void EncoderParams::validate() const {
  if (!power_of_two(hash_dim_) || emb_dim_ == 0 || ngram_n_ < 1 || w_.size() != hash_dim_ * emb_dim_)
    throw ValidationError("encoder parameters have an inconsistent shape");
  for (double w : w_)
    if (!std::isfinite(w)) throw ValidationError("encoder parameters contain a non-finite entry");
}

std::string EncoderParams::serialize() const {
  detail::ByteWriter out;
  out.bytes(kCheckpointMagic);
  out.u8(kCheckpointVersion);
  out.u64(hash_dim_);
  out.u64(emb_dim_);
  out.u32(static_cast<std::uint32_t>(ngram_n_));
  out.u64(seed_);
  for (double w : w_) out.f64(w);
  return out.take();
}

EncoderParams EncoderParams::deserialize(std::string_view bytes) {
  detail::ByteReader in(bytes, "checkpoint");
  if (in.bytes(4) != kCheckpointMagic) throw ParseError(0, "checkpoint: bad magic (not an SGTE file)");
  if (auto v = in.u8(); v != kCheckpointVersion)
    throw ParseError(0, "checkpoint: unsupported format version " + std::to_string(v));
  EncoderParams p;
  p.hash_dim_ = in.u64();
  p.emb_dim_ = in.u64();
  p.ngram_n_ = static_cast<int>(in.u32());
  p.seed_ = in.u64();
  if (!power_of_two(p.hash_dim_) || p.emb_dim_ == 0 || p.emb_dim_ > in.remaining() / 8 ||
      p.hash_dim_ > in.remaining() / 8 / p.emb_dim_ || in.remaining() != p.hash_dim_ * p.emb_dim_ * 8)
    throw ParseError(0, "checkpoint: dimensions do not match payload size");
  p.w_.resize(p.hash_dim_ * p.emb_dim_);
  for (auto& w : p.w_) w = in.f64();
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ParseError(0, std::string("checkpoint: ") + e.what());
  }
  return p;
}

std::vector<double> embed(const EncoderParams& params, const UnitFeatures& x) {
  std::vector<double> e(params.emb_dim(), 0.0);
  for (std::size_t k = 0; k < x.index.size(); ++k) {
    if (x.index[k] >= params.hash_dim()) throw ValidationError("feature index out of range");
    for (std::size_t r = 0; r < e.size(); ++r) e[r] += params.at(r, x.index[k]) * x.weight[k];
  }
  return e;
}

std::vector<double> embed(const EncoderParams& params, const SparseFeatures& features) {
  return embed(params, normalize(features));
}

double score(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ValidationError("score: dimension mismatch");
  const double na = std::sqrt(dot(a, a)), nb = std::sqrt(dot(b, b));
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) throw ValidationError("epochs and batch size must be positive");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw ValidationError("learning rate must be finite and non-negative");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw ValidationError("temperature must be positive");
}

double batch_loss(const EncoderParams& params, const Batch& batch, double temperature) {
  return forward(params, batch, temperature).loss;
}

double batch_gradient(const EncoderParams& params, const Batch& batch, double temperature, SparseGradient& grad) {
  grad.clear();
  const std::size_t b = batch.size();
  if (b == 0) return 0.0;
  Forward f = forward(params, batch, temperature);

  const std::size_t dim = params.emb_dim();
  std::vector<std::vector<double>> dq(b, std::vector<double>(dim, 0.0));
  std::vector<std::vector<double>> dc(2 * b, std::vector<double>(dim, 0.0));
  const double scale = 1.0 / (static_cast<double>(b) * temperature);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < 2 * b; ++j) {
      const double g = (f.probs[i][j] - (i == j ? 1.0 : 0.0)) * scale;  // dL/dcos
      add_cos_grad(f.queries[i], f.pool[j], f.cos[i][j], g, dq[i]);
      add_cos_grad(f.pool[j], f.queries[i], f.cos[i][j], g, dc[j]);
    }
  }
  for (std::size_t i = 0; i < b; ++i) scatter(batch[i].query, dq[i], grad);
  for (std::size_t j = 0; j < 2 * b; ++j) scatter(candidate(batch, j), dc[j], grad);
  return f.loss;
}

double grad_check(const EncoderParams& params, const Batch& batch, const GradCheckOptions& options,
                  const GradientFn& gradient) {
  if (batch.empty()) return 0.0;
  SparseGradient analytic;
  gradient(params, batch, options.temperature, analytic);

  std::vector<std::uint32_t> columns;
  for (const auto& item : batch)
    for (const auto* x : {&item.query, &item.positive, &item.negative})
      columns.insert(columns.end(), x->index.begin(), x->index.end());
  std::sort(columns.begin(), columns.end());
  columns.erase(std::unique(columns.begin(), columns.end()), columns.end());
  if (columns.empty()) return 0.0;

  EncoderParams probe = params;
  SplitMix64 rng(options.seed);
  double worst = 0.0;
  for (std::size_t s = 0; s < options.samples; ++s) {
    const std::uint32_t col = columns[rng.below(columns.size())];
    const std::size_t row = rng.below(params.emb_dim());
    const double original = probe.at(row, col);
    probe.at(row, col) = original + options.step;
    const double up = batch_loss(probe, batch, options.temperature);
    probe.at(row, col) = original - options.step;
    const double down = batch_loss(probe, batch, options.temperature);
    probe.at(row, col) = original;

    const double fd = (up - down) / (2.0 * options.step);
    auto it = analytic.find(col);
    const double an = it == analytic.end() ? 0.0 : it->second[row];
    worst = std::max(worst, std::fabs(fd - an) / std::max(1e-8, std::fabs(fd) + std::fabs(an)));
  }
  return worst;
}

std::vector<BatchItem> prepare_items(const EncoderParams& params, const std::vector<TrainingTriple>& triples,
                                     const std::vector<Document>& collection) {
  std::unordered_map<std::string, std::size_t> by_docno;
  for (std::size_t d = 0; d < collection.size(); ++d) by_docno.emplace(collection[d].docno, d);
  std::unordered_map<std::size_t, UnitFeatures> doc_cache;
  auto doc_features = [&](const std::string& docno) -> const UnitFeatures& {
    auto it = by_docno.find(docno);
    if (it == by_docno.end()) throw ValidationError("training triple references unknown docno '" + docno + "'");
    auto cached = doc_cache.find(it->second);
    if (cached != doc_cache.end()) return cached->second;
    return doc_cache.emplace(it->second, normalize(params.featurize(collection[it->second].text))).first->second;
  };
  std::vector<BatchItem> items;
  items.reserve(triples.size());
  for (const auto& t : triples)
    items.push_back({normalize(params.featurize(t.query_text)), doc_features(t.pos_docno), doc_features(t.neg_docno)});
  return items;
}

std::string TrainLog::format() const {
  std::string out;
  char buf[64];
  for (std::size_t e = 0; e < epoch_loss.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu\t%.6f\n", e + 1, epoch_loss[e]);
    out += buf;
  }
  return out;
}

EncoderParams train(const std::vector<TrainingTriple>& triples, const std::vector<Document>& collection,
                    EncoderParams params, const TrainConfig& config, TrainLog* log) {
  config.validate();
  params.validate();
  if (triples.empty()) throw ValidationError("train: no training triples");
  const auto items = prepare_items(params, triples, collection);

  std::vector<std::size_t> order(items.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  SplitMix64 rng(config.seed);
  SparseGradient grad;
  Batch batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    seeded_shuffle(order.begin(), order.end(), rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(items[order[k]]);
      const double loss = batch_gradient(params, batch, config.temperature, grad);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch + 1 << ", batch starting at " << start << " (loss=" << loss
            << ", lr=" << config.learning_rate << ", temperature=" << config.temperature << ")";
        throw ValidationError(msg.str());
      }
      weighted += loss * static_cast<double>(end - start);
      if (config.learning_rate == 0.0) continue;
      for (const auto& [col, g] : grad)
        for (std::size_t r = 0; r < g.size(); ++r) params.at(r, col) -= config.learning_rate * g[r];
    }
    if (log) log->epoch_loss.push_back(weighted / static_cast<double>(items.size()));
  }
  return params;
}

Run encode_and_rank(const EncoderParams& params, const std::vector<Query>& queries,
                    const std::vector<Document>& collection, std::size_t k, unsigned threads) {
  if (k == 0) throw ValidationError("encode_and_rank: k must be at least 1");
  params.validate();
  threads = std::max(1u, threads);

  auto unit_embedding = [&](std::string_view text) {
    auto e = embed(params, normalize(params.featurize(text)));
    const double n = std::sqrt(dot(e, e));
    if (n > 0.0)
      for (auto& v : e) v /= n;
    return e;
  };
  auto parallel_for = [&](std::size_t n, auto&& body) {
    const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (t == 1) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    std::vector<std::jthread> pool;
    for (unsigned s = 0; s < t; ++s)
      pool.emplace_back([&, s] {
        for (std::size_t i = s; i < n; i += t) body(i);
      });
  };

  std::vector<std::vector<double>> docs(collection.size());
  parallel_for(collection.size(), [&](std::size_t d) { docs[d] = unit_embedding(collection[d].text); });

  std::vector<std::vector<std::pair<std::string, double>>> ranked(queries.size());
  parallel_for(queries.size(), [&](std::size_t qi) {
    const auto q = unit_embedding(queries[qi].text);
    std::vector<std::pair<std::string, double>> hits;
    hits.reserve(collection.size());
    for (std::size_t d = 0; d < collection.size(); ++d) hits.emplace_back(collection[d].docno, dot(q, docs[d]));
    auto better = [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    };
    const std::size_t keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), better);
    hits.resize(keep);
    ranked[qi] = std::move(hits);
  });

  Run run;
  for (std::size_t qi = 0; qi < queries.size(); ++qi)
    if (!ranked[qi].empty()) set_ranking(run, queries[qi].qid, ranked[qi]);
  return run;
}

}  // namespace scriptgap::toy
