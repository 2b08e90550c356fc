#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scriptgap/corpus_io.hpp"

namespace scriptgap::toy {

/// Bucket index -> raw n-gram count.
using SparseFeatures = std::map<std::uint32_t, std::uint32_t>;

/// Hashed character n-gram featurization: lowercase, pad each
/// whitespace-free run with '^'/'$', slide windows of `ngram_n` code points
/// and bucket each window by fnv1a64(bytes) mod hash_dim.
SparseFeatures featurize(std::string_view text, int ngram_n, std::size_t hash_dim);

/// L2-normalized sparse vector, sorted by index.
struct UnitFeatures {
  std::vector<std::uint32_t> index;
  std::vector<double> weight;

  bool empty() const noexcept { return index.empty(); }
};

UnitFeatures normalize(const SparseFeatures& features);

/// Embedding matrix of the dual encoder. Shared by queries and documents.
class EncoderParams {
 public:
  EncoderParams() = default;

  /// Entries drawn uniform(-0.05, 0.05) from a splitmix64 stream seeded
  /// with `seed`, in row-major order. `hash_dim` must be a power of two.
  static EncoderParams init(std::size_t hash_dim = std::size_t{1} << 15, std::size_t emb_dim = 64,
                            int ngram_n = 3, std::uint64_t seed = 0);

  std::size_t hash_dim() const noexcept { return hash_dim_; }
  std::size_t emb_dim() const noexcept { return emb_dim_; }
  int ngram_n() const noexcept { return ngram_n_; }
  std::uint64_t seed() const noexcept { return seed_; }

  double& at(std::size_t row, std::size_t col) noexcept { return w_[row * hash_dim_ + col]; }
  double at(std::size_t row, std::size_t col) const noexcept { return w_[row * hash_dim_ + col]; }
  /// Row-major emb_dim x hash_dim.
  std::span<const double> weights() const noexcept { return w_; }
  std::span<double> weights() noexcept { return w_; }

  SparseFeatures featurize(std::string_view text) const {
    return toy::featurize(text, ngram_n_, hash_dim_);
  }

  /// Throws ValidationError on inconsistent shape or a non-finite entry.
  void validate() const;

  /// "SGTE", version byte, dims, seed, then W row-major as little-endian
  /// 64-bit floats.
  std::string serialize() const;
  static EncoderParams deserialize(std::string_view bytes);

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;

 private:
  std::size_t hash_dim_ = 0;
  std::size_t emb_dim_ = 0;
  int ngram_n_ = 3;
  std::uint64_t seed_ = 0;
  std::vector<double> w_;
};

/// W times the L2-normalized features. Empty features give the zero vector.
std::vector<double> embed(const EncoderParams& params, const SparseFeatures& features);
std::vector<double> embed(const EncoderParams& params, const UnitFeatures& features);

/// Cosine similarity; 0 when either vector is zero.
double score(std::span<const double> a, std::span<const double> b);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double learning_rate = 0.05;
  double temperature = 0.05;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One training example with features already normalized.
struct BatchItem {
  UnitFeatures query;
  UnitFeatures positive;
  UnitFeatures negative;
};

using Batch = std::vector<BatchItem>;

/// Column -> dL/dW[:, column], for the columns the batch touches.
using SparseGradient = std::map<std::uint32_t, std::vector<double>>;

/// In-batch softmax contrastive loss. Each query is scored against every
/// positive and every explicit negative in the batch; the target is its
/// own positive. Returns 0 for an empty batch.
double batch_loss(const EncoderParams& params, const Batch& batch, double temperature);

/// Loss and its exact gradient with respect to W.
double batch_gradient(const EncoderParams& params, const Batch& batch, double temperature,
                      SparseGradient& grad);

using GradientFn = std::function<double(const EncoderParams&, const Batch&, double, SparseGradient&)>;

struct GradCheckOptions {
  double step = 1e-4;
  double temperature = 0.05;
  std::size_t samples = 128;
  std::uint64_t seed = 0;
};

/// Compares the analytic gradient against central finite differences on
/// `samples` entries of W drawn from the columns the batch touches.
/// Returns max |fd - an| / max(1e-8, |fd| + |an|); 0 for an empty batch.
double grad_check(const EncoderParams& params, const Batch& batch, const GradCheckOptions& options = {},
                  const GradientFn& gradient = batch_gradient);

/// Resolves triples into normalized batch items.
std::vector<BatchItem> prepare_items(const EncoderParams& params, const std::vector<TrainingTriple>& triples,
                                     const std::vector<Document>& collection);

struct TrainLog {
  std::vector<double> epoch_loss;

  /// `epoch<TAB>mean_loss` lines, epochs counted from 1.
  std::string format() const;
};

/// Plain gradient descent over seeded-shuffled batches. Single-threaded
/// and bit-reproducible for fixed inputs. Throws ValidationError if the
/// loss becomes non-finite.
EncoderParams train(const std::vector<TrainingTriple>& triples, const std::vector<Document>& collection,
                    EncoderParams params, const TrainConfig& config, TrainLog* log = nullptr);

/// Cosine ranking of every document for every query, top k per query, ties
/// by docno. Document embedding and query scoring may use several threads.
Run encode_and_rank(const EncoderParams& params, const std::vector<Query>& queries,
                    const std::vector<Document>& collection, std::size_t k, unsigned threads = 1);

}  // namespace scriptgap::toy
