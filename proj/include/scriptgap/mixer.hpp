#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptgap/corpus_io.hpp"
#include "scriptgap/romanizer.hpp"

namespace scriptgap {

/// Training-query configurations: native only, an even native/romanized
/// mixture, or romanized only.
enum class MixMode { Native, Mixed50, Transliterated };

struct MixConfig {
  MixMode mode = MixMode::Native;
  std::uint64_t seed = 0;
  /// Mixed50 only: romanize exactly ceil(n/2) queries chosen by a seeded
  /// shuffle instead of the per-qid coin.
  bool exact_half = false;
  /// Fail when more than this many unmapped characters are seen in total.
  /// Unset means report only.
  std::optional<std::size_t> max_unmapped;
};

/// "N", "50" or "T" (also "native", "mixed", "translit").
MixMode parse_mix_mode(std::string_view s);
std::string_view mix_mode_name(MixMode m);

/// splitmix64(seed ^ fnv1a64(qid)) & 1.
bool coin_romanizes(std::string_view qid, std::uint64_t seed);

/// Generalised coin used to check that probability 0 and 1 reproduce the
/// N and T configurations.
bool coin_romanizes(std::string_view qid, std::uint64_t seed, double probability);

struct MixStats {
  std::size_t total = 0;
  std::size_t romanized = 0;
  std::size_t unmapped_chars = 0;
  std::vector<std::string> warnings;
};

/// Texts are replaced by their romanization for the selected queries; every
/// output query's script_tag records the form it now holds (Latin when
/// romanized, the dominant native script otherwise). Order is preserved.
std::vector<Query> build_mixed_queries(const std::vector<Query>& queries, const MixConfig& config,
                                       const Romanizer& tables, MixStats* stats = nullptr);

/// Same per-qid rule applied to triple queries; documents are never touched.
std::vector<TrainingTriple> build_training_triples(const std::vector<TrainingTriple>& triples,
                                                   const MixConfig& config, const Romanizer& tables,
                                                   MixStats* stats = nullptr);

/// Sidecar JSON describing how a mixed training set was produced.
std::string mix_metadata_json(const MixConfig& config, const Romanizer& tables, const MixStats& stats);

}  // namespace scriptgap
