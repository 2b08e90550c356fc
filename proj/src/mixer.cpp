#include "scriptgap/mixer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "scriptgap/error.hpp"
#include "scriptgap/hashing.hpp"
#include "scriptgap/unicode.hpp"

namespace scriptgap {

namespace {

// Most frequent non-Common script in the text; Latin for text without any.
ScriptClass dominant_script(std::string_view text) {
  std::map<ScriptClass, std::size_t> counts;
  for (const auto& c : unicode::decode(text)) {
    auto s = classify(c.value);
    if (s != ScriptClass::Common) ++counts[s];
  }
  ScriptClass best = ScriptClass::Latin;
  std::size_t best_n = 0;
  for (const auto& [s, n] : counts)
    if (n > best_n) best = s, best_n = n;
  return best;
}

// Decides, once per distinct qid, whether that query is romanized.
class Selector {
 public:
  Selector(const MixConfig& config, const std::vector<std::string_view>& qids_in_order) : config_(config) {
    if (config.mode != MixMode::Mixed50 || !config.exact_half) return;
    std::vector<std::string_view> unique;
    std::unordered_set<std::string_view> seen;
    for (auto q : qids_in_order)
      if (seen.insert(q).second) unique.push_back(q);
    SplitMix64 rng(config.seed);
    seeded_shuffle(unique.begin(), unique.end(), rng);
    for (std::size_t i = 0; i < (unique.size() + 1) / 2; ++i) chosen_.emplace(unique[i]);
  }

  bool romanize(std::string_view qid) const {
    switch (config_.mode) {
      case MixMode::Native: return false;
      case MixMode::Transliterated: return true;
      case MixMode::Mixed50:
        return config_.exact_half ? chosen_.count(std::string(qid)) > 0 : coin_romanizes(qid, config_.seed);
    }
    return false;
  }

 private:
  const MixConfig& config_;
  std::unordered_set<std::string> chosen_;
};

class Transformer {
 public:
  Transformer(const MixConfig& config, const Romanizer& tables, MixStats& stats)
      : config_(config), tables_(tables), stats_(stats) {}

  // Returns the (possibly romanized) text and its script tag.
  std::pair<std::string, ScriptClass> apply(std::string_view qid, const std::string& text, bool romanize) {
    ++stats_.total;
    if (!romanize) return {text, dominant_script(text)};
    ++stats_.romanized;
    auto r = tables_.romanize(text);
    if (r.unmapped_count > 0) {
      stats_.unmapped_chars += r.unmapped_count;
      stats_.warnings.push_back("qid " + std::string(qid) + ": " + std::to_string(r.unmapped_count) +
                                " unmapped character(s)");
      if (config_.max_unmapped && stats_.unmapped_chars > *config_.max_unmapped)
        throw ValidationError("unmapped characters exceed tolerance (" + std::to_string(stats_.unmapped_chars) +
                              " > " + std::to_string(*config_.max_unmapped) + ")");
    }
    return {std::move(r.output), ScriptClass::Latin};
  }

 private:
  const MixConfig& config_;
  const Romanizer& tables_;
  MixStats& stats_;
};

}  // namespace

MixMode parse_mix_mode(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "n" || lower == "native") return MixMode::Native;
  if (lower == "50" || lower == "mixed" || lower == "mixed50") return MixMode::Mixed50;
  if (lower == "t" || lower == "translit" || lower == "transliterated") return MixMode::Transliterated;
  throw ValidationError("unknown configuration '" + std::string(s) + "' (expected N, 50 or T)");
}

std::string_view mix_mode_name(MixMode m) {
  switch (m) {
    case MixMode::Native: return "N";
    case MixMode::Mixed50: return "50";
    case MixMode::Transliterated: return "T";
  }
  return "N";
}

bool coin_romanizes(std::string_view qid, std::uint64_t seed) {
  return (splitmix64(seed ^ fnv1a64(qid)) & 1u) == 1u;
}

bool coin_romanizes(std::string_view qid, std::uint64_t seed, double probability) {
  double u = static_cast<double>(splitmix64(seed ^ fnv1a64(qid)) >> 11) * 0x1.0p-53;
  return u < probability;
}

std::vector<Query> build_mixed_queries(const std::vector<Query>& queries, const MixConfig& config,
                                       const Romanizer& tables, MixStats* stats) {
  MixStats local;
  MixStats& s = stats ? *stats : local;
  std::vector<std::string_view> qids;
  for (const auto& q : queries) qids.push_back(q.qid);
  Selector select(config, qids);
  Transformer transform(config, tables, s);

  std::vector<Query> out;
  out.reserve(queries.size());
  for (const auto& q : queries) {
    auto [text, tag] = transform.apply(q.qid, q.text, select.romanize(q.qid));
    out.push_back({q.qid, std::move(text), tag});
  }
  return out;
}

std::vector<TrainingTriple> build_training_triples(const std::vector<TrainingTriple>& triples,
                                                   const MixConfig& config, const Romanizer& tables,
                                                   MixStats* stats) {
  MixStats local;
  MixStats& s = stats ? *stats : local;
  std::vector<std::string_view> qids;
  for (const auto& t : triples) qids.push_back(t.qid);
  Selector select(config, qids);
  Transformer transform(config, tables, s);

  std::vector<TrainingTriple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    auto [text, tag] = transform.apply(t.qid, t.query_text, select.romanize(t.qid));
    out.push_back({t.qid, std::move(text), t.pos_docno, t.neg_docno});
  }
  return out;
}

std::string mix_metadata_json(const MixConfig& config, const Romanizer& tables, const MixStats& stats) {
  nlohmann::ordered_json j;
  j["config"] = std::string(mix_mode_name(config.mode));
  j["seed"] = config.seed;
  j["exact_half"] = config.exact_half;
  j["tables"] = nlohmann::ordered_json::array();
  for (const auto& [script, table] : tables.tables())
    j["tables"].push_back({{"script", std::string(script_name(script))},
                           {"version", table.version()},
                           {"rules", table.rules().size()}});
  j["total"] = stats.total;
  j["romanized"] = stats.romanized;
  j["unmapped_chars"] = stats.unmapped_chars;
  return j.dump(2) + "\n";
}

}  // namespace scriptgap
