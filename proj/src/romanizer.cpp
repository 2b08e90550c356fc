#include "scriptgap/romanizer.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "scriptgap/error.hpp"
#include "scriptgap/hashing.hpp"
#include "scriptgap/unicode.hpp"

namespace scriptgap {

namespace {

constexpr std::u32string_view kVowels =
    U"aeiouy"
    U"аеёиоуыэюяєії"
    U"αάεέηήιίϊΐοόυύϋΰωώ";

bool is_letter(char32_t cp) {
  auto cls = classify(cp);
  return cls != ScriptClass::Common && cls != ScriptClass::Other;
}

bool context_holds(Context ctx, const unicode::CodePoint* neighbour) {
  bool letter = neighbour && is_letter(neighbour->value);
  switch (ctx) {
    case Context::Boundary:
      return !letter;
    case Context::Vowel:
      return letter && kVowels.find(unicode::to_lower(neighbour->value)) !=
                           std::u32string_view::npos;
    case Context::Consonant:
      return letter && kVowels.find(unicode::to_lower(neighbour->value)) ==
                           std::u32string_view::npos;
  }
  return false;
}

std::optional<Context> parse_context(std::string_view s, std::size_t line) {
  if (s.empty() || s == "-") return std::nullopt;
  if (s == "vowel") return Context::Vowel;
  if (s == "consonant") return Context::Consonant;
  if (s == "boundary") return Context::Boundary;
  throw ParseError(line, "unknown context '" + std::string(s) + "'");
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Case of the emitted target follows the case of the matched source. An
// all-uppercase match upper-cases the whole target only when the
// surrounding word is uppercase too ("ШУРА" -> "SHURA", "Шура" -> "Shura").
void restore_case(std::string& target, const std::vector<unicode::CodePoint>& cps,
                  std::size_t begin, std::size_t end) {
  if (target.empty()) return;
  if (!unicode::is_upper(cps[begin].value)) return;

  std::size_t cased = 0;
  bool all_upper = true;
  for (std::size_t k = begin; k < end; ++k) {
    if (unicode::is_lower(cps[k].value)) all_upper = false;
    if (unicode::is_cased(cps[k].value)) ++cased;
  }
  bool whole = all_upper && target.size() > 1;
  if (whole && cased == 1) {
    if (end < cps.size() && unicode::is_cased(cps[end].value))
      whole = unicode::is_upper(cps[end].value);
    else if (begin > 0 && unicode::is_cased(cps[begin - 1].value))
      whole = unicode::is_upper(cps[begin - 1].value);
    else
      whole = false;
  }
  if (whole) {
    for (char& c : target) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return;
  }
  for (char& c : target) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      break;
    }
  }
}

// Rewrites cps[begin, end) of `original`. Context predicates look at the
// full code point sequence, not just the segment.
void rewrite_span(const std::vector<unicode::CodePoint>& cps, std::size_t begin,
                  std::size_t end, std::string_view original, const RuleTable& table,
                  std::string_view separator, Rewrite& out) {
  bool prev_was_rule = false;
  std::size_t i = begin;
  while (i < end) {
    char32_t first = unicode::to_lower(cps[i].value);
    const Rule* hit = nullptr;
    for (std::size_t idx : table.candidates(first)) {
      const Rule& r = table.rules()[idx];
      std::size_t len = r.source.size();
      if (i + len > end) continue;
      bool same = true;
      for (std::size_t k = 1; k < len && same; ++k)
        same = unicode::to_lower(cps[i + k].value) == r.source[k];
      if (!same) continue;
      if (r.left && !context_holds(*r.left, i > 0 ? &cps[i - 1] : nullptr)) continue;
      if (r.right && !context_holds(*r.right, i + len < cps.size() ? &cps[i + len] : nullptr))
        continue;
      hit = &r;
      break;
    }
    if (hit) {
      std::string piece = hit->target;
      restore_case(piece, cps, i, i + hit->source.size());
      if (prev_was_rule && !separator.empty() && !piece.empty()) out.output += separator;
      out.output += piece;
      prev_was_rule = !piece.empty() || prev_was_rule;
      i += hit->source.size();
      continue;
    }
    // Latin and Common text is already romanized.
    if (auto cls = classify(cps[i].value); cls != ScriptClass::Common && cls != ScriptClass::Latin) ++out.unmapped;
    out.output.append(original.substr(cps[i].offset, cps[i].length));
    prev_was_rule = false;
    ++i;
  }
}

}  // namespace

std::string_view context_name(Context c) {
  switch (c) {
    case Context::Vowel: return "vowel";
    case Context::Consonant: return "consonant";
    case Context::Boundary: return "boundary";
  }
  return "-";
}

RuleTable::RuleTable(ScriptClass script, std::string version, std::vector<Rule> rules)
    : script_(script), version_(std::move(version)), rules_(std::move(rules)) {
  std::set<std::size_t> lines;
  std::set<std::tuple<std::u32string, int, int>> keys;
  for (const auto& r : rules_) {
    if (r.source.empty()) throw ValidationError("rule with empty source");
    for (char c : r.target)
      if (c < 0x20 || c > 0x7E) throw ValidationError("rule target is not printable ASCII");
    if (!lines.insert(r.line_no).second)
      throw ValidationError("duplicate rule line number " + std::to_string(r.line_no));
    auto key = std::make_tuple(r.source, r.left ? static_cast<int>(*r.left) : -1,
                               r.right ? static_cast<int>(*r.right) : -1);
    if (!keys.insert(key).second)
      throw ValidationError("duplicate rule at line " + std::to_string(r.line_no));
  }
  std::stable_sort(rules_.begin(), rules_.end(), [](const Rule& a, const Rule& b) {
    if (a.source.size() != b.source.size()) return a.source.size() > b.source.size();
    return a.line_no < b.line_no;
  });
  for (std::size_t i = 0; i < rules_.size(); ++i) by_first_[rules_[i].source.front()].push_back(i);
}

const std::vector<std::size_t>& RuleTable::candidates(char32_t first) const {
  static const std::vector<std::size_t> kNone;
  auto it = by_first_.find(first);
  return it == by_first_.end() ? kNone : it->second;
}

RuleTable load_rule_table(std::string_view content) {
  std::optional<ScriptClass> script;
  std::string version;
  std::vector<Rule> rules;
  std::map<std::tuple<std::u32string, int, int>, std::size_t> seen;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    std::string_view line = content.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? content.size() : nl + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && line.back() == ' ') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    if (line.front() == '!') {
      auto space = line.find_first_of(" \t");
      std::string_view directive = line.substr(1, space == std::string_view::npos ? space : space - 1);
      std::string_view value;
      if (space != std::string_view::npos) {
        value = line.substr(space);
        value.remove_prefix(std::min(value.find_first_not_of(" \t"), value.size()));
      }
      if (directive == "script") {
        if (script) throw ParseError(line_no, "repeated !script header");
        script = parse_script_name(value);
        if (!script) throw ParseError(line_no, "unknown script '" + std::string(value) + "'");
        if (*script == ScriptClass::Latin || *script == ScriptClass::Common)
          throw ParseError(line_no, "script '" + std::string(value) + "' passes through and takes no table");
      } else if (directive == "version") {
        if (value.empty()) throw ParseError(line_no, "empty !version");
        version = std::string(value);
      } else {
        throw ParseError(line_no, "unknown directive '!" + std::string(directive) + "'");
      }
      continue;
    }

    if (!script) throw ParseError(line_no, "rule before !script header");
    auto fields = split_tabs(line);
    if (fields.size() < 2 || fields.size() > 4)
      throw ParseError(line_no, "expected source<TAB>target[<TAB>left][<TAB>right]");
    if (fields[0].empty()) throw ParseError(line_no, "empty source");

    Rule rule;
    rule.line_no = line_no;
    for (const auto& cp : unicode::decode(fields[0])) {
      if (cp.value == unicode::kReplacement && fields[0].substr(cp.offset, cp.length) != "\xEF\xBF\xBD")
        throw ParseError(line_no, "source is not valid UTF-8");
      if (classify(cp.value) != *script)
        throw ParseError(line_no, "source character outside the table's script");
      rule.source.push_back(unicode::to_lower(cp.value));
    }
    for (char c : fields[1])
      if (c < 0x20 || c > 0x7E) throw ParseError(line_no, "target must be printable ASCII");
    rule.target = std::string(fields[1]);
    if (fields.size() > 2) rule.left = parse_context(fields[2], line_no);
    if (fields.size() > 3) rule.right = parse_context(fields[3], line_no);

    auto key = std::make_tuple(rule.source, rule.left ? static_cast<int>(*rule.left) : -1,
                               rule.right ? static_cast<int>(*rule.right) : -1);
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh)
      throw ParseError(line_no, "duplicate rule (first defined on line " +
                                    std::to_string(it->second) + ")");
    rules.push_back(std::move(rule));
  }

  if (!script) throw ParseError(0, "missing !script header");
  if (version.empty()) version = "fnv-" + hex64(fnv1a64(content));
  return RuleTable(*script, std::move(version), std::move(rules));
}

RuleTable load_rule_table_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open rule table '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return load_rule_table(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

Rewrite apply_rules(std::string_view segment, const RuleTable& table) {
  auto cps = unicode::decode(segment);
  Rewrite out;
  rewrite_span(cps, 0, cps.size(), segment, table, {}, out);
  return out;
}

Romanizer::Romanizer(std::vector<RuleTable> tables) {
  for (auto& t : tables) add(std::move(t));
}

void Romanizer::add(RuleTable table) {
  auto script = table.script();
  if (!tables_.emplace(script, std::move(table)).second)
    throw ValidationError("more than one rule table for script '" +
                          std::string(script_name(script)) + "'");
}

const RuleTable* Romanizer::table_for(ScriptClass s) const {
  auto it = tables_.find(s);
  return it == tables_.end() ? nullptr : &it->second;
}

RomanizationResult Romanizer::romanize(std::string_view text, const RomanizeOptions& options) const {
  RomanizationResult result;
  result.segments = detect_script_runs(text);
  if (result.segments.empty()) return result;

  auto cps = unicode::decode(text);
  std::size_t cp_index = 0;
  Rewrite acc;
  for (const auto& run : result.segments) {
    std::size_t first = cp_index;
    while (cp_index < cps.size() && cps[cp_index].offset < run.end) ++cp_index;

    const RuleTable* table = nullptr;
    if (run.script != ScriptClass::Latin && run.script != ScriptClass::Common)
      table = table_for(run.script);
    if (table) {
      std::string_view sep = run.script == ScriptClass::Han ? std::string_view(options.han_separator)
                                                            : std::string_view();
      rewrite_span(cps, first, cp_index, text, *table, sep, acc);
      continue;
    }
    acc.output.append(text.substr(run.begin, run.end - run.begin));
    if (run.script != ScriptClass::Latin && run.script != ScriptClass::Common) {
      for (std::size_t k = first; k < cp_index; ++k)
        if (classify(cps[k].value) != ScriptClass::Common) ++acc.unmapped;
    }
  }
  result.output = std::move(acc.output);
  result.unmapped_count = acc.unmapped;
  return result;
}

RomanizationResult romanize_text(std::string_view text, const Romanizer& tables,
                                 const RomanizeOptions& options) {
  return tables.romanize(text, options);
}

Romanizer load_table_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".tsv") files.push_back(entry.path());
  if (ec) throw ParseError(0, "cannot read table directory '" + dir + "': " + ec.message());
  std::sort(files.begin(), files.end());
  Romanizer r;
  for (const auto& f : files) r.add(load_rule_table_file(f.string()));
  return r;
}

}  // namespace scriptgap
