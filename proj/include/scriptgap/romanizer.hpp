#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scriptgap/script.hpp"

namespace scriptgap {

/// Single-character context a rule may require next to its match.
enum class Context { Vowel, Consonant, Boundary };

std::string_view context_name(Context c);

struct Rule {
  std::u32string source;  // lowercase
  std::string target;     // printable ASCII, possibly empty
  std::optional<Context> left;
  std::optional<Context> right;
  std::size_t line_no = 0;
};

/// Ordered rewrite rules for one script. Rules are kept sorted by
/// descending source length, then ascending line number, which is also the
/// match priority.
class RuleTable {
 public:
  RuleTable(ScriptClass script, std::string version, std::vector<Rule> rules);

  ScriptClass script() const noexcept { return script_; }
  const std::string& version() const noexcept { return version_; }
  const std::vector<Rule>& rules() const noexcept { return rules_; }

  /// Indices into rules() of the rules whose source starts with `first`,
  /// in priority order.
  const std::vector<std::size_t>& candidates(char32_t first) const;

 private:
  ScriptClass script_;
  std::string version_;
  std::vector<Rule> rules_;
  std::unordered_map<char32_t, std::vector<std::size_t>> by_first_;
};

/// Parses a rule file:
///
///     !script <name>
///     !version <string>          (optional; defaults to a content hash)
///     source<TAB>target[<TAB>left_ctx][<TAB>right_ctx]
///
/// `#` starts a comment, blank lines are ignored, contexts are `vowel`,
/// `consonant`, `boundary` or `-`. Throws ParseError naming the offending
/// line.
RuleTable load_rule_table(std::string_view content);
RuleTable load_rule_table_file(const std::string& path);

struct Rewrite {
  std::string output;
  std::size_t unmapped = 0;
};

/// Greedy left-to-right longest-match rewriting of one segment.
Rewrite apply_rules(std::string_view segment, const RuleTable& table);

struct RomanizeOptions {
  /// Inserted between consecutive Han syllables. Empty by default, giving
  /// run-together pinyin.
  std::string han_separator;
};

struct RomanizationResult {
  std::string output;
  std::size_t unmapped_count = 0;
  std::vector<ScriptRun> segments;
};

/// A set of rule tables, at most one per script.
class Romanizer {
 public:
  Romanizer() = default;
  explicit Romanizer(std::vector<RuleTable> tables);

  /// Throws ValidationError if a table for the same script is present.
  void add(RuleTable table);
  const RuleTable* table_for(ScriptClass s) const;
  const std::map<ScriptClass, RuleTable>& tables() const noexcept { return tables_; }

  RomanizationResult romanize(std::string_view text,
                              const RomanizeOptions& options = {}) const;

 private:
  std::map<ScriptClass, RuleTable> tables_;
};

RomanizationResult romanize_text(std::string_view text, const Romanizer& tables,
                                 const RomanizeOptions& options = {});

/// Loads every `*.tsv` table in a directory, in filename order.
Romanizer load_table_directory(const std::string& dir);

}  // namespace scriptgap
