#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scriptgap {

/// Coarse script identity of a code point. Every code point belongs to
/// exactly one class; `Other` is the catch-all.
enum class ScriptClass { Latin, Cyrillic, Greek, Han, Common, Other };

/// Cyrillic U+0400-04FF, Greek U+0370-03FF, Han U+4E00-9FFF and
/// U+3400-4DBF, Common = digits, whitespace and punctuation, Latin = ASCII
/// letters plus the Latin-1, Extended-A/B and Extended Additional letters.
ScriptClass classify(char32_t cp);

std::string_view script_name(ScriptClass s);
/// Case-insensitive inverse of script_name(). Also accepts a few aliases
/// ("russian", "chinese", "hanzi", ...).
std::optional<ScriptClass> parse_script_name(std::string_view name);

/// Byte span [begin, end) into the analysed string.
struct ScriptRun {
  std::size_t begin = 0;
  std::size_t end = 0;
  ScriptClass script = ScriptClass::Common;

  friend bool operator==(const ScriptRun&, const ScriptRun&) = default;
};

/// Maximal runs of identically classified code points. Common code points
/// extend the preceding run; a leading Common stretch forms its own run.
std::vector<ScriptRun> detect_script_runs(std::string_view text);

}  // namespace scriptgap
