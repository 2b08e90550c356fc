#include "scriptgap/script.hpp"

#include <algorithm>
#include <cctype>

#include "scriptgap/unicode.hpp"

namespace scriptgap {

ScriptClass classify(char32_t cp) {
  using namespace unicode;
  if (cp < 0x80) {
    if ((cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z'))
      return ScriptClass::Latin;
    return ScriptClass::Common;  // digits, punctuation, whitespace, controls
  }
  if (is_whitespace(cp) || is_digit(cp) || is_punctuation(cp))
    return ScriptClass::Common;
  if ((cp >= 0xC0 && cp <= 0x24F) || (cp >= 0x1E00 && cp <= 0x1EFF))
    return ScriptClass::Latin;
  if (cp >= 0x370 && cp <= 0x3FF) return ScriptClass::Greek;
  if (cp >= 0x400 && cp <= 0x4FF) return ScriptClass::Cyrillic;
  if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF))
    return ScriptClass::Han;
  return ScriptClass::Other;
}

std::string_view script_name(ScriptClass s) {
  switch (s) {
    case ScriptClass::Latin: return "latin";
    case ScriptClass::Cyrillic: return "cyrillic";
    case ScriptClass::Greek: return "greek";
    case ScriptClass::Han: return "han";
    case ScriptClass::Common: return "common";
    case ScriptClass::Other: return "other";
  }
  return "other";
}

std::optional<ScriptClass> parse_script_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "latin") return ScriptClass::Latin;
  if (lower == "cyrillic" || lower == "russian") return ScriptClass::Cyrillic;
  if (lower == "greek") return ScriptClass::Greek;
  if (lower == "han" || lower == "hanzi" || lower == "chinese") return ScriptClass::Han;
  if (lower == "common") return ScriptClass::Common;
  if (lower == "other") return ScriptClass::Other;
  return std::nullopt;
}

std::vector<ScriptRun> detect_script_runs(std::string_view text) {
  std::vector<ScriptRun> runs;
  for (const auto& c : unicode::decode(text)) {
    ScriptClass cls = classify(c.value);
    std::size_t end = c.offset + c.length;
    if (!runs.empty() && (cls == ScriptClass::Common || runs.back().script == cls)) {
      runs.back().end = end;
    } else {
      runs.push_back({c.offset, end, cls});
    }
  }
  return runs;
}

}  // namespace scriptgap
