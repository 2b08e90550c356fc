#include "scriptgap/unicode.hpp"

namespace scriptgap::unicode {

std::vector<CodePoint> decode(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  auto cont = [&](std::size_t k) { return k < n && (byte(k) & 0xC0) == 0x80; };
  while (i < n) {
    unsigned char b0 = byte(i);
    char32_t cp = kReplacement;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if (b0 >= 0xC2 && b0 <= 0xDF && cont(i + 1)) {
      cp = ((b0 & 0x1Fu) << 6) | (byte(i + 1) & 0x3Fu);
      len = 2;
    } else if (b0 >= 0xE0 && b0 <= 0xEF && cont(i + 1) && cont(i + 2)) {
      char32_t v = ((b0 & 0x0Fu) << 12) | ((byte(i + 1) & 0x3Fu) << 6) |
                   (byte(i + 2) & 0x3Fu);
      if (v >= 0x800 && (v < 0xD800 || v > 0xDFFF)) {
        cp = v;
        len = 3;
      }
    } else if (b0 >= 0xF0 && b0 <= 0xF4 && cont(i + 1) && cont(i + 2) &&
               cont(i + 3)) {
      char32_t v = ((b0 & 0x07u) << 18) | ((byte(i + 1) & 0x3Fu) << 12) |
                   ((byte(i + 2) & 0x3Fu) << 6) | (byte(i + 3) & 0x3Fu);
      if (v >= 0x10000 && v <= 0x10FFFF) {
        cp = v;
        len = 4;
      }
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

std::u32string to_u32(std::string_view utf8) {
  std::u32string out;
  for (const auto& c : decode(utf8)) out.push_back(c.value);
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) append_utf8(out, c);
  return out;
}

bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_digit(char32_t cp) {
  return (cp >= U'0' && cp <= U'9') || (cp >= 0xFF10 && cp <= 0xFF19);
}

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return cp > 0x20 && cp < 0x7F && !is_digit(cp) &&
           !((cp | 0x20) >= U'a' && (cp | 0x20) <= U'z');
  }
  if (is_whitespace(cp)) return false;
  return (cp >= 0xA1 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7 ||
         (cp >= 0x2000 && cp <= 0x206F) || (cp >= 0x3000 && cp <= 0x303F) ||
         (cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
         (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65);
}

namespace {

// Latin Extended-A pairs upper/lower as even/odd except for the runs below,
// which pair odd/even.
bool latin_ext_a_odd_upper(char32_t cp) {
  return (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
}

bool latin_ext_a_paired(char32_t cp) {
  return cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x131 &&
         cp != 0x138 && cp != 0x149 && cp != 0x178 && cp != 0x17F;
}

bool cyrillic_paired(char32_t cp) {
  return (cp >= 0x460 && cp <= 0x481) || (cp >= 0x48A && cp <= 0x4BF) ||
         (cp >= 0x4D0 && cp <= 0x4FF);
}

}  // namespace

bool is_upper(char32_t cp) {
  if (cp >= U'A' && cp <= U'Z') return true;
  if (cp >= 0xC0 && cp <= 0xDE) return cp != 0xD7;
  if (latin_ext_a_paired(cp)) return latin_ext_a_odd_upper(cp) ? (cp & 1) : !(cp & 1);
  if (cp == 0x130 || cp == 0x178) return true;
  if (cp == 0x386 || (cp >= 0x388 && cp <= 0x38A) || cp == 0x38C ||
      cp == 0x38E || cp == 0x38F)
    return true;
  if (cp >= 0x391 && cp <= 0x3AB) return cp != 0x3A2;
  if (cp >= 0x400 && cp <= 0x42F) return true;
  if (cyrillic_paired(cp)) return !(cp & 1);
  if (cp == 0x4C0) return true;
  if (cp >= 0x4C1 && cp <= 0x4CE) return cp & 1;
  return false;
}

bool is_lower(char32_t cp) {
  if (cp >= U'a' && cp <= U'z') return true;
  if (cp >= 0xDF && cp <= 0xFF) return cp != 0xF7;
  if (latin_ext_a_paired(cp)) return latin_ext_a_odd_upper(cp) ? !(cp & 1) : (cp & 1);
  if (cp == 0x131 || cp == 0x138 || cp == 0x149 || cp == 0x17F) return true;
  if (cp == 0x390 || (cp >= 0x3AC && cp <= 0x3CE)) return true;
  if (cp >= 0x430 && cp <= 0x45F) return true;
  if (cyrillic_paired(cp)) return cp & 1;
  if (cp >= 0x4C1 && cp <= 0x4CE) return !(cp & 1);
  if (cp == 0x4CF) return true;
  return false;
}

char32_t to_lower(char32_t cp) {
  if (!is_upper(cp)) return cp;
  if (cp <= 0xDE) return cp + 0x20;
  if (cp == 0x130) return U'i';
  if (cp == 0x178) return 0xFF;
  if (cp >= 0x100 && cp <= 0x17F) return cp + 1;
  switch (cp) {
    case 0x386: return 0x3AC;
    case 0x388: return 0x3AD;
    case 0x389: return 0x3AE;
    case 0x38A: return 0x3AF;
    case 0x38C: return 0x3CC;
    case 0x38E: return 0x3CD;
    case 0x38F: return 0x3CE;
    case 0x4C0: return 0x4CF;
    default: break;
  }
  if (cp >= 0x391 && cp <= 0x3AB) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  return cp + 1;  // remaining Cyrillic pairs
}

char32_t to_upper(char32_t cp) {
  if (!is_lower(cp)) return cp;
  if (cp >= U'a' && cp <= U'z') return cp - 0x20;
  if (cp == 0xDF || cp == 0x131 || cp == 0x138 || cp == 0x149 ||
      cp == 0x17F || cp == 0x390)
    return cp;  // no single-code-point uppercase
  if (cp == 0xFF) return 0x178;
  if (cp >= 0xE0 && cp <= 0xFE) return cp - 0x20;
  if (cp >= 0x100 && cp <= 0x17F) return cp - 1;
  switch (cp) {
    case 0x3AC: return 0x386;
    case 0x3AD: return 0x388;
    case 0x3AE: return 0x389;
    case 0x3AF: return 0x38A;
    case 0x3B0: return cp;
    case 0x3C2: return 0x3A3;  // final sigma
    case 0x3CC: return 0x38C;
    case 0x3CD: return 0x38E;
    case 0x3CE: return 0x38F;
    case 0x4CF: return 0x4C0;
    default: break;
  }
  if (cp >= 0x3B1 && cp <= 0x3CB) return cp - 0x20;
  if (cp >= 0x430 && cp <= 0x44F) return cp - 0x20;
  if (cp >= 0x450 && cp <= 0x45F) return cp - 0x50;
  return cp - 1;
}

std::string to_lower(std::string_view utf8) {
  std::string out;
  out.reserve(utf8.size());
  for (const auto& c : decode(utf8)) {
    if (c.value == kReplacement)
      out.append(utf8.substr(c.offset, c.length));
    else
      append_utf8(out, to_lower(c.value));
  }
  return out;
}

bool is_ascii(std::string_view s) {
  for (char c : s)
    if (static_cast<unsigned char>(c) >= 0x80) return false;
  return true;
}

}  // namespace scriptgap::unicode
