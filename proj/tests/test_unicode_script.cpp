#include <string>

#include "doctest.h"
#include "scriptgap/hashing.hpp"
#include "scriptgap/script.hpp"
#include "scriptgap/unicode.hpp"

using namespace scriptgap;

TEST_SUITE("unicode") {
  TEST_CASE("decode keeps byte offsets") {
    auto cps = unicode::decode("aЖ花");
    REQUIRE(cps.size() == 3);
    CHECK(cps[0].value == U'a');
    CHECK(cps[1].value == U'Ж');
    CHECK(cps[1].offset == 1);
    CHECK(cps[1].length == 2);
    CHECK(cps[2].offset == 3);
    CHECK(cps[2].length == 3);
  }

  TEST_CASE("invalid bytes decode one at a time") {
    std::string bad = "a\xff\xc3";
    auto cps = unicode::decode(bad);
    REQUIRE(cps.size() == 3);
    CHECK(cps[1].value == unicode::kReplacement);
    CHECK(cps[1].length == 1);
    CHECK(cps[2].value == unicode::kReplacement);
  }

  TEST_CASE("utf8 round trip") {
    const std::string s = "Ελληνική Александр 花生 ok";
    CHECK(unicode::to_utf8(unicode::to_u32(s)) == s);
  }

  TEST_CASE("simple case mapping") {
    CHECK(unicode::to_lower(U'Ж') == U'ж');
    CHECK(unicode::to_upper(U'ж') == U'Ж');
    CHECK(unicode::to_lower(U'Ё') == U'ё');
    CHECK(unicode::to_lower(U'Σ') == U'σ');
    CHECK(unicode::to_lower(U'Ά') == U'ά');
    CHECK(unicode::to_lower(U'花') == U'花');
    CHECK(unicode::to_lower("ПРИВЕТ World") == "привет world");
    CHECK(unicode::is_upper(U'A'));
    CHECK_FALSE(unicode::is_cased(U'5'));
  }

  TEST_CASE("character classes") {
    CHECK(unicode::is_whitespace(U' '));
    CHECK(unicode::is_whitespace(U'\t'));
    CHECK(unicode::is_punctuation(U','));
    CHECK(unicode::is_punctuation(U'。'));
    CHECK(unicode::is_digit(U'7'));
    CHECK_FALSE(unicode::is_digit(U'x'));
  }

  TEST_CASE("hash functions are the published ones") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    SplitMix64 rng(1234567);
    CHECK(rng.next() == 6457827717110365317ULL);
    CHECK(rng.next() == 3203168211198807973ULL);
  }

  TEST_CASE("below stays in range and shuffle permutes") {
    SplitMix64 rng(9);
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
    std::string s = "abcdefgh";
    seeded_shuffle(s.begin(), s.end(), rng);
    std::string sorted = s;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == "abcdefgh");
  }
}

TEST_SUITE("script") {
  TEST_CASE("fixed ranges") {
    CHECK(classify(U'a') == ScriptClass::Latin);
    CHECK(classify(U'Ж') == ScriptClass::Cyrillic);
    CHECK(classify(0x0400) == ScriptClass::Cyrillic);
    CHECK(classify(0x04FF) == ScriptClass::Cyrillic);
    CHECK(classify(U'λ') == ScriptClass::Greek);
    CHECK(classify(0x4E00) == ScriptClass::Han);
    CHECK(classify(0x3400) == ScriptClass::Han);
    CHECK(classify(0x9FFF) == ScriptClass::Han);
    CHECK(classify(U'3') == ScriptClass::Common);
    CHECK(classify(U' ') == ScriptClass::Common);
    CHECK(classify(U'!') == ScriptClass::Common);
    CHECK(classify(0x05D0) == ScriptClass::Other);  // Hebrew
  }

  TEST_CASE("every code point has exactly one class") {
    SplitMix64 rng(3);
    for (int i = 0; i < 20000; ++i) {
      auto cp = static_cast<char32_t>(rng.below(0x110000));
      auto c = classify(cp);
      CHECK(classify(cp) == c);
      int hits = 0;
      hits += (cp >= 0x0400 && cp <= 0x04FF);
      hits += (cp >= 0x0370 && cp <= 0x03FF);
      hits += ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF));
      CHECK(hits <= 1);
      if (cp >= 0x0400 && cp <= 0x04FF) CHECK(c == ScriptClass::Cyrillic);
      if (cp >= 0x0370 && cp <= 0x03FF) CHECK(c == ScriptClass::Greek);
    }
  }

  TEST_CASE("script names") {
    CHECK(parse_script_name("cyrillic") == ScriptClass::Cyrillic);
    CHECK(parse_script_name("Han") == ScriptClass::Han);
    CHECK(parse_script_name("chinese") == ScriptClass::Han);
    CHECK_FALSE(parse_script_name("klingon").has_value());
    for (auto s : {ScriptClass::Latin, ScriptClass::Cyrillic, ScriptClass::Greek, ScriptClass::Han,
                   ScriptClass::Common, ScriptClass::Other})
      CHECK(parse_script_name(script_name(s)) == s);
  }

  TEST_CASE("detect_script_runs examples") {
    CHECK(detect_script_runs("abc") == std::vector<ScriptRun>{{0, 3, ScriptClass::Latin}});
    CHECK(detect_script_runs("").empty());
    const std::string text = "ab Александр!";
    // "ab " is 3 bytes, then 9 Cyrillic letters of 2 bytes and a "!".
    auto runs = detect_script_runs(text);
    REQUIRE(runs.size() == 2);
    CHECK(runs[0] == ScriptRun{0, 3, ScriptClass::Latin});
    CHECK(runs[1] == ScriptRun{3, 22, ScriptClass::Cyrillic});
    CHECK(text.substr(runs[0].begin, runs[0].end - runs[0].begin) == "ab ");
    CHECK(text.substr(runs[1].begin) == "Александр!");
  }

  TEST_CASE("leading common stretch is its own run") {
    auto runs = detect_script_runs("12 abc");
    REQUIRE(runs.size() == 2);
    CHECK(runs[0] == ScriptRun{0, 3, ScriptClass::Common});
    CHECK(runs[1] == ScriptRun{3, 6, ScriptClass::Latin});
  }

  TEST_CASE("runs tile the input") {
    SplitMix64 rng(11);
    const std::u32string pool = U"aZ Жж花生λ,.1\tא";
    for (int trial = 0; trial < 300; ++trial) {
      std::u32string s;
      auto len = rng.below(12);
      for (std::size_t i = 0; i < len; ++i) s += pool[rng.below(pool.size())];
      auto utf8 = unicode::to_utf8(s);
      auto runs = detect_script_runs(utf8);
      std::size_t pos = 0;
      for (std::size_t i = 0; i < runs.size(); ++i) {
        CHECK(runs[i].begin == pos);
        CHECK(runs[i].end > runs[i].begin);
        if (i > 0) CHECK(runs[i].script != runs[i - 1].script);
        pos = runs[i].end;
      }
      CHECK(pos == utf8.size());
    }
  }
}
