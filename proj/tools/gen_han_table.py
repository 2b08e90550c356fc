#!/usr/bin/env python3
"""Regenerate data/tables/zh.tsv from the Unihan-derived readings bundled
with pypinyin (kMandarin / kHanyuPinyin, first listed reading).

Tone marks are stripped and u-umlaut is written as plain "u", so every
target is lowercase ASCII. Covers CJK Unified Ideographs (U+4E00-U+9FFF)
and Extension A (U+3400-U+4DBF).

    pip install pypinyin
    python3 tools/gen_han_table.py > data/tables/zh.tsv
"""
import sys
import unicodedata

import pypinyin
from pypinyin.pinyin_dict import pinyin_dict

RANGES = [(0x3400, 0x4DBF), (0x4E00, 0x9FFF)]


def toneless(reading: str) -> str:
    decomposed = unicodedata.normalize("NFD", reading)
    out = "".join(c for c in decomposed if not unicodedata.combining(c))
    out = out.replace("ü", "u").replace("ü", "u")
    if not out.isascii() or not out.isalpha():
        raise ValueError(f"unexpected reading {reading!r}")
    return out.lower()


def main() -> None:
    w = sys.stdout.write
    w("# Han -> toneless pinyin, one character per rule.\n")
    w("# Generated by tools/gen_han_table.py from pypinyin "
      f"{pypinyin.__version__} (Unihan kMandarin/kHanyuPinyin, first reading).\n")
    w("!script han\n")
    w(f"!version unihan-pypinyin-{pypinyin.__version__}\n")
    for lo, hi in RANGES:
        for cp in range(lo, hi + 1):
            readings = pinyin_dict.get(cp)
            if not readings:
                continue
            first = readings.split(",")[0]
            w(f"{chr(cp)}\t{toneless(first)}\n")


if __name__ == "__main__":
    main()
