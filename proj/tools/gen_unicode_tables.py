#!/usr/bin/env python3
"""Regenerates src/unicode_tables.inc (canonical decompositions, simple
lowercase mappings and nonspacing marks for code points below U+3000)."""
import sys
import unicodedata

LIMIT = 0x3000


def full_decomposition(cp):
    return [ord(c) for c in unicodedata.normalize("NFD", chr(cp))]


def main(out):
    decomp, lower, marks = [], [], []
    for cp in range(LIMIT):
        ch = chr(cp)
        if 0xD800 <= cp < 0xE000:
            continue
        d = full_decomposition(cp)
        if d != [cp]:
            decomp.append((cp, d))
        lo = ch.lower()
        if len(lo) == 1 and lo != ch:
            lower.append((cp, ord(lo)))
    ranges = []
    for cp in list(range(LIMIT)) + list(range(0xFE20, 0xFE30)):
        if unicodedata.category(chr(cp)) == "Mn":
            if ranges and ranges[-1][1] == cp - 1:
                ranges[-1][1] = cp
            else:
                ranges.append([cp, cp])
    w = out.write
    w("// Generated by tools/gen_unicode_tables.py (Unicode %s). Do not edit.\n" % unicodedata.unidata_version)
    w("// clang-format off\n")
    w("static constexpr std::uint32_t kDecompData[] = {\n")
    offsets, pos = [], 0
    for cp, d in decomp:
        w("  %s,\n" % ", ".join("0x%04X" % x for x in d))
        offsets.append((cp, pos, len(d)))
        pos += len(d)
    w("};\n")
    w("static constexpr DecompEntry kDecomp[] = {\n")
    for cp, p, n in offsets:
        w("  {0x%04X, %d, %d},\n" % (cp, p, n))
    w("};\n")
    w("static constexpr CaseEntry kLower[] = {\n")
    for a, b in lower:
        w("  {0x%04X, 0x%04X},\n" % (a, b))
    w("};\n")
    w("static constexpr MarkRange kMarks[] = {\n")
    for a, b in ranges:
        w("  {0x%04X, 0x%04X},\n" % (a, b))
    w("};\n")
    w("// clang-format on\n")


if __name__ == "__main__":
    with open(sys.argv[1] if len(sys.argv) > 1 else "src/unicode_tables.inc", "w") as f:
        main(f)
