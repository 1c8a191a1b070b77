#!/usr/bin/env python3
"""Regenerate the shared client/server hash parity vectors.

The frozen file at shared/hash_vectors.json is asserted byte-identically
by both the Python suite and the frontend suite; regenerate only when the
normalization rule itself changes, and expect both suites to complain if
the sides ever diverge.
"""

from __future__ import annotations

import json
from pathlib import Path

from keycap.challenge import hash_answer, normalize_answer

# ASCII plus safe accented Latin only: the client lowercases with the
# browser's toLowerCase, which matches Python's casefold on this domain.
RAW_INPUTS = [
    "",
    "blue",
    "Blue",
    "  Blue ",
    "BLUE",
    "4",
    " 4 ",
    "17",
    "CLEAR   DAY",
    "clear day",
    "breakfast",
    "BREAKFAST",
    "MiXeD CaSe AnSwEr",
    "tab\tseparated words",
    "new\nline answer",
    "   leading spaces",
    "trailing spaces   ",
    "double  internal  runs",
    "café",
    "ZEBRA crossing",
]


def main() -> int:
    vectors = [
        {
            "raw": raw,
            "normalized": normalize_answer(raw),
            "sha256_hex": hash_answer(normalize_answer(raw)),
        }
        for raw in RAW_INPUTS
    ]
    out = Path(__file__).resolve().parent.parent / "shared" / "hash_vectors.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(vectors, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"wrote {len(vectors)} vectors to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
