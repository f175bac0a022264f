#!/usr/bin/env python3
"""Regenerate the committed golden kernel sources in tests/golden/.

Run only when an intentional emitter change lands; the test suite treats
any byte difference against these files as a regression.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from fftforge.msl import emit_kernel
from fftforge.stockham import PREFER4, PREFER8, make_plan

GOLDEN_DIR = pathlib.Path(__file__).resolve().parents[1] / "tests" / "golden"

# the radix-4 ladder sizes (256..4096) plus the radix-8 flagship
CONFIGS = [(n, PREFER4) for n in (256, 512, 1024, 2048, 4096)] + [(4096, PREFER8)]


def main():
    GOLDEN_DIR.mkdir(parents=True, exist_ok=True)
    for n, policy in CONFIGS:
        src = emit_kernel(make_plan(n, policy))
        path = GOLDEN_DIR / f"{src.entry_point}.metal"
        path.write_text(src.text, encoding="utf-8")
        print(f"wrote {path} ({len(src.text)} bytes)")


if __name__ == "__main__":
    main()
