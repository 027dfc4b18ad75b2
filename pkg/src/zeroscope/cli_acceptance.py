"""Fixed battery of CLI invocations whose combined output must be reproducible.

    python -m zeroscope.cli_acceptance OUTDIR

writes one file per invocation plus ``summary.json`` (exit codes and the
SHA-256 of every report).  Two runs must produce byte-identical trees.
"""

from __future__ import annotations

import contextlib
import hashlib
import io
import json
import os
import sys
from typing import List, Optional

from .cli import main as cli_main

INVOCATIONS = [
    ("classify_leroy2", ["classify", "--family", "leroy:r=2", "--n-max", "128"]),
    ("classify_counterexample1", ["classify", "--family", "counterexample:R=1"]),
    ("classify_bessel0", ["classify", "--family", "bessel:alpha=0"]),
    ("zeros_leroy2", ["zeros", "--family", "leroy:r=2", "--radius", "10"]),
    ("zeros_zexp", ["zeros", "--family", "exppoly:k=1;P=0,1", "--radius", "1"]),
    ("zeros_counterexample2", ["zeros", "--family", "counterexample:R=2", "--radius", "20"]),
    ("zeros_leroy2_csv", ["zeros", "--family", "leroy:r=2", "--radius", "10", "--format", "csv"]),
    ("corroborate_leroy2", ["corroborate", "--family", "leroy:r=2", "--radii", "2,10,20"]),
    ("corroborate_bessel0", ["corroborate", "--family", "bessel:alpha=0", "--radii", "10,40,100"]),
    ("corroborate_counterexample1", ["corroborate", "--family", "counterexample:R=1", "--radii", "1,10,50"]),
    ("verify_lemma_k2", ["verify-lemma", "--family", "exppoly:k=2;P=-1,1", "--n", "2..30"]),
    ("verify_lemma_random", ["verify-lemma", "--random-trials", "200", "--max-degree", "6", "--seed", "7"]),
    ("growth_exp", ["growth-check", "--family", "exppoly:k=1;P=1", "--radius", "10", "--seed", "3"]),
    ("growth_leroy2", ["growth-check", "--family", "leroy:r=2", "--radius", "20", "--seed", "3"]),
]


def run_all(outdir: str) -> dict:
    os.makedirs(outdir, exist_ok=True)
    summary = {}
    for name, argv in INVOCATIONS:
        path = os.path.join(outdir, name + (".csv" if "csv" in argv else ".json"))
        with contextlib.redirect_stderr(io.StringIO()):
            code = cli_main(argv + ["--output", path])
        with open(path, "rb") as fp:
            digest = hashlib.sha256(fp.read()).hexdigest()
        summary[name] = {"argv": argv, "exit": code, "sha256": digest}
    with open(os.path.join(outdir, "summary.json"), "w", encoding="utf-8") as fp:
        json.dump(summary, fp, indent=2, sort_keys=True)
        fp.write("\n")
    return summary


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m zeroscope.cli_acceptance OUTDIR", file=sys.stderr)
        return 1
    summary = run_all(argv[0])
    bad = [k for k, v in summary.items() if v["exit"] != 0]
    for k, v in summary.items():
        print(f"{k:32s} exit={v['exit']} {v['sha256'][:16]}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
