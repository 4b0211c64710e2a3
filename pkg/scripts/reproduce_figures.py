#!/usr/bin/env python3
"""Run every figure bundle (1-7) at full scale and print the claim verdicts.

    python scripts/reproduce_figures.py --out results/
"""
import argparse
import sys
from pathlib import Path

from advshape.cli import main as cli_main
from advshape.figures import FIGURES


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=10)
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    verdicts = {}
    for number in sorted(FIGURES):
        print(f"=== figure {number} ===", flush=True)
        rc = cli_main([
            "reproduce", "--figure", str(number), "--seed", str(args.seed),
            "--trials", str(args.trials), "--jobs", str(args.jobs),
            "--out", str(args.out / f"figure{number}"),
        ])
        verdicts[number] = {0: "PASS", 2: "FAIL"}.get(rc, f"error (exit {rc})")
    print()
    for number, verdict in verdicts.items():
        print(f"figure {number} ({FIGURES[number].title}): {verdict}")
    return 0 if all(v == "PASS" for v in verdicts.values()) else 2


if __name__ == "__main__":
    sys.exit(main())
