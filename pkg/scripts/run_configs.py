"""Run every experiment config in a directory and write report.json plus CSV tables per config."""

import argparse
import sys
import time
from pathlib import Path

from primestrings.lab import ExperimentConfig, exit_code, find_strings, write_outputs


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--configs", default="configs", help="directory of *.json configs")
    ap.add_argument("--out", default="results")
    ap.add_argument("--timing", action="store_true", help="record stage timings in the reports")
    args = ap.parse_args()

    worst = 0
    for path in sorted(Path(args.configs).glob("*.json")):
        cfg = ExperimentConfig.load(path)
        cfg.record_timing = args.timing
        t0 = time.perf_counter()
        rep = find_strings(cfg)
        write_outputs(rep, Path(args.out) / path.stem)
        code = exit_code(rep, cfg)
        worst = max(worst, code)
        c = rep.counts
        print(
            f"{path.stem:>6}: {len(rep.strings)} strings (m={rep.m}), A-primes {c['a_primes']}, "
            f"B hits {c['b_hits']}, unknown {rep.unknown_total}, n0 {rep.n0}, {time.perf_counter() - t0:.1f}s"
        )
    return worst


if __name__ == "__main__":
    sys.exit(main())
