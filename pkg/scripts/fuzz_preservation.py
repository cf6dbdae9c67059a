#!/usr/bin/env python3
"""Subject-reduction fuzzing at the acceptance scale (seed 42, 1000 configs)."""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from alacarte import testkit  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--count", type=int, default=1000)
    ap.add_argument("--fuel", type=int, default=50)
    args = ap.parse_args()
    report = testkit.run_preservation_fuzz(args.seed, args.count, fuel=args.fuel)
    print(
        f"checked {report.configs} configurations, {report.steps_checked} steps, "
        f"{len(report.counterexamples)} counterexamples"
    )
    for cx in report.counterexamples:
        print(json.dumps(cx, sort_keys=True))
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
