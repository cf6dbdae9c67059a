#!/usr/bin/env python3
"""Run every module law suite and print the combined report."""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from alacarte import testkit  # noqa: E402


def main() -> int:
    failed = 0
    for suite in ("kernel", "indexed", "mutual"):
        report = testkit.law_suite(suite)
        for line in report.lines():
            print(line)
        print(json.dumps(report.to_json(), sort_keys=True))
        failed += report.failed
    return 0 if failed == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
