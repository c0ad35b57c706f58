"""Rewrite tests/golden/<name>.json from the invocation list.

Run from the repository root after an intentional change in a report, then
review the diff before committing it.
"""

import json
import sys
from pathlib import Path

from epc.frontend.cli import run_command
from epc.frontend.report import dumps

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = ROOT / "tests" / "golden"


def main() -> int:
    cases = json.loads((GOLDEN / "invocations.json").read_text())
    bad = 0
    for case in cases:
        code, doc, msg = run_command(case["argv"])
        status = "ok" if code == case["exit"] else f"EXIT {code} != {case['exit']}"
        bad += code != case["exit"]
        (GOLDEN / f"{case['name']}.json").write_text(dumps({"exit": code, "report": doc}))
        print(f"{case['name']:36s} {status}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
