#!/usr/bin/env python3
"""Regenerate the golden outputs committed under tests/goldens/.

Each shipped scenario runs through its natural command; the byte-exact
outputs anchor the regression suite. Any change to the default model
parameters or to the evaluation pipeline shows up as a golden mismatch.
"""

from __future__ import annotations

import contextlib
import io
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from riskfield import run_cli  # noqa: E402

COMMANDS = {
    "head_on": ["monitor"],
    "cut_in": ["ego"],
    "decel_lead": ["plan"],
    "lane_change": ["field", "--entity", "car"],
    "turn": ["field", "--entity", "car"],
}


def main() -> int:
    goldens = REPO / "tests" / "goldens"
    for name, command in COMMANDS.items():
        out_dir = goldens / name
        if out_dir.exists():
            shutil.rmtree(out_dir)
        out_dir.mkdir(parents=True)
        argv = command + [
            "--scenario", str(REPO / "fixtures" / f"{name}.json"),
            "--out-dir", str(out_dir),
        ]
        stdout = io.StringIO()
        with contextlib.redirect_stdout(stdout):
            code = run_cli(argv)
        if code != 0:
            print(f"{name}: exit {code}", file=sys.stderr)
            return code
        (out_dir / "stdout.json").write_text(stdout.getvalue(), encoding="ascii")
        files = sorted(p.name for p in out_dir.iterdir())
        print(f"{name}: {len(files)} files")
    return 0


if __name__ == "__main__":
    sys.exit(main())
