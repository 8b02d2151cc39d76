"""Proposed against water-filling over UAV altitude, single object at 45 degrees."""

import argparse
import tempfile
from pathlib import Path

from uavisac.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/altitude")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--slots", type=int, default=10)
    p.add_argument("--values", default="90,100,110,120")
    args = p.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "altitude.cfg"
        cfg.write_text("objects = 45:30:-5\n")
        raise SystemExit(main(["sweep", "--config", str(cfg), "--param", "h",
                               "--values", args.values, "--schemes", "proposed,waterfilling",
                               "--runs", str(args.runs), "--slots", str(args.slots),
                               "--out", args.out]))
