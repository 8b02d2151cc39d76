"""Mean rate against coverage-grid resolution at h = 90 m."""

import argparse
import tempfile
from pathlib import Path

from uavisac.cli import main
from uavisac.config import SINGLE_OBJECT, format_objects

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/resolution")
    p.add_argument("--runs", type=int, default=5)
    p.add_argument("--slots", type=int, default=10)
    p.add_argument("--values", default="0.1,0.5,1,2,4")
    args = p.parse_args()
    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "resolution.cfg"
        cfg.write_text(f"h = 90\nobjects = {format_objects(SINGLE_OBJECT)}\n")
        raise SystemExit(main(["sweep", "--config", str(cfg), "--param", "resolution",
                               "--values", args.values, "--runs", str(args.runs),
                               "--slots", str(args.slots), "--out", args.out]))
