"""Proposed scheme against both baselines, multi- and single-object scenarios."""

import argparse
import tempfile
from pathlib import Path

from uavisac.cli import main
from uavisac.config import MULTI_OBJECT, SINGLE_OBJECT, format_objects

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/comparison")
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--slots", type=int, default=50)
    p.add_argument("--N_t", type=int, default=30)
    args = p.parse_args()
    code = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, objects in (("multi", MULTI_OBJECT), ("single", SINGLE_OBJECT)):
            cfg = Path(tmp) / f"{name}.cfg"
            cfg.write_text(f"N_t = {args.N_t}\nN_r = {args.N_t}\n"
                           f"objects = {format_objects(objects)}\n")
            code |= main(["compare", "--config", str(cfg), "--runs", str(args.runs),
                          "--slots", str(args.slots), "--out", f"{args.out}/{name}"])
    raise SystemExit(code)
