"""Exact kinematics against the one-step evolution model."""

import argparse

from uavisac.cli import main

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="results/approximation")
    args = p.parse_args()
    raise SystemExit(main(["validate-approx", "--out", args.out]))
