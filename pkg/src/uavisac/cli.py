"""Command-line entry point: simulations, comparisons, sweeps and model checks to CSV."""

from __future__ import annotations

import argparse
import csv
import math
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ObjectSpec, SimConfig, load_config
from .phy import ArrayGeometry, steering_vector
from .sensing import CrbParams, crb_variances
from .sim import SCHEMES, McSummary, SlotRecord, approx_trajectory, run_monte_carlo, run_scheme

SLOT_COLUMNS = ("run", "frame", "slot", "scheme", "object", "true_theta_deg", "true_d_m",
                "true_v_mps", "est_theta_deg", "est_d_m", "est_v_mps", "meas_theta_deg",
                "meas_tau_s", "meas_mu_hz", "rate_bpshz", "radar_snr", "sca_iters", "irm_iters",
                "r_final", "status")

SWEEP_PARAMS = {"h": "h", "resolution": "resolution_deg", "N_t": "N_t"}


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) for x in row])


def slot_rows(records: list[SlotRecord]):
    nan = float("nan")
    for rec in records:
        for k, o in enumerate(rec.objects):
            est = (math.degrees(o.est.theta), o.est.d, o.est.v) if o.est else (nan, nan, nan)
            meas = ((math.degrees(o.meas.theta_hat), o.meas.tau_hat, o.meas.mu_hat)
                    if o.meas else (nan, nan, nan))
            yield (rec.run, rec.frame, rec.slot, rec.scheme, k, math.degrees(o.true.theta),
                   o.true.d, o.true.v, *est, *meas, o.rate, o.radar_snr, rec.sca_iters,
                   rec.irm_iters, rec.r_final, rec.status)


def _schemes(text: str) -> tuple[str, ...]:
    names = tuple(s.strip() for s in text.split(",") if s.strip())
    bad = [s for s in names if s not in SCHEMES]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown scheme(s) {', '.join(bad) or '(none)'}; choose from {', '.join(SCHEMES)}")
    return names


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _config(args) -> SimConfig:
    cfg = load_config(args.config) if args.config else SimConfig()
    if getattr(args, "seed", None) is not None:
        cfg = cfg.replace(seed=args.seed)
    return cfg


def _seeds(cfg: SimConfig, runs: int) -> list[int]:
    return [(cfg.seed + r) % 2**64 for r in range(runs)]


# ---------------------------------------------------------------------------
# subcommands


def cmd_simulate(args) -> int:
    cfg = _config(args)
    records = []
    for scheme in args.schemes:
        records.extend(run_scheme(scheme, cfg, cfg.seed, args.slots))
    write_csv(Path(args.out) / "slots.csv", SLOT_COLUMNS, slot_rows(records))
    return int(any(r.failed for r in records))


def _comparison_rows(summary: McSummary, slots_per_frame: int):
    for scheme in summary.schemes:
        gain = summary.improvement(scheme) if "pilot" in summary.schemes else None
        for n, mean in enumerate(summary.mean_rate[scheme]):
            yield (scheme, n // slots_per_frame + 1, n % slots_per_frame + 1, mean,
                   summary.std_rate[scheme][n], summary.rmse_d[scheme][n],
                   math.degrees(summary.rmse_theta[scheme][n]),
                   gain[n] if gain is not None else float("nan"))


def cmd_compare(args) -> int:
    cfg = _config(args)
    summary = run_monte_carlo(cfg, _seeds(cfg, args.runs), args.slots, args.schemes)
    header = ("scheme", "frame", "slot", "mean_sum_rate", "std_sum_rate", "rmse_d_m",
              "rmse_theta_deg", "improvement_vs_pilot")
    out = Path(args.out)
    write_csv(out / "comparison.csv", header, _comparison_rows(summary, cfg.slots_per_frame))
    if args.slot_records:
        rows = (row for s in summary.schemes for run in summary.records[s] for row in slot_rows(run))
        write_csv(out / "slots.csv", SLOT_COLUMNS, rows)
    return int(summary.n_failed > 0)


def cmd_sweep(args) -> int:
    cfg = _config(args)
    key = SWEEP_PARAMS[args.param]
    rows, failed = [], 0
    for value in args.values:
        v = int(value) if key == "N_t" else value
        if key == "N_t":
            sub = cfg.replace(N_t=v, N_r=v)
        else:
            sub = cfg.replace(**{key: v})
        s = run_monte_carlo(sub, _seeds(cfg, args.runs), args.slots, args.schemes)
        failed += s.n_failed
        for scheme in s.schemes:
            rows.append((args.param, value, scheme, float(np.mean(s.mean_rate[scheme])),
                         float(np.mean(s.std_rate[scheme])), float(np.mean(s.rmse_d[scheme])),
                         math.degrees(float(np.mean(s.rmse_theta[scheme])))))
    header = ("param", "value", "scheme", "mean_rate", "mean_std_rate", "mean_rmse_d_m",
              "mean_rmse_theta_deg")
    write_csv(Path(args.out) / "sweep.csv", header, rows)
    return int(failed > 0)


def approx_config() -> SimConfig:
    return SimConfig(dT=0.05, v_u=15.0, h=60.0, theta_u_deg=180.0,
                     objects=(ObjectSpec(45.0, 30.0, 0.0),))


def cmd_validate_approx(args) -> int:
    cfg = load_config(args.config) if args.config else approx_config()
    points = approx_trajectory(cfg, args.slots)
    rows = []
    for p in points:
        rows.append((p.n, math.degrees(p.exact.theta), math.degrees(p.approx.theta), p.exact.d,
                     p.approx.d, abs(math.degrees(p.exact.theta - p.approx.theta)),
                     abs(p.exact.d - p.approx.d)))
    header = ("slot", "exact_theta_deg", "approx_theta_deg", "exact_d_m", "approx_d_m",
              "abs_err_theta_deg", "abs_err_d_m")
    write_csv(Path(args.out) / "approx.csv", header, rows)
    print(f"max |d error| = {max(r[6] for r in rows):.6g} m, "
          f"max |theta error| = {max(r[5] for r in rows):.6g} deg")
    return 0


def cmd_beampattern(args) -> int:
    cfg = _config(args)
    geom = ArrayGeometry.from_config(cfg)
    records = run_scheme("proposed", cfg, cfg.seed, max(args.slots))
    grid = np.round(np.arange(0.0, 1800.0 + 1) * 0.1, 1)
    A = steering_vector(np.radians(grid), geom)
    rows = []
    for n in args.slots:
        rec = records[n - 1]
        gain = np.sum(np.abs(A.conj() @ rec.tx.T) ** 2, axis=1)
        rows.extend((n, rec.frame, rec.slot, t, g) for t, g in zip(grid, gain))
    write_csv(Path(args.out) / "beampattern.csv", ("n", "frame", "slot", "theta_deg", "gain"), rows)
    return int(any(r.failed for r in records))


def cmd_crb_table(args) -> int:
    cfg = _config(args)
    crb = CrbParams.from_config(cfg)
    rows = []
    for d in args.d:
        for theta in args.theta:
            for snr in args.snr:
                v = crb_variances(snr, crb, math.radians(theta), d)
                rows.append((d, theta, snr, v.theta, v.tau, v.mu, v.ceiling_hit))
    header = ("d_m", "theta_deg", "snr", "var_theta_rad2", "var_tau_s2", "var_mu_hz2",
              "ceiling_hit")
    write_csv(Path(args.out) / "crb.csv", header, rows)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uavisac", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, slots=10):
        sp.add_argument("--config", help="key = value configuration file")
        sp.add_argument("--seed", type=_seed, help="overrides the config seed")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--slots", type=int, default=slots, help="number of time slots")

    sp = sub.add_parser("simulate", help="one run per scheme, slot-level records")
    common(sp)
    sp.add_argument("--schemes", type=_schemes, default=("proposed",))
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("compare", help="Monte-Carlo comparison of schemes")
    common(sp)
    sp.add_argument("--schemes", type=_schemes, default=SCHEMES)
    sp.add_argument("--runs", type=int, default=10)
    sp.add_argument("--slot-records", action="store_true", help="also write slots.csv")
    sp.set_defaults(func=cmd_compare)

    sp = sub.add_parser("sweep", help="mean rate against one parameter")
    common(sp)
    sp.add_argument("--param", choices=sorted(SWEEP_PARAMS), required=True)
    sp.add_argument("--values", type=_floats, required=True)
    sp.add_argument("--schemes", type=_schemes, default=("proposed",))
    sp.add_argument("--runs", type=int, default=5)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate-approx", help="one-step evolution model against exact kinematics")
    sp.add_argument("--config", help="defaults to a 40-slot low-altitude cruise (dT = 50 ms, h = 60 m)")
    sp.add_argument("--out", default=".")
    sp.add_argument("--slots", type=int, default=40)
    sp.set_defaults(func=cmd_validate_approx)

    sp = sub.add_parser("beampattern", help="a^H W a on a 0.1 degree grid for selected slots")
    sp.add_argument("--config")
    sp.add_argument("--seed", type=_seed)
    sp.add_argument("--out", default=".")
    sp.add_argument("--slots", type=_ints, default=[1, 2, 5])
    sp.set_defaults(func=cmd_beampattern)

    sp = sub.add_parser("crb-table", help="measurement variances over a (d, theta, SNR) lattice")
    sp.add_argument("--config")
    sp.add_argument("--out", default=".")
    sp.add_argument("--d", type=_floats, default=[50.0, 100.0, 150.0, 200.0])
    sp.add_argument("--theta", type=_floats, default=[30.0, 45.0, 60.0, 75.0, 90.0, 120.0])
    sp.add_argument("--snr", type=_floats, default=[0.1, 1.0, 10.0, 100.0])
    sp.set_defaults(func=cmd_crb_table)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    slots = getattr(args, "slots", 1)
    if (min(slots) if isinstance(slots, list) else slots) < 1:
        parser.error("--slots must be >= 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
