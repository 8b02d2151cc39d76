"""Frame-structured simulation of the proposed scheme and the two baselines.

Each frame opens with an omnidirectional slot followed by directional slots.
Beams are always designed from predicted channels and scored against the true
ones. Measurement noise is drawn from a generator keyed by (seed, object,
slot), so all schemes run on common random numbers and differ only through
their beam decisions.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beamform import (BeamProblem, BeamSolution, SolverFailure, design_beams, omni_precoder,
                       waterfill_mrt)
from .config import SimConfig
from .phy import (ArrayGeometry, channel_vector, directional_sinr, omni_sinr, radar_snr_dir,
                  radar_snr_omni, rate, reflection_coeff)
from .sensing import (CrbParams, Measurement, initial_mse, initial_state_from_measurement,
                      synthesize_measurement)
from .tracker import (DegenerateGeometryError, FilterDivergenceError, NoiseModel, TrackState,
                      evolve, predict, predict_k_steps, update)
from .world import PolarState, UavState, WorldState, initial_world, propagate_truth, true_polar

SCHEMES = ("proposed", "pilot", "waterfilling")
HARD_FAILURES = ("solver_failed", "filter_failed")


@dataclass(frozen=True)
class FrameSchedule:
    slots_per_frame: int = 10
    n_frames: int = 1

    def __post_init__(self):
        if self.slots_per_frame < 2:
            raise ValueError("a frame needs at least two slots")

    @property
    def total_slots(self) -> int:
        return self.slots_per_frame * self.n_frames

    def position(self, n: int) -> tuple[int, int]:
        """(frame, slot), both 1-based, of global slot index n (0-based)."""
        return n // self.slots_per_frame + 1, n % self.slots_per_frame + 1

    def role(self, slot: int) -> str:
        return "omni" if slot == 1 else "directional"

    @classmethod
    def covering(cls, n_slots: int, slots_per_frame: int) -> "FrameSchedule":
        return cls(slots_per_frame, max(1, -(-n_slots // slots_per_frame)))


@dataclass(frozen=True)
class ObjectRecord:
    true: PolarState
    est: PolarState | None
    meas: Measurement | None
    rate: float
    radar_snr: float
    mse: np.ndarray | None = None


@dataclass(frozen=True)
class SlotRecord:
    run: int
    frame: int
    slot: int
    scheme: str
    objects: tuple[ObjectRecord, ...]
    sca_iters: int = 0
    irm_iters: int = 0
    r_final: float = float("nan")
    status: str = "omni"
    relaxations: tuple[str, ...] = ()
    tx: np.ndarray | None = None  # transmitted beam vectors, one row per stream

    @property
    def sum_rate(self) -> float:
        return float(sum(o.rate for o in self.objects))

    @property
    def failed(self) -> bool:
        return self.status in HARD_FAILURES


def measurement_rng(seed: int, k: int, n: int) -> np.random.Generator:
    """Independent stream per (object, global slot); shared by every scheme."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k, n)))


# ---------------------------------------------------------------------------
# truth


@dataclass
class Truth:
    """World state plus the polar truth per object.

    In ``exact`` mode the polar states come from the Cartesian world; in
    ``matched`` mode they follow the tracker's own evolution model, which is
    what a matched-model filter test needs.
    """

    world: WorldState
    polar: list[PolarState]
    matched: bool = False

    @classmethod
    def start(cls, config: SimConfig) -> "Truth":
        world = initial_world(config)
        polar = [true_polar(world, k) for k in range(len(world.objects))]
        return cls(world, polar, config.truth_model == "matched")

    @property
    def uav(self) -> UavState:
        return self.world.uav

    def step(self) -> "Truth":
        nxt = propagate_truth(self.world)
        if self.matched:
            polar = [evolve(p, self.world.uav, self.world.dT) for p in self.polar]
        else:
            polar = [true_polar(nxt, k) for k in range(len(nxt.objects))]
        return Truth(nxt, polar, self.matched)


# ---------------------------------------------------------------------------
# per-run state


@dataclass
class RunState:
    config: SimConfig
    geom: ArrayGeometry
    crb: CrbParams
    noise: NoiseModel
    seed: int
    run: int = 0
    tracks: list = field(default_factory=list)  # TrackState per object, None before first contact
    last_var_theta: list = field(default_factory=list)
    beams: BeamSolution | None = None
    uav_history: list = field(default_factory=list)  # UAV pose at each past global slot

    @classmethod
    def fresh(cls, config: SimConfig, seed: int, run: int = 0) -> "RunState":
        K = len(config.objects)
        return cls(config, ArrayGeometry.from_config(config), CrbParams.from_config(config),
                   NoiseModel.from_std(*config.evolution_std), seed, run, [None] * K, [0.0] * K)


def _beta(d: float, config: SimConfig) -> complex:
    return reflection_coeff(d, config.epsilon)


def _measure(state: RunState, truth: Truth, k: int, n: int, snr: float) -> Measurement:
    cfg = state.config
    return synthesize_measurement(truth.polar[k], truth.uav, snr, state.crb,
                                  measurement_rng(state.seed, k, n), cfg.f_c,
                                  cfg.meas_noise_scale)


def _realized_rates(beams: BeamSolution, truth: Truth, state: RunState) -> list[float]:
    cfg = state.config
    out = []
    for k, p in enumerate(truth.polar):
        h = channel_vector(p.theta, p.d, state.geom, cfg.alpha0)
        out.append(float(rate(directional_sinr(h, beams.vectors, k, cfg.sigma_c2))))
    return out


def _directional_snr(beams: BeamSolution, truth: Truth, k: int, state: RunState) -> float:
    cfg = state.config
    p = truth.polar[k]
    return radar_snr_dir(p.theta, beams.vectors, _beta(p.d, cfg), cfg.G_m, cfg.sigma_r2, state.geom)


def _pointing_std(track: TrackState, var_theta: float) -> float:
    return math.sqrt(max(track.mse[0, 0], var_theta, 0.0))


def _design(preds: list[TrackState], state: RunState, scheme: str) -> BeamSolution:
    cfg = state.config
    theta = [t.e[0] for t in preds]
    d = [t.e[1] for t in preds]
    if scheme == "waterfilling":
        return waterfill_mrt(theta, d, cfg.P_T, cfg.sigma_c2, state.geom, cfg.alpha0)
    sigma = [_pointing_std(t, v) for t, v in zip(preds, state.last_var_theta)]
    problem = BeamProblem.from_predictions(theta, d, sigma, cfg, state.geom)
    return design_beams(problem, cfg)


def _omni_slot(state: RunState, truth: Truth, n: int, frame: int, scheme: str,
               update_tracks: bool) -> SlotRecord:
    """Omnidirectional probe; the pilot scheme reports zero rate here."""
    cfg = state.config
    K = len(truth.polar)
    records = []
    for k, p in enumerate(truth.polar):
        snr = radar_snr_omni(_beta(p.d, cfg), cfg.P_T, cfg.G_m, cfg.sigma_r2)
        m = _measure(state, truth, k, n, snr)
        r = 0.0 if scheme == "pilot" else float(rate(omni_sinr(p.d, K, cfg.alpha0, cfg.P_T,
                                                                 cfg.sigma_c2)))
        track = state.tracks[k]
        if update_tracks and track is None:
            # first contact: initialise from the echo alone
            e0 = initial_state_from_measurement(m, truth.uav, cfg.f_c)
            track = TrackState(e0.as_array(), initial_mse(m, cfg.f_c, cfg.mse0_inflation))
            state.tracks[k] = track
            state.last_var_theta[k] = m.var_theta
            est, mse = e0, track.mse
        elif track is not None:
            # known object: the prediction bridges this slot, the echo is only logged
            est = predict(track, state.uav_history[-1], state.noise.Q_s, cfg.dT).polar
            mse = None
        else:
            est, mse = None, None
        records.append(ObjectRecord(p, est, m, r, snr, mse))
    state.beams = omni_precoder(cfg.P_T, state.geom)
    return SlotRecord(state.run, frame, 1, scheme, tuple(records), tx=state.beams.vectors)


def run_frame_boundary(state: RunState) -> list[TrackState]:
    """Two-step prediction from the last directional slot across the omni slot."""
    uavs = state.uav_history[-2:]
    return [predict_k_steps(t, uavs, 2, state.noise.Q_s, state.config.dT) for t in state.tracks]


def run_slot_proposed(state: RunState, truth: Truth, n: int, scheme: str = "proposed"
                      ) -> SlotRecord:
    """One slot of the tracking loop; ``scheme`` selects the beam designer."""
    cfg = state.config
    frame, slot = FrameSchedule(cfg.slots_per_frame).position(n)
    if slot == 1:
        return _omni_slot(state, truth, n, frame, scheme, update_tracks=True)

    if slot == 2 and frame > 1:
        preds = run_frame_boundary(state)
    else:
        preds = [predict(t, state.uav_history[-1], state.noise.Q_s, cfg.dT)
                 for t in state.tracks]

    status, sca_iters, irm_iters, r_final, relax = "optimal", 0, 0, float("nan"), ()
    try:
        beams = _design(preds, state, scheme)
        status = beams.status
        sca_iters, irm_iters, r_final = beams.sca_iters, beams.irm_iters, beams.r_final
        relax = tuple(beams.relaxations)
    except SolverFailure:
        beams, status = state.beams, "solver_failed"
    state.beams = beams

    rates = _realized_rates(beams, truth, state)
    records = []
    for k, p in enumerate(truth.polar):
        snr = _directional_snr(beams, truth, k, state)
        m = _measure(state, truth, k, n, snr)
        try:
            track = update(preds[k], m, truth.uav, cfg.f_c, state.noise.Q_m)
            state.last_var_theta[k] = m.var_theta
        except (FilterDivergenceError, DegenerateGeometryError):
            track, status = preds[k], "filter_failed"
        state.tracks[k] = track
        records.append(ObjectRecord(p, track.polar, m, rates[k], snr, track.mse))
    return SlotRecord(state.run, frame, slot, scheme, tuple(records), sca_iters, irm_iters,
                      r_final, status, relax, beams.vectors)


def _run_tracking(config: SimConfig, seed: int, n_slots: int, scheme: str, run: int
                  ) -> list[SlotRecord]:
    state = RunState.fresh(config, seed, run)
    truth = Truth.start(config)
    out = []
    for n in range(n_slots):
        out.append(run_slot_proposed(state, truth, n, scheme))
        state.uav_history.append(truth.uav)
        truth = truth.step()
    return out


def run_proposed(config: SimConfig, seed: int, n_slots: int, run: int = 0) -> list[SlotRecord]:
    return _run_tracking(config, seed, n_slots, "proposed", run)


def run_waterfilling_baseline(config: SimConfig, seed: int, n_slots: int, run: int = 0
                              ) -> list[SlotRecord]:
    return _run_tracking(config, seed, n_slots, "waterfilling", run)


def run_pilot_baseline(config: SimConfig, seed: int, n_slots: int, run: int = 0
                       ) -> list[SlotRecord]:
    """Pilot in slot 1, beams designed once from that estimate and held for the frame."""
    state = RunState.fresh(config, seed, run)
    truth = Truth.start(config)
    schedule = FrameSchedule(config.slots_per_frame)
    held: list[TrackState] = []
    diag = (0, 0, float("nan"), "optimal", ())
    out = []
    for n in range(n_slots):
        frame, slot = schedule.position(n)
        if slot == 1:
            state.tracks = [None] * len(truth.polar)  # no memory across frames
            rec = _omni_slot(state, truth, n, frame, "pilot", update_tracks=True)
            held = [predict(t, truth.uav, state.noise.Q_s, config.dT) for t in state.tracks]
            try:
                beams = _design(held, state, "pilot")
                diag = (beams.sca_iters, beams.irm_iters, beams.r_final, beams.status,
                        tuple(beams.relaxations))
            except SolverFailure:
                beams = omni_precoder(config.P_T, state.geom)
                diag = (0, 0, float("nan"), "solver_failed", ())
            out.append(rec)
        else:
            rates = _realized_rates(beams, truth, state)
            records = []
            for k, p in enumerate(truth.polar):
                snr = _directional_snr(beams, truth, k, state)
                m = _measure(state, truth, k, n, snr)  # logged, never processed
                records.append(ObjectRecord(p, held[k].polar, m, rates[k], snr, held[k].mse))
            first = slot == 2
            out.append(SlotRecord(run, frame, slot, "pilot", tuple(records),
                                  diag[0] if first else 0, diag[1] if first else 0,
                                  diag[2] if first else float("nan"),
                                  diag[3] if first else "held", diag[4] if first else (),
                                  beams.vectors))
        state.uav_history.append(truth.uav)
        truth = truth.step()
    return out


RUNNERS = {
    "proposed": run_proposed,
    "pilot": run_pilot_baseline,
    "waterfilling": run_waterfilling_baseline,
}


def run_scheme(scheme: str, config: SimConfig, seed: int, n_slots: int, run: int = 0
               ) -> list[SlotRecord]:
    if scheme not in RUNNERS:
        raise ValueError(f"unknown scheme {scheme!r}; choose from {', '.join(SCHEMES)}")
    return RUNNERS[scheme](config, seed, n_slots, run)


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class McSummary:
    schemes: tuple[str, ...]
    seeds: tuple[int, ...]
    mean_rate: dict  # scheme -> (n_slots,) mean sum rate
    std_rate: dict
    rmse_d: dict  # scheme -> (n_slots,) over seeds and objects
    rmse_theta: dict
    records: dict  # scheme -> list of per-run record lists

    def improvement(self, scheme: str = "proposed", baseline: str = "pilot") -> np.ndarray:
        """Relative gain (mean_scheme - mean_baseline) / mean_baseline per slot."""
        base = self.mean_rate[baseline]
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(base > 0, (self.mean_rate[scheme] - base) / base, np.inf)

    @property
    def n_failed(self) -> int:
        return sum(rec.failed for runs in self.records.values() for run in runs for rec in run)


def _task(args):
    scheme, config, seed, n_slots, run = args
    return run_scheme(scheme, config, seed, n_slots, run)


def sim_threads() -> int:
    try:
        return max(1, int(os.environ.get("ISAC_SIM_THREADS", "1")))
    except ValueError:
        return 1


def run_monte_carlo(config: SimConfig, seeds, n_slots: int, schemes=SCHEMES,
                    threads: int | None = None) -> McSummary:
    seeds = tuple(int(s) for s in seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    for s in schemes:
        if s not in RUNNERS:
            raise ValueError(f"unknown scheme {s!r}")
    tasks = [(s, config, seed, n_slots, run) for s in schemes for run, seed in enumerate(seeds)]
    threads = sim_threads() if threads is None else threads
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_task, tasks))  # map keeps task order
    else:
        results = [_task(t) for t in tasks]
    records = {s: [] for s in schemes}
    for (s, *_), recs in zip(tasks, results):
        records[s].append(recs)
    return summarize(records, seeds)


def summarize(records: dict, seeds) -> McSummary:
    mean_rate, std_rate, rmse_d, rmse_theta = {}, {}, {}, {}
    for scheme, runs in records.items():
        rates = np.array([[r.sum_rate for r in run] for run in runs])
        mean_rate[scheme] = rates.mean(axis=0)
        std_rate[scheme] = rates.std(axis=0)
        err_d = np.array([[[(o.est.d - o.true.d) if o.est else np.nan for o in r.objects]
                           for r in run] for run in runs])
        err_t = np.array([[[(o.est.theta - o.true.theta) if o.est else np.nan for o in r.objects]
                           for r in run] for run in runs])
        rmse_d[scheme] = np.sqrt(np.nanmean(err_d**2, axis=(0, 2)))
        rmse_theta[scheme] = np.sqrt(np.nanmean(err_t**2, axis=(0, 2)))
    return McSummary(tuple(records), tuple(seeds), mean_rate, std_rate, rmse_d, rmse_theta,
                     records)


# ---------------------------------------------------------------------------
# model checks


@dataclass(frozen=True)
class ApproxPoint:
    n: int
    exact: PolarState
    approx: PolarState


def approx_trajectory(config: SimConfig, n_slots: int, k: int = 0) -> list[ApproxPoint]:
    """Open-loop one-step evolution model against the exact kinematics, noise-free."""
    truth = Truth.start(config.replace(truth_model="exact"))
    approx = truth.polar[k]
    out = []
    for n in range(n_slots):
        out.append(ApproxPoint(n, truth.polar[k], approx))
        approx = evolve(approx, truth.uav, config.dT)
        truth = truth.step()
    return out
