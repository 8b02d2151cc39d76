import math

import numpy as np
import pytest

from uavisac.config import ObjectSpec, SimConfig
from uavisac.phy import ArrayGeometry, channel_vector, directional_sinr, omni_sinr, rate
from uavisac.sim import (FrameSchedule, RunState, measurement_rng, run_frame_boundary,
                         run_monte_carlo, run_pilot_baseline, run_proposed, run_scheme,
                         run_waterfilling_baseline)
from uavisac.tracker import TrackState
from uavisac.world import UavState

DESK = SimConfig(N_t=16, N_r=16)
N_SLOTS = 12  # one full frame plus the first two slots of the next


@pytest.fixture(scope="module")
def runs():
    return {s: run_scheme(s, DESK, 3, N_SLOTS) for s in ("proposed", "pilot", "waterfilling")}


def _static(**kw):
    base = dict(N_t=8, N_r=8, v_u=0.0, objects=(ObjectSpec(60.0, 0.0, 0.0),),
                meas_noise_scale=0.0, truth_model="matched")
    base.update(kw)
    return SimConfig(**base)


def test_frame_schedule():
    s = FrameSchedule(10)
    assert s.position(0) == (1, 1)
    assert s.position(9) == (1, 10)
    assert s.position(10) == (2, 1)
    assert FrameSchedule.covering(25, 10).n_frames == 3
    with pytest.raises(ValueError):
        FrameSchedule(1)


def test_measurement_streams_are_keyed():
    a = measurement_rng(7, 0, 3).standard_normal(3)
    assert np.array_equal(a, measurement_rng(7, 0, 3).standard_normal(3))
    assert not np.array_equal(a, measurement_rng(7, 1, 3).standard_normal(3))
    assert not np.array_equal(a, measurement_rng(7, 0, 4).standard_normal(3))


def test_slot_one_is_omni(runs):
    rec = runs["proposed"][0]
    K = len(rec.objects)
    for o in rec.objects:
        assert o.rate == rate(omni_sinr(o.true.d, K, DESK.alpha0, DESK.P_T, DESK.sigma_c2))
    assert rec.status == "omni"


def test_directional_slot_beats_omni(runs):
    p = runs["proposed"]
    assert p[1].sum_rate > p[0].sum_rate


def test_directional_beams_shrink_measurement_noise(runs):
    first, second = runs["proposed"][:2]
    for a, b in zip(first.objects, second.objects):
        assert b.radar_snr > a.radar_snr
        assert b.meas.var_tau < a.meas.var_tau
        assert b.meas.var_mu < a.meas.var_mu


def test_realized_rates_use_true_channels(runs):
    geom = ArrayGeometry.from_config(DESK)
    for scheme in ("proposed", "waterfilling", "pilot"):
        for rec in runs[scheme][1:10]:
            for k, o in enumerate(rec.objects):
                h = channel_vector(o.true.theta, o.true.d, geom, DESK.alpha0)
                assert o.rate == pytest.approx(rate(directional_sinr(h, rec.tx, k, 1.0)), rel=1e-12)


def test_records_are_totally_ordered(runs):
    for recs in runs.values():
        keys = [(r.run, r.frame, r.slot) for r in recs]
        assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_mse_symmetric_psd(runs):
    for recs in runs.values():
        for rec in recs:
            for o in rec.objects:
                if o.mse is not None:
                    assert np.array_equal(o.mse, o.mse.T)
                    assert np.linalg.eigvalsh(o.mse).min() >= 0


def test_common_random_numbers(runs):
    ref = runs["proposed"]
    for scheme in ("pilot", "waterfilling"):
        for a, b in zip(ref, runs[scheme]):
            assert [o.true for o in a.objects] == [o.true for o in b.objects]
    # identical omni slots draw identical noise
    assert [o.meas for o in ref[0].objects] == [o.meas for o in runs["waterfilling"][0].objects]


# -- frame boundary

def test_boundary_stationary_prediction():
    cfg = _static()
    state = RunState.fresh(cfg, 0)
    P = np.diag([1e-12, 1e-6, 1e-6])
    state.tracks = [TrackState(np.array([1.0, 120.0, 0.0]), P)]
    uav = UavState(100.0, 0.0, 0.0, cfg.theta_u)
    state.uav_history = [uav, uav]
    (nxt,) = run_frame_boundary(state)
    assert np.allclose(nxt.e, [1.0, 120.0, 0.0], rtol=0, atol=1e-12)
    grow = np.trace(nxt.mse) - np.trace(P)
    assert grow == pytest.approx(2 * np.trace(state.noise.Q_s), rel=1e-3)


def test_boundary_rate_recovers(runs):
    p = runs["proposed"]
    assert (p[10].frame, p[10].slot) == (2, 1)
    assert p[11].sum_rate >= 0.9 * p[9].sum_rate


# -- baselines

def test_pilot_loses_slot_one(runs):
    pilot = runs["pilot"]
    assert pilot[0].sum_rate == 0.0 and pilot[10].sum_rate == 0.0


def test_pilot_slot_two_matches_proposed(runs):
    # same single estimate, same optimiser
    assert runs["pilot"][1].sum_rate == pytest.approx(runs["proposed"][1].sum_rate, rel=1e-9)


def test_pilot_holds_its_beams(runs):
    pilot = runs["pilot"]
    for rec in pilot[2:10]:
        assert np.array_equal(rec.tx, pilot[1].tx)
        assert rec.status == "held"


@pytest.mark.xfail(strict=True, reason="held beams keep covering the objects on this scenario; "
                   "the pilot rate rises slightly as the UAV closes distance")
def test_pilot_rate_declines_within_frame(runs):
    rates = [r.sum_rate for r in runs["pilot"][1:10]]
    assert rates[-1] <= rates[0]


def test_waterfilling_wins_with_perfect_prediction():
    cfg = _static(v_u=15.0, objects=(ObjectSpec(60.0, 10.0, 0.0),))
    prop = run_proposed(cfg, 0, 10)
    wf = run_waterfilling_baseline(cfg, 0, 10)
    for a, b in zip(prop[2:], wf[2:]):
        assert b.sum_rate >= a.sum_rate - 1e-9


def test_static_world_constant_rate():
    recs = run_proposed(_static(), 0, 8)
    for rec in recs:
        for o in rec.objects:
            assert (o.est.theta, o.est.d, o.est.v) == pytest.approx(
                (o.true.theta, o.true.d, o.true.v), abs=1e-9)
    # slot 2 still carries the wide initial covariance; after one update the design is fixed
    settled = [r.sum_rate for r in recs[2:]]
    assert max(settled) - min(settled) <= 1e-9


# -- Monte Carlo

def test_monte_carlo_single_seed_equals_run(runs):
    s = run_monte_carlo(DESK, [3], N_SLOTS, ("proposed",))
    assert np.array_equal(s.mean_rate["proposed"], [r.sum_rate for r in runs["proposed"]])
    assert np.all(s.std_rate["proposed"] == 0)
    ref = runs["proposed"]
    assert [r.sum_rate for r in s.records["proposed"][0]] == [r.sum_rate for r in ref]
    assert all(np.array_equal(a.tx, b.tx) for a, b in zip(s.records["proposed"][0], ref))


def test_monte_carlo_deterministic_and_parallel_safe():
    cfg = _static(v_u=15.0, objects=(ObjectSpec(60.0, 10.0, 0.0),), meas_noise_scale=1.0,
                  truth_model="exact")
    a = run_monte_carlo(cfg, [1, 2], 4, ("proposed", "pilot"))
    b = run_monte_carlo(cfg, [1, 2], 4, ("proposed", "pilot"), threads=2)
    for s in a.schemes:
        assert np.array_equal(a.mean_rate[s], b.mean_rate[s])
        assert np.array_equal(a.rmse_d[s], b.rmse_d[s], equal_nan=True)
    assert np.all(np.isinf(a.improvement()[[0]]))


def test_monte_carlo_rejects_bad_input():
    with pytest.raises(ValueError):
        run_monte_carlo(DESK, [], 2)
    with pytest.raises(ValueError):
        run_monte_carlo(DESK, [0], 2, ("beamsteer",))
