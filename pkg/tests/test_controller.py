"""Closed-loop episode behavior: determinism, reflexes, learning hygiene."""

import dataclasses
import math

import numpy as np
import pytest

from mazecells.arena import Arena, CameraParams, Pose, WalkParams, WallArc, ZoneDisc
from mazecells.controller import EpisodeConfig, avoidance_maneuver, run_episode
from mazecells.learning import CircuitParams
from mazecells.spatialcells import (
    ConfigurationError,
    FiringParams,
    GridCellParams,
    PlaceCellParams,
    anchored_ensemble,
)


def make_config(arena, **kw):
    cells = (GridCellParams(1.0, math.pi / 4, 0.5, 0.0),)
    place = PlaceCellParams(anchored_ensemble(np.geomspace(0.3, 1.2, 8), (0.35, 0.2)), 6.4)
    base = dict(
        arena=arena,
        walk=WalkParams(),
        camera=CameraParams(),
        firing=FiringParams(),
        circuit=CircuitParams(),
        grid_cells=cells,
        place=place,
        tick_count=500,
        seed=0,
        vibration_enabled=True,
        learning_enabled=True,
        initial_w_color=0.0,
        noise_sigma=0.3,
        jitter_sigma=0.3,
    )
    base.update(kw)
    return EpisodeConfig(**base)


@pytest.fixture
def quiet_arena():
    return Arena(radius=1.3)


@pytest.fixture
def reflex_arena():
    # noise-free shuttle: zone on the +x axis, no walls, all noise zero
    return Arena(radius=1.3, zones=(ZoneDisc(0.8, 0.0, 0.25, 8.0),))


def test_avoidance_maneuver_turns_away_exactly():
    pose = Pose(0.3, 0.2, 0.5)
    rng = np.random.default_rng(0)
    out = avoidance_maneuver(pose, 0.5, 0.0, rng)
    assert (out.x, out.y) == (0.3, 0.2)
    assert abs(out.heading - (0.5 - math.pi)) < 1e-12


def test_avoidance_maneuver_jitter_uses_rng():
    pose = Pose(0.0, 0.0, 0.0)
    a = avoidance_maneuver(pose, 0.0, 0.3, np.random.default_rng(1))
    b = avoidance_maneuver(pose, 0.0, 0.3, np.random.default_rng(1))
    c = avoidance_maneuver(pose, 0.0, 0.3, np.random.default_rng(2))
    assert a.heading == b.heading
    assert a.heading != c.heading


def test_episode_bitwise_deterministic(quiet_arena):
    cfg = make_config(quiet_arena, tick_count=800, seed=14)
    a = run_episode(cfg)
    b = run_episode(cfg)
    for name in ("xs", "ys", "headings", "vibration", "x_color", "w_color", "accel"):
        assert np.array_equal(getattr(a, name), getattr(b, name))
    assert a.bumper_contacts == b.bumper_contacts
    assert a.avoidance_events == b.avoidance_events


def test_episode_length_and_first_row(quiet_arena):
    log = run_episode(make_config(quiet_arena, tick_count=64, start_heading=0.25))
    assert len(log) == 64
    assert log.xs[0] == 0.0 and log.ys[0] == 0.0
    assert abs(log.headings[0] - 0.25) < 1e-12
    assert log.grid_rates.shape == (64, 1)
    assert log.place_active.shape == (64,)


def test_no_stimuli_keeps_weight_at_zero(quiet_arena):
    log = run_episode(make_config(quiet_arena, tick_count=400, seed=3))
    assert np.all(log.w_color == 0.0)
    assert log.avoidance_events == 0
    assert log.bumper_contacts == 0
    assert np.all(log.y_out == 0)


def test_learning_disabled_freezes_weight(quiet_arena):
    arena = Arena(
        radius=1.3,
        zones=(ZoneDisc(0.8, 0.0, 0.25, 8.0),),
        walls=(WallArc(-0.8, 0.8, "red"),),
    )
    log = run_episode(
        make_config(arena, tick_count=600, seed=5, learning_enabled=False, initial_w_color=0.7)
    )
    assert np.all(log.w_color == 0.7)


def test_vibration_disabled_forces_exact_zero(quiet_arena):
    arena = Arena(radius=1.3, zones=(ZoneDisc(0.3, 0.0, 0.4, 8.0),))
    log = run_episode(
        make_config(arena, tick_count=300, seed=2, vibration_enabled=False, noise_sigma=0.3)
    )
    assert np.all(log.vibration == 0.0)
    assert np.all(log.accel[:, 0] == 0.0)
    assert np.all(log.accel[:, 2] == 9.81)


def test_reflex_every_vibration_spike_fires_output(reflex_arena):
    cfg = make_config(
        reflex_arena,
        tick_count=4000,
        seed=0,
        walk=WalkParams(speed=0.2, dt=0.1, turn_sigma=0.0),
        noise_sigma=0.0,
        jitter_sigma=0.0,
        learning_enabled=False,
    )
    log = run_episode(cfg)
    spikes = log.vibration >= 5.0
    assert spikes.any()
    assert np.all(log.y_out[spikes] == 1)


def test_reflex_never_more_than_two_consecutive_zone_ticks(reflex_arena):
    cfg = make_config(
        reflex_arena,
        tick_count=4000,
        seed=0,
        walk=WalkParams(speed=0.2, dt=0.1, turn_sigma=0.0),
        noise_sigma=0.0,
        jitter_sigma=0.0,
        learning_enabled=False,
    )
    log = run_episode(cfg)
    inside = np.array(
        [reflex_arena.zone_index_at(x, y) >= 0 for x, y in zip(log.xs, log.ys)]
    )
    assert inside.sum() == log.bumper_contacts
    run = best = 0
    for v in inside:
        run = run + 1 if v else 0
        best = max(best, run)
    assert 0 < best <= 2


def test_avoidance_event_counts_rising_edges(reflex_arena):
    cfg = make_config(
        reflex_arena,
        tick_count=4000,
        seed=0,
        walk=WalkParams(speed=0.2, dt=0.1, turn_sigma=0.0),
        noise_sigma=0.0,
        jitter_sigma=0.0,
        learning_enabled=False,
    )
    log = run_episode(cfg)
    y = log.y_out.astype(int)
    edges = int(y[0] == 1) + int(((y[1:] == 1) & (y[:-1] == 0)).sum())
    assert log.avoidance_events == edges > 0


def test_turn_tick_keeps_position(reflex_arena):
    cfg = make_config(
        reflex_arena,
        tick_count=4000,
        seed=0,
        walk=WalkParams(speed=0.2, dt=0.1, turn_sigma=0.0),
        noise_sigma=0.0,
        jitter_sigma=0.0,
        learning_enabled=False,
    )
    log = run_episode(cfg)
    y = log.y_out.astype(int)
    rising = np.where((y[1:] == 1) & (y[:-1] == 0))[0] + 1
    for t in rising:
        if t + 1 < len(log):
            assert log.xs[t + 1] == log.xs[t]
            assert log.ys[t + 1] == log.ys[t]
            # and the new heading points away from the zone center
            away = math.atan2(0.0 - log.ys[t], 0.8 - log.xs[t]) + math.pi
            d = (log.headings[t + 1] - away + math.pi) % (2 * math.pi) - math.pi
            assert abs(d) < 1e-9


def test_weight_trace_never_drops_more_than_eta(paired_cue_arena):
    cfg = make_config(paired_cue_arena, tick_count=6000, seed=21)
    log = run_episode(cfg)
    drops = np.diff(log.w_color)
    assert drops.min() >= -cfg.circuit.eta - 1e-12
    assert log.w_color[-1] > 0.0


def test_transfer_round_trip(paired_cue_arena):
    train = run_episode(make_config(paired_cue_arena, tick_count=10000, seed=100))
    w = float(train.w_color[-1])
    assert w >= 0.3
    test = run_episode(
        make_config(
            paired_cue_arena,
            tick_count=10000,
            seed=200,
            vibration_enabled=False,
            learning_enabled=False,
            initial_w_color=w,
        )
    )
    assert test.bumper_contacts == 0
    assert test.avoidance_events > 0
    assert np.all(test.w_color == w)


def test_config_validation(quiet_arena):
    with pytest.raises(ConfigurationError):
        make_config(quiet_arena, tick_count=0)
    with pytest.raises(ConfigurationError):
        make_config(quiet_arena, seed=0.5)
    with pytest.raises(ConfigurationError):
        make_config(quiet_arena, jitter_sigma=-1.0)
    with pytest.raises(ConfigurationError):
        make_config(Arena(radius=0.01))
