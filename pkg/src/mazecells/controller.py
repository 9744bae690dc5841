"""Closed-loop episode controller.

Each tick the agent senses at its current pose, evaluates the motion
circuit, learns (in train mode), then acts: a rising edge of the motion
output triggers a turn-in-place away from the nearest active cue, the
following tick steps straight along the escape heading, and any other
tick takes a bounded random-walk step.  Grid-cell rates and place
activity are pure functions of the pose and are logged alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import wrap_angle, walk_step
from .arena import (
    GRAVITY,
    Arena,
    CameraParams,
    Pose,
    WalkParams,
    _accel_at,
    color_sample,
    vibration_magnitude,
)
from .learning import CircuitParams, SynapseState, TickIO, motion_output, oja_update
from .spatialcells import (
    ConfigurationError,
    FiringParams,
    GridCellParams,
    PlaceCellParams,
    place_activity_at,
    rates_at,
)


@dataclass(frozen=True)
class EpisodeConfig:
    """Everything one seeded episode depends on."""

    arena: Arena
    walk: WalkParams
    camera: CameraParams
    firing: FiringParams
    circuit: CircuitParams
    grid_cells: tuple[GridCellParams, ...]
    place: PlaceCellParams
    tick_count: int
    seed: int
    vibration_enabled: bool = True
    learning_enabled: bool = True
    initial_w_color: float = 0.0
    noise_sigma: float = 0.3
    jitter_sigma: float = 0.3
    start_heading: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "grid_cells", tuple(self.grid_cells))
        if self.tick_count <= 0:
            raise ConfigurationError(f"tick_count must be positive, got {self.tick_count}")
        if int(self.seed) != self.seed:
            raise ConfigurationError("seed must be an integer")
        if self.noise_sigma < 0.0 or self.jitter_sigma < 0.0:
            raise ConfigurationError("noise scales must be >= 0")
        if self.walk.speed * self.walk.dt >= self.arena.radius:
            raise ConfigurationError("speed * dt must be smaller than the arena radius")


@dataclass
class EpisodeLog:
    """Per-tick record arrays of one episode plus event counters."""

    ticks: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    headings: np.ndarray
    accel: np.ndarray
    vibration: np.ndarray
    x_color: np.ndarray
    y_out: np.ndarray
    w_color: np.ndarray
    grid_rates: np.ndarray
    place_active: np.ndarray
    bumper_contacts: int
    avoidance_events: int

    @property
    def positions(self) -> np.ndarray:
        return np.column_stack([self.xs, self.ys])

    def __len__(self) -> int:
        return int(self.ticks.shape[0])


def avoidance_maneuver(pose: Pose, trigger_bearing: float, jitter_sigma: float, rng) -> Pose:
    """Turn in place to face away from the trigger (plus Gaussian jitter)."""
    if jitter_sigma < 0.0:
        raise ConfigurationError("jitter_sigma must be >= 0")
    z = float(rng.standard_normal())
    return Pose(
        pose.x, pose.y, wrap_angle(trigger_bearing + math.pi + jitter_sigma * z)
    )


def _trigger_bearing(x, y, heading, arena: Arena, vib_active: bool, color_active: bool) -> float:
    """Bearing toward the nearest active cue: a zone center for the
    vibration pathway, a wall-arc midpoint for the color pathway.  Falls
    back to the current heading (pure turnaround) if no cue exists."""
    best = None
    best_d2 = math.inf
    if vib_active:
        for z in arena.zones:
            d2 = (z.center_x - x) ** 2 + (z.center_y - y) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = (z.center_x, z.center_y)
    if color_active:
        for arc in arena.walls:
            p = arena.wall_point(arc.mid_angle)
            d2 = (p.x - x) ** 2 + (p.y - y) ** 2
            if d2 < best_d2:
                best_d2 = d2
                best = (p.x, p.y)
    if best is None:
        return heading
    return math.atan2(best[1] - y, best[0] - x)


def run_episode(cfg: EpisodeConfig) -> EpisodeLog:
    """Run one seeded episode and return its complete log.

    Identical configs and seeds reproduce bit-identical logs: all
    randomness is drawn up front from one PCG64 stream in a fixed layout
    (per tick: turn, wall-retry, three accelerometer axes, avoidance
    jitter as standard normals, then one uniform impulse direction), and
    every tick consumes by index whether or not a value is used.
    """
    T = cfg.tick_count
    rng = np.random.default_rng(int(cfg.seed))
    gauss = rng.standard_normal((T, 6))
    u_dir = rng.uniform(-math.pi, math.pi, T)

    step = cfg.walk.speed * cfg.walk.dt
    arena = cfg.arena
    cam = cfg.camera
    circuit = cfg.circuit

    xs = np.empty(T)
    ys = np.empty(T)
    headings = np.empty(T)
    accel = np.empty((T, 3))
    vibration = np.empty(T)
    x_color = np.empty(T)
    y_out = np.zeros(T, dtype=np.int8)
    w_trace = np.empty(T)

    x, y, h = 0.0, 0.0, wrap_angle(cfg.start_heading)
    w = float(cfg.initial_w_color)
    y_prev = 0
    escaping = False
    bumper = 0
    events = 0

    for t in range(T):
        if cfg.vibration_enabled:
            ax, ay, az = _accel_at(
                x, y, arena, cfg.noise_sigma,
                gauss[t, 2], gauss[t, 3], gauss[t, 4], u_dir[t],
            )
        else:
            ax, ay, az = 0.0, 0.0, GRAVITY
        vib = vibration_magnitude((ax, ay, az))
        xc = color_sample(Pose(x, y, h), arena, cam)
        syn = SynapseState(w)
        yt = motion_output(vib, xc, syn, circuit)
        io = TickIO(vib, xc, yt)

        if arena.zone_index_at(x, y) >= 0:
            bumper += 1
        if yt == 1 and y_prev == 0:
            events += 1

        xs[t] = x
        ys[t] = y
        headings[t] = h
        accel[t, 0] = ax
        accel[t, 1] = ay
        accel[t, 2] = az
        vibration[t] = vib
        x_color[t] = xc
        y_out[t] = yt

        if cfg.learning_enabled:
            w = oja_update(syn, xc, yt, circuit.eta).w_color
        w_trace[t] = w

        if t < T - 1:
            if yt == 1 and y_prev == 0:
                vib_active = vib >= circuit.vibration_threshold
                color_active = io.x_color * syn.w_color >= circuit.color_activation_threshold
                tb = _trigger_bearing(x, y, h, arena, vib_active, color_active)
                h = wrap_angle(tb + math.pi + cfg.jitter_sigma * gauss[t, 5])
                escaping = True
            else:
                # The step right after a turn-in-place holds the commanded
                # heading; wobbling it would let the walk linger in the
                # zone it just turned away from.
                sigma = 0.0 if escaping else cfg.walk.turn_sigma
                x, y, h = walk_step(
                    x, y, h, step, sigma, arena.radius,
                    gauss[t, 0], gauss[t, 1],
                )
                escaping = False
        y_prev = yt

    positions = np.column_stack([xs, ys])
    grid_rates = np.empty((T, len(cfg.grid_cells)))
    for i, cell in enumerate(cfg.grid_cells):
        grid_rates[:, i] = rates_at(positions, cell, cfg.firing)
    place = place_activity_at(positions, cfg.place, cfg.firing)

    return EpisodeLog(
        ticks=np.arange(T, dtype=np.int64),
        xs=xs,
        ys=ys,
        headings=headings,
        accel=accel,
        vibration=vibration,
        x_color=x_color,
        y_out=y_out,
        w_color=w_trace,
        grid_rates=grid_rates,
        place_active=place,
        bumper_contacts=bumper,
        avoidance_events=events,
    )
