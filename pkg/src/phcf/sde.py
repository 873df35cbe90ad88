"""Euler-Maruyama integration of the ring SDE.

Speeds update explicitly with the drift and the scaled noise increment;
positions then update with the fresh speeds (the position update is
implicit in the coupling), which keeps the mean-speed recursion exact
under discretization.

Noise comes from counter-based Philox streams read in fixed blocks, so
the increment at a given step is a pure function of (seed, step, vehicle):
trajectories are bit-reproducible and ensemble members are independent of
each other and of how many of them run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .errors import InvalidInputError, NumericalBlowupError
from .model import (
    ModelParams,
    PotentialSpec,
    State,
    acceleration_array,
    equilibrium_speed,
    gaps_array,
)

# Steps per Philox counter block; the block index is the stream counter.
NOISE_BLOCK = 256
# Speeds beyond this abort the run (gap-feedback runs genuinely diverge).
BLOWUP_LIMIT = 1e8


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class UniformStationary:
    """Evenly spaced vehicles at the regime's equilibrium speed."""


@dataclass(frozen=True)
class UniformZeroSpeed:
    """Evenly spaced vehicles at rest."""


@dataclass(frozen=True)
class Explicit:
    """Caller-supplied positions and speeds; positions must be strictly
    increasing within [0, ring_length)."""

    q: np.ndarray
    p: np.ndarray


InitialCondition = Union[UniformStationary, UniformZeroSpeed, Explicit]


@dataclass(frozen=True)
class SimConfig:
    """Integration window, sampling, seed and start state."""

    dt: float
    t_end: float
    sample_stride: int = 1
    seed: int = 0
    initial: InitialCondition = UniformZeroSpeed()

    def __post_init__(self):
        if not self.dt > 0:
            raise InvalidInputError(f"dt must be positive, got {self.dt}")
        if not self.t_end >= self.dt:
            raise InvalidInputError("t_end must be at least dt")
        if self.sample_stride < 1:
            raise InvalidInputError(f"sample_stride must be >= 1, got {self.sample_stride}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class TimeSeries:
    """Sampled trajectory of one run.

    overtake_flag records whether any recorded sample had a non-positive
    gap (permitted by the quadratic potential, flagged as a diagnostic).
    A run that left the finite range is truncated at its last valid
    sample and carries blowup_step/blowup_time.
    """

    times: np.ndarray
    states: tuple
    params: ModelParams
    config: SimConfig
    overtake_flag: bool
    blowup_step: Optional[int] = None
    blowup_time: Optional[float] = None

    def positions(self) -> np.ndarray:
        """Samples-by-vehicles matrix of positions."""
        return np.stack([s.q for s in self.states])

    def speeds(self) -> np.ndarray:
        """Samples-by-vehicles matrix of speeds."""
        return np.stack([s.p for s in self.states])


def initial_state(params: ModelParams, initial: InitialCondition) -> State:
    """Concrete start state for a configuration."""
    n = params.n_vehicles
    length = params.ring_length
    if isinstance(initial, Explicit):
        q = np.asarray(initial.q, dtype=float)
        p = np.asarray(initial.p, dtype=float)
        if q.shape != (n,) or p.shape != (n,):
            raise InvalidInputError(f"explicit initial state must have {n} entries")
        if not (q[0] >= 0 and q[-1] < length and np.all(np.diff(q) > 0)):
            raise InvalidInputError("positions must be strictly increasing within [0, ring_length)")
        return State(q, p)
    q = np.arange(n) * (length / n)
    if isinstance(initial, UniformZeroSpeed):
        return State(q, np.zeros(n))
    return State(q, np.full(n, equilibrium_speed(params)))


# ---------------------------------------------------------------------------
# noise


def noise_block(seed: int, block_index: int, n_vehicles: int, block_steps: int = NOISE_BLOCK) -> np.ndarray:
    """Standard-normal draws for block_steps consecutive steps of one run."""
    gen = np.random.Generator(np.random.Philox(key=seed, counter=block_index << 64))
    return gen.standard_normal((block_steps, n_vehicles))


def step_noise(seed: int, step: int, n_vehicles: int) -> np.ndarray:
    """The noise vector consumed at one step; pure function of its key."""
    return noise_block(seed, step // NOISE_BLOCK, n_vehicles)[step % NOISE_BLOCK]


def derive_run_seed(seed: int, run_index: int) -> int:
    """Decorrelated 64-bit seed folded from (seed, run_index)."""
    return int(np.random.SeedSequence([seed, run_index]).generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# stepping


def step(state: State, params: ModelParams, potential: PotentialSpec, dt: float,
         noise: np.ndarray, step_index: Optional[int] = None) -> State:
    """One update: p gains dt*drift + sigma*sqrt(dt)*noise, then q
    advances with the updated p.  noise holds raw standard-normal draws.
    """
    noise = np.asarray(noise, dtype=float)
    if noise.shape != state.p.shape:
        raise InvalidInputError(f"noise must have shape {state.p.shape}, got {noise.shape}")
    acc = acceleration_array(state.q, state.p, params, potential)
    p_new = state.p + dt * acc + params.sigma * math.sqrt(dt) * noise
    q_new = state.q + dt * p_new
    if (
        not (np.isfinite(p_new).all() and np.isfinite(q_new).all())
        or np.abs(p_new).max() > BLOWUP_LIMIT
    ):
        raise NumericalBlowupError(
            "state left the finite range after one step",
            step=step_index,
            time=None if step_index is None else (step_index + 1) * dt,
        )
    return State(q_new, p_new)


def _step_count(dt: float, t_end: float) -> int:
    # ceil(t_end/dt), robust to dt dividing t_end up to rounding
    exact = t_end / dt
    return int(math.ceil(exact * (1.0 - 1e-12)))


def _integrate(params: ModelParams, potential: PotentialSpec, config: SimConfig, seeds):
    """Shared engine: advances len(seeds) runs in lockstep as the rows of
    (runs, N) arrays.  All update arithmetic is elementwise, so each row
    is bit-identical to a single run with the same seed."""
    n = params.n_vehicles
    length = params.ring_length
    runs = len(seeds)
    start = initial_state(params, config.initial)
    q = np.tile(start.q, (runs, 1))
    p = np.tile(start.p, (runs, 1))

    dt = config.dt
    stride = config.sample_stride
    n_steps = _step_count(dt, config.t_end)
    n_samples = n_steps // stride + 1
    q_samples = np.empty((n_samples, runs, n))
    p_samples = np.empty((n_samples, runs, n))
    overtake = np.zeros(runs, dtype=bool)
    blow_step = np.full(runs, -1, dtype=np.int64)
    valid = np.zeros(runs, dtype=np.int64)
    active = np.ones(runs, dtype=bool)

    sig_sqdt = params.sigma * math.sqrt(dt)
    block = None
    k = 0
    for s in range(n_steps + 1):
        if s % stride == 0 and k < n_samples:
            q_samples[k] = q
            p_samples[k] = p
            overtake |= active & (gaps_array(q, length).min(axis=1) <= 0)
            valid[active] = k + 1
            k += 1
        if s == n_steps:
            break
        if s % NOISE_BLOCK == 0:
            block = np.stack(
                [noise_block(seed, s // NOISE_BLOCK, n) for seed in seeds], axis=1
            )
        acc = acceleration_array(q, p, params, potential)
        p = p + dt * acc + sig_sqdt * block[s % NOISE_BLOCK]
        q = q + dt * p
        if active.any():
            bad = active & (
                ~np.isfinite(p).all(axis=1)
                | ~np.isfinite(q).all(axis=1)
                | (np.abs(p).max(axis=1) > BLOWUP_LIMIT)
            )
            if bad.any():
                blow_step[bad] = s + 1
                active &= ~bad
                # freeze dead rows; they are truncated on extraction
                q[bad] = 0.0
                p[bad] = 0.0

    times = np.arange(n_samples) * (stride * dt)
    out = []
    for r, seed in enumerate(seeds):
        v = int(valid[r])
        bstep = None if blow_step[r] < 0 else int(blow_step[r])
        out.append(
            TimeSeries(
                times=times[:v],
                states=tuple(State(q_samples[i, r], p_samples[i, r]) for i in range(v)),
                params=params,
                config=replace(config, seed=seed),
                overtake_flag=bool(overtake[r]),
                blowup_step=bstep,
                blowup_time=None if bstep is None else bstep * dt,
            )
        )
    return out


def simulate(params: ModelParams, potential: PotentialSpec, config: SimConfig) -> TimeSeries:
    """Integrate one trajectory, sampling every sample_stride steps
    (including the start).  Deterministic in (params, config).

    Raises NumericalBlowupError with the partial series attached if the
    state leaves the finite range.
    """
    series = _integrate(params, potential, config, [config.seed])[0]
    if series.blowup_step is not None:
        raise NumericalBlowupError(
            f"state left the finite range at t={series.blowup_time:g} "
            f"(step {series.blowup_step})",
            step=series.blowup_step,
            time=series.blowup_time,
            partial=series,
        )
    return series


def run_ensemble(params: ModelParams, potential: PotentialSpec, config: SimConfig, n_runs: int):
    """Independent trajectories under per-run seeds folded from
    config.seed and the run index, ordered by run index.

    A run that blows up comes back truncated with its blowup fields set;
    it does not abort the ensemble.
    """
    if n_runs < 1:
        raise InvalidInputError(f"n_runs must be >= 1, got {n_runs}")
    seeds = [derive_run_seed(config.seed, r) for r in range(n_runs)]
    return _integrate(params, potential, config, seeds)


def max_gap_closure_error(ts: TimeSeries) -> float:
    """Largest |sum(gaps) - ring_length| over the recorded samples."""
    g = gaps_array(ts.positions(), ts.params.ring_length)
    return float(np.abs(g.sum(axis=1) - ts.params.ring_length).max())
