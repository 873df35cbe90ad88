"""Trajectory observables and closed-form mean-speed moment laws.

The ensemble mean speed decouples from the interactions (they telescope
over the ring), leaving only the control relaxation and the aggregated
noise with effective volatility sigma/sqrt(N):

    uncontrolled:  d pbar = (sigma/N) sum_n dW_n          (diffusion)
    open loop:     d pbar = gamma*(x - pbar) dt + (sigma/N) sum_n dW_n

so Var[pbar(t)] = sigma^2 t / N without control and
(sigma^2/(2 gamma N)) (1 - exp(-2 gamma t)) under constant speed control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidInputError, UnsupportedOperationError
from .model import (
    ControlRegime,
    ModelParams,
    OpenLoop,
    PotentialSpec,
    Quadratic,
    Uncontrolled,
    gaps_array,
)
from .sde import TimeSeries
from .spectral import deviation_matrix


@dataclass(frozen=True)
class ObservableSeries:
    """Per-sample scalars derived from a trajectory."""

    times: np.ndarray
    mean_speed: np.ndarray
    speed_variance: np.ndarray
    single_vehicle_speed: np.ndarray
    hamiltonian: np.ndarray


def observables(ts: TimeSeries, potential: Optional[PotentialSpec] = None) -> ObservableSeries:
    """Mean speed, speed variance (1/(N-1) normalization), the first
    vehicle's speed, and the energy at every sample.

    The potential defaults to the quadratic one implied by the params.
    """
    n = ts.params.n_vehicles
    if n < 2:
        raise InvalidInputError("speed variance needs at least 2 vehicles")
    if len(ts.states) == 0:
        raise InvalidInputError("empty trajectory")
    if potential is None:
        potential = Quadratic(ts.params.alpha)
    if not isinstance(potential, Quadratic) and potential.value is None:
        raise UnsupportedOperationError("energy needs a potential with a value callable")
    speeds = ts.speeds()
    gaps = gaps_array(ts.positions(), ts.params.ring_length)
    energy = 0.5 * (speeds**2).sum(axis=1) + potential.value(gaps).sum(axis=1)
    return ObservableSeries(
        times=ts.times.copy(),
        mean_speed=speeds.mean(axis=1),
        speed_variance=speeds.var(axis=1, ddof=1),
        single_vehicle_speed=speeds[:, 0].copy(),
        hamiltonian=energy,
    )


@dataclass(frozen=True)
class MomentLaw:
    """Mean and variance of the ensemble mean speed as functions of t."""

    regime: ControlRegime
    mean_of_mean_speed: Callable
    variance_of_mean_speed: Callable
    stationary_variance: Optional[float]


def mean_speed_law(params: ModelParams, initial_mean_speed: float = 0.0) -> MomentLaw:
    """Closed-form moments of the mean speed (see the module docstring).

    Undefined under gap feedback, where the mean speed is not autonomous.
    """
    sig2n = params.sigma**2 / params.n_vehicles
    p0 = float(initial_mean_speed)
    if isinstance(params.regime, Uncontrolled):
        return MomentLaw(
            regime=params.regime,
            mean_of_mean_speed=lambda t: p0 + 0.0 * np.asarray(t, dtype=float),
            variance_of_mean_speed=lambda t: sig2n * np.asarray(t, dtype=float),
            stationary_variance=None,
        )
    if isinstance(params.regime, OpenLoop):
        x = params.regime.x
        gam = params.gamma
        stationary = sig2n / (2.0 * gam)
        return MomentLaw(
            regime=params.regime,
            mean_of_mean_speed=lambda t: x + (p0 - x) * np.exp(-gam * np.asarray(t, dtype=float)),
            variance_of_mean_speed=lambda t: stationary
            * (1.0 - np.exp(-2.0 * gam * np.asarray(t, dtype=float))),
            stationary_variance=stationary,
        )
    raise UnsupportedOperationError("the mean speed is not autonomous under gap feedback")


def deviation_process(ts: TimeSeries) -> np.ndarray:
    """Speeds with the per-sample mean removed: row t is M @ p(t) for the
    mean-removing projector M.  Rows sum to zero."""
    m = deviation_matrix(ts.params.n_vehicles)
    return ts.speeds() @ m.T
