"""Car-following dynamics of N vehicles on a ring of length L.

The state is (q, p): absolute positions and speeds.  Positions are never
wrapped; the ring enters only through the gap map, whose last entry
closes the loop with the constant L, so the gap vector always sums to L.
The speed equation combines relaxation toward a commanded speed (rate
gamma), speed alignment with both neighbours (rate beta), and interaction
forces from a distance potential evaluated on the gaps ahead and behind.
With a quadratic potential the drift is linear and is exposed as explicit
block matrices built from the periodic difference matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import InvalidInputError, UnsupportedOperationError


# ---------------------------------------------------------------------------
# control regimes


@dataclass(frozen=True)
class Uncontrolled:
    """No commanded speed; requires gamma == 0."""


@dataclass(frozen=True)
class OpenLoop:
    """Constant commanded speed x, identical for every vehicle."""

    x: float


@dataclass(frozen=True)
class ClosedLoop:
    """Commanded speed (gap - ell)/t_gap computed from the gap ahead."""

    ell: float
    t_gap: float

    def __post_init__(self):
        if not self.t_gap > 0:
            raise InvalidInputError(f"t_gap must be positive, got {self.t_gap}")
        if self.ell < 0:
            raise InvalidInputError(f"ell must be nonnegative, got {self.ell}")

    def target_speed(self, gap):
        return (gap - self.ell) / self.t_gap


ControlRegime = Union[Uncontrolled, OpenLoop, ClosedLoop]


# ---------------------------------------------------------------------------
# parameters and potentials


@dataclass(frozen=True)
class ModelParams:
    """Scalar constants of the ring model.

    n_vehicles and ring_length fix the geometry.  alpha is the potential
    stiffness (1/time), beta the speed-alignment rate (1/time), gamma the
    control relaxation rate (1/time) and sigma the noise volatility
    (length/time^(3/2)).  gamma must be exactly 0 for Uncontrolled and
    strictly positive for the two controlled regimes.
    """

    n_vehicles: int
    ring_length: float
    alpha: float
    beta: float
    gamma: float
    sigma: float
    regime: ControlRegime = Uncontrolled()

    def __post_init__(self):
        if self.n_vehicles < 2:
            raise InvalidInputError(f"need at least 2 vehicles, got {self.n_vehicles}")
        if not self.ring_length > 0:
            raise InvalidInputError(f"ring_length must be positive, got {self.ring_length}")
        for name in ("alpha", "beta", "gamma"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be nonnegative, got {getattr(self, name)}")
        if isinstance(self.regime, Uncontrolled) and self.gamma != 0:
            raise InvalidInputError("uncontrolled regime requires gamma == 0")
        if isinstance(self.regime, (OpenLoop, ClosedLoop)) and not self.gamma > 0:
            raise InvalidInputError("controlled regimes require gamma > 0")


@dataclass(frozen=True)
class Quadratic:
    """Distance potential 0.5*(alpha*x)**2 with derivative alpha**2 * x."""

    alpha: float

    def __post_init__(self):
        if self.alpha < 0:
            raise InvalidInputError(f"alpha must be nonnegative, got {self.alpha}")

    def value(self, x):
        return 0.5 * (self.alpha * x) ** 2

    def derivative(self, x):
        return self.alpha**2 * x


@dataclass(frozen=True)
class CustomDerivative:
    """Potential known only through its derivative.

    Usable in the drift (and hence the simulator) but rejected by every
    spectral operation.  The callable must act elementwise on arrays.
    ``value``, when given, enables energy evaluation.
    """

    derivative: Callable
    value: Optional[Callable] = None


PotentialSpec = Union[Quadratic, CustomDerivative]


def quadratic_potential(params: ModelParams) -> Quadratic:
    """The quadratic potential with the stiffness stored in params."""
    return Quadratic(params.alpha)


def potential_derivative(potential: PotentialSpec, x):
    if isinstance(potential, Quadratic):
        return potential.alpha**2 * x
    return potential.derivative(x)


# ---------------------------------------------------------------------------
# state


@dataclass(frozen=True)
class State:
    """Positions and speeds of the vehicles at one instant."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        p = np.array(self.p, dtype=float)
        if q.ndim != 1 or p.shape != q.shape:
            raise InvalidInputError("q and p must be 1-d arrays of equal length")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)


def _check_dims(state: State, params: ModelParams):
    if state.q.shape[-1] != params.n_vehicles:
        raise InvalidInputError(
            f"state has {state.q.shape[-1]} vehicles, params expect {params.n_vehicles}"
        )


# ---------------------------------------------------------------------------
# ring geometry and drift


def gaps_array(q: np.ndarray, ring_length: float) -> np.ndarray:
    """Gap map on raw position arrays; broadcasts over leading axes."""
    dq = np.roll(q, -1, axis=-1) - q
    dq[..., -1] += ring_length
    return dq


def gaps(state: State, params: ModelParams) -> np.ndarray:
    """Distances to the vehicle ahead; the last entry wraps with + L.

    The entries sum to ring_length identically (telescoping).
    """
    _check_dims(state, params)
    return gaps_array(state.q, params.ring_length)


def speed_gaps(state: State) -> np.ndarray:
    """Speed differences to the vehicle ahead; entries sum to zero."""
    if state.p.shape[-1] < 2:
        raise InvalidInputError("speed gaps need at least 2 vehicles")
    return np.roll(state.p, -1, axis=-1) - state.p


def acceleration_array(q, p, params: ModelParams, potential: PotentialSpec):
    """Speed drift on raw arrays; broadcasts over leading axes.

    Backward-difference terms (index n-1, wrapping to N at n=1) are
    rolls by +1.
    """
    gap = gaps_array(q, params.ring_length)
    dp = np.roll(p, -1, axis=-1) - p
    force = potential_derivative(potential, gap)
    acc = params.beta * (dp - np.roll(dp, 1, axis=-1)) + (force - np.roll(force, 1, axis=-1))
    regime = params.regime
    if isinstance(regime, OpenLoop):
        acc = acc + params.gamma * (regime.x - p)
    elif isinstance(regime, ClosedLoop):
        acc = acc + params.gamma * (regime.target_speed(gap) - p)
    return acc


def drift(state: State, params: ModelParams, potential: PotentialSpec):
    """Time derivatives (dq, dp) of the state.

    dq is the speed vector.  dp stacks the control relaxation, the
    alignment exchange with both neighbours and the potential forces from
    the gaps ahead and behind; the alignment and potential contributions
    telescope to zero over the ring.
    """
    _check_dims(state, params)
    return state.p.copy(), acceleration_array(state.q, state.p, params, potential)


def hamiltonian(state: State, params: ModelParams, potential: PotentialSpec) -> float:
    """Total energy: 0.5*||p||^2 plus the potential summed over the gaps."""
    _check_dims(state, params)
    if not isinstance(potential, Quadratic) and potential.value is None:
        raise UnsupportedOperationError(
            "energy needs the potential itself; this CustomDerivative has no value callable"
        )
    gap = gaps_array(state.q, params.ring_length)
    return 0.5 * float(state.p @ state.p) + float(np.sum(potential.value(gap)))


def hamiltonian_gradient(state: State, params: ModelParams, potential: PotentialSpec) -> np.ndarray:
    """Energy gradient in (gaps, speeds) coordinates: [alpha^2 * gaps, p].

    Defined for the quadratic potential only.
    """
    if not isinstance(potential, Quadratic):
        raise UnsupportedOperationError("the energy gradient is only available for quadratic potentials")
    _check_dims(state, params)
    gap = gaps_array(state.q, params.ring_length)
    return np.concatenate([potential.alpha**2 * gap, state.p])


# ---------------------------------------------------------------------------
# linear structure


def ring_difference_matrix(n: int) -> np.ndarray:
    """Forward difference with periodic wrap: -1 diagonal, +1 superdiagonal,
    +1 in the bottom-left corner."""
    a = -np.eye(n)
    a += np.diag(np.ones(n - 1), 1)
    a[-1, 0] = 1.0
    return a


def assemble_drift_matrix(n, alpha, beta, gamma, *, controlled, t_gap=None) -> np.ndarray:
    """Dense 2N x 2N drift matrix from scalar parameters.

    ``controlled`` adds the -gamma*I damping block; ``t_gap`` additionally
    adds the gap-feedback block (gamma/t_gap)*I in the lower left.
    """
    a = ring_difference_matrix(n)
    ata = a.T @ a
    eye = np.eye(n)
    lower_left = -(alpha**2) * a.T
    lower_right = -beta * ata
    if controlled:
        lower_right = lower_right - gamma * eye
    if t_gap is not None:
        lower_left = lower_left + (gamma / t_gap) * eye
    zero = np.zeros((n, n))
    return np.block([[zero, a], [lower_left, lower_right]])


@dataclass(frozen=True)
class PhsMatrices:
    """Explicit matrices of the linear (quadratic-potential) dynamics."""

    a: np.ndarray
    j_skew: np.ndarray
    r_dissip: np.ndarray
    b_drift: np.ndarray
    sigma_block: np.ndarray


def build_matrices(params: ModelParams) -> PhsMatrices:
    """Difference matrix A, interconnection J, dissipation R, regime drift
    matrix B and the noise block.

    b_drift acts on the shifted state (gaps, p - shift); see
    :func:`regime_speed_shift`.  Eigenvalues never depend on the shift.
    """
    n = params.n_vehicles
    a = ring_difference_matrix(n)
    zero = np.zeros((n, n))
    j_skew = np.block([[zero, a], [-a.T, zero]])
    r_dissip = np.block(
        [[zero, zero], [zero, params.beta * (a.T @ a) + params.gamma * np.eye(n)]]
    )
    regime = params.regime
    b_drift = assemble_drift_matrix(
        n,
        params.alpha,
        params.beta,
        params.gamma,
        controlled=isinstance(regime, (OpenLoop, ClosedLoop)),
        t_gap=regime.t_gap if isinstance(regime, ClosedLoop) else None,
    )
    sigma_block = np.vstack([zero, params.sigma * np.eye(n)])
    return PhsMatrices(a=a, j_skew=j_skew, r_dissip=r_dissip, b_drift=b_drift, sigma_block=sigma_block)


def regime_speed_shift(params: ModelParams) -> float:
    """Speed offset s such that b_drift acts on (gaps, p - s):
    0 when uncontrolled, x for open loop, -ell/t_gap for gap feedback."""
    regime = params.regime
    if isinstance(regime, OpenLoop):
        return regime.x
    if isinstance(regime, ClosedLoop):
        return -regime.ell / regime.t_gap
    return 0.0


def equilibrium_speed(params: ModelParams) -> float:
    """Common speed of the uniform steady state: 0 when uncontrolled
    (every common speed is steady; 0 is the convention), x for open loop,
    and the feedback target at the uniform gap for gap feedback."""
    regime = params.regime
    if isinstance(regime, OpenLoop):
        return regime.x
    if isinstance(regime, ClosedLoop):
        return regime.target_speed(params.ring_length / params.n_vehicles)
    return 0.0
