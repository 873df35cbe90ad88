"""Closed-form spectra and stability conditions of the linear ring dynamics.

Every N x N block of the drift matrix is circulant, so its characteristic
polynomial factors over the N Fourier modes.  Mode j contributes the
quadratic

    lambda^2 + (beta*mu_j + gamma)*lambda + alpha^2*mu_j + coupling_j = 0

with mu_j = 2 - 2*cos(2*pi*j/N) and, for gap feedback only, the complex
coupling (gamma/t_gap)*(1 - omega^j), omega = exp(2i*pi/N).  The two roots
per mode are labelled by a branch bit k.  Mode 0 always carries structural
zero eigenvalues: a double zero without control, a single zero otherwise.

Stability of the gap-feedback regime follows from the Hurwitz test for
quadratics with complex coefficients, evaluated mode by mode; a parameter-
only sufficient condition is gamma*T + 2*(alpha*T)^2 > 2.

Everything here is cross-checkable against a generic dense eigensolver,
exposed as :func:`dense_eigen_oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EigenSolverError, InvalidInputError
from .model import (
    ClosedLoop,
    ControlRegime,
    ModelParams,
    OpenLoop,
    Uncontrolled,
    assemble_drift_matrix,
)

# Structural zeros are exact in the closed form; the dense oracle rounds
# far below this at desk scale.
ZERO_EIGENVALUE_RTOL = 1e-10
# Strict inequalities give no verdict on the boundary: report as marginal.
MARGINAL_ABSCISSA = 1e-10


class ModeIndex(NamedTuple):
    j: int
    k: int


@dataclass(frozen=True)
class Spectrum:
    """The 2N eigenvalues of the drift matrix, labelled by (mode, branch)."""

    entries: tuple
    regime: ControlRegime

    @property
    def values(self) -> np.ndarray:
        return np.array([lam for _, lam in self.entries], dtype=complex)

    def __len__(self):
        return len(self.entries)


def mu(j: int, n: int) -> float:
    """Circulant mode factor 2 - 2*cos(2*pi*j/n), in [0, 4]."""
    if not 0 <= j < n:
        raise InvalidInputError(f"mode index {j} outside [0, {n})")
    return 2.0 - 2.0 * math.cos(2.0 * math.pi * j / n)


def _mode_roots(lin, const):
    """Roots of x^2 + lin*x + const via the complex quadratic formula,
    ordered (+sqrt, -sqrt).  Exact zeros are preserved when const == 0."""
    if const == 0:
        return 0.0 + 0.0j, complex(-lin)
    s = np.sqrt(complex(lin * lin - 4.0 * const))
    return (-lin + s) / 2.0, (-lin - s) / 2.0


def mode_spectrum(n, alpha, beta, gamma, t_gap=None, regime=None) -> Spectrum:
    """Per-mode closed-form spectrum from scalar parameters.

    t_gap=None drops the gap-feedback coupling (uncontrolled / open loop).
    """
    omega = np.exp(2j * np.pi / n)
    entries = []
    for j in range(n):
        m = mu(j, n)
        lin = beta * m + gamma
        const = alpha**2 * m
        if t_gap is not None:
            const = const + (gamma / t_gap) * (1.0 - omega**j)
        r0, r1 = _mode_roots(lin, const)
        entries.append((ModeIndex(j, 0), r0))
        entries.append((ModeIndex(j, 1), r1))
    return Spectrum(tuple(entries), regime if regime is not None else Uncontrolled())


def _require_regime(params: ModelParams, kind, name: str):
    if not isinstance(params.regime, kind):
        raise InvalidInputError(f"params.regime must be {name}, got {type(params.regime).__name__}")


def eigenvalues_uncontrolled(params: ModelParams) -> Spectrum:
    """Spectrum without control; mode 0 carries a double zero."""
    _require_regime(params, Uncontrolled, "Uncontrolled")
    return mode_spectrum(params.n_vehicles, params.alpha, params.beta, 0.0, regime=params.regime)


def eigenvalues_open_loop(params: ModelParams) -> Spectrum:
    """Spectrum under constant speed control; mode 0 gives {0, -gamma}
    and every other eigenvalue has negative real part when alpha > 0."""
    _require_regime(params, OpenLoop, "OpenLoop")
    return mode_spectrum(params.n_vehicles, params.alpha, params.beta, params.gamma, regime=params.regime)


def eigenvalues_closed_loop(params: ModelParams) -> Spectrum:
    """Spectrum under gap feedback; the coupling makes the per-mode
    constant term complex, so conjugate partners sit in modes j and N-j."""
    _require_regime(params, ClosedLoop, "ClosedLoop")
    return mode_spectrum(
        params.n_vehicles,
        params.alpha,
        params.beta,
        params.gamma,
        t_gap=params.regime.t_gap,
        regime=params.regime,
    )


def eigenvalues(params: ModelParams) -> Spectrum:
    """Closed-form spectrum for whichever regime params carries."""
    if isinstance(params.regime, OpenLoop):
        return eigenvalues_open_loop(params)
    if isinstance(params.regime, ClosedLoop):
        return eigenvalues_closed_loop(params)
    return eigenvalues_uncontrolled(params)


# ---------------------------------------------------------------------------
# independent dense check


def dense_eigen_oracle(b: np.ndarray) -> np.ndarray:
    """Eigenvalues of a square matrix by LAPACK's Hessenberg + shifted-QR
    path, independent of the per-mode closed forms."""
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise InvalidInputError(f"need a square matrix, got shape {b.shape}")
    try:
        return np.linalg.eigvals(b)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"eigenvalue iteration failed: {exc}") from exc


def match_distances(values_a: Sequence[complex], values_b: Sequence[complex]) -> np.ndarray:
    """Per-entry distances of the optimal pairing between two eigenvalue
    multisets; result is ordered like values_a.

    Pairing instead of sorting keeps the comparison stable under the exact
    duplicate modes (mu_j == mu_{N-j}) that sorting would interleave.
    """
    a = np.asarray(values_a, dtype=complex).ravel()
    b = np.asarray(values_b, dtype=complex).ravel()
    if a.shape != b.shape:
        raise InvalidInputError(f"multisets differ in size: {a.shape} vs {b.shape}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols]


def drift_matrix_norm(n, alpha, beta, gamma, t_gap=None) -> float:
    """Frobenius norm of the drift matrix; the scale for zero detection."""
    return float(
        np.linalg.norm(assemble_drift_matrix(n, alpha, beta, gamma, controlled=gamma > 0, t_gap=t_gap))
    )


def near_zero_count(values, scale: float) -> int:
    """Number of eigenvalues inside the structural-zero ball."""
    return int(np.sum(np.abs(np.asarray(values, dtype=complex)) < ZERO_EIGENVALUE_RTOL * scale))


def spectral_abscissa_nonzero(values, scale: float) -> float:
    """Largest real part over eigenvalues outside the structural-zero ball."""
    v = np.asarray(values, dtype=complex)
    keep = np.abs(v) >= ZERO_EIGENVALUE_RTOL * scale
    if not keep.any():
        raise InvalidInputError("all eigenvalues are structural zeros")
    return float(v[keep].real.max())


# ---------------------------------------------------------------------------
# stability of the gap-feedback regime


def complex_hurwitz_stable(kappa: float, eta: float, nu: float, rho: float) -> bool:
    """Both roots of x^2 + (kappa + i*eta)*x + (nu + i*rho) have negative
    real part iff kappa > 0 and kappa*(nu*kappa + rho*eta) - rho^2 > 0."""
    return kappa > 0 and kappa * (nu * kappa + rho * eta) - rho**2 > 0


@dataclass(frozen=True)
class ModeCondition:
    """Hurwitz data of one Fourier mode."""

    j: int
    kappa: float
    nu: float
    rho: float
    eta: float
    hurwitz_det: float
    stable: bool


@dataclass(frozen=True)
class StabilityReport:
    """Exact per-mode verdicts, the sufficient condition, and the
    spectral abscissa excluding the structural zero."""

    per_mode: tuple
    exact_stable: bool
    sufficient_lhs: float
    sufficient_stable: bool
    spectral_abscissa_nonzero: float

    @property
    def marginal(self) -> bool:
        return abs(self.spectral_abscissa_nonzero) < MARGINAL_ABSCISSA


def sufficient_condition(alpha, gamma, t_gap):
    """(lhs, verdict) of the parameter-only condition
    gamma*T + 2*(alpha*T)^2 > 2 (with gamma > 0)."""
    lhs = gamma * t_gap + 2.0 * (alpha * t_gap) ** 2
    return lhs, bool(gamma > 0 and lhs > 2.0)


def stability_report(n, alpha, beta, gamma, t_gap) -> StabilityReport:
    """Gap-feedback stability from scalar parameters.

    Mode j (1 <= j < N) contributes the complex-coefficient quadratic with
    kappa_j = 2*beta*(1-c_j) + gamma, eta_j = 0,
    nu_j = (1-c_j)*(gamma/T + 2*alpha^2), rho_j = -(gamma/T)*s_j;
    the regime is exactly stable iff gamma > 0 and every mode passes the
    Hurwitz test.
    """
    per_mode = []
    for j in range(1, n):
        ang = 2.0 * math.pi * j / n
        cj = math.cos(ang)
        sj = math.sin(ang)
        kappa = 2.0 * beta * (1.0 - cj) + gamma
        eta = 0.0
        nu = (1.0 - cj) * (gamma / t_gap + 2.0 * alpha**2)
        rho = -(gamma / t_gap) * sj
        det = kappa * (nu * kappa + rho * eta) - rho**2
        per_mode.append(
            ModeCondition(j, kappa, nu, rho, eta, det, complex_hurwitz_stable(kappa, eta, nu, rho))
        )
    exact = bool(gamma > 0 and all(m.stable for m in per_mode))
    lhs, suff = sufficient_condition(alpha, gamma, t_gap)
    spec = mode_spectrum(n, alpha, beta, gamma, t_gap=t_gap)
    abscissa = spectral_abscissa_nonzero(spec.values, drift_matrix_norm(n, alpha, beta, gamma, t_gap))
    return StabilityReport(
        per_mode=tuple(per_mode),
        exact_stable=exact,
        sufficient_lhs=lhs,
        sufficient_stable=suff,
        spectral_abscissa_nonzero=abscissa,
    )


def exact_stability(params: ModelParams) -> StabilityReport:
    """Stability report of the gap-feedback regime in params."""
    _require_regime(params, ClosedLoop, "ClosedLoop")
    return stability_report(
        params.n_vehicles, params.alpha, params.beta, params.gamma, params.regime.t_gap
    )


def sufficient_stability(params: ModelParams):
    """(lhs, verdict) of the sufficient condition for params."""
    _require_regime(params, ClosedLoop, "ClosedLoop")
    return sufficient_condition(params.alpha, params.gamma, params.regime.t_gap)


# ---------------------------------------------------------------------------
# mean-removal projector


def deviation_matrix(n: int) -> np.ndarray:
    """Mean-removing projector I - ones/n: symmetric, idempotent,
    annihilates constants."""
    if n < 2:
        raise InvalidInputError(f"need at least 2 vehicles, got {n}")
    return np.eye(n) - np.full((n, n), 1.0 / n)
