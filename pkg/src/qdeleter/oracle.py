"""Brute-force verifier: fixed-step RK4 integration of the qubit Lindblad equation.

The generator uses the normalization

    d rho / dt = sum_j ( 2 R_j rho R_j^dag - R_j^dag R_j rho - rho R_j^dag R_j )

with ``R_1 = sqrt(gamma0 (n_th + 1) / 2) R``, ``R_2 = sqrt(gamma0 n_th / 2) R^dag``
and ``R = cosh(r) sigma_- + exp(i Phi) sinh(r) sigma_+``, in the interaction
picture (no system Hamiltonian term).  This module depends on the closed form
only inside :func:`compare_closed_form`; the integrator itself never calls it.

Trace is never renormalized and positivity is never projected; both are
measured and reported.  Hermiticity is restored each step by averaging with the
adjoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from qdeleter.bath import BathParams, derive_constants
from qdeleter.dissipative import KrausSet, evolve_bloch, kraus_completeness_residual
from qdeleter.errors import InvalidArgument, NumericalFailure
from qdeleter.state import ATOL_EXACT, SIGMA_MINUS, SIGMA_PLUS, BlochVector, bloch_to_density

DEFAULT_DT = 1e-3
PRECISE_DT = 1e-4
METHOD_ORDER = 4


def squeezed_lowering_operator(r: float, Phi: float) -> np.ndarray:
    """``R = cosh(r) sigma_- + exp(i Phi) sinh(r) sigma_+``."""
    if r == 0.0:
        return SIGMA_MINUS.copy()
    return math.cosh(r) * SIGMA_MINUS + np.exp(1j * Phi) * math.sinh(r) * SIGMA_PLUS


@dataclass(frozen=True)
class LindbladGenerator:
    """The two jump operators of the squeezed thermal bath, stacked as ``(2, 2, 2)``.

    ``R_2`` is kept (as an exact zero matrix) when ``T = 0`` so that generators of
    different temperatures can be batched; ``r2_vanishes`` records that case.
    """

    operators: np.ndarray
    r2_vanishes: bool
    params: BathParams | None = None

    @classmethod
    def from_params(cls, p: BathParams) -> "LindbladGenerator":
        n_th = derive_constants(p).n_th
        R = squeezed_lowering_operator(p.r, p.Phi)
        R1 = math.sqrt(p.gamma0 * (n_th + 1.0) / 2.0) * R
        R2 = math.sqrt(p.gamma0 * n_th / 2.0) * R.conj().T
        ops = np.stack([R1, R2])
        ops.setflags(write=False)
        return cls(operators=ops, r2_vanishes=(n_th == 0.0), params=p)

    @property
    def R1(self) -> np.ndarray:
        return self.operators[0]

    @property
    def R2(self) -> np.ndarray:
        return self.operators[1]


def _dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


class _Rhs:
    """Pre-assembled generator pieces for a batch of ``B`` systems."""

    def __init__(self, ops: np.ndarray):
        # ops: (B, J, 2, 2)
        self.ops = ops
        self.ops_dag = _dagger(ops)
        self.absorb = np.sum(self.ops_dag @ ops, axis=1)

    def __call__(self, rho: np.ndarray) -> np.ndarray:
        sandwich = np.sum(self.ops @ rho[:, None] @ self.ops_dag, axis=1)
        return 2.0 * sandwich - self.absorb @ rho - rho @ self.absorb


def lindblad_rhs(rho, gen: LindbladGenerator) -> np.ndarray:
    """Right-hand side of the master equation for a single density matrix."""
    rho = np.asarray(rho, dtype=complex)
    return _Rhs(gen.operators[None])(rho[None])[0]


def _min_eigenvalue(rho: np.ndarray) -> np.ndarray:
    # closed-form lower eigenvalue of a Hermitian 2x2 batch
    a = rho[:, 0, 0].real
    d = rho[:, 1, 1].real
    b = np.abs(rho[:, 0, 1])
    return 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + b * b)


@dataclass
class _Stats:
    trace_drift: np.ndarray
    min_eigenvalue: np.ndarray
    steps_taken: int = 0

    @classmethod
    def start(cls, rho: np.ndarray) -> "_Stats":
        return cls(np.abs(np.trace(rho, axis1=1, axis2=2) - 1.0), _min_eigenvalue(rho))

    def update(self, rho: np.ndarray) -> None:
        np.maximum(self.trace_drift, np.abs(np.trace(rho, axis1=1, axis2=2) - 1.0), out=self.trace_drift)
        np.minimum(self.min_eigenvalue, _min_eigenvalue(rho), out=self.min_eigenvalue)


def _advance(rho, rhs: _Rhs, h: np.ndarray, n_steps: np.ndarray, stats: _Stats) -> np.ndarray:
    """Take ``n_steps[b]`` RK4 steps of size ``h[b]`` for every system ``b``."""
    total = int(n_steps.max(initial=0))
    with np.errstate(over="ignore", invalid="ignore"):
        rho = _advance_steps(rho, rhs, h, n_steps, stats, total)
    stats.steps_taken += total
    return rho


def _advance_steps(rho, rhs: _Rhs, h, n_steps, stats: _Stats, total: int) -> np.ndarray:
    for k in range(total):
        hh = np.where(k < n_steps, h, 0.0)[:, None, None]
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * hh * k1)
        k3 = rhs(rho + 0.5 * hh * k2)
        k4 = rhs(rho + hh * k3)
        rho = rho + (hh / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + _dagger(rho))
        if not np.all(np.isfinite(rho)):
            raise NumericalFailure(
                f"non-finite density matrix at step {stats.steps_taken + k + 1}",
                step=stats.steps_taken + k + 1,
            )
        stats.update(rho)
    return rho


def _steps_for(span: np.ndarray, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Uniform step count and size covering each ``span`` with steps no larger than ``dt``."""
    n = np.ceil(span / dt - 1e-9).astype(int)
    n = np.maximum(n, np.where(span > 0.0, 1, 0))
    h = np.divide(span, n, out=np.zeros_like(span), where=n > 0)
    return n, h


def _check_dt(dt: float) -> float:
    dt = float(dt)
    if not (math.isfinite(dt) and dt > 0.0):
        raise InvalidArgument(f"dt must be finite and > 0, got {dt!r}")
    return dt


@dataclass(frozen=True)
class Trajectory:
    """Sampled integration output.

    Attributes:
        times: Sample times, starting at 0.
        states: Density matrices at ``times``, shape ``(n, 2, 2)``.
        step_size: Largest step actually taken (never exceeds the requested ``dt``).
        order: Order of the integration method.
        n_steps: Total RK4 steps.
        max_trace_drift: ``max |Tr rho - 1|`` over every step, not only samples.
        min_eigenvalue: Smallest eigenvalue seen over every step.
    """

    times: np.ndarray
    states: np.ndarray
    step_size: float
    order: int
    n_steps: int
    max_trace_drift: float
    min_eigenvalue: float

    @property
    def samples(self) -> list[tuple[float, np.ndarray]]:
        return list(zip(self.times.tolist(), self.states))

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def bloch(self) -> np.ndarray:
        """Bloch vectors of every sample, shape ``(n, 3)``."""
        off = self.states[:, 1, 0]
        return np.stack(
            [2.0 * off.real, 2.0 * off.imag, (self.states[:, 0, 0] - self.states[:, 1, 1]).real], axis=1
        )


def integrate(
    rho0,
    gen: LindbladGenerator,
    t_end: float,
    dt: float = DEFAULT_DT,
    sample_times: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate the master equation from ``rho0`` to ``t_end``.

    Each interval between consecutive sample times is covered by uniform steps
    of size at most ``dt``, so samples land exactly on the requested times.
    Without ``sample_times`` every step is recorded.

    Raises:
        InvalidArgument: For negative ``t_end``, non-positive ``dt`` or sample
            times outside ``[0, t_end]``.
        NumericalFailure: If the state becomes non-finite; ``.step`` holds the
            offending step index.
    """
    t_end = float(t_end)
    if not (math.isfinite(t_end) and t_end >= 0.0):
        raise InvalidArgument(f"t_end must be finite and >= 0, got {t_end!r}")
    dt = _check_dt(dt)
    rho = np.asarray(rho0, dtype=complex).reshape(1, 2, 2)
    rhs = _Rhs(gen.operators[None])
    stats = _Stats.start(rho)

    if sample_times is None:
        (n,), (h,) = _steps_for(np.array([t_end]), dt)
        checkpoints = np.arange(1, n + 1) * h
        if n:
            checkpoints[-1] = t_end
    else:
        checkpoints = np.unique(np.asarray(sample_times, dtype=float))
        if checkpoints.size and (checkpoints[0] < 0.0 or checkpoints[-1] > t_end):
            raise InvalidArgument("sample_times must lie within [0, t_end]")
        checkpoints = checkpoints[checkpoints > 0.0]
        if t_end > 0.0 and (not checkpoints.size or checkpoints[-1] < t_end):
            checkpoints = np.append(checkpoints, t_end)
    times = np.concatenate([[0.0], checkpoints])

    states = [rho[0].copy()]
    max_h = 0.0
    for t_prev, t_next in zip(times[:-1], times[1:]):
        n_seg, h_seg = _steps_for(np.array([t_next - t_prev]), dt)
        rho = _advance(rho, rhs, h_seg, n_seg, stats)
        states.append(rho[0].copy())
        max_h = max(max_h, float(h_seg[0]))

    return Trajectory(
        times=times,
        states=np.array(states),
        step_size=max_h,
        order=METHOD_ORDER,
        n_steps=stats.steps_taken,
        max_trace_drift=float(stats.trace_drift[0]),
        min_eigenvalue=float(stats.min_eigenvalue[0]),
    )


@dataclass(frozen=True)
class BatchResult:
    """Final states of independently integrated systems."""

    states: np.ndarray
    trace_drift: np.ndarray
    min_eigenvalue: np.ndarray
    n_steps: np.ndarray

    def bloch(self) -> np.ndarray:
        off = self.states[:, 1, 0]
        return np.stack(
            [2.0 * off.real, 2.0 * off.imag, (self.states[:, 0, 0] - self.states[:, 1, 1]).real], axis=1
        )


def integrate_many(rho0s, gens: Sequence[LindbladGenerator], t_ends, dt: float = DEFAULT_DT) -> BatchResult:
    """Integrate many independent systems to their own end times in one vectorized sweep.

    Every system takes uniform steps no larger than ``dt``; systems that have
    reached their end time are frozen (zero step) while the rest continue.
    """
    dt = _check_dt(dt)
    rho = np.array(rho0s, dtype=complex).reshape(-1, 2, 2)
    t_ends = np.asarray(t_ends, dtype=float).reshape(-1)
    if len(gens) != rho.shape[0] or t_ends.shape[0] != rho.shape[0]:
        raise InvalidArgument("rho0s, gens and t_ends must have the same length")
    if np.any(~np.isfinite(t_ends)) or np.any(t_ends < 0.0):
        raise InvalidArgument("t_ends must be finite and >= 0")
    rhs = _Rhs(np.stack([g.operators for g in gens]))
    stats = _Stats.start(rho)
    n, h = _steps_for(t_ends, dt)
    rho = _advance(rho, rhs, h, n, stats)
    return BatchResult(states=rho, trace_drift=stats.trace_drift, min_eigenvalue=stats.min_eigenvalue, n_steps=n)


@dataclass(frozen=True)
class ComparisonReport:
    """Closed form versus integrator on a time grid.

    ``errors[i, j]`` is ``|closed - integrated|`` for Bloch component ``j`` at
    ``t_grid[i]``.
    """

    b0: BlochVector
    params: BathParams
    t_grid: np.ndarray
    errors: np.ndarray
    dt: float
    max_trace_drift: float
    min_eigenvalue: float
    tolerance: float = 1e-6

    @property
    def max_error(self) -> float:
        return float(self.errors.max(initial=0.0))

    @property
    def component_max(self) -> np.ndarray:
        return self.errors.max(axis=0, initial=0.0)

    @property
    def positivity_violation(self) -> float:
        return max(0.0, -self.min_eigenvalue)

    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance

    def summary(self) -> str:
        verdict = "pass" if self.passed else "fail"
        return f"max_err={self.max_error:.6e} tol={self.tolerance:.6e} verdict={verdict}"


def compare_closed_form(
    b0,
    p: BathParams,
    t_grid: Sequence[float],
    dt: float = DEFAULT_DT,
    tolerance: float = 1e-6,
) -> ComparisonReport:
    """Run the integrator and the closed form on ``t_grid`` and tabulate discrepancies."""
    grid = np.unique(np.asarray(t_grid, dtype=float))
    if grid.size == 0:
        raise InvalidArgument("t_grid must not be empty")
    if grid[0] < 0.0:
        raise InvalidArgument("t_grid must be non-negative")
    b0 = BlochVector(*(float(v) for v in b0))
    env = derive_constants(p)
    traj = integrate(bloch_to_density(b0), LindbladGenerator.from_params(p), grid[-1], dt, sample_times=grid)
    integrated = dict(zip(traj.times.tolist(), traj.bloch()))
    closed = np.array([evolve_bloch(b0, env, t) for t in grid])
    numeric = np.array([integrated[t] for t in grid.tolist()])
    return ComparisonReport(
        b0=b0,
        params=p,
        t_grid=grid,
        errors=np.abs(closed - numeric),
        dt=dt,
        max_trace_drift=traj.max_trace_drift,
        min_eigenvalue=traj.min_eigenvalue,
        tolerance=tolerance,
    )


@dataclass(frozen=True)
class CPTPReport:
    residual: float
    tolerance: float = ATOL_EXACT
    n_operators: int = field(default=0)

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


def validate_cptp(k: KrausSet, tolerance: float = ATOL_EXACT) -> CPTPReport:
    """Completeness check ``max |sum K^dag K - I| <= tolerance``."""
    return CPTPReport(residual=kraus_completeness_residual(k), tolerance=tolerance, n_operators=len(k))
