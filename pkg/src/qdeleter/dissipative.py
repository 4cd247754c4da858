"""Closed-form dissipative evolution of a qubit in a squeezed thermal bath.

The Bloch vector relaxes toward ``(0, 0, -1/(2N+1))``.  Longitudinal relaxation
runs at ``Gamma = gamma0 (2N + 1)``; the transverse plane decays along two
squeezing-dependent principal axes at ``decay_minus`` and ``decay_plus``.  All
time dependence goes through ``exp(-decay_plus t)`` and ``exp(-decay_minus t)``,
never through the growing factor ``exp(gamma0 a t)``.

Kraus matrices are provided only for the unsqueezed (``r == 0``) case, where the
channel is generalized amplitude damping (plain amplitude damping at ``T == 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qdeleter.bath import BathParams, EnvConstants, as_constants
from qdeleter.errors import InvalidArgument, NumericalFailure, UnsupportedRegime
from qdeleter.state import ATOL_EXACT, BlochVector, bloch_length, check_density_matrix

__all__ = [
    "AsymptoticState",
    "KrausSet",
    "apply_kraus",
    "asymptotic_state",
    "bloch_derivative_at_zero",
    "evolve_bloch",
    "fidelity_law",
    "fidelity_lower_bound",
    "finite_difference_contraction_rate",
    "gad_kraus",
    "initial_contraction_rate",
    "kraus_completeness_residual",
]


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise InvalidArgument(f"t must be finite and >= 0, got {t!r}")
    return t


def evolve_bloch(b0, env: BathParams | EnvConstants, t: float) -> BlochVector:
    """Bloch vector at time ``t`` (interaction picture) from ``b0`` at time 0.

    Args:
        b0: Initial Bloch vector ``(sx, sy, sz)``.
        env: Bath parameters or their derived constants.
        t: Elapsed time, >= 0.

    Returns:
        The evolved Bloch vector.  ``t == 0`` returns ``b0`` unchanged.

    Raises:
        InvalidArgument: If ``t < 0``.
        NumericalFailure: If any intermediate is non-finite.
    """
    env = as_constants(env)
    t = _check_time(t)
    sx0, sy0, sz0 = (float(v) for v in b0)
    if t == 0.0:
        return BlochVector(sx0, sy0, sz0)

    phi = env.Phi
    cos_phi, sin_phi = math.cos(phi), math.sin(phi)
    # beta(t) and exp(gamma0 a t) beta(t)
    e_plus = math.exp(-env.decay_plus * t)
    e_minus = math.exp(-env.decay_minus * t)
    # sinh(gamma0 a t / 2) exp(-Gamma t / 2)
    cross = 0.5 * (e_minus - e_plus)

    sx = (e_plus + 0.5 * (e_minus - e_plus) * (1.0 + cos_phi)) * sx0 - sin_phi * cross * sy0
    sy = (e_plus + 0.5 * (e_minus - e_plus) * (1.0 - cos_phi)) * sy0 - sin_phi * cross * sx0
    # exp(-Gamma t) sz0 - (1 - exp(-Gamma t))/(2N+1), grouped around the fixed point
    # so that sz0 = -1/(2N+1) is reproduced exactly
    sz = -env.inv_2n1 + math.exp(-env.Gamma * t) * (sz0 + env.inv_2n1)

    if not all(math.isfinite(v) for v in (sx, sy, sz)):
        raise NumericalFailure(f"non-finite Bloch vector at t={t!r} for {env.params!r}")
    return BlochVector(sx, sy, sz)


@dataclass(frozen=True)
class AsymptoticState:
    """Stationary state ``diag(1 - p, p)``; ``p`` is the ``|0>`` population."""

    p: float

    @property
    def bloch(self) -> BlochVector:
        return BlochVector(0.0, 0.0, 1.0 - 2.0 * self.p)

    def density_matrix(self) -> np.ndarray:
        return np.diag([1.0 - self.p, self.p]).astype(complex)


def asymptotic_state(env: BathParams | EnvConstants) -> AsymptoticState:
    env = as_constants(env)
    return AsymptoticState(p=0.5 * (1.0 + env.inv_2n1))


def fidelity_law(sz0: float, env: BathParams | EnvConstants, t: float) -> float:
    """Fidelity with ``|0>`` at time ``t`` given the initial ``<sigma_3>``.

    Raises:
        InvalidArgument: If ``sz0`` is outside ``[-1, 1]`` or ``t < 0``.
    """
    env = as_constants(env)
    t = _check_time(t)
    sz0 = float(sz0)
    if not -1.0 <= sz0 <= 1.0:
        raise InvalidArgument(f"sz0 must lie in [-1, 1], got {sz0!r}")
    decay = math.exp(-env.Gamma * t)
    inner = (1.0 - decay * sz0) + (1.0 - decay) * env.inv_2n1
    return math.sqrt(max(0.0, inner) / 2.0)


def fidelity_lower_bound(env: BathParams | EnvConstants, t: float) -> float:
    """Worst-case fidelity over all initial states, attained at ``|1>``."""
    env = as_constants(env)
    t = _check_time(t)
    return math.sqrt(-math.expm1(-env.Gamma * t) * (1.0 + env.inv_2n1) / 2.0)


def bloch_derivative_at_zero(b0, env: BathParams | EnvConstants) -> np.ndarray:
    """Analytic ``d b / dt`` at ``t = 0`` from differentiating the closed form."""
    env = as_constants(env)
    sx, sy, sz = (float(v) for v in b0)
    g_a = env.gamma0 * env.a
    cos_phi, sin_phi = math.cos(env.Phi), math.sin(env.Phi)
    half_gamma = 0.5 * env.Gamma
    return np.array(
        [
            (-half_gamma + 0.5 * g_a * cos_phi) * sx - 0.5 * g_a * sin_phi * sy,
            (-half_gamma - 0.5 * g_a * cos_phi) * sy - 0.5 * g_a * sin_phi * sx,
            -env.Gamma * sz - env.Gamma * env.inv_2n1,
        ]
    )


def initial_contraction_rate(b0, env: BathParams | EnvConstants) -> float:
    """``b . db/dt`` at ``t = 0``; negative means the Bloch tip moves inward."""
    return float(np.dot(np.asarray(b0, dtype=float), bloch_derivative_at_zero(b0, env)))


def finite_difference_contraction_rate(b0, env: BathParams | EnvConstants, h: float = 1e-6) -> float:
    """Numerical cross-check of :func:`initial_contraction_rate`.

    Differentiates ``|b(t)|^2 / 2`` with the one-sided second-order stencil
    ``(-3 f(0) + 4 f(h) - f(2h)) / (2h)``; the closed form is defined for
    ``t >= 0`` only.
    """
    env = as_constants(env)
    b = np.asarray(b0, dtype=float)

    def half_sq(t):
        return 0.5 * bloch_length(evolve_bloch(b, env, t)) ** 2

    return (-3.0 * half_sq(0.0) + 4.0 * half_sq(h) - half_sq(2.0 * h)) / (2.0 * h)


@dataclass(frozen=True)
class KrausSet:
    """Ordered Kraus operators of a qubit channel plus how they were made."""

    operators: tuple[np.ndarray, ...]
    t: float | None = None
    params: BathParams | None = None
    labels: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.operators)

    def __iter__(self):
        return iter(self.operators)


def kraus_completeness_residual(k: KrausSet) -> float:
    """``max |sum_k K_k^dag K_k - I|`` over matrix entries."""
    ops = [np.asarray(K, dtype=complex) for K in k]
    if not ops:
        return 1.0
    dim = ops[0].shape[0]
    total = sum(K.conj().T @ K for K in ops)
    return float(np.max(np.abs(total - np.eye(dim))))


def gad_kraus(env: BathParams | EnvConstants, t: float) -> KrausSet:
    """Generalized amplitude damping Kraus set equivalent to the ``r = 0`` evolution.

    Damping parameter ``lam = 1 - exp(-Gamma t)`` and mixing weight ``q = p`` of
    the asymptotic state.  Operators whose weight is exactly zero are dropped, so
    at ``T = 0`` this is the two-operator amplitude damping set and at ``t = 0``
    only multiples of the identity remain.

    Raises:
        UnsupportedRegime: If the bath is squeezed (``r != 0``).
    """
    env = as_constants(env)
    t = _check_time(t)
    if env.params.r != 0.0:
        raise UnsupportedRegime(
            f"no generalized amplitude damping form for squeezed bath r={env.params.r!r}; "
            "use evolve_bloch or the Lindblad oracle"
        )
    q = asymptotic_state(env).p
    lam = -math.expm1(-env.Gamma * t)
    keep = math.exp(-0.5 * env.Gamma * t)
    candidates = [
        ("E0", q, np.array([[keep, 0.0], [0.0, 1.0]], dtype=complex)),
        ("E1", q * lam, np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)),
        ("E2", 1.0 - q, np.array([[1.0, 0.0], [0.0, keep]], dtype=complex)),
        ("E3", (1.0 - q) * lam, np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)),
    ]
    ops, labels = [], []
    for label, weight, matrix in candidates:
        if weight > 0.0:
            ops.append(math.sqrt(weight) * matrix)
            labels.append(label)
    return KrausSet(operators=tuple(ops), t=t, params=env.params, labels=tuple(labels))


def apply_kraus(k: KrausSet, rho) -> np.ndarray:
    """Return ``sum_k K rho K^dag``.

    Raises:
        InvalidArgument: If the set is incomplete beyond ``ATOL_EXACT``.
    """
    residual = kraus_completeness_residual(k)
    if residual > ATOL_EXACT:
        raise InvalidArgument(f"Kraus set is not trace preserving (residual {residual:.3e})")
    rho = check_density_matrix(rho)
    out = sum(K @ rho @ K.conj().T for K in k)
    return check_density_matrix(0.5 * (out + out.conj().T))
