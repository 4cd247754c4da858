"""Quantum nondemolition (pure dephasing) evolution.

In the system eigenbasis every matrix element evolves independently,

    rho_nm(t) = exp(-i (E_n - E_m) t) exp(i (E_n^2 - E_m^2) eta(t))
                exp(-(E_n - E_m)^2 gamma(t)) rho_nm(0),

so populations never change.  The bath enters only through the two kernel
functions ``eta`` and ``gamma``.  Their squeezed-bath forms are not supplied
here; the built-in kernels are placeholder models for exercising the channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from qdeleter.errors import InvalidArgument
from qdeleter.state import (
    BlochVector,
    InitialAngles,
    bloch_to_density,
    density_to_bloch,
    pure_state_from_angles,
)

KernelFn = Callable[[float], float]


@dataclass(frozen=True)
class DephasingKernel:
    """Time functions ``eta(t)`` and ``gamma(t)`` of the QND channel.

    Attributes:
        eta: Phase kernel (only matters for more than two levels).
        gamma: Decoherence kernel; must vanish at 0 and be non-negative.
        name: Model identifier.
        placeholder: True for built-in models that are not derived from a bath.
    """

    eta: KernelFn
    gamma: KernelFn
    name: str = "user"
    placeholder: bool = False

    def __post_init__(self):
        g0 = float(self.gamma(0.0))
        if g0 != 0.0:
            raise InvalidArgument(f"kernel {self.name!r}: gamma(0) must be 0, got {g0!r}")

    def gamma_at(self, t: float) -> float:
        g = float(self.gamma(t))
        if not math.isfinite(g) or g < 0.0:
            raise InvalidArgument(f"kernel {self.name!r}: gamma({t!r}) = {g!r} is not a finite non-negative value")
        return g

    def eta_at(self, t: float) -> float:
        e = float(self.eta(t))
        if not math.isfinite(e):
            raise InvalidArgument(f"kernel {self.name!r}: eta({t!r}) is not finite")
        return e


def _zero(t: float) -> float:
    return 0.0


BUILTIN_KERNELS = ("zero", "linear", "quadratic-saturating")


def builtin_kernels(name: str, kappa: float = 0.1, tau: float = 1.0) -> DephasingKernel:
    """Construct a named placeholder kernel.

    * ``"zero"``: ``eta = gamma = 0`` (closed system).
    * ``"linear"``: ``gamma(t) = kappa t``.
    * ``"quadratic-saturating"``: ``gamma(t) = kappa t^2 / (1 + t / tau)``.

    ``eta`` is identically zero for all three.

    Raises:
        InvalidArgument: For an unknown name, ``kappa < 0`` or ``tau <= 0``.
    """
    if not (math.isfinite(kappa) and kappa >= 0.0):
        raise InvalidArgument(f"kappa must be finite and >= 0, got {kappa!r}")
    if name == "zero":
        return DephasingKernel(_zero, _zero, name="zero", placeholder=True)
    if name == "linear":
        return DephasingKernel(_zero, lambda t: kappa * t, name=f"linear(kappa={kappa!r})", placeholder=True)
    if name == "quadratic-saturating":
        if not (math.isfinite(tau) and tau > 0.0):
            raise InvalidArgument(f"tau must be finite and > 0, got {tau!r}")
        return DephasingKernel(
            _zero,
            lambda t: kappa * t * t / (1.0 + t / tau),
            name=f"quadratic-saturating(kappa={kappa!r}, tau={tau!r})",
            placeholder=True,
        )
    raise InvalidArgument(f"unknown kernel {name!r}; expected one of {', '.join(BUILTIN_KERNELS)}")


@dataclass(frozen=True)
class KernelReport:
    gamma_nonnegative: bool
    monotone: bool
    notes: str


def check_kernel(kernel: DephasingKernel, times: Sequence[float]) -> KernelReport:
    """Sample ``gamma`` on ``times`` and report sign and monotonicity.

    A non-monotone kernel is legal; monotonicity-dependent properties are then
    reported as skipped.
    """
    g = np.array([float(kernel.gamma(t)) for t in sorted(times)])
    nonneg = bool(np.all(g >= 0.0))
    monotone = bool(np.all(np.diff(g) >= 0.0))
    notes = [] if monotone else ["gamma is not monotone; monotonicity property checks skipped"]
    if kernel.placeholder:
        notes.append(f"kernel {kernel.name} is a placeholder model")
    return KernelReport(gamma_nonnegative=nonneg, monotone=monotone, notes="; ".join(notes))


def qubit_levels(omega: float) -> tuple[float, float]:
    """Eigenvalues of ``(omega / 2) sigma_3`` in the ``(|1>, |0>)`` ordering."""
    return (0.5 * omega, -0.5 * omega)


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise InvalidArgument(f"t must be finite and >= 0, got {t!r}")
    return t


def qnd_evolve_general(rho0, levels: Sequence[float], kernel: DephasingKernel, t: float) -> np.ndarray:
    """Evolve a density matrix written in the eigenbasis of a Hamiltonian with ``levels``.

    Raises:
        InvalidArgument: On a dimension mismatch, fewer than two levels, non-finite
            levels or negative ``t``.
    """
    t = _check_time(t)
    E = np.asarray(levels, dtype=float)
    if E.ndim != 1 or E.size < 2 or not np.all(np.isfinite(E)):
        raise InvalidArgument("levels must be a list of at least two finite reals")
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (E.size, E.size):
        raise InvalidArgument(f"rho0 has shape {rho0.shape}, expected {(E.size, E.size)}")

    diff = E[:, None] - E[None, :]
    diff_sq = E[:, None] ** 2 - E[None, :] ** 2
    factor = np.exp(-1j * diff * t + 1j * diff_sq * kernel.eta_at(t) - diff**2 * kernel.gamma_at(t))
    out = factor * rho0
    np.fill_diagonal(out, np.diag(rho0))
    return out


def qnd_evolve_qubit(angles: InitialAngles, omega: float, kernel: DephasingKernel, t: float) -> BlochVector:
    """Bloch vector of a dephasing qubit started in the pure state ``angles``.

    Precesses at ``omega`` about the ``sigma_3`` axis while the transverse length
    shrinks by ``exp(-omega^2 gamma(t))``; ``<sigma_3>`` is returned untouched.
    """
    t = _check_time(t)
    b0 = pure_state_from_angles(angles)
    _, phi0 = angles
    shrink = math.sin(angles[0]) * math.exp(-omega * omega * kernel.gamma_at(t))
    return BlochVector(
        shrink * math.cos(omega * t + phi0),
        shrink * math.sin(omega * t + phi0),
        b0.sz,
    )


def qnd_evolve_bloch(b0, omega: float, kernel: DephasingKernel, t: float) -> BlochVector:
    """Same channel for an arbitrary (possibly mixed) initial Bloch vector."""
    rho_t = qnd_evolve_general(bloch_to_density(b0), qubit_levels(omega), kernel, t)
    return density_to_bloch(rho_t)
