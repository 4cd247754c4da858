"""Squeezed thermal bath parameters and the scalars derived from them.

Units are hbar = k_B = 1.  Only the derived scalars enter the qubit dynamics:
the thermal occupation ``n_th``, the effective occupation ``n_eff`` (``N``),
the squeezing coupling ``a`` and the population relaxation rate ``Gamma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from qdeleter.errors import InvalidArgument, NumericalFailure

TWO_PI = 2.0 * math.pi

# exp(x) overflows a double just above 709.78
_EXP_OVERFLOW = 700.0


def planck_occupation(omega: float, T: float) -> float:
    """Mean thermal photon number ``1 / (exp(omega / T) - 1)``.

    ``T == 0`` is an exact branch returning 0.0; no exponential is evaluated.

    Raises:
        InvalidArgument: If ``omega <= 0`` or ``T < 0``.
    """
    if not (math.isfinite(omega) and omega > 0.0):
        raise InvalidArgument(f"omega must be a finite positive number, got {omega!r}")
    if not (math.isfinite(T) and T >= 0.0):
        raise InvalidArgument(f"T must be finite and non-negative, got {T!r}")
    if T == 0.0:
        return 0.0
    x = omega / T
    if x > _EXP_OVERFLOW:
        return math.exp(-x)
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class BathParams:
    """User-facing bath and coupling inputs.

    Attributes:
        gamma0: System-environment coupling strength, > 0.
        omega: Qubit frequency, > 0.
        T: Bath temperature, >= 0.
        r: Squeezing magnitude (sign allowed).
        Phi: Squeezing phase in radians, reduced into ``[0, 2 pi)``.
    """

    gamma0: float
    omega: float = 1.0
    T: float = 0.0
    r: float = 0.0
    Phi: float = 0.0

    def __post_init__(self):
        for name in ("gamma0", "omega", "T", "r", "Phi"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidArgument(f"{name} must be finite, got {value!r}")
        if self.gamma0 <= 0.0:
            raise InvalidArgument(f"gamma0 must be > 0, got {self.gamma0!r}")
        if self.omega <= 0.0:
            raise InvalidArgument(f"omega must be > 0, got {self.omega!r}")
        if self.T < 0.0:
            raise InvalidArgument(f"T must be >= 0, got {self.T!r}")
        object.__setattr__(self, "Phi", float(self.Phi) % TWO_PI)


@dataclass(frozen=True)
class EnvConstants:
    """Derived bath scalars, bundled with the inputs that produced them.

    ``decay_plus`` and ``decay_minus`` are ``(gamma0 / 2) (2N + 1 +- a)``,
    computed as ``(gamma0 / 2) (2 n_th + 1) exp(+-2r)`` so that both are
    strictly positive and no growing exponential ever has to be formed.
    """

    params: BathParams
    n_th: float
    n_eff: float
    a: float
    Gamma: float
    decay_plus: float
    decay_minus: float
    #: 1 / (2N + 1); the magnitude of the stationary <sigma_3>.
    inv_2n1: float = field(repr=False)

    @property
    def gamma0(self) -> float:
        return self.params.gamma0

    @property
    def Phi(self) -> float:
        return self.params.Phi


def derive_constants(p: BathParams) -> EnvConstants:
    n_th = planck_occupation(p.omega, p.T)
    if abs(p.r) > _EXP_OVERFLOW / 2:
        raise NumericalFailure(f"squeezing |r| = {abs(p.r)!r} overflows the bath constants")
    ch2 = math.cosh(p.r) ** 2
    sh2 = math.sinh(p.r) ** 2
    n_eff = n_th * (ch2 + sh2) + sh2
    a = math.sinh(2.0 * p.r) * (2.0 * n_th + 1.0)
    half = 0.5 * p.gamma0 * (2.0 * n_th + 1.0)
    return EnvConstants(
        params=p,
        n_th=n_th,
        n_eff=n_eff,
        a=a,
        Gamma=p.gamma0 * (2.0 * n_eff + 1.0),
        decay_plus=half * math.exp(2.0 * p.r),
        decay_minus=half * math.exp(-2.0 * p.r),
        inv_2n1=1.0 / (2.0 * n_eff + 1.0),
    )


def as_constants(env: BathParams | EnvConstants) -> EnvConstants:
    """Accept either form; derive constants when given raw parameters."""
    if isinstance(env, EnvConstants):
        return env
    if isinstance(env, BathParams):
        return derive_constants(env)
    raise InvalidArgument(f"expected BathParams or EnvConstants, got {type(env).__name__}")
