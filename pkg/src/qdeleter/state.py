"""Single-qubit states: Bloch vectors, density matrices and scalar metrics.

Basis ordering is ``(|1>, |0>)`` throughout, so ``sigma_3 = diag(+1, -1)`` and the
blank state ``|0>`` (the Bloch south pole) is the *second* basis vector.  A density
matrix is a plain ``(2, 2)`` complex ``numpy`` array; Bloch vectors are the primary
representation and matrices are produced on demand.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from qdeleter.errors import InvalidArgument

#: Slack for exact-algebra comparisons.
ATOL_EXACT = 1e-12
#: Slack for accumulated numerics (Bloch-ball membership).
ATOL_NUMERIC = 1e-9
#: Most negative eigenvalue still accepted as positive semidefinite.
EIG_FLOOR = -1e-10

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_1, SIGMA_2, SIGMA_3)

#: Raising / lowering operators, sigma_pm = (sigma_1 +- i sigma_2) / 2.
SIGMA_PLUS = 0.5 * (SIGMA_1 + 1j * SIGMA_2)
SIGMA_MINUS = 0.5 * (SIGMA_1 - 1j * SIGMA_2)

KET_1 = np.array([1, 0], dtype=complex)
KET_0 = np.array([0, 1], dtype=complex)


class BlochVector(NamedTuple):
    """Pauli expectation values ``(<sigma_1>, <sigma_2>, <sigma_3>)``."""

    sx: float
    sy: float
    sz: float

    def to_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz], dtype=float)

    @classmethod
    def from_array(cls, arr) -> "BlochVector":
        x, y, z = (float(v) for v in np.asarray(arr, dtype=float).reshape(3))
        return cls(x, y, z)


class InitialAngles(NamedTuple):
    """Polar and azimuthal angles of the pure initial state, in radians."""

    theta0: float
    phi0: float = 0.0


MAXIMALLY_MIXED = BlochVector(0.0, 0.0, 0.0)
BLANK = BlochVector(0.0, 0.0, -1.0)


def _check_angles(angles: InitialAngles) -> None:
    theta0, phi0 = angles
    if not (math.isfinite(theta0) and math.isfinite(phi0)):
        raise InvalidArgument(f"angles must be finite, got {angles!r}")
    if not 0.0 <= theta0 <= math.pi:
        raise InvalidArgument(f"theta0 must lie in [0, pi], got {theta0!r}")
    if not 0.0 <= phi0 < 2.0 * math.pi:
        raise InvalidArgument(f"phi0 must lie in [0, 2pi), got {phi0!r}")


def pure_state_ket(angles: InitialAngles) -> np.ndarray:
    """Return ``cos(theta0/2)|1> + exp(i phi0) sin(theta0/2)|0>`` as a 2-vector."""
    _check_angles(angles)
    theta0, phi0 = angles
    return math.cos(theta0 / 2) * KET_1 + np.exp(1j * phi0) * math.sin(theta0 / 2) * KET_0


def pure_state_from_angles(angles: InitialAngles) -> BlochVector:
    """Bloch vector of the pure state parameterized by ``(theta0, phi0)``.

    Raises:
        InvalidArgument: If ``theta0`` is outside ``[0, pi]`` or ``phi0`` outside
            ``[0, 2 pi)``.
    """
    _check_angles(angles)
    theta0, phi0 = angles
    s = math.sin(theta0)
    return BlochVector(s * math.cos(phi0), s * math.sin(phi0), math.cos(theta0))


def bloch_length(b) -> float:
    sx, sy, sz = b
    return math.sqrt(sx * sx + sy * sy + sz * sz)


def bloch_to_density(b) -> np.ndarray:
    """Map a Bloch vector to ``(I + b . sigma) / 2``.

    Raises:
        InvalidArgument: If ``|b|`` exceeds ``1 + ATOL_NUMERIC``.
    """
    sx, sy, sz = (float(v) for v in b)
    if not all(math.isfinite(v) for v in (sx, sy, sz)):
        raise InvalidArgument(f"Bloch vector must be finite, got {tuple(b)!r}")
    if bloch_length((sx, sy, sz)) > 1.0 + ATOL_NUMERIC:
        raise InvalidArgument(f"Bloch vector lies outside the unit ball: {tuple(b)!r}")
    return 0.5 * np.array(
        [[1.0 + sz, sx - 1j * sy], [sx + 1j * sy, 1.0 - sz]], dtype=complex
    )


def check_density_matrix(rho, *, atol: float = ATOL_EXACT, eig_floor: float = EIG_FLOOR) -> np.ndarray:
    """Validate and return ``rho`` as a ``(2, 2)`` complex array.

    Raises:
        InvalidArgument: If ``rho`` is not Hermitian, not unit trace, or has an
            eigenvalue below ``eig_floor``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise InvalidArgument(f"expected a 2x2 matrix, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise InvalidArgument("density matrix has non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise InvalidArgument("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise InvalidArgument(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
    if np.linalg.eigvalsh(rho)[0] < eig_floor:
        raise InvalidArgument("density matrix is not positive semidefinite")
    return rho


def density_to_bloch(rho) -> BlochVector:
    """Pauli expectations ``Tr(rho sigma_j)`` of a validated density matrix."""
    rho = check_density_matrix(rho)
    # Tr(rho sigma_1) = 2 Re rho_10 etc. in the (|1>, |0>) ordering
    off = rho[1, 0]
    return BlochVector(
        float(2.0 * off.real),
        float(2.0 * off.imag),
        float((rho[0, 0] - rho[1, 1]).real),
    )


def fidelity_to_blank(rho) -> float:
    """Fidelity ``sqrt(<0|rho|0>)`` with the blank state ``|0>``."""
    rho = check_density_matrix(rho)
    return math.sqrt(min(1.0, max(0.0, float(rho[1, 1].real))))


def purity(rho) -> float:
    rho = check_density_matrix(rho)
    return float(np.real(np.trace(rho @ rho)))


def trace_distance(rho1, rho2) -> float:
    """Half the trace norm of ``rho1 - rho2``, from the eigenvalues of the difference."""
    delta = check_density_matrix(rho1) - check_density_matrix(rho2)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(delta))))
