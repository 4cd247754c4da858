"""Independent reference: exact propagation by exponentiating the Lindblad superoperator.

Built from scratch from Pauli matrices so that it shares no code with the
package's integrator or closed form.
"""

import math

import numpy as np
from scipy.linalg import expm

SM = np.array([[0, 0], [1, 0]], dtype=complex)  # |0><1| in (|1>, |0>) ordering
SP = SM.conj().T


def superoperator(gamma0, omega, T, r, Phi):
    n_th = 0.0 if T == 0 else 1.0 / math.expm1(omega / T)
    R = math.cosh(r) * SM + np.exp(1j * Phi) * math.sinh(r) * SP
    ops = [math.sqrt(gamma0 * (n_th + 1) / 2) * R, math.sqrt(gamma0 * n_th / 2) * R.conj().T]
    eye = np.eye(2)
    L = np.zeros((4, 4), dtype=complex)
    for A in ops:
        AdA = A.conj().T @ A
        # column-stacking: vec(X rho Y) = (Y^T kron X) vec(rho)
        L += 2 * np.kron(A.conj(), A) - np.kron(eye, AdA) - np.kron(AdA.T, eye)
    return L


def propagate(b0, gamma0, omega, T, r, Phi, t):
    sx, sy, sz = b0
    rho = 0.5 * np.array([[1 + sz, sx - 1j * sy], [sx + 1j * sy, 1 - sz]])
    vec = expm(superoperator(gamma0, omega, T, r, Phi) * t) @ rho.reshape(-1, order="F")
    out = vec.reshape(2, 2, order="F")
    return np.array([2 * out[1, 0].real, 2 * out[1, 0].imag, (out[0, 0] - out[1, 1]).real])
