"""Two-qubit states and the PPT negativity measure."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .linalg import ComplexArray, hermitian_eigs, is_hermitian, kron, partial_transpose

TRACE_TOL = 1e-12
PSD_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
PAULIS: tuple[ComplexArray, ...] = (
    I2,
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = (KET0 + KET1) / math.sqrt(2)
KET_MINUS = (KET0 - KET1) / math.sqrt(2)
BELL0 = (np.kron(KET0, KET0) + np.kron(KET1, KET1)) / math.sqrt(2)


def projector(ket: npt.ArrayLike) -> ComplexArray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def check_density(rho: npt.ArrayLike, dim: int | None = None) -> ComplexArray:
    """Return ``rho`` as an array, raising ``ValueError`` if it is not a valid state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise ValueError(f"expected a {dim}x{dim} density matrix, got {rho.shape}")
    if abs(np.trace(rho) - 1) > TRACE_TOL:
        raise ValueError(f"trace {np.trace(rho).real:.15g} differs from 1")
    if not is_hermitian(rho):
        raise ValueError("density matrix is not Hermitian")
    w, _ = hermitian_eigs(rho)
    if w[0] < -PSD_TOL:
        raise ValueError(f"density matrix has negative eigenvalue {w[0]:.3e}")
    return rho


def _check_theta(theta: float) -> None:
    if not 0.0 <= theta <= math.pi / 2 + 1e-15:
        raise ValueError(f"theta={theta} outside [0, pi/2]")


def bell_ket(k: int) -> ComplexArray:
    """|Psi^k> = (sigma_k x I)|Psi^0>."""
    if k not in (0, 1, 2, 3):
        raise ValueError(f"Bell index must be 0..3, got {k}")
    return np.kron(PAULIS[k], I2) @ BELL0


def bell_state(k: int) -> ComplexArray:
    return projector(bell_ket(k))


def schmidt_ket(theta: float) -> ComplexArray:
    _check_theta(theta)
    return math.cos(theta / 2) * np.kron(KET0, KET0) + math.sin(theta / 2) * np.kron(KET1, KET1)


def schmidt_state(theta: float) -> ComplexArray:
    """cos(theta/2)|00> + sin(theta/2)|11> as a density matrix; negativity is sin(theta)."""
    return projector(schmidt_ket(theta))


def euler_rotation(a1: float, a2: float, a3: float) -> ComplexArray:
    """Z-Y-Z Euler rotation ``Rz(a1) Ry(a2) Rz(a3)``."""

    def rz(a: float) -> ComplexArray:
        return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])

    c, s = math.cos(a2 / 2), math.sin(a2 / 2)
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    return rz(a1) @ ry @ rz(a3)


@dataclass(frozen=True)
class EulerAngles:
    """Local rotation angles for the two qubits.

    The first qubit gets ``Rz(alpha1) Ry(alpha2) Rz(gamma)``; the second gets
    ``Rz(beta1) Ry(beta2)`` with its third angle pinned to zero, since a
    z-rotation on either qubit acts identically on a Schmidt-form state.
    """

    alpha1: float = 0.0
    alpha2: float = 0.0
    gamma: float = 0.0
    beta1: float = 0.0
    beta2: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma", float(self.gamma) % (2 * math.pi))

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.alpha1, self.alpha2, self.gamma, self.beta1, self.beta2)

    def local_unitary(self) -> ComplexArray:
        u = euler_rotation(self.alpha1, self.alpha2, self.gamma)
        v = euler_rotation(self.beta1, self.beta2, 0.0)
        return np.kron(u, v)


#: angles that carry the Schmidt state onto the lower-bound state
LOW_BOUNDARY_ANGLES = EulerAngles(0.0, math.pi / 2, math.pi / 2, 0.0, math.pi / 2)


def general_pure_state(theta: float, angles: EulerAngles) -> ComplexArray:
    ket = angles.local_unitary() @ schmidt_ket(theta)
    return projector(ket)


def negativity(rho: npt.ArrayLike) -> float:
    """PPT negativity ``max(0, -2 * lambda_min(rho^T1))`` of a two-qubit state."""
    rho = check_density(rho, dim=4)
    w, _ = hermitian_eigs(partial_transpose(rho, [2, 2], 0))
    return max(0.0, -2.0 * float(w[0]))


def negativity_batch(rhos: np.ndarray) -> np.ndarray:
    """Vectorized negativity for a stack of 4x4 states, without validation."""
    t = rhos.reshape(-1, 2, 2, 2, 2).transpose(0, 3, 2, 1, 4).reshape(-1, 4, 4)
    t = (t + t.conj().transpose(0, 2, 1)) / 2
    w = np.linalg.eigvalsh(t)[:, 0]
    return np.maximum(0.0, -2.0 * w).reshape(rhos.shape[:-2])


def boundary_state_low(theta: float) -> ComplexArray:
    """cos(theta/2)|++> + i sin(theta/2)|-->, the minimizer under phase-flip noise."""
    _check_theta(theta)
    ket = math.cos(theta / 2) * kron(KET_PLUS, KET_PLUS) + 1j * math.sin(theta / 2) * kron(
        KET_MINUS, KET_MINUS
    )
    return projector(ket.ravel())


def boundary_state_up(theta: float) -> ComplexArray:
    """The maximizer under phase-flip noise; identical to the Schmidt state."""
    return schmidt_state(theta)


def werner_state(q: float) -> ComplexArray:
    return q * bell_state(0) + (1 - q) * np.eye(4, dtype=complex) / 4


def theta_from_negativity(m0: float) -> float:
    if not 0.0 <= m0 <= 1.0:
        raise ValueError(f"negativity {m0} outside [0, 1]")
    return math.asin(m0)
