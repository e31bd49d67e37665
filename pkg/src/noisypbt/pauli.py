"""Single-qubit Pauli channels.

A channel is stored as its Kraus weights ``(w0, w1, w2, w3)`` summing to one,
where ``sigma_k`` is applied with weight ``w_k``. The ``p`` view used in the
constructors is four times the weights, so ``p0 + p1 + p2 + p3 = 4``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import numpy.typing as npt

from .linalg import ComplexArray
from .states import I2, PAULIS, check_density

WEIGHT_TOL = 1e-12

# rows: weights from transfer eigenvalues (1, l1, l2, l3), up to a factor 1/4
_HADAMARD = np.array(
    [
        [1, 1, 1, 1],
        [1, 1, -1, -1],
        [1, -1, 1, -1],
        [1, -1, -1, 1],
    ],
    dtype=float,
)


class PauliTransfer(NamedTuple):
    """Nontrivial eigenvalues of the Pauli transfer matrix.

    ``lambda23`` multiplies the sigma_1 component of the Bloch vector, and so
    on cyclically; ``lambda_ij = 1 - (p_i + p_j) / 2``.
    """

    lambda23: float
    lambda31: float
    lambda12: float


def _clean_weights(w: npt.ArrayLike) -> np.ndarray:
    w = np.asarray(w, dtype=float).copy()
    if w.shape != (4,):
        raise ValueError(f"expected 4 weights, got shape {w.shape}")
    if np.any(w < -WEIGHT_TOL):
        raise ValueError(f"negative channel weight in {w.tolist()}")
    w[w < 0] = 0.0
    if abs(w.sum() - 1) > 1e-10:
        raise ValueError(f"weights sum to {w.sum():.15g}, not 1")
    return w


@dataclass(frozen=True, eq=False)
class PauliChannel:
    weights: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(float(x) for x in _clean_weights(self.weights)))

    @classmethod
    def from_p(cls, p1: float, p2: float, p3: float) -> PauliChannel:
        if min(p1, p2, p3) < -WEIGHT_TOL or p1 + p2 + p3 > 4 + WEIGHT_TOL:
            raise ValueError(f"invalid channel probabilities ({p1}, {p2}, {p3})")
        p0 = 4.0 - p1 - p2 - p3
        return cls((p0 / 4, p1 / 4, p2 / 4, p3 / 4))

    @classmethod
    def from_eigenvalues(cls, lam: Sequence[float]) -> PauliChannel:
        l1, l2, l3 = lam
        return cls(tuple(_HADAMARD @ np.array([1.0, l1, l2, l3]) / 4))

    @classmethod
    def identity(cls) -> PauliChannel:
        return cls((1.0, 0.0, 0.0, 0.0))

    @property
    def p(self) -> tuple[float, float, float]:
        return (4 * self.weights[1], 4 * self.weights[2], 4 * self.weights[3])

    @property
    def p0(self) -> float:
        return 4 * self.weights[0]

    def __repr__(self) -> str:
        p1, p2, p3 = self.p
        return f"PauliChannel(p=({p1:.6g}, {p2:.6g}, {p3:.6g}))"

    def kraus_operators(self) -> list[ComplexArray]:
        return [np.sqrt(w) * s for w, s in zip(self.weights, PAULIS) if w > 0]


def depolarizing(p: float) -> PauliChannel:
    """(1 - p) rho + p I/2."""
    return PauliChannel.from_p(p, p, p)


def flip_channel(axis: int, p: float) -> PauliChannel:
    """Bit (1), bit-phase (2) or phase (3) flip with average probability ``p``.

    sigma_axis is applied with probability ``3p/4``.
    """
    if axis not in (1, 2, 3):
        raise ValueError(f"flip axis must be 1, 2 or 3, got {axis}")
    if not 0.0 <= 3 * p <= 4.0:
        raise ValueError(f"flip probability p={p} needs 0 <= 3p <= 4")
    p_vec = [0.0, 0.0, 0.0]
    p_vec[axis - 1] = 3 * p
    return PauliChannel.from_p(*p_vec)


def omega(ch: PauliChannel) -> float:
    """Average of the channel probabilities, (p1 + p2 + p3) / 3."""
    return sum(ch.p) / 3


def eigenvalues(ch: PauliChannel) -> PauliTransfer:
    lam = _HADAMARD @ np.asarray(ch.weights)
    return PauliTransfer(float(lam[1]), float(lam[2]), float(lam[3]))


def superoperator(ch: PauliChannel) -> npt.NDArray[np.float64]:
    """Pauli transfer matrix in the (sigma_0..sigma_3) basis: diag(1, l23, l31, l12)."""
    return np.diag([1.0, *eigenvalues(ch)])


def compose(outer: PauliChannel, inner: PauliChannel) -> PauliChannel:
    """Weights of ``outer o inner`` from the Pauli multiplication table.

    sigma_i sigma_j is proportional to sigma_(i xor j) with the indexing
    1=X, 2=Y, 3=Z, and Pauli channels commute, so argument order is cosmetic.
    """
    a, b = outer.weights, inner.weights
    out = [0.0, 0.0, 0.0, 0.0]
    for i in range(4):
        for j in range(4):
            out[i ^ j] += a[i] * b[j]
    return PauliChannel(tuple(out))


def compose_many(channels: Sequence[PauliChannel]) -> PauliChannel:
    result = PauliChannel.identity()
    for ch in channels:
        result = compose(ch, result)
    return result


def _embed(op: ComplexArray, qubit: int, n_qubits: int) -> ComplexArray:
    mats = [I2] * n_qubits
    mats[qubit] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def apply(ch: PauliChannel, rho: npt.ArrayLike, qubit: int = 0) -> ComplexArray:
    """Apply the channel to one qubit of a multi-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim or rho.shape != (dim, dim):
        raise ValueError(f"state of shape {rho.shape} is not a qubit register")
    if not 0 <= qubit < n:
        raise ValueError(f"qubit {qubit} out of range for {n} qubits")
    out = np.zeros_like(rho)
    for w, s in zip(ch.weights, PAULIS):
        if w == 0:
            continue
        k = _embed(s, qubit, n)
        out += w * (k @ rho @ k.conj().T)
    return out


def apply_local(p: PauliChannel, q: PauliChannel, rho: npt.ArrayLike) -> ComplexArray:
    """(E_p x E_q) on a two-qubit state."""
    rho = check_density(rho, dim=4)
    return apply(q, apply(p, rho, 0), 1)


def _pauli_pairs() -> np.ndarray:
    return np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])


_PAIRS = _pauli_pairs()


def apply_local_batch(rhos: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Identical local channels on a batch of states.

    ``rhos`` has shape (S, 4, 4) and ``weights`` shape (C, 4); the result has
    shape (S, C, 4, 4) with entry [s, c] = (E_c x E_c)(rhos[s]).
    """
    sandwiched = np.einsum("klab,sbc,kldc->sklad", _PAIRS, rhos, _PAIRS.conj(), optimize=True)
    pair_w = np.einsum("ck,cl->ckl", weights, weights)
    return np.einsum("ckl,sklad->scad", pair_w, sandwiched)


def channel_root(ch: PauliChannel, L: int) -> PauliChannel:
    """Pauli channel whose L-fold composition is ``ch``.

    Uses the principal real root of each transfer eigenvalue; raises
    ``ValueError`` if an eigenvalue is not positive or the root is not a valid
    channel.
    """
    if L < 1:
        raise ValueError(f"L must be a positive integer, got {L}")
    lam = np.array(eigenvalues(ch))
    if np.any(lam <= 0):
        raise ValueError(f"no real L-th root: transfer eigenvalues {lam.tolist()}")
    root = lam ** (1.0 / L)
    l1, l2, l3 = root
    eps = 0.25 * np.array([1 + l1 - l2 - l3, 1 - l1 + l2 - l3, 1 - l1 - l2 + l3])
    w = np.r_[1 - eps.sum(), eps]
    return PauliChannel(tuple(w))


def channel_quotient(target: PauliChannel, inner: PauliChannel) -> PauliChannel:
    """Channel ``r`` with ``compose(r, inner) == target``, by eigenvalue division."""
    lam_t = np.array(eigenvalues(target))
    lam_q = np.array(eigenvalues(inner))
    if np.any(np.abs(lam_q) < 1e-14):
        raise ValueError("inner channel has a zero transfer eigenvalue; quotient undefined")
    return PauliChannel.from_eigenvalues(lam_t / lam_q)


def q_matrix(inner: PauliChannel) -> npt.NDArray[np.float64]:
    """Linear map with ``4 (p_target - p_inner) = Q r`` for ``target = r o inner``."""
    q1, q2, q3 = inner.p
    q0 = 4 - (q1 + q2 + q3)
    m = np.array(
        [
            [q1, q1 - q3, q1 - q2],
            [q2 - q3, q2, -q1 + q2],
            [-q2 + q3, -q1 + q3, q3],
        ]
    )
    return q0 * np.eye(3) - m


def channel_quotient_q(target: PauliChannel, inner: PauliChannel) -> PauliChannel:
    """Same quotient as :func:`channel_quotient`, solved through the Q matrix."""
    q1, q2, q3 = inner.p
    if abs((q1 + q2 - 2) * (q2 + q3 - 2) * (q3 + q1 - 2)) < 1e-14:
        raise ValueError("Q matrix is singular for this inner channel")
    r = 4 * np.linalg.solve(q_matrix(inner), np.array(target.p) - np.array(inner.p))
    return PauliChannel.from_p(*r)


def scale(ch: PauliChannel, factor: float) -> PauliChannel:
    """Multiply the channel probabilities by ``factor`` (changes the average accordingly)."""
    return PauliChannel.from_p(*(factor * x for x in ch.p))
