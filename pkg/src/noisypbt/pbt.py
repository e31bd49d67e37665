"""Closed-form quantities for standard port-based teleportation with a noisy resource.

The ideal N-port protocol on qubits acts as a depolarizing channel that keeps
the input with probability ``q_N = 2 f - 1``. When every port pair is hit by
the same local Pauli channel, the protocol becomes the Pauli map

    rho -> (1 + 3 q_N q_p)/4 rho + sum_j (1 - q_N q^(j))/4 sigma_j rho sigma_j

which factors into a depolarizing part and an environment Pauli channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .linalg import ComplexArray
from .pauli import PauliChannel, apply, compose, depolarizing
from .states import bell_state

IDENTITY_TOL = 1e-10


def _log_binom(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def entanglement_fidelity(N: int) -> float:
    """Exact entanglement fidelity of N-port PBT with the square-root measurement."""
    if N < 1:
        raise ValueError(f"need at least one port, got N={N}")
    terms = []
    for k in range(N + 1):
        bracket = (N - 2 * k - 1) / math.sqrt(k + 1) + (N - 2 * k + 1) / math.sqrt(N - k + 1)
        if N <= 50:
            weight = math.comb(N, k) / 2.0 ** (N + 3)
        else:
            weight = math.exp(_log_binom(N, k) - (N + 3) * math.log(2))
        terms.append(bracket * bracket * weight)
    return math.fsum(terms)


def teleportation_fidelity(N: int) -> float:
    return (2 * entanglement_fidelity(N) + 1) / 3


def q_n(N: int) -> float:
    """Probability that ideal N-port PBT passes the state through undepolarized."""
    return 2 * teleportation_fidelity(N) - 1


def asymptotic_entanglement_fidelity(N: int) -> float:
    return 1 - 3 / (4 * N)


def asymptotic_teleportation_fidelity(N: int) -> float:
    return 1 - 1 / (2 * N)


class BellMixture(NamedTuple):
    """Bell-diagonal state ``sum_k w_k |Psi^k><Psi^k|``."""

    w0: float
    w1: float
    w2: float
    w3: float

    @property
    def alphas(self) -> tuple[float, float, float, float]:
        return tuple(16 * w for w in self)  # type: ignore[return-value]

    def density(self) -> ComplexArray:
        return sum(w * bell_state(k) for k, w in enumerate(self))


def noisy_resource_state(ch: PauliChannel) -> BellMixture:
    """Bell pair after the same Pauli channel on both halves."""
    p0 = ch.p0
    p1, p2, p3 = ch.p
    alphas = (
        p0 * p0 + p1 * p1 + p2 * p2 + p3 * p3,
        2 * (p0 * p1 + p2 * p3),
        2 * (p0 * p2 + p3 * p1),
        2 * (p0 * p3 + p1 * p2),
    )
    return BellMixture(*(a / 16 for a in alphas))


class EffectiveParams(NamedTuple):
    q_p: float
    q1: float
    q2: float
    q3: float


def effective_params(ch: PauliChannel) -> EffectiveParams:
    """Survival parameters of the environment part of the noisy PBT channel.

    Evaluated from the pairwise-difference formulas and checked against
    ``q^(j) = 1 - alpha_j / 4``; a mismatch raises ``ArithmeticError``.
    """
    p1, p2, p3 = ch.p
    d12 = (p1 - p2) ** 2
    d23 = (p2 - p3) ** 2
    d31 = (p3 - p1) ** 2
    q_p = ((1 - p1) ** 2 + (1 - p2) ** 2 + (1 - p3) ** 2) / 3 - (d12 + d23 + d31) / 12
    q1 = (1 - p1) ** 2 - (d12 - d23 + d31) / 4
    q2 = (1 - p2) ** 2 - (d12 + d23 - d31) / 4
    q3 = (1 - p3) ** 2 - (-d12 + d23 + d31) / 4

    alphas = noisy_resource_state(ch).alphas
    expected = [1 - a / 4 for a in alphas[1:]]
    got = [q1, q2, q3]
    err = max(abs(a - b) for a, b in zip(got, expected))
    if err > IDENTITY_TOL or abs(q_p - sum(got) / 3) > IDENTITY_TOL:
        raise ArithmeticError(f"effective parameters disagree with resource weights (err {err:.3e})")
    return EffectiveParams(q_p, q1, q2, q3)


@dataclass(frozen=True, eq=False)
class PbtChannel:
    """Noisy N-port PBT viewed as a single-qubit Pauli map.

    ``q_n_value`` defaults to the exact value for ``ports``; tests may inject
    1.0 to model the infinite-port limit.
    """

    ports: int
    noise: PauliChannel
    q_n_value: float | None = None

    def __post_init__(self) -> None:
        if self.ports < 1:
            raise ValueError(f"need at least one port, got {self.ports}")
        if self.q_n_value is None:
            object.__setattr__(self, "q_n_value", q_n(self.ports))
        object.__setattr__(self, "_params", effective_params(self.noise))

    @property
    def q_n(self) -> float:
        return self.q_n_value  # type: ignore[return-value]

    @property
    def params(self) -> EffectiveParams:
        return self._params  # type: ignore[attr-defined]

    @property
    def q_p(self) -> float:
        return self.params.q_p

    def coefficients(self) -> tuple[float, float, float, float]:
        qn = self.q_n
        e = self.params
        return (
            (1 + 3 * qn * e.q_p) / 4,
            (1 - qn * e.q1) / 4,
            (1 - qn * e.q2) / 4,
            (1 - qn * e.q3) / 4,
        )

    def as_pauli_channel(self) -> PauliChannel:
        return PauliChannel(self.coefficients())

    def teleportation_fidelity(self) -> float:
        return 0.5 + 0.5 * self.q_n * self.q_p

    def entanglement_fidelity(self) -> float:
        return 0.25 + 0.75 * self.q_n * self.q_p


def noisy_pbt_channel(N: int, noise: PauliChannel, q_n_value: float | None = None) -> PbtChannel:
    return PbtChannel(N, noise, q_n_value)


def apply_noisy_pbt(ch: PbtChannel, rho: npt.ArrayLike, qubit: int = 0) -> ComplexArray:
    return apply(ch.as_pauli_channel(), np.asarray(rho, dtype=complex), qubit)


def chain_decomposition(ch: PbtChannel) -> tuple[PauliChannel, PauliChannel]:
    """Split into (depolarizing from finite ports, environment noise).

    The depolarizing part has parameter ``1 - q_N`` and the environment part
    has channel probabilities ``1 - q^(j)``.
    """
    e = ch.params
    env = PauliChannel.from_p(1 - e.q1, 1 - e.q2, 1 - e.q3)
    return depolarizing(1 - ch.q_n), env


def chain_channel(ch: PbtChannel) -> PauliChannel:
    dep, env = chain_decomposition(ch)
    return compose(dep, env)
