"""Exact small-N simulation of the PBT protocol.

Wire order for the full register is ``(B_1..B_N, A_1..A_N, C)``: Bob's ports,
Alice's ports, then the input qubit. Alice's measurement acts on
``(A_1..A_N, C)`` in that order. The simulator never materializes the full
register: Bob's discarded ports are traced out before the measurement, which
is legal because the POVM does not touch them, and after a reduced pair is
traced the retained port B_j sits on a fixed output wire.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import ComplexArray, kron, partial_trace, permute_subsystems, psd_inv_sqrt
from .pauli import PauliChannel, apply
from .pbt import noisy_pbt_channel
from .states import PAULIS, bell_state

N_MAX = 7
#: the dense 2N-qubit resource matrix is 16 * 4**(2N) bytes
DENSE_RESOURCE_MAX = 5
COMPLETENESS_TOL = 1e-9
POSITIVITY_TOL = 1e-10


@dataclass(frozen=True)
class PortConfig:
    ports: int
    noise: PauliChannel = field(default_factory=PauliChannel.identity)

    def __post_init__(self) -> None:
        if not 1 <= self.ports <= N_MAX:
            raise ValueError(f"ports must be in 1..{N_MAX}, got {self.ports}")


def noisy_pair(noise: PauliChannel) -> ComplexArray:
    """Bell pair (B_i, A_i) after the noise channel on each half."""
    rho = bell_state(0)
    return apply(noise, apply(noise, rho, 0), 1)


def resource_state(cfg: PortConfig) -> ComplexArray:
    """The full 2N-qubit resource, ordered (B_1..B_N, A_1..A_N)."""
    N = cfg.ports
    if N > DENSE_RESOURCE_MAX:
        raise ValueError(f"dense resource state limited to N <= {DENSE_RESOURCE_MAX}")
    pairs = kron(*[noisy_pair(cfg.noise)] * N)
    # kron order is B_1, A_1, B_2, A_2, ...
    order = [2 * i for i in range(N)] + [2 * i + 1 for i in range(N)]
    return permute_subsystems(pairs, [2] * (2 * N), order)


def _place_pair(pair: ComplexArray, i: int, j: int, n: int) -> ComplexArray:
    """Embed a two-qubit operator on wires (i, j) of an n-qubit register, identity elsewhere."""
    full = np.kron(pair, np.eye(2 ** (n - 2), dtype=complex))
    rest = [k for k in range(n) if k not in (i, j)]
    # full currently has wires ordered (i, j, rest...)
    current = [i, j] + rest
    order = [current.index(k) for k in range(n)]
    return permute_subsystems(full, [2] * n, order)


def signal_state(N: int, i: int) -> ComplexArray:
    """Signal state for outcome ``i`` (1-based) on (A_1..A_N, C)."""
    if not 1 <= i <= N:
        raise ValueError(f"port index {i} outside 1..{N}")
    n = N + 1
    return _place_pair(bell_state(0), N, i - 1, n) / 2 ** (N - 1)


def srm_povm(N: int) -> list[ComplexArray]:
    """Square-root measurement on (A_1..A_N, C), completed to a resolution of identity.

    The leftover ``I - sum_i Pi'^(i)`` (the kernel of the signal-state sum) is
    shared equally among the N outcomes.
    """
    if not 1 <= N <= N_MAX:
        raise ValueError(f"N must be in 1..{N_MAX}, got {N}")
    dim = 2 ** (N + 1)
    taus = [signal_state(N, i) for i in range(1, N + 1)]
    t_inv_sqrt = psd_inv_sqrt(sum(taus))
    primed = [t_inv_sqrt @ tau @ t_inv_sqrt for tau in taus]
    delta = (np.eye(dim) - sum(primed)) / N
    povm = [p + delta for p in primed]

    total = sum(povm)
    if np.abs(total - np.eye(dim)).max() > COMPLETENESS_TOL:
        raise ArithmeticError("POVM elements do not sum to identity")
    for p in povm:
        if np.linalg.eigvalsh((p + p.conj().T) / 2)[0] < -POSITIVITY_TOL:
            raise ArithmeticError("POVM element is not positive semidefinite")
    return povm


def _channel_on_basis(cfg: PortConfig, povm: list[ComplexArray], rho_c: ComplexArray) -> ComplexArray:
    N = cfg.ports
    pair = noisy_pair(cfg.noise)
    others = np.eye(2 ** (N - 1), dtype=complex) / 2 ** (N - 1)
    n = N + 2  # (B_j, A_1..A_N, C)
    out = np.zeros((2, 2), dtype=complex)
    for j, pi in enumerate(povm):
        # built as (B_j, A_j, other A's in order, C), then moved into place
        state = kron(pair, others, rho_c)
        others_idx = [1 + k for k in range(N) if k != j]
        current = [0, 1 + j] + others_idx + [N + 1]
        order = [current.index(k) for k in range(n)]
        state = permute_subsystems(state, [2] * n, order)
        meas = np.kron(np.eye(2), pi) @ state
        out += partial_trace(meas, [2, 2 ** (N + 1)], keep=[0])
    return out


def simulate_channel(cfg: PortConfig, rho_c: np.ndarray, povm: list[ComplexArray] | None = None) -> ComplexArray:
    """Bob's output state for input ``rho_c``, summed over Alice's outcomes."""
    if povm is None:
        povm = srm_povm(cfg.ports)
    return _channel_on_basis(cfg, povm, np.asarray(rho_c, dtype=complex))


def simulate_channel_choi(cfg: PortConfig) -> ComplexArray:
    """Choi matrix (reference, output) of the simulated protocol."""
    povm = srm_povm(cfg.ports)
    choi = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            unit = np.zeros((2, 2), dtype=complex)
            unit[a, b] = 1.0
            choi += np.kron(unit, _channel_on_basis(cfg, povm, unit)) / 2
    return choi


def pauli_choi(weights) -> ComplexArray:
    """Choi matrix (reference, output) of the Pauli map with the given weights."""
    phi = bell_state(0)
    choi = np.zeros((4, 4), dtype=complex)
    for w, s in zip(weights, PAULIS):
        k = np.kron(np.eye(2), s)
        choi += w * (k @ phi @ k.conj().T)
    return choi


def analytic_choi(cfg: PortConfig, q_n_value: float | None = None) -> ComplexArray:
    ch = noisy_pbt_channel(cfg.ports, cfg.noise, q_n_value)
    return pauli_choi(ch.coefficients())


def choi_discrepancy(cfg: PortConfig) -> float:
    """Max-norm distance between simulated and closed-form Choi matrices."""
    return float(np.abs(simulate_channel_choi(cfg) - analytic_choi(cfg)).max())
