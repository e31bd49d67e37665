"""Entanglement left in a two-qubit pure state after identical local Pauli noise.

``m0`` is the initial negativity (``sin(theta)`` for a Schmidt angle theta) and
``omega`` the average channel probability of the single-qubit channel. The
closed forms keep their absolute values, so they evaluate for omega > 2/3,
but they are only claimed as bounds for omega in [0, 2/3].
"""

from __future__ import annotations

import numpy.typing as npt

from .pauli import PauliChannel, apply_local
from .states import negativity


def _contraction(omega: float) -> float:
    return 1.0 - 1.5 * omega


def critical_m0(omega: float) -> float:
    """Smallest initial negativity for which every state stays entangled."""
    x = abs(_contraction(omega))
    if x == 0:
        raise ValueError("critical value diverges at omega = 2/3")
    return -0.5 * (x - 1.0 / x)


def m_low(m0: float, omega: float) -> float:
    x = _contraction(omega)
    return max(0.0, m0 * abs(x) + 0.5 * x * x - 0.5)


def m_up(m0: float, omega: float) -> float:
    x = _contraction(omega)
    return max(0.0, m0 * x * x)


def m_dep(m0: float, omega: float) -> float:
    """Negativity after depolarizing noise on both qubits; the same for every state with this m0."""
    return max(0.0, m0 * (1 - omega) ** 2 - omega * (1 - omega / 2))


def entanglement_after_local_noise(rho: npt.ArrayLike, ch: PauliChannel) -> float:
    return negativity(apply_local(ch, ch, rho))
