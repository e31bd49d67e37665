"""Port-based entanglement teleportation: each qubit of a pair sent through its own noisy PBT."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np
import numpy.typing as npt

from .bounds import m_low, m_up
from .linalg import ComplexArray
from .pauli import PauliChannel, apply_local, compose, depolarizing, flip_channel
from .pbt import effective_params, noisy_pbt_channel, q_n
from .states import boundary_state_low, boundary_state_up, check_density, negativity

Bound = Literal["low", "up"]


class UnvalidatedRegionWarning(UserWarning):
    """The environment channel cannot take the phase-flip shape, so the bound is not known to be tight."""


@dataclass(frozen=True, eq=False)
class PbetSetting:
    ports: int
    noise: PauliChannel
    state: np.ndarray
    q_n_value: float | None = None


def apply_pbet(s: PbetSetting) -> ComplexArray:
    rho = check_density(s.state, dim=4)
    ch = noisy_pbt_channel(s.ports, s.noise, s.q_n_value).as_pauli_channel()
    return apply_local(ch, ch, rho)


def _qn(N: int, q_n_value: float | None) -> float:
    return q_n(N) if q_n_value is None else q_n_value


def m_free(N: int, m0: float, q_n_value: float | None = None) -> float:
    """Teleported negativity with a noiseless resource."""
    qn = _qn(N, q_n_value)
    return max(0.0, -0.5 + qn * qn * (m0 + 0.5))


def n_dep(p: float) -> float:
    """Negativity of a Bell pair after depolarizing(p) on both halves."""
    return max(0.0, (3 * (1 - p) ** 2 - 1) / 2)


def m_dep_pbet(N: int, p: float, m0: float, q_n_value: float | None = None) -> float:
    qn = _qn(N, q_n_value)
    r = (1 + 2 * n_dep(p)) / 3
    return max(0.0, -0.5 + qn * qn * r * r * (m0 + 0.5))


def phase_flip_representable(q_p: float) -> bool:
    return 2 / 3 - 1e-12 <= q_p <= 1 + 1e-12


def m_bound_pbet(
    N: int, q_p: float, m0: float, which: Bound, q_n_value: float | None = None
) -> float:
    """Lower or upper bound on teleported negativity for environment survival ``q_p``.

    Below ``q_p = 2/3`` the formula is still evaluated but an
    :class:`UnvalidatedRegionWarning` is issued.
    """
    if not phase_flip_representable(q_p):
        warnings.warn(
            f"q_p={q_p:.6g} outside [2/3, 1]; bound not validated", UnvalidatedRegionWarning, stacklevel=2
        )
    qn = _qn(N, q_n_value)
    env_omega = 1 - q_p
    if which == "low":
        m_env = m_low(m0, env_omega)
    elif which == "up":
        m_env = m_up(m0, env_omega)
    else:
        raise ValueError(f"which must be 'low' or 'up', got {which!r}")
    return max(0.0, m_env * qn * qn - (1 - qn * qn) / 2)


def m_bound_pbet_from_noise(N: int, noise: PauliChannel, m0: float, which: Bound) -> float:
    return m_bound_pbet(N, effective_params(noise).q_p, m0, which)


def boundary_pbet_negativity(
    N: int, q_p: float, m0: float, which: Bound, q_n_value: float | None = None
) -> float:
    """Negativity of the boundary state pushed through depolarizing o phase-flip on both qubits."""
    qn = _qn(N, q_n_value)
    theta = math.asin(m0)
    rho = boundary_state_low(theta) if which == "low" else boundary_state_up(theta)
    ch = compose(depolarizing(1 - qn), flip_channel(3, 1 - q_p))
    return negativity(apply_local(ch, ch, rho))


def asymptotic_bounds(N: int, omega: float, m0: float) -> tuple[float, float]:
    """Large-N, small-omega approximations of the (low, up) PBET bounds."""
    port_loss = (2 * m0 + 1) / N
    low = max(0.0, m0 - 6 * omega * (m0 + 1) / 2 - port_loss)
    up = max(0.0, m0 - 6 * omega * m0 - port_loss)
    return low, up


def pbet_negativity(N: int, noise: PauliChannel, rho: npt.ArrayLike) -> float:
    return negativity(apply_pbet(PbetSetting(N, noise, np.asarray(rho))))
