"""Monte Carlo search for the extremes of entanglement under local Pauli noise.

Channels are drawn uniformly from the plane ``p1 + p2 + p3 = 3 * omega``,
local rotations from the unit sphere, and the third Euler angle of the
first qubit from a fixed grid. Every combination is evaluated and the
extremes are reported, lowest flat index first on ties.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .bounds import critical_m0, m_dep, m_low, m_up
from .pauli import PauliChannel, apply_local_batch
from .states import EulerAngles, negativity_batch, schmidt_ket

Objective = Literal["min", "max"]
Extreme = tuple[EulerAngles, PauliChannel]


@dataclass(frozen=True)
class SampleGrid:
    n_simplex: int = 25
    n_sphere: int = 150
    gamma_steps: int = 7
    seed: int = 0

    def __post_init__(self) -> None:
        if min(self.n_simplex, self.n_sphere, self.gamma_steps) < 1:
            raise ValueError("sample counts must be at least 1")

    def gamma_values(self) -> np.ndarray:
        if self.gamma_steps == 1:
            return np.zeros(1)
        return np.linspace(0.0, 2 * math.pi, self.gamma_steps)


@dataclass(frozen=True, eq=False)
class BoundaryScanResult:
    min_value: float
    max_value: float
    argmin: Extreme
    argmax: Extreme
    n_evaluated: int
    # full evaluation table, kept for dumps; values[s, c] pairs angles[s] with channels[c]
    angles: tuple[EulerAngles, ...] = field(default=(), repr=False)
    channels: tuple[PauliChannel, ...] = field(default=(), repr=False)
    values: np.ndarray | None = field(default=None, repr=False)
    trace: tuple[float, ...] = field(default=(), repr=False)


def sample_simplex(omega: float, n: int, seed: int) -> list[PauliChannel]:
    if not 0.0 < omega <= 4 / 3:
        raise ValueError(f"omega={omega} outside (0, 4/3]")
    rng = np.random.default_rng(seed)
    pts = rng.dirichlet(np.ones(3), size=n) * (3 * omega)
    return [PauliChannel.from_p(*row) for row in pts]


def sample_sphere_pairs(n: int, seed: int) -> list[tuple[tuple[float, float], tuple[float, float]]]:
    """Area-uniform points on the sphere for each qubit, as (azimuth, polar) angle pairs."""
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    az = rng.uniform(0.0, 2 * math.pi, size=(n, 2))
    polar = np.arccos(rng.uniform(-1.0, 1.0, size=(n, 2)))
    return [((az[k, 0], polar[k, 0]), (az[k, 1], polar[k, 1])) for k in range(n)]


def _states(theta: float, angles: Sequence[EulerAngles]) -> np.ndarray:
    ket0 = schmidt_ket(theta)
    kets = np.array([a.local_unitary() @ ket0 for a in angles])
    return np.einsum("si,sj->sij", kets, kets.conj())


def evaluate(theta: float, angles: Sequence[EulerAngles], channels: Sequence[PauliChannel]) -> np.ndarray:
    """Negativity table of shape (len(angles), len(channels))."""
    rhos = _states(theta, angles)
    weights = np.array([c.weights for c in channels])
    return negativity_batch(apply_local_batch(rhos, weights))


def _extremes(values: np.ndarray, angles, channels) -> tuple[float, float, Extreme, Extreme]:
    n_c = values.shape[1]
    i_min = int(np.argmin(values))
    i_max = int(np.argmax(values))
    lo = (angles[i_min // n_c], channels[i_min % n_c])
    hi = (angles[i_max // n_c], channels[i_max % n_c])
    return float(values.flat[i_min]), float(values.flat[i_max]), lo, hi


def scan_angles(grid: SampleGrid) -> list[EulerAngles]:
    pairs = sample_sphere_pairs(grid.n_sphere, grid.seed + 1)
    return [
        EulerAngles(a[0], a[1], g, b[0], b[1]) for a, b in pairs for g in grid.gamma_values()
    ]


def boundary_scan(
    omega: float,
    theta: float,
    grid: SampleGrid,
    extra_angles: Sequence[EulerAngles] = (),
    extra_channels: Sequence[PauliChannel] = (),
) -> BoundaryScanResult:
    """Evaluate every (state, channel) combination of the grid and report the extremes.

    ``extra_angles`` and ``extra_channels`` are appended after the sampled
    ones, which lets known boundary candidates compete with the random draws.
    """
    angles = scan_angles(grid) + list(extra_angles)
    channels = sample_simplex(omega, grid.n_simplex, grid.seed) + list(extra_channels)
    if not angles or not channels:
        raise ValueError("empty sample grid")
    values = evaluate(theta, angles, channels)
    lo, hi, arg_lo, arg_hi = _extremes(values, angles, channels)
    return BoundaryScanResult(
        lo, hi, arg_lo, arg_hi, values.size, tuple(angles), tuple(channels), values
    )


def project_to_simplex(p: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum(x) = total}."""
    if total <= 0:
        return np.zeros_like(p)
    u = np.sort(p)[::-1]
    css = np.cumsum(u) - total
    idx = np.arange(1, p.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    tau = css[rho] / (rho + 1)
    return np.maximum(p - tau, 0.0)


_SIMPLEX_DIRS = [
    np.eye(3)[i] - np.eye(3)[j] for i in range(3) for j in range(3) if i != j
]


def refine_extreme(
    start: Extreme,
    objective: Objective,
    omega: float,
    theta: float,
    angle_step: float = 0.1,
    prob_step: float = 0.05,
    min_step: float = 1e-6,
    max_evals: int = 50_000,
    min_gain: float = 1e-12,
) -> BoundaryScanResult:
    """Projected coordinate search from ``start`` towards the min or max.

    Each sweep tries +/- the angle step on every Euler angle and moves along
    the six edge directions of the channel simplex; a move is kept only if it
    improves the objective by more than ``min_gain``. Steps halve after a
    sweep without improvement and the search stops below ``min_step``.
    The returned result holds the refined point on the objective side and the
    start point on the other side; ``trace`` is the accepted value sequence.
    """
    if objective not in ("min", "max"):
        raise ValueError(f"objective must be 'min' or 'max', got {objective!r}")
    sign = 1.0 if objective == "min" else -1.0
    total = 3 * omega
    ket0 = schmidt_ket(theta)

    def value(x: np.ndarray, p: np.ndarray) -> float:
        a = EulerAngles(*x)
        ket = a.local_unitary() @ ket0
        rho = np.outer(ket, ket.conj())[None]
        w = np.r_[1 - p.sum() / 4, p / 4][None]
        return float(negativity_batch(apply_local_batch(rho, w))[0, 0])

    x = np.array(start[0].as_tuple(), dtype=float)
    p = project_to_simplex(np.array(start[1].p, dtype=float), total)
    best = value(x, p)
    start_value = best
    trace = [best]
    evals = 1
    a_step, p_step = angle_step, prob_step

    while max(a_step, p_step) >= min_step and evals < max_evals:
        improved = False
        for k in range(5):
            for d in (a_step, -a_step):
                cand = x.copy()
                cand[k] += d
                v = value(cand, p)
                evals += 1
                if sign * (v - best) < -min_gain:
                    x, best = cand, v
                    trace.append(v)
                    improved = True
                    break
        for direction in _SIMPLEX_DIRS:
            cand = project_to_simplex(p + p_step * direction, total)
            if np.array_equal(cand, p):
                continue
            v = value(x, cand)
            evals += 1
            if sign * (v - best) < -min_gain:
                p, best = cand, v
                trace.append(v)
                improved = True
        if not improved:
            a_step /= 2
            p_step /= 2

    end = (EulerAngles(*x), PauliChannel.from_p(*p))
    begin = start
    if objective == "min":
        return BoundaryScanResult(best, start_value, end, begin, evals, trace=tuple(trace))
    return BoundaryScanResult(start_value, best, begin, end, evals, trace=tuple(trace))


def flip_vertex_distance(ch: PauliChannel) -> float:
    """Distance from the nearest single-axis flip channel, in relative probabilities p_i / sum(p)."""
    p = np.array(ch.p)
    total = p.sum()
    if total == 0:
        return 0.0
    rel = p / total
    return float(min(np.linalg.norm(rel - np.eye(3)[k]) for k in range(3)))


def surface_data(m0_grid: Sequence[float], omega_grid: Sequence[float]) -> list[dict]:
    rows = []
    for m0 in m0_grid:
        for om in omega_grid:
            try:
                critical = m0 >= critical_m0(om)
            except ValueError:
                critical = False
            rows.append(
                {
                    "m0": float(m0),
                    "omega": float(om),
                    "m_low": m_low(m0, om),
                    "m_up": m_up(m0, om),
                    "m_dep": m_dep(m0, om),
                    "critical": bool(critical),
                }
            )
    return rows


def slice_data(m0: float, omega_grid: Sequence[float]) -> list[dict]:
    """Bounds relative to the initial negativity along a line of fixed ``m0``."""
    if m0 <= 0:
        raise ValueError("relative entanglement needs m0 > 0")
    return [
        {
            "omega": float(om),
            "m_low_rel": m_low(m0, om) / m0,
            "m_up_rel": m_up(m0, om) / m0,
            "m_dep_rel": m_dep(m0, om) / m0,
        }
        for om in omega_grid
    ]
