"""Dense complex matrix helpers.

Subsystem ordering: factor 0 is the leftmost tensor factor, so for a
two-qubit ket ``|ab>`` qubit ``a`` is index 0.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np
import numpy.typing as npt

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-10

ComplexArray = npt.NDArray[np.complex128]


def kron(*mats: npt.ArrayLike) -> ComplexArray:
    """Kronecker product of any number of matrices, left to right."""
    if not mats:
        raise ValueError("kron needs at least one matrix")
    return reduce(np.kron, (np.asarray(m, dtype=complex) for m in mats))


def _check_square(m: np.ndarray, dims: Sequence[int]) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise ValueError(f"subsystem dims {list(dims)} do not match matrix dim {m.shape[0]}")


def partial_trace(m: npt.ArrayLike, dims: Sequence[int], keep: Sequence[int]) -> ComplexArray:
    """Trace out every subsystem not listed in ``keep``.

    The kept subsystems stay in ascending order. Keeping nothing returns the
    1x1 matrix ``[[tr(m)]]``.
    """
    m = np.asarray(m, dtype=complex)
    dims = list(dims)
    _check_square(m, dims)
    keep = sorted(set(keep))
    if any(k < 0 or k >= len(dims) for k in keep):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} subsystems")
    n = len(dims)
    t = m.reshape(dims + dims)
    # trace from the highest index down so axis positions stay valid
    for ax in reversed(range(n)):
        if ax in keep:
            continue
        cur = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=ax + cur)
    d = int(np.prod([dims[k] for k in keep])) if keep else 1
    return t.reshape(d, d)


def partial_transpose(m: npt.ArrayLike, dims: Sequence[int], subsystem: int) -> ComplexArray:
    """Transpose the chosen tensor factor of a bipartite (or multipartite) operator."""
    m = np.asarray(m, dtype=complex)
    dims = list(dims)
    _check_square(m, dims)
    if not 0 <= subsystem < len(dims):
        raise ValueError(f"subsystem {subsystem} out of range")
    n = len(dims)
    t = m.reshape(dims + dims)
    axes = list(range(2 * n))
    axes[subsystem], axes[subsystem + n] = axes[subsystem + n], axes[subsystem]
    return t.transpose(axes).reshape(m.shape)


def permute_subsystems(m: npt.ArrayLike, dims: Sequence[int], order: Sequence[int]) -> ComplexArray:
    """Reorder tensor factors of a square operator.

    ``order[k]`` names the input factor that ends up in position ``k``.
    """
    m = np.asarray(m, dtype=complex)
    dims = list(dims)
    _check_square(m, dims)
    order = list(order)
    if sorted(order) != list(range(len(dims))):
        raise ValueError(f"order {order} is not a permutation of {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims).transpose(order + [n + k for k in order])
    return t.reshape(m.shape)


def is_hermitian(m: npt.ArrayLike, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(np.abs(m - m.conj().T).max() < tol)


def hermitian_eigs(m: npt.ArrayLike) -> tuple[npt.NDArray[np.float64], ComplexArray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    The input is symmetrized before solving so that roundoff-level
    anti-Hermitian parts do not leak into the spectrum.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigh((m + m.conj().T) / 2)


def psd_inv_sqrt(m: npt.ArrayLike, support_tol: float = 1e-10) -> ComplexArray:
    """Inverse square root of a PSD matrix restricted to its support.

    Eigenvalues at or below ``support_tol * max_eigenvalue`` are treated as
    kernel and mapped to zero.
    """
    w, v = hermitian_eigs(m)
    if w.size and w[0] < -PSD_TOL:
        raise ValueError(f"matrix has negative eigenvalue {w[0]:.3e}")
    top = w[-1] if w.size else 0.0
    cutoff = support_tol * top if top > 0 else support_tol
    inv = np.zeros_like(w)
    on = w > cutoff
    inv[on] = 1.0 / np.sqrt(w[on])
    return (v * inv) @ v.conj().T
