import numpy as np

from noisypbt.pauli import PauliChannel


def random_unitary(rng, d):
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, d=4, rank=None):
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng, d=4):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_channel(rng, max_total=4.0):
    """Uniform over the weight simplex, restricted so that p1 + p2 + p3 <= max_total."""
    while True:
        w = rng.dirichlet(np.ones(4))
        if 4 * w[1:].sum() <= max_total:
            return PauliChannel(w)
