import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisypbt.bounds import m_low, m_up
from noisypbt.pauli import (
    PauliChannel,
    apply,
    apply_local,
    apply_local_batch,
    channel_quotient,
    channel_quotient_q,
    channel_root,
    compose,
    compose_many,
    depolarizing,
    eigenvalues,
    flip_channel,
    omega,
    q_matrix,
    scale,
    superoperator,
)
from noisypbt.pbt import noisy_resource_state
from noisypbt.states import KET0, PAULIS, bell_state, boundary_state_low, boundary_state_up, negativity, projector

from helpers import random_channel, random_density, random_pure

weights = st.lists(st.floats(0.0, 1.0), min_size=4, max_size=4).filter(lambda w: sum(w) > 1e-3)


def channel_from(w):
    w = np.asarray(w)
    return PauliChannel(w / w.sum())


def test_constructor_views():
    ch = PauliChannel.from_p(0.1, 0.2, 0.3)
    np.testing.assert_allclose(ch.weights, [0.85, 0.025, 0.05, 0.075])
    assert ch.p == pytest.approx((0.1, 0.2, 0.3))
    assert ch.p0 == pytest.approx(3.4)


def test_invalid_weights_rejected():
    with pytest.raises(ValueError):
        PauliChannel.from_p(-0.1, 0.0, 0.0)
    with pytest.raises(ValueError):
        PauliChannel.from_p(2.0, 2.0, 0.5)
    with pytest.raises(ValueError):
        PauliChannel(np.array([0.5, 0.5, 0.1, 0.0]))


def test_tiny_negative_weight_clamped():
    ch = PauliChannel(np.array([1.0 + 5e-13, -5e-13, 0.0, 0.0]))
    assert min(ch.weights) == 0.0


def test_omega_examples():
    assert omega(PauliChannel.identity()) == 0.0
    assert omega(depolarizing(0.3)) == pytest.approx(0.3)
    assert omega(flip_channel(3, 0.2)) == pytest.approx(0.2)


def test_flip_channel_examples():
    assert flip_channel(1, 0.2).p == pytest.approx((0.6, 0.0, 0.0))
    assert flip_channel(3, 0.0) == PauliChannel.identity() or np.allclose(
        flip_channel(3, 0.0).weights, PauliChannel.identity().weights
    )
    assert omega(flip_channel(2, 0.25)) == pytest.approx(0.25)


def test_flip_channel_kraus_weights():
    p = 0.2
    kraus = flip_channel(3, p).kraus_operators()
    norms = sorted(math.sqrt(np.trace(k.conj().T @ k).real / 2) for k in kraus if np.abs(k).max() > 0)
    assert norms == pytest.approx(sorted([math.sqrt(1 - 3 * p / 4), math.sqrt(3 * p / 4)]))


@pytest.mark.parametrize("axis,p", [(0, 0.1), (4, 0.1), (1, -0.1), (1, 1.4)])
def test_flip_channel_rejects(axis, p):
    with pytest.raises(ValueError):
        flip_channel(axis, p)


def test_apply_examples():
    rho = random_density(np.random.default_rng(0), 2)
    np.testing.assert_allclose(apply(PauliChannel.identity(), rho), rho, atol=1e-15)
    p = 0.2
    out = apply(flip_channel(1, p), projector(KET0))
    np.testing.assert_allclose(out, np.diag([1 - 3 * p / 4, 3 * p / 4]), atol=1e-15)
    out = apply(depolarizing(0.3), rho)
    np.testing.assert_allclose(out, 0.7 * rho + 0.3 * np.eye(2) / 2, atol=1e-15)


def test_apply_bad_qubit():
    with pytest.raises(ValueError):
        apply(depolarizing(0.1), np.eye(4) / 4, qubit=2)


def test_apply_local_bell_mixture():
    rng = np.random.default_rng(1)
    for _ in range(10):
        ch = random_channel(rng)
        out = apply_local(ch, ch, bell_state(0))
        mix = noisy_resource_state(ch)
        np.testing.assert_allclose(out, mix.density(), atol=1e-12)


def test_apply_local_identity():
    rho = random_density(np.random.default_rng(2), 4)
    ident = PauliChannel.identity()
    np.testing.assert_allclose(apply_local(ident, ident, rho), rho, atol=1e-15)


def test_apply_local_phase_flip_on_bell():
    p = 0.3
    w = 3 * p / 4
    ch = flip_channel(3, p)
    expected = (w**2 + (1 - w) ** 2) * bell_state(0) + 2 * w * (1 - w) * bell_state(3)
    np.testing.assert_allclose(apply_local(ch, ch, bell_state(0)), expected, atol=1e-15)


def test_apply_local_batch_matches_loop():
    rng = np.random.default_rng(3)
    rhos = np.array([random_density(rng, 4) for _ in range(3)])
    chans = [random_channel(rng) for _ in range(4)]
    out = apply_local_batch(rhos, np.array([c.weights for c in chans]))
    for s in range(3):
        for c, ch in enumerate(chans):
            np.testing.assert_allclose(out[s, c], apply_local(ch, ch, rhos[s]), atol=1e-14)


def test_eigenvalue_examples():
    assert eigenvalues(PauliChannel.identity()) == pytest.approx((1, 1, 1))
    assert eigenvalues(depolarizing(0.3)) == pytest.approx((0.7, 0.7, 0.7))
    p = 0.2
    assert eigenvalues(flip_channel(3, p)) == pytest.approx((1 - 1.5 * p, 1 - 1.5 * p, 1))


def test_superoperator_identity_and_action():
    np.testing.assert_array_equal(superoperator(PauliChannel.identity()), np.eye(4))
    rng = np.random.default_rng(4)
    ch = random_channel(rng)
    rho = random_density(rng, 2)
    bloch = np.array([np.trace(s @ rho).real for s in PAULIS])
    out = apply(ch, rho)
    bloch_out = np.array([np.trace(s @ out).real for s in PAULIS])
    np.testing.assert_allclose(superoperator(ch) @ bloch, bloch_out, atol=1e-14)


def test_compose_examples():
    rng = np.random.default_rng(5)
    x = random_channel(rng)
    np.testing.assert_allclose(compose(x, PauliChannel.identity()).weights, x.weights, atol=1e-15)
    d = compose(depolarizing(0.2), depolarizing(0.5))
    np.testing.assert_allclose(d.weights, depolarizing(1 - 0.8 * 0.5).weights, atol=1e-15)


def test_compose_many_empty_is_identity():
    np.testing.assert_array_equal(compose_many([]).weights, PauliChannel.identity().weights)


@settings(max_examples=200, deadline=None)
@given(weights, weights)
def test_compose_multiplies_eigenvalues(wa, wb):
    a, b = channel_from(wa), channel_from(wb)
    ab = compose(a, b)
    np.testing.assert_allclose(eigenvalues(ab), np.multiply(eigenvalues(a), eigenvalues(b)), atol=1e-12)
    np.testing.assert_allclose(superoperator(ab), superoperator(a) @ superoperator(b), atol=1e-12)
    np.testing.assert_allclose(ab.weights, compose(b, a).weights, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(weights, st.integers(0, 1))
def test_trace_and_positivity_preserved(w, seed):
    ch = channel_from(w)
    rho = random_density(np.random.default_rng(seed), 4)
    out = apply_local(ch, ch, rho)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.eigvalsh(out).min() >= -1e-10


@settings(max_examples=100, deadline=None)
@given(weights)
def test_from_eigenvalues_round_trip(w):
    ch = channel_from(w)
    np.testing.assert_allclose(PauliChannel.from_eigenvalues(eigenvalues(ch)).weights, ch.weights, atol=1e-12)


def test_channel_root_examples():
    ch = PauliChannel.from_p(0.1, 0.2, 0.3)
    np.testing.assert_allclose(channel_root(ch, 1).weights, ch.weights, atol=1e-15)
    r = channel_root(depolarizing(0.3), 2)
    assert eigenvalues(r) == pytest.approx([math.sqrt(0.7)] * 3)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 0.3), min_size=3, max_size=3), st.sampled_from([2, 5, 10]))
def test_channel_root_composes_back(p, L):
    # build the target as an L-th power so a valid root is known to exist
    base = PauliChannel.from_p(*p)
    target = compose_many([base] * L)
    root = channel_root(target, L)
    back = compose_many([root] * L)
    assert np.abs(superoperator(back) - superoperator(target)).max() < 1e-10
    np.testing.assert_allclose(root.weights, base.weights, atol=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.0, 0.4), min_size=3, max_size=3), st.sampled_from([2, 5, 10]))
def test_channel_root_valid_or_rejected(p, L):
    ch = PauliChannel.from_p(*p)
    try:
        root = channel_root(ch, L)
    except ValueError:
        return
    assert np.abs(superoperator(compose_many([root] * L)) - superoperator(ch)).max() < 1e-10


def test_channel_root_not_always_a_channel():
    with pytest.raises(ValueError, match="negative"):
        channel_root(PauliChannel.from_p(0.0, 0.25, 0.25), 2)


def test_channel_root_rejects_nonpositive_eigenvalue():
    with pytest.raises(ValueError):
        channel_root(flip_channel(1, 4 / 3), 2)
    with pytest.raises(ValueError):
        channel_root(depolarizing(0.5), 0)


def test_channel_quotient_examples():
    ch = PauliChannel.from_p(0.1, 0.2, 0.3)
    np.testing.assert_allclose(channel_quotient(ch, PauliChannel.identity()).weights, ch.weights, atol=1e-15)
    r = channel_quotient(depolarizing(1 - 0.56), depolarizing(1 - 0.7))
    np.testing.assert_allclose(r.weights, depolarizing(1 - 0.8).weights, atol=1e-12)


def test_channel_quotient_rejects_invalid():
    with pytest.raises(ValueError):
        channel_quotient(depolarizing(0.1), depolarizing(0.3))


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.floats(0.0, 1.0), min_size=3, max_size=3).filter(lambda v: sum(v) > 1e-3),
    st.floats(0.05, 0.6),
    st.floats(0.05, 0.95),
)
def test_scaled_quotient_matches_q_path(direction, big_omega, ratio):
    d = np.asarray(direction)
    target = PauliChannel.from_p(*(3 * big_omega * d / d.sum()))
    inner = scale(target, ratio)
    try:
        r = channel_quotient(target, inner)
    except ValueError:
        with pytest.raises(ValueError):
            channel_quotient_q(target, inner)
        return
    assert np.abs(superoperator(compose(r, inner)) - superoperator(target)).max() < 1e-10
    np.testing.assert_allclose(channel_quotient_q(target, inner).weights, r.weights, atol=1e-10)


def test_scaled_quotient_can_be_invalid():
    # a scaled-down channel does not always divide the original inside the Pauli simplex
    target = PauliChannel.from_p(0.0, 0.75, 0.75)
    with pytest.raises(ValueError):
        channel_quotient(target, scale(target, 0.5))


def test_scaled_quotient_depolarizing_always_valid():
    for big_omega in np.linspace(0.05, 0.6, 12):
        for ratio in (0.1, 0.5, 0.9):
            r = channel_quotient(depolarizing(big_omega), depolarizing(ratio * big_omega))
            assert min(r.weights) >= 0


def test_q_matrix_singular():
    assert abs(np.linalg.det(q_matrix(flip_channel(1, 2 / 3)))) < 1e-12
    with pytest.raises(ValueError):
        channel_quotient_q(flip_channel(1, 2 / 3), flip_channel(1, 2 / 3))


def test_scale():
    assert scale(PauliChannel.from_p(0.3, 0.6, 0.9), 0.5).p == pytest.approx((0.15, 0.3, 0.45))


def _order_pairs(rng, n, gen):
    pairs = []
    while len(pairs) < n:
        a, b = gen(rng), gen(rng)
        na, nb = negativity(a), negativity(b)
        if na > nb > 0:
            pairs.append((a, b, na, nb))
        elif nb > na > 0:
            pairs.append((b, a, nb, na))
    return pairs


def test_order_preserved_when_bounds_separate():
    # for pure inputs at fixed omega, separated sandwich intervals force the order
    rng = np.random.default_rng(11)
    checked = 0
    for rho, tau, m_rho, m_tau in _order_pairs(rng, 400, random_pure):
        p = rng.dirichlet(np.ones(3)) * 3 * rng.uniform(0, 0.6)
        ch = PauliChannel.from_p(*p)
        om = omega(ch)
        if m_low(m_rho, om) <= m_up(m_tau, om):
            continue
        checked += 1
        assert negativity(apply_local(ch, ch, rho)) > negativity(apply_local(ch, ch, tau)) - 1e-12
    assert checked > 50


def test_local_noise_can_reverse_order():
    # the tight bound states at nearby negativities swap order under identical phase flips
    rho, tau = boundary_state_low(math.asin(0.8)), boundary_state_up(math.asin(0.75))
    assert negativity(rho) > negativity(tau)
    ch = flip_channel(3, 0.1)
    assert negativity(apply_local(ch, ch, rho)) == pytest.approx(m_low(0.8, 0.1), abs=1e-12)
    assert negativity(apply_local(ch, ch, tau)) == pytest.approx(m_up(0.75, 0.1), abs=1e-12)
    assert m_low(0.8, 0.1) < m_up(0.75, 0.1)
