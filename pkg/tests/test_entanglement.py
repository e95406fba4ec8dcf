import numpy as np
import pytest

from conftest import random_density_matrix, random_unitary
from nrentangle.coupling import plasmonic_1d_rates
from nrentangle.dynamics import BASIS_ORDER, analytic_unidirectional, basis_state, bell_state
from nrentangle.entanglement import (
    YY,
    ConcurrenceTrace,
    c_max_unidir,
    concurrence_1d,
    concurrence_recip,
    concurrence_unidir,
    is_x_state,
    spin_flip,
    wootters,
)

SY = np.array([[0, -1j], [1j, 0]])


def to_basis(M):
    """Computational (q1 q2) basis -> |1>..|4> basis."""
    P = np.eye(4)[list(BASIS_ORDER)]
    return P @ M @ P.T


def test_spin_flip_operator():
    np.testing.assert_allclose(YY, to_basis(np.kron(SY, SY)), atol=0)


def test_bell_and_product():
    assert wootters(bell_state()) == pytest.approx(1.0, abs=1e-14)
    assert wootters(basis_state(4)) == 0
    assert wootters(np.eye(4) / 4) == 0


def test_range_on_random_states(rng):
    for k in range(1000):
        rho = random_density_matrix(rng, rank=1 + k % 4)
        c = wootters(rho)
        assert 0 <= c <= 1 + 1e-12


def test_pure_state_closed_form(rng):
    for _ in range(50):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        v /= np.linalg.norm(v)
        # |<psi| sy sy |psi*>| in the computational basis
        vc = v[np.argsort(BASIS_ORDER)]
        ref = abs(vc @ np.kron(SY, SY) @ vc)
        assert wootters(np.outer(v, v.conj())) == pytest.approx(ref, abs=1e-7)


def test_local_unitary_invariance(rng):
    n_entangled = 0
    for _ in range(50):
        # full rank: zero eigenvalues of rho rho~ are only resolved to ~sqrt(eps)
        rho = 0.8 * random_density_matrix(rng, rank=1) + 0.2 * np.eye(4) / 4
        U = to_basis(np.kron(random_unitary(rng), random_unitary(rng)))
        c = wootters(rho)
        n_entangled += c > 0.05
        assert wootters(U @ rho @ U.conj().T) == pytest.approx(c, abs=1e-10)
    assert n_entangled > 10


def test_local_unitary_invariance_rank_deficient(rng):
    for _ in range(50):
        rho = random_density_matrix(rng, rank=2)
        U = to_basis(np.kron(random_unitary(rng), random_unitary(rng)))
        assert wootters(U @ rho @ U.conj().T) == pytest.approx(wootters(rho), abs=1e-7)


def test_x_state_path_matches_eigensolver(rng):
    for t in np.linspace(0, 10, 41):
        rho = analytic_unidirectional(t, 1.0, 0.9, 0.3)
        assert is_x_state(rho)
        assert wootters(rho, method="xstate") == pytest.approx(wootters(rho, method="eig"), abs=1e-7)
        # block form: C = 2 |rho43|
        assert wootters(rho) == pytest.approx(2 * abs(rho[3, 2]), abs=1e-15)
    assert not is_x_state(random_density_matrix(rng))
    with pytest.raises(ValueError):
        wootters(random_density_matrix(rng), method="xstate")


def test_analytic_closure():
    t = np.linspace(0, 10, 2001)
    C = np.array([wootters(r) for r in analytic_unidirectional(t, 1.0, 0.9, 0.0)])
    assert np.max(np.abs(C - concurrence_unidir(t, 1.0, 0.9, 0.0))) < 1e-9
    assert wootters(analytic_unidirectional(1.0, 1.0, 0.9, 0.0)) == pytest.approx(0.9 / np.e, abs=1e-12)


def test_unidir_examples():
    t = np.linspace(0, 5, 11)
    assert np.all(concurrence_unidir(t, 1.0, 0.0, 0.0) == 0)
    assert c_max_unidir(0.9, 0.0) == pytest.approx(0.9 / np.e)
    np.testing.assert_allclose(concurrence_unidir(t, 1.0, 0.0, 0.45), concurrence_unidir(t, 1.0, 0.9, 0.0), rtol=1e-15)
    with pytest.raises(ValueError):
        concurrence_unidir(-1.0, 1.0, 0.9, 0.0)


def test_recip_examples():
    t = np.linspace(0, 20, 101)
    assert np.all(concurrence_recip(t, 1.0, 0.0, 0.0) == 0)
    np.testing.assert_allclose(concurrence_recip(t, 1.0, 1.0, 0.0), 0.5 * (1 - np.exp(-2 * t)), atol=1e-15)
    with pytest.raises(ValueError):
        concurrence_recip(t, 1.0, 1.2, 0.0)


def test_1d_examples():
    t = np.linspace(0, 5, 21)
    a = concurrence_1d(t, 0.3, 1.0, 0.0, 1e-6)
    b = concurrence_1d(t, 0.3, 1.0, 0.0, 5e-6)
    np.testing.assert_array_equal(a, b)
    assert np.all(concurrence_1d(t, 0.0, 1.0, 1e5, 1e-6) == 0)


@pytest.mark.parametrize("kre,kim,sep", [(1.3e7, 0.0, 0.4e-6), (2.1e7, 3e5, 1.7e-6), (9e6, 1e6, 2.4e-6)])
def test_1d_matches_unidir_with_1d_rates(kre, kim, sep):
    r = plasmonic_1d_rates(0.0, 0.35, 1.0, complex(kre, kim), 0.0, sep)
    t = np.linspace(0, 8, 33)
    np.testing.assert_allclose(
        concurrence_1d(t, 0.35, 1.0, kim, sep),
        concurrence_unidir(t, 1.0, r.Gamma[1, 0], r.g[1, 0]),
        rtol=1e-12, atol=1e-15,
    )


def test_trace_container():
    tr = ConcurrenceTrace([0, 1, 2], [0, 0.3, 0.1], "analytic_unidir")
    assert tr.peak == (1.0, 0.3)
    with pytest.raises(ValueError):
        ConcurrenceTrace([0, 1], [0, 1.2], "analytic_unidir")
    with pytest.raises(ValueError):
        ConcurrenceTrace([0], [0], "guess")


def test_spin_flip_of_bell_is_itself():
    np.testing.assert_allclose(spin_flip(bell_state()), bell_state(), atol=1e-15)
