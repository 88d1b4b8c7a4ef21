import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cascade_decay.exceptions import ConfigError, ConstraintError
from cascade_decay.master_equation import build_high_q_model, build_pbg_model, integrate
from cascade_decay.quasimode import (
    QuasimodeNetwork,
    adjugate,
    determinant,
    high_q_network,
    network_for,
    network_model,
    new_mode_transform,
    pbg_parameter_map,
    reservoir_from_network,
    transform_network,
)
from cascade_decay.reservoir import LorentzianTerm, ReservoirSpec, eval_R

OMEGAS = np.linspace(-30, 30, 1000)
finite = st.floats(-3, 3)


def test_symmetric_transform():
    u = new_mode_transform(1.3, 1.3)
    np.testing.assert_allclose(u, np.array([[-1, 1], [1, 1]]) / np.sqrt(2), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(a=finite, b=finite, c=finite, d=finite, density=st.floats(0.01, 10))
def test_transform_is_unitary(a, b, c, d, density):
    if np.hypot(np.hypot(a, b), np.hypot(c, d)) < 1e-6:
        return
    u = new_mode_transform(a + 1j * b, c + 1j * d, density)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(2), atol=1e-12)


def test_transform_rejects_zero_couplings():
    with pytest.raises(ConfigError):
        new_mode_transform(0.0, 0.0)


def test_transform_weight_of_first_mode():
    net = pbg_parameter_map(1.0, 4.0, 1.0)
    u = new_mode_transform(*net.continuum, density=net.density)
    assert abs(u[0, 0]) ** 2 == pytest.approx(0.2, rel=1e-14)


def test_pbg_map_parameters():
    net = pbg_parameter_map(1.0, 4.0, 1.0, delta=0.5)
    np.testing.assert_allclose(net.frequencies, [0.5, 0.5])
    np.testing.assert_allclose(np.abs(net.atom[0]), [np.sqrt(0.75 / 1.25), np.sqrt(0.75 / 1.25) / 2])
    np.testing.assert_allclose(np.abs(net.atom[0]), [0.774597, 0.387298], atol=1e-6)
    assert abs(net.couplings[0, 1]) == pytest.approx(1.0)
    np.testing.assert_allclose(net.decay_rates, [4.0, 1.0])
    np.testing.assert_array_equal(net.atom[0], net.atom[1])
    np.testing.assert_array_equal(net.frequency_shift_matrix, 0)


def test_pbg_map_constraint():
    with pytest.raises(ConstraintError):
        pbg_parameter_map(1.0, 1.0, 2.0)


@pytest.mark.parametrize("phases", [{}, dict(nu=1), dict(mu=-2, phi1=0.4), dict(xi=3)])
def test_transformed_couplings(phases):
    net = pbg_parameter_map(1.0, 4.0, 1.0, delta=-0.7, **phases)
    tc = transform_network(net)
    np.testing.assert_allclose(tc.mode_hamiltonian, [[-0.7, 1.0], [1.0, -0.7]], atol=1e-12)
    np.testing.assert_allclose(np.abs(tc.atom[:, 0]), 0, atol=1e-12)
    np.testing.assert_allclose(np.abs(tc.atom[:, 1]), np.sqrt(0.75), rtol=1e-12)
    np.testing.assert_allclose(tc.damping, [0.0, 5.0], atol=1e-12)


def test_high_q_reconstruction():
    spec = ReservoirSpec.high_q(5.0, 1.0, delta=1.5)
    net = high_q_network(5.0, 1.0, 1.5)
    target = eval_R(spec, OMEGAS)
    for k in (1, 2):
        got = reservoir_from_network(net, OMEGAS, k)
        assert np.max(np.abs(got - target) / target) < 1e-10


@pytest.mark.parametrize("args", [(1.0, 4.0, 1.0, 0.0), (2.0, 3.0, 0.5, 1.5), (0.3, 50.0, 10.0, -4.0)])
def test_pbg_reconstruction(args):
    spec = ReservoirSpec.pbg(*args)
    net = pbg_parameter_map(*args)
    target = eval_R(spec, OMEGAS)
    got = reservoir_from_network(net, OMEGAS, 1)
    near_zero = np.abs(target) < 1e-6 * target.max()
    assert np.max(np.abs(got - target)[~near_zero] / target[~near_zero]) < 1e-10
    assert np.max(np.abs(got - target)[near_zero], initial=0.0) < 1e-12
    assert reservoir_from_network(net, args[3], 2) < 1e-12


@pytest.mark.parametrize("phases", [dict(nu=2), dict(mu=1, phi1=-1.1), dict(density=0.3)])
def test_observables_independent_of_free_choices(phases):
    ref = pbg_parameter_map(1.0, 4.0, 1.0)
    alt = pbg_parameter_map(1.0, 4.0, 1.0, **phases)
    np.testing.assert_allclose(alt.decay_rates, ref.decay_rates, rtol=1e-14)
    np.testing.assert_allclose(reservoir_from_network(alt, OMEGAS, 1),
                               reservoir_from_network(ref, OMEGAS, 1), rtol=1e-10, atol=1e-15)
    t = np.linspace(0, 8, 17)
    np.testing.assert_allclose(integrate(network_model(alt), t).populations,
                               integrate(network_model(ref), t).populations, atol=1e-8)


def test_zero_atom_coupling_gives_zero_reservoir():
    net = QuasimodeNetwork([0.0, 1.0], [[0, 0.5], [0.5, 0]], [1.0, 0.5j], np.zeros((2, 2)))
    assert np.all(reservoir_from_network(net, OMEGAS, 1) == 0)


@settings(max_examples=40, deadline=None)
@given(
    nu=st.lists(finite, min_size=3, max_size=3),
    v=st.lists(finite, min_size=6, max_size=6),
    w=st.lists(finite, min_size=6, max_size=6),
    lam=st.lists(finite, min_size=6, max_size=6),
)
def test_random_three_mode_networks(nu, v, w, lam):
    v01, v02, v12 = v[0] + 1j * v[1], v[2] + 1j * v[3], v[4] + 1j * v[5]
    vm = np.array([[0, v01, v02], [np.conj(v01), 0, v12], [np.conj(v02), np.conj(v12), 0]])
    cont = np.array(w[:3]) + 1j * np.array(w[3:])
    atom = np.array(lam[:3]) + 1j * np.array(lam[3:])
    net = QuasimodeNetwork(nu, vm, cont, np.vstack([atom, atom]))
    r1 = reservoir_from_network(net, OMEGAS, 1)
    r2 = reservoir_from_network(net, OMEGAS, 2)
    assert np.all(r1 >= 0)
    np.testing.assert_array_equal(r1, r2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_adjugate_identity(n):
    rng = np.random.default_rng(n)
    m = rng.normal(size=(4, n, n)) + 1j * rng.normal(size=(4, n, n))
    adj = adjugate(m)
    det = determinant(m)
    np.testing.assert_allclose(adj @ m, det[:, None, None] * np.eye(n), atol=1e-12)
    np.testing.assert_allclose(det, np.linalg.det(m), rtol=1e-12)


def test_adjugate_order_limit():
    with pytest.raises(ValueError):
        adjugate(np.eye(4))


def test_network_must_be_hermitian():
    with pytest.raises(ConstraintError):
        QuasimodeNetwork([0, 0], [[0, 1.0], [2.0, 0]], [1, 1], np.ones((2, 2)))


def test_network_for_dispatch():
    assert network_for(ReservoirSpec.high_q(1.0, 1.0)).n == 1
    assert network_for(ReservoirSpec.pbg(1.0, 2.0, 1.0)).n == 2
    with pytest.raises(ConfigError):
        network_for(ReservoirSpec((LorentzianTerm(1.0, 1.0),)))


@pytest.mark.parametrize("delta,delta_bar", [(0.0, 0.0), (2.0, -1.0)])
def test_network_master_equation_matches_pseudomodes(delta, delta_bar):
    t = np.linspace(0, 10, 41)
    hq = integrate(network_model(high_q_network(5.0, 1.0, delta), delta_bar), t)
    ref = integrate(build_high_q_model(5.0, 1.0, delta, delta_bar), t)
    np.testing.assert_allclose(hq.populations, ref.populations, atol=1e-8)
    pbg = integrate(network_model(pbg_parameter_map(1.0, 4.0, 1.0, delta), delta_bar), t)
    ref = integrate(build_pbg_model(1.0, 4.0, 1.0, delta, delta_bar), t)
    np.testing.assert_allclose(pbg.populations, ref.populations, atol=1e-8)
