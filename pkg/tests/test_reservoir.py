import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cascade_decay.exceptions import ConstraintError, DomainError
from cascade_decay.reservoir import (
    AtomOffsets,
    LorentzianTerm,
    ReservoirSpec,
    eval_A,
    eval_B,
    eval_d,
    eval_K,
    eval_R,
    kernel_closed_form,
    pbg_inhomogeneity,
    schwarz_split,
)

HIGH_Q = ReservoirSpec.high_q(5.0, 1.0)
PBG = ReservoirSpec.pbg(1.0, 4.0, 1.0)
ZERO = AtomOffsets()


def test_high_q_peak_value():
    # 25 * (1/2pi) / (1/4) = 50/pi
    assert eval_R(HIGH_Q, 0.0) == pytest.approx(50 / np.pi, rel=1e-14)


def test_pbg_zero_at_centre():
    assert abs(eval_R(PBG, 0.0)) < 1e-15
    shifted = ReservoirSpec.pbg(1.3, 3.0, 0.7, delta=2.5)
    assert abs(eval_R(shifted, 2.5)) < 1e-14


def test_pbg_off_centre_value():
    expected = 4 / (2 * np.pi * 104) - 0.25 / (2 * np.pi * 100.25)
    assert eval_R(PBG, 10.0) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.005725, abs=1e-6)


def test_pbg_derives_omega2():
    assert PBG.omega2 == pytest.approx(0.5, rel=1e-15)
    assert PBG.omega1 == 1.0 and PBG.gamma1 == 4.0 and PBG.gamma2 == 1.0


@pytest.mark.parametrize("gamma2", [4.0, 5.0])
def test_pbg_rejects_gamma2_not_below_gamma1(gamma2):
    with pytest.raises(ConstraintError, match="gamma2"):
        ReservoirSpec.pbg(1.0, 4.0, gamma2)


def test_pbg_kind_rejects_unbalanced_terms():
    terms = (LorentzianTerm(1.0, 4.0), LorentzianTerm(-0.3, 1.0))
    with pytest.raises(ConstraintError):
        ReservoirSpec(terms, kind="pbg")


def test_general_rejects_negative_structure_function():
    terms = (LorentzianTerm(1.0, 1.0), LorentzianTerm(-2.0, 1.0, 0.0))
    with pytest.raises(ConstraintError, match="negative"):
        ReservoirSpec(terms)


def test_lorentzian_width_must_be_positive():
    with pytest.raises(ValueError):
        LorentzianTerm(1.0, 0.0)


def test_named_parameters_are_kind_specific():
    with pytest.raises(AttributeError):
        HIGH_Q.omega1
    with pytest.raises(AttributeError):
        PBG.gamma
    with pytest.raises(AttributeError):
        ReservoirSpec((LorentzianTerm(1.0, 1.0),)).delta


def test_high_q_allows_zero_coupling():
    spec = ReservoirSpec.high_q(0.0, 1.0)
    assert np.all(eval_R(spec, np.linspace(-5, 5, 11)) == 0)


@pytest.mark.parametrize("spec", [HIGH_Q, PBG, ReservoirSpec(
    (LorentzianTerm(2.0, 1.0, -3.0), LorentzianTerm(0.5, 0.2, 4.0)), eta=2.0)])
def test_area_equals_total_weight(spec):
    area = 0.0
    for lo, hi in [(-np.inf, -10), (-10, 10), (10, np.inf)]:
        area += quad(lambda x: eval_R(spec, x), lo, hi, epsabs=1e-13, epsrel=1e-12,
                     limit=400)[0]
    assert area == pytest.approx(spec.total_weight, rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(
    omega1=st.floats(0.1, 5.0),
    gamma1=st.floats(0.5, 10.0),
    ratio=st.floats(0.01, 0.99),
    delta=st.floats(-5.0, 5.0),
)
def test_pbg_structure_function_nonnegative(omega1, gamma1, ratio, delta):
    spec = ReservoirSpec.pbg(omega1, gamma1, ratio * gamma1, delta)
    assert spec.min_sampled_R() >= -1e-12 * omega1**2


def test_eval_A_examples():
    assert eval_A(HIGH_Q, ZERO, 1.0, 0.0) == pytest.approx(1 + 25 / 1.5, rel=1e-14)
    assert eval_A(PBG, ZERO, 1.0, 0.0) == pytest.approx(1 + 1 / 3 - 0.25 / 1.5, rel=1e-14)


def test_eval_A_zero_coupling():
    spec = ReservoirSpec.high_q(0.0, 1.0)
    s, dw = 0.3 + 2j, np.array([-1.0, 0.5])
    atom = AtomOffsets(0.7)
    np.testing.assert_allclose(eval_A(spec, atom, s, dw), s + 1j * (dw + 0.7), rtol=1e-15)


def test_eval_B_example_and_eta_scaling():
    assert eval_B(HIGH_Q, 1.0, 0.0, 0.0) == pytest.approx(2 * 50 / np.pi, rel=1e-14)
    eta2 = ReservoirSpec(HIGH_Q.terms, eta=2.0)
    s, dw, dwp = 0.4 + 1j, 0.3, -1.1
    r = eval_R(HIGH_Q, dwp)
    assert eval_B(eta2, s, dw, dwp) == pytest.approx((1 / (2 * s) + 1 / (s + 1j * (dw + dwp))) * r)


def test_zero_coupling_kernel_and_inhomogeneity():
    spec = ReservoirSpec.high_q(0.0, 1.0)
    atom = AtomOffsets(0.25)
    s, dw = 0.5 - 0.3j, np.linspace(-2, 2, 5)
    assert np.all(eval_K(spec, atom, s, dw[:, None], dw[None, :]) == 0)
    np.testing.assert_allclose(eval_d(spec, atom, s, dw), (-1j / s) / (s + 1j * (dw + 0.25)))


def test_kernel_closed_form_spec_points():
    k = eval_K(HIGH_Q, ZERO, 1 + 0.5j, 0.7, -1.3)
    assert k == pytest.approx(kernel_closed_form(HIGH_Q, ZERO, 1 + 0.5j, 0.7, -1.3), rel=1e-12)
    k = eval_K(PBG, ZERO, 0.8 + 0.2j, 1.1, 2.4)
    assert k == pytest.approx(kernel_closed_form(PBG, ZERO, 0.8 + 0.2j, 1.1, 2.4), rel=1e-12)


@pytest.mark.parametrize("spec,atom", [
    (HIGH_Q, ZERO),
    (ReservoirSpec.high_q(2.0, 0.7, delta=1.5), AtomOffsets(-2.0)),
    (PBG, ZERO),
    (ReservoirSpec.pbg(1.0, 4.0, 1.5, delta=-3.0), AtomOffsets(4.0)),
])
def test_generic_kernel_matches_closed_form_random_points(spec, atom):
    rng = np.random.default_rng(7)
    n = 1000
    s = rng.uniform(0.1, 3, n) + 1j * rng.uniform(-10, 10, n)
    dw, dwp = rng.uniform(-30, 30, n), rng.uniform(-30, 30, n)
    generic = eval_K(spec, atom, s, dw, dwp)
    closed = kernel_closed_form(spec, atom, s, dw, dwp)
    # Near the PBG zero both are tiny; compare against the kernel scale.
    scale = np.maximum(np.abs(closed), 1e-8 * np.abs(closed).max())
    assert np.max(np.abs(generic - closed) / scale) < 1e-10


def test_pbg_inhomogeneity_matches_generic():
    s, dw = 0.6 + 1.7j, np.linspace(-4, 4, 9)
    closed = pbg_inhomogeneity(1.0, 0.5, 4.0, 1.0, 0.0, 0.0, s, dw)
    np.testing.assert_allclose(eval_d(PBG, ZERO, s, dw), closed, rtol=1e-12)


def test_schwarz_split_examples():
    s = np.array([0.3 + 1j, 2.0 - 0.5j])
    r, i = schwarz_split(lambda z: z, s)
    np.testing.assert_allclose(r, s)
    np.testing.assert_allclose(i, 0, atol=1e-15)
    r, i = schwarz_split(lambda z: 1j * z, s)
    np.testing.assert_allclose(r, 0, atol=1e-15)
    np.testing.assert_allclose(i, s)
    w0 = 1.7
    r, i = schwarz_split(lambda z: 1 / (z + 1j * w0), s)
    np.testing.assert_allclose(r, s / (s**2 + w0**2), rtol=1e-14)
    np.testing.assert_allclose(i, -w0 / (s**2 + w0**2), rtol=1e-14)


def test_schwarz_split_real_axis_gives_re_im():
    s = np.linspace(0.1, 3, 7)
    k = eval_K(PBG, AtomOffsets(0.4), s, 1.3, -0.2)
    r, i = schwarz_split(lambda z: eval_K(PBG, AtomOffsets(0.4), z, 1.3, -0.2), s)
    np.testing.assert_allclose(r, k.real, rtol=1e-14)
    np.testing.assert_allclose(i, k.imag, rtol=1e-14)


def test_kernel_finite_on_contour():
    s = 0.2 + 1j * np.linspace(-200, 200, 2001)
    x = np.linspace(-30, 30, 61)
    k = eval_K(HIGH_Q, ZERO, s[:, None, None], x[:, None], x[None, :])
    assert np.all(np.isfinite(k))


def test_floor_violation_raises_domain_error():
    with pytest.raises(DomainError):
        eval_d(HIGH_Q, ZERO, 0.0, 0.0)
    with pytest.raises(DomainError):
        eval_B(HIGH_Q, 1e-3j, 1.0, -1.0, floor=1e-2)
