import numpy as np
import pytest
from hypothesis import given, strategies as st

from quenchwork.chains import (
    QuenchXY,
    XXChain,
    block_symbol_check,
    bogoliubov_angle,
    charfn_xy_product,
    effective_dispersion,
    initial_energy,
    loschmidt_factors,
    loschmidt_xy_product,
    xx_mode_coefficients,
    xy_dispersion,
)
from quenchwork.toeplitz import charfn_toeplitz
from quenchwork.work import theoretical_variance


def test_xx_coefficients():
    c = xx_mode_coefficients(XXChain((1.0,), 0.0))
    np.testing.assert_array_equal(c.a, [2.0])
    np.testing.assert_array_equal(c.b, [0.0])
    assert c.eps0 == 0.0
    c = xx_mode_coefficients(XXChain((0.5, 0.35, 0.25)))
    np.testing.assert_allclose(c.a, [1.0, 0.7, 0.5])
    c = xx_mode_coefficients(XXChain((), 1.0))
    assert c.eps0 == -1.0 and c.m == 0


def test_xx_dispersion_is_cosine_series():
    chain = XXChain((0.5, -0.2), 0.3)
    k = np.linspace(0, 2 * np.pi, 50)
    expected = -0.3 + 2 * (0.5 * np.cos(k) - 0.2 * np.cos(2 * k))
    np.testing.assert_allclose(xx_mode_coefficients(chain).dispersion(k), expected, atol=1e-14)


@given(h=st.floats(1.01, 10), k=st.floats(0, 2 * np.pi))
def test_angle_vanishes_without_anisotropy(h, k):
    assert bogoliubov_angle(0.0, h, k) == 0.0


def test_angle_examples():
    k = 0.9
    assert bogoliubov_angle(1.0, np.cos(k), k) == pytest.approx(np.pi / 4)
    assert bogoliubov_angle(1.0, 2.0, np.pi / 2) == pytest.approx(0.5 * np.arctan2(1, 2))


def test_product_at_time_zero():
    q = QuenchXY(0.5, 1.5, 1.0, 0.5, L=40)
    assert loschmidt_xy_product(q, 0.0) == 1


def test_xx_limit_is_pure_phase():
    q = QuenchXY(0.0, 1.3, 0.0, 2.4, L=60)
    t = np.linspace(-10, 10, 201)
    g = loschmidt_xy_product(q, t)
    assert np.abs(np.abs(g) - 1).max() <= 1e-12


def test_no_quench_phase():
    q = QuenchXY(0.7, 1.2, 0.7, 1.2, L=30)
    t = 1.7
    eps = xy_dispersion(0.7, 1.2, q.momenta)
    assert abs(loschmidt_xy_product(q, t) - np.exp(-1j * t * eps.sum())) <= 1e-12


def test_block_check_examples():
    q = QuenchXY(0.5, 1.5, 1.0, 0.5)
    det_phi, fsq = block_symbol_check(q, 0.0, 1.1)
    assert abs(det_phi - 1) <= 1e-14 and abs(fsq - 1) <= 1e-14
    det_phi, fsq = block_symbol_check(q, 0.7, 1.1)
    assert abs(det_phi - fsq) <= 1e-10
    same = QuenchXY(0.8, 1.4, 0.8, 1.4)
    k, t = 0.6, 2.3
    eps = xy_dispersion(0.8, 1.4, k)
    det_phi, fsq = block_symbol_check(same, t, k)
    assert abs(det_phi - np.exp(-2j * eps * t)) <= 1e-12
    assert abs(fsq - np.exp(-2j * eps * t)) <= 1e-12


@given(gi=st.floats(0, 2), hi=st.floats(-3, 3), gf=st.floats(0, 2), hf=st.floats(-3, 3),
       t=st.floats(-5, 5), k=st.floats(0.05, np.pi - 0.05))
def test_block_identity_property(gi, hi, gf, hf, t, k):
    # keep away from gap closings where d(k) = 0 and the angle is undefined
    if min(np.hypot(hi - np.cos(k), gi * np.sin(k)), np.hypot(hf - np.cos(k), gf * np.sin(k))) < 1e-3:
        return
    det_phi, fsq = block_symbol_check(QuenchXY(gi, hi, gf, hf), t, k)
    assert abs(det_phi - fsq) <= 1e-10


def test_signed_branch_agrees_in_paramagnet():
    a = QuenchXY(0.6, 1.8, 1.1, 1.4)
    b = QuenchXY(0.6, 1.8, 1.1, 1.4, branch="signed")
    t = np.linspace(0, 3, 7)
    np.testing.assert_allclose(loschmidt_xy_product(a, t), loschmidt_xy_product(b, t), atol=1e-12)


def test_invalid_ring():
    with pytest.raises(ValueError):
        QuenchXY(1, 1, 1, 1, L=7)
    with pytest.raises(ValueError):
        QuenchXY(1, 1, 1, 1, branch="other")


def test_effective_dispersion_xx_no_quench():
    eff = effective_dispersion(QuenchXY(0.0, 3.0, 0.0, 2.0))
    assert eff.alpha_tilde[0] == pytest.approx(4.0, abs=1e-13)
    assert eff.alpha_tilde[1] == pytest.approx(-1.0, abs=1e-13)
    assert np.abs(eff.alpha_tilde[2:]).max() <= 1e-13
    c = eff.mode_coefficients()
    assert c.m == 1 and c.a[0] == pytest.approx(-2.0)


def test_effective_dispersion_decays_exponentially():
    eff = effective_dispersion(QuenchXY(1.0, 2.0, 1.0, 1.5))
    m = np.arange(1, 25)
    mags = np.abs(eff.alpha_tilde[m])
    slope = np.polyfit(m, np.log(mags), 1)[0]
    assert slope < 0
    assert mags[-1] < 1e-6 * mags[0]


def test_effective_dispersion_reality():
    eff = effective_dispersion(QuenchXY(0.4, 0.3, 1.2, 1.7))
    m = np.arange(1, 50)
    assert np.abs(eff.coefficient(-m) - np.conj(eff.coefficient(m))).max() <= 1e-13
    # a real even symbol in k has real coefficients
    assert np.abs(eff.alpha_tilde.imag).max() <= 1e-13


def test_sigma2_matches_mode_variance():
    eff = effective_dispersion(QuenchXY(1.0, 2.0, 1.0, 1.5))
    assert eff.sigma2 == pytest.approx(theoretical_variance(eff.mode_coefficients()), rel=1e-12)


def test_grid_validation():
    with pytest.raises(ValueError):
        effective_dispersion(QuenchXY(1, 2, 1, 1.5), grid_size=1000)


def test_product_and_toeplitz_agree_to_second_order():
    q = QuenchXY(1.0, 2.0, 1.0, 1.5, L=64)
    coeffs = effective_dispersion(q).mode_coefficients()
    e0 = initial_energy(q)
    u = np.array([0.2, 0.1, 0.05, 0.025])
    prod = charfn_xy_product(q, u).chi
    toep = charfn_toeplitz(coeffs, e0, u, q.L // 2).chi
    ratio = np.abs(prod - toep) / u**2
    assert ratio.max() <= 2.0
    # genuinely quadratic: the ratio settles rather than blowing up or vanishing
    assert ratio[-1] == pytest.approx(ratio[-2], rel=0.1)


def test_product_charfn_basics():
    q = QuenchXY(0.5, 1.5, 1.0, 0.5, L=40)
    u = np.linspace(-1, 1, 21)
    table = charfn_xy_product(q, u)
    assert abs(table.chi[10] - 1) <= 1e-14
    np.testing.assert_allclose(table.chi[::-1], np.conj(table.chi), atol=1e-12)
    assert table.method == "product"


def test_unquenched_work_is_zero():
    q = QuenchXY(0.7, 1.2, 0.7, 1.2, L=30)
    table = charfn_xy_product(q, np.linspace(-3, 3, 13))
    np.testing.assert_allclose(table.chi, 1.0, atol=1e-12)


def test_factors_shape():
    q = QuenchXY(0.5, 1.5, 1.0, 0.5, L=10)
    assert loschmidt_factors(q, np.zeros(3)).shape == (3, 5)
