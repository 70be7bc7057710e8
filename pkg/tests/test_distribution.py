import numpy as np
import pytest
import scipy.stats
from hypothesis import given, strategies as st

from quenchwork.distribution import (
    CharfnTable,
    InversionWarning,
    default_u_grid,
    density_cdf,
    gaussian_charfn,
    gaussian_reference,
    invert_charfn,
    ks_distance,
    mc_density,
    unwrap_from_origin,
)
from quenchwork.sampling import SampleConfig
from quenchwork.toeplitz import charfn_toeplitz
from quenchwork.work import ModeCoefficients, sample_work


def test_gaussian_round_trip():
    table = gaussian_charfn(default_u_grid(1.0), 1.0)
    dens = invert_charfn(table, w_points=801, w_span=16.0)
    assert np.abs(dens.p - scipy.stats.norm.pdf(dens.w)).max() <= 1e-6
    assert abs(dens.norm_defect) <= 1e-6


def test_shifted_gaussian():
    table = gaussian_charfn(default_u_grid(1.0), 1.0, mean=2.5)
    dens = invert_charfn(table, w_points=801, w_span=16.0)
    assert dens.w[400] == pytest.approx(2.5)
    assert np.abs(dens.p - scipy.stats.norm.pdf(dens.w, loc=2.5)).max() <= 1e-6


def test_toeplitz_inversion_variance(fig1_coeffs):
    sigma = np.sqrt(5.46)
    table = charfn_toeplitz(fig1_coeffs, 0.0, default_u_grid(sigma, 1025), 80)
    dens = invert_charfn(table, w_points=1024)
    assert dens.variance() == pytest.approx(5.46, rel=0.01)
    assert abs(dens.norm_defect) <= 1e-6


def test_shift_covariance(fig1_coeffs):
    u = default_u_grid(np.sqrt(5.46), 1025)
    base = invert_charfn(charfn_toeplitz(fig1_coeffs, 0.0, u, 20), w_points=512, w_span=40.0,
                         center=0.0)
    delta = base.dw * 7
    moved = invert_charfn(charfn_toeplitz(fig1_coeffs, delta, u, 20), w_points=512,
                          w_span=40.0, center=0.0)
    np.testing.assert_allclose(moved.p[:-7], base.p[7:], atol=1e-10)


def test_nonuniform_grid_rejected():
    u = np.array([-1.0, -0.5, 0.0, 0.6, 1.0])
    with pytest.raises(ValueError, match="uniform"):
        invert_charfn(CharfnTable(u, np.ones(5), "gaussian"))


def test_asymmetric_grid_rejected():
    u = np.linspace(-1, 2, 31)
    with pytest.raises(ValueError, match="symmetric"):
        invert_charfn(CharfnTable(u, np.ones(31), "gaussian"))


def test_nyquist_enforced():
    table = gaussian_charfn(np.linspace(-8, 8, 161), 1.0)
    with pytest.raises(ValueError, match="Nyquist"):
        invert_charfn(table, w_span=100.0)


def test_insufficient_decay_warns():
    table = gaussian_charfn(np.linspace(-1, 1, 101), 1.0)
    with pytest.warns(InversionWarning):
        dens = invert_charfn(table, w_span=10.0)
    assert dens.decay_warning


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        CharfnTable(np.zeros(3), np.zeros(3), "magic")


def test_unwrap_from_origin_keeps_origin_value():
    u = np.linspace(-5, 5, 101)
    phase = 3.0 * u
    wrapped = np.angle(np.exp(1j * phase))
    np.testing.assert_allclose(unwrap_from_origin(u, wrapped), phase, atol=1e-12)


def test_mc_density_degenerate_raises():
    zero = ModeCoefficients(0.0, [0.0], [0.0])
    batch = sample_work(SampleConfig(4, 1, 200, seed=1), zero)
    with pytest.raises(ValueError, match="interquartile"):
        mc_density(batch)


def test_mc_density_mass_and_variance(fig1_coeffs):
    batch = sample_work(SampleConfig(80, 3, 1000, seed=31, mode="surrogate"),
                        ModeCoefficients.from_alpha([1.0]))
    dens = mc_density(batch)
    assert abs(dens.norm_defect) <= 1e-12
    n = 1000
    fig1 = sample_work(SampleConfig(80, 3, n, seed=32), fig1_coeffs).values
    var = fig1.var(ddof=1)
    assert abs(var - 5.46) <= 3 * var * np.sqrt(2 / (n - 1))


def test_mc_density_applies_shift():
    c = ModeCoefficients(0.5, [1.0], [0.0])
    batch = sample_work(SampleConfig(10, 1, 500, seed=3), c)
    dens = mc_density(batch, e0_shift=2.0)
    assert dens.mean() == pytest.approx(10 * 0.5 - 2.0 + batch.values.mean(), abs=0.2)


def test_mc_density_needs_samples():
    with pytest.raises(ValueError):
        mc_density(np.arange(50.0))


def test_gaussian_reference_examples(fig1_coeffs):
    ref = gaussian_reference(ModeCoefficients(0.0, [2.0], [0.0]), 0.0, 80)
    np.testing.assert_allclose(ref.p, scipy.stats.norm.pdf(ref.w, scale=np.sqrt(2)))
    ref = gaussian_reference(ModeCoefficients(1.0, [1.0], [0.0]), 10.0, 10)
    assert ref.mean() == pytest.approx(0.0, abs=1e-12)
    assert gaussian_reference(fig1_coeffs, 0.0, 80).variance() == pytest.approx(5.46, rel=1e-6)
    with pytest.raises(ValueError):
        gaussian_reference(ModeCoefficients(0.0, [0.0], [0.0]), 0.0, 4)


def test_three_way_agreement(fig1_coeffs):
    sigma = np.sqrt(5.46)
    dens = invert_charfn(charfn_toeplitz(fig1_coeffs, 0.0, default_u_grid(sigma, 1025), 80),
                         w_points=1024, w_span=16 * sigma)
    ref = gaussian_reference(fig1_coeffs, 0.0, 80, w=dens.w)
    assert np.abs(dens.p - ref.p).max() <= 0.01 * ref.p.max()
    n = 1000
    w = sample_work(SampleConfig(80, 3, n, seed=33), fig1_coeffs).values
    assert ks_distance(w, density_cdf(dens)) <= 1.63 / np.sqrt(n)
    assert ks_distance(w, density_cdf(ref)) <= 1.63 / np.sqrt(n)


def test_ks_distance_against_exact_cdf():
    x = scipy.stats.norm.ppf((np.arange(1, 101) - 0.5) / 100)
    assert ks_distance(x, scipy.stats.norm.cdf) == pytest.approx(0.005, abs=1e-12)


@given(var=st.floats(0.2, 20), mean=st.floats(-5, 5))
def test_mass_conservation(var, mean):
    table = gaussian_charfn(default_u_grid(np.sqrt(var), 1025), var, mean=mean)
    dens = invert_charfn(table, w_points=512)
    assert abs(dens.norm_defect) <= 1e-6
    assert dens.mean() == pytest.approx(mean, abs=1e-6 * (1 + np.sqrt(var)))
