import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from quenchwork.sampling import SampleConfig, TraceVector
from quenchwork.work import (
    ModeCoefficients,
    jackknife_mean,
    mixed_moment_mc,
    sample_work,
    skewness_proxy,
    theoretical_variance,
    work_value,
    work_values,
)

finite = st.floats(-5, 5, allow_nan=False)


def coeff_strategy(m):
    return st.builds(
        lambda a, b: ModeCoefficients(0.0, a, b),
        arrays(float, m, elements=finite), arrays(float, m, elements=finite),
    )


def test_work_value_examples(fig1_coeffs):
    assert work_value(TraceVector(np.array([1, 0, 0], dtype=complex), 80), fig1_coeffs) == 2.0
    assert work_value(np.array([1j, 1j, 1j]), fig1_coeffs) == 0.0
    zero = ModeCoefficients(0.0, [0, 0], [0, 0])
    assert work_value(np.array([3 + 1j, -2j]), zero) == 0.0


def test_work_value_length_mismatch(fig1_coeffs):
    with pytest.raises(ValueError):
        work_value(np.array([1.0, 2.0]), fig1_coeffs)


@given(c1=coeff_strategy(4), c2=coeff_strategy(4),
       t=arrays(complex, 4, elements=st.complex_numbers(max_magnitude=10)))
def test_linearity(c1, c2, t):
    lhs = work_value(t, c1 + c2)
    rhs = work_value(t, c1) + work_value(t, c2)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(lhs))


def test_alpha_convention_matches_complex_form():
    # W = 2 Re sum alpha_r T_r
    rng = np.random.default_rng(0)
    alpha = rng.normal(size=5) + 1j * rng.normal(size=5)
    t = rng.normal(size=5) + 1j * rng.normal(size=5)
    c = ModeCoefficients.from_alpha(alpha)
    assert abs(work_value(t, c) - 2 * np.real(np.sum(alpha * t))) <= 1e-12


@given(alpha=arrays(complex, st.integers(1, 8), elements=st.complex_numbers(max_magnitude=3)))
def test_variance_in_alpha_form(alpha):
    c = ModeCoefficients.from_alpha(alpha)
    r = np.arange(1, len(alpha) + 1)
    expected = 2 * np.sum(r * np.abs(alpha) ** 2)
    assert abs(theoretical_variance(c) - expected) <= 1e-12 * (1 + expected)
    np.testing.assert_allclose(c.alpha, alpha, atol=1e-15)


def test_theoretical_variance_examples(fig1_coeffs):
    assert theoretical_variance(fig1_coeffs) == pytest.approx(5.46, abs=1e-12)
    assert theoretical_variance(ModeCoefficients(0.0, [0.0], [0.0])) == 0.0
    assert theoretical_variance(ModeCoefficients.from_alpha([0.3])) == pytest.approx(2 * 0.09)


def test_from_modes_places_harmonics():
    c = ModeCoefficients.from_modes([2, 4], [0.5, 0.25])
    np.testing.assert_allclose(c.a, [0, 1.0, 0, 0.5])
    np.testing.assert_allclose(c.b, 0)


def test_json_round_trip(fig1_coeffs):
    back = ModeCoefficients.from_json(fig1_coeffs.to_json())
    assert np.array_equal(back.a, fig1_coeffs.a) and np.array_equal(back.b, fig1_coeffs.b)
    c = ModeCoefficients.from_json({"alpha_re": [1.0, 0.7, 0.5]})
    np.testing.assert_allclose(c.a, fig1_coeffs.a)
    assert c.alpha_input and c.to_json()["converted_from_alpha"]
    assert not ModeCoefficients(0.0, [1.0], []).alpha_input


def test_skewness_proxy_examples():
    assert skewness_proxy(ModeCoefficients(0.0, [1, 0, 0], [0, 0, 0])) == (1.0, 1.0, 1.0)
    assert skewness_proxy(ModeCoefficients(0.0, [0.0], [1.0])) == (1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        skewness_proxy(ModeCoefficients(0.0, [0.0, 0.0], [0.0, 0.0]))


def test_skewness_proxy_shrinks_with_more_modes():
    def ratio(m):
        r = np.arange(1, m + 1)
        a = np.exp(-0.5 * r)
        s = np.sum(r * a**2)
        t = np.sum(r**1.5 * a**3)
        return t / s**1.5

    short = skewness_proxy(ModeCoefficients(0.0, np.exp(-0.5 * np.arange(1, 11)), []))
    long = skewness_proxy(ModeCoefficients(0.0, np.exp(-0.5 * np.arange(1, 21)), []))
    assert short[2] == pytest.approx(ratio(10), rel=1e-13)
    assert long[2] == pytest.approx(ratio(20), rel=1e-13)
    assert long[2] < short[2]


def test_jackknife_matches_classical_se_for_mean():
    x = np.random.default_rng(1).normal(size=500)
    mean, se = jackknife_mean(x)
    assert mean == pytest.approx(x.mean())
    assert se == pytest.approx(x.std(ddof=1) / np.sqrt(len(x)), rel=1e-10)


@pytest.fixture(scope="module")
def n80_traces():
    from quenchwork.sampling import sample_traces

    return sample_traces(SampleConfig(80, 3, 20_000, seed=21))


def test_mixed_moment_unbalanced_vanishes(n80_traces):
    est = mixed_moment_mc(n80_traces, [(1, False), (2, False), (3, False)])
    assert est.within(0)


def test_mixed_moment_fourth(n80_traces):
    est = mixed_moment_mc(n80_traces, [(2, False), (2, False), (2, True), (2, True)])
    assert est.within(8)


def test_mixed_moment_second(n80_traces):
    assert mixed_moment_mc(n80_traces, [(2, False), (2, True)]).within(2)
    assert mixed_moment_mc(n80_traces, [(1, False), (2, False)]).within(0)


def test_mixed_moment_needs_samples():
    with pytest.raises(ValueError):
        mixed_moment_mc(np.zeros((10, 2), dtype=complex), [(1, False)])


def test_surrogate_equivalence(fig1_coeffs):
    n = 2000
    out = {}
    for mode in ("haar", "surrogate"):
        w = sample_work(SampleConfig(80, 3, n, seed=5, mode=mode), fig1_coeffs).values
        out[mode] = (w.mean(), w.var(ddof=1))
    dm = out["haar"][0] - out["surrogate"][0]
    se_m = np.sqrt((out["haar"][1] + out["surrogate"][1]) / n)
    dv = out["haar"][1] - out["surrogate"][1]
    se_v = np.hypot(*(v * np.sqrt(2 / (n - 1)) for _, v in out.values()))
    assert abs(dm) <= 3 * se_m
    assert abs(dv) <= 3 * se_v


def test_work_values_vectorised(fig1_coeffs):
    t = np.random.default_rng(2).normal(size=(7, 4)) + 0j
    np.testing.assert_allclose(work_values(t, fig1_coeffs),
                               [work_value(row, fig1_coeffs) for row in t])


def test_sample_work_rejects_short_power(fig1_coeffs):
    with pytest.raises(ValueError):
        sample_work(SampleConfig(8, 2, 10), fig1_coeffs)
