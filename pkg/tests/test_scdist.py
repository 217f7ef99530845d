import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freelab.errors import DomainError
from freelab.scdist import (
    QuarterCircleLaw,
    SemicircleLaw,
    catalan,
    qc_density,
    qc_expectation,
    qc_moment,
    qc_moment_quadrature,
    sc_cdf,
    sc_density,
    sc_expectation,
    sc_moment,
    sc_moment_quadrature,
    sc_quantile,
    sc_sample,
)


def test_catalan_numbers():
    assert [catalan(k) for k in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


@pytest.mark.parametrize("radius", [0.0, -1.0])
def test_radius_must_be_positive(radius):
    with pytest.raises(DomainError):
        SemicircleLaw(0.0, radius)
    with pytest.raises(DomainError):
        QuarterCircleLaw(radius)


def test_from_variance_radius():
    assert SemicircleLaw.from_variance(1.0).radius == pytest.approx(2.0)
    assert sc_moment(SemicircleLaw.from_variance(0.3), 2) == pytest.approx(0.3)


def test_density_integrates_to_one():
    for law in (SemicircleLaw(0, 1), SemicircleLaw(1.5, 0.3)):
        assert sc_expectation(law, lambda t: 1.0) == pytest.approx(1.0, abs=1e-10)
    assert qc_expectation(QuarterCircleLaw(0.7), lambda t: 1.0) == pytest.approx(1.0, abs=1e-10)


def test_density_values():
    law = SemicircleLaw(0, 2)
    assert sc_density(law, 0.0) == pytest.approx(1 / math.pi)
    assert sc_density(law, 2.5) == 0.0
    assert qc_density(QuarterCircleLaw(1), -0.1) == 0.0
    assert qc_density(QuarterCircleLaw(1), 0.0) == pytest.approx(4 / math.pi)


def test_unit_variance_moments_are_catalan():
    law = SemicircleLaw(0, 2)
    assert [sc_moment(law, m) for m in range(7)] == [1, 0, 1, 0, 2, 0, 5]


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 3.0])
@pytest.mark.parametrize("k", range(9))
def test_even_moments_against_quadrature(r, k):
    law = SemicircleLaw(0, r)
    closed = sc_moment(law, 2 * k)
    assert closed == pytest.approx(catalan(k) * (r / 2) ** (2 * k), rel=1e-15)
    assert abs(closed - sc_moment_quadrature(law, 2 * k)) <= 1e-9 * max(1.0, closed)


def test_shifted_moments_against_quadrature():
    law = SemicircleLaw(0.7, 1.3)
    for m in range(8):
        assert sc_moment(law, m) == pytest.approx(sc_moment_quadrature(law, m), abs=1e-10)


@pytest.mark.parametrize("k", range(9))
def test_quarter_even_moments_equal_semicircle(k):
    assert qc_moment(QuarterCircleLaw(1.7), 2 * k) == sc_moment(SemicircleLaw(0, 1.7), 2 * k)


@pytest.mark.parametrize("m", [1, 3, 5, 7])
def test_quarter_odd_moments(m):
    law = QuarterCircleLaw(1.3)
    assert qc_moment(law, m) == pytest.approx(qc_moment_quadrature(law, m), abs=1e-12)


def test_quarter_first_moment_closed_form():
    assert qc_moment(QuarterCircleLaw(1.0), 1) == pytest.approx(4 / (3 * math.pi), abs=1e-15)


def test_negative_order_rejected():
    with pytest.raises(DomainError):
        sc_moment(SemicircleLaw(), -1)
    with pytest.raises(DomainError):
        qc_moment(QuarterCircleLaw(), -2)


def test_cdf_endpoints_exact():
    law = SemicircleLaw(0.5, 2.0)
    assert sc_cdf(law, -1.5) == 0.0
    assert sc_cdf(law, 2.5) == 1.0
    assert sc_cdf(law, -10) == 0.0
    assert sc_cdf(law, 10) == 1.0
    assert sc_cdf(law, 0.5) == pytest.approx(0.5, abs=1e-15)


def test_cdf_monotone():
    law = SemicircleLaw(0, 1)
    t = np.linspace(-1.2, 1.2, 2001)
    assert np.all(np.diff(sc_cdf(law, t)) >= 0)


def test_quantile_endpoints():
    law = SemicircleLaw(0, 0.3)
    assert sc_quantile(law, 0.0) == -0.3
    assert sc_quantile(law, 1.0) == 0.3
    assert sc_quantile(law, 0.5) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("s", [-0.1, 1.1, float("nan")])
def test_quantile_domain(s):
    with pytest.raises(DomainError):
        sc_quantile(SemicircleLaw(), s)


def test_quantile_round_trip_grid():
    law = SemicircleLaw(0.2, 1.5)
    t = np.linspace(-1.3, 1.7, 4001)
    back = sc_quantile(law, sc_cdf(law, t))
    assert np.max(np.abs(back - t)) <= 1e-10


@settings(max_examples=200, deadline=None)
@given(
    st.floats(min_value=0.05, max_value=5.0),
    st.floats(min_value=-1.0, max_value=1.0),
    st.floats(min_value=-1.0, max_value=1.0),
)
def test_quantile_inverts_cdf(radius, center, u):
    law = SemicircleLaw(center, radius)
    t = center + u * radius
    assert abs(sc_quantile(law, sc_cdf(law, t)) - t) <= 1e-10 * max(1.0, radius)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=20))
def test_quantile_monotone(levels):
    law = SemicircleLaw(0, 1)
    s = np.sort(np.asarray(levels))
    assert np.all(np.diff(sc_quantile(law, s)) >= -1e-15)


def test_sampler_moments():
    rng = np.random.default_rng(5)
    x = sc_sample(SemicircleLaw(0, 2), rng, 200_000)
    assert abs(np.mean(x)) < 0.01
    assert abs(np.mean(x**2) - 1) < 0.01
    assert abs(np.mean(x**4) - 2) < 0.05
    assert np.all(np.abs(x) <= 2.0)


def test_sampler_deterministic():
    a = sc_sample(SemicircleLaw(), np.random.default_rng(1), 10)
    b = sc_sample(SemicircleLaw(), np.random.default_rng(1), 10)
    assert np.array_equal(a, b)
    assert sc_sample(SemicircleLaw(), np.random.default_rng(1), 0).shape == (0,)
