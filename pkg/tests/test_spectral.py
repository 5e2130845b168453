import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial.legendre import leggauss

from pmicsim import (
    CollapseProfile,
    DomainError,
    SlitAperture,
    ValidationError,
    WellConfig,
    coefficients_by_quadrature,
    eigenenergy,
    eigenfunction,
    parseval_deficit,
    slit_coefficients,
)

# mpmath, 40 digits: (1/sqrt a) * integral of u_n over the slit, L=1, y0=0.245, a=0.01
MP_C1 = 0.10155421860928046196
MP_C2 = -0.14132832308055561122
MP_C7 = -0.08824459653497454629


def test_eigenfunction_values():
    well = WellConfig(1.0)
    assert eigenfunction(1, 0.0, well) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert abs(eigenfunction(2, 0.0, well)) < 1e-15
    # mpmath: sqrt(2) sin(9 pi / 4) = 1 to 40 digits
    assert eigenfunction(3, 0.25, well) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3, 17, 1000])
def test_eigenfunction_vanishes_at_walls(n):
    well = WellConfig(2.5)
    assert eigenfunction(n, -1.25, well) == 0.0
    assert eigenfunction(n, 1.25, well) == 0.0


def test_eigenfunction_rejects_bad_input():
    well = WellConfig(1.0)
    with pytest.raises(DomainError):
        eigenfunction(1, 0.51, well)
    with pytest.raises(DomainError):
        eigenfunction(0, 0.0, well)


def test_orthonormality():
    well = WellConfig(1.0)
    x, w = leggauss(200)
    y = 0.5 * x
    u = np.array([eigenfunction(n, y, well) for n in range(1, 51)])
    gram = (u * (0.5 * w)) @ u.T
    assert np.max(np.abs(gram - np.eye(50))) < 1e-10


def test_eigenenergy():
    unit = WellConfig(1.0, 1.0)
    assert eigenenergy(1, unit) == pytest.approx(math.pi**2 / 2, rel=1e-15)
    assert eigenenergy(2, unit) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert eigenenergy(500, WellConfig(50.0)) == pytest.approx(50 * math.pi**2, rel=1e-14)
    n = np.arange(1, 200)
    e = eigenenergy(n, unit)
    assert np.all(np.diff(e) > 0)
    np.testing.assert_allclose(e / e[0], n.astype(float) ** 2, rtol=1e-15)
    with pytest.raises(DomainError):
        eigenenergy(0, unit)


def test_revival_time():
    assert WellConfig(1.0).revival_time() == pytest.approx(4 / math.pi)
    assert WellConfig(50.0).revival_time() == pytest.approx(4 * 2500 / math.pi)


def test_slit_coefficients_against_mpmath(well, slit):
    c = slit_coefficients(well, slit, 10).values
    assert c[0] == pytest.approx(MP_C1, rel=1e-13)
    assert c[1] == pytest.approx(MP_C2, rel=1e-13)
    assert c[6] == pytest.approx(MP_C7, rel=1e-13)


def test_centered_slit_has_no_even_modes(well):
    c = slit_coefficients(well, SlitAperture(0.0, 0.1), 2000).values
    assert np.all(np.abs(c[1::2]) < 1e-15)
    q = coefficients_by_quadrature(well, CollapseProfile.rectangular(SlitAperture(0.0, 0.1)), 200).values
    assert np.all(np.abs(q[1::2]) < 1e-13)


def test_whole_well_limit_closes_parseval():
    # a -> L: c_n = 2 sqrt2 / (n pi) for odd n (sqrt2 * integral of sin(n pi x) over [0, 1]), 0 for even n
    well = WellConfig(1.0)
    c = slit_coefficients(well, SlitAperture(0.0, 1.0 - 1e-12), 200001).values
    n = np.arange(1, 12)
    expect = np.where(n % 2 == 1, 2 * math.sqrt(2) / (n * math.pi), 0.0)
    np.testing.assert_allclose(c[:11], expect, atol=1e-11)
    assert parseval_deficit(slit_coefficients(well, SlitAperture(0.0, 1.0 - 1e-12), 200001)) < 1e-5


def test_slit_must_be_inside(well):
    with pytest.raises(DomainError):
        slit_coefficients(well, SlitAperture(0.6, 0.01), 10)
    with pytest.raises(DomainError):
        slit_coefficients(well, SlitAperture(0.495, 0.02), 10)
    with pytest.raises(ValidationError):
        SlitAperture(0.0, 0.0)


def test_quadrature_matches_closed_form(well, slit):
    closed = slit_coefficients(well, slit, 1000).values
    quad = coefficients_by_quadrature(well, CollapseProfile.rectangular(slit), 1000).values
    assert np.max(np.abs(closed - quad) / np.maximum(1.0, np.abs(closed))) <= 1e-12


def test_quadrature_recovers_eigenstate(well):
    prof = CollapseProfile(lambda y: eigenfunction(3, y, well), -0.5, 0.5)
    c = coefficients_by_quadrature(well, prof, 40).values
    expect = np.zeros(40)
    expect[2] = 1.0
    assert np.max(np.abs(c - expect)) < 1e-12


def test_quadrature_parity_for_even_profile(well):
    # normalised cos^2 bump centred on y = 0
    w = 0.3
    norm = math.sqrt(w * 3 / 8)

    def bump(y):
        return np.cos(np.pi * y / w) ** 2 / norm

    c = coefficients_by_quadrature(well, CollapseProfile(bump, -w / 2, w / 2), 60).values
    assert np.all(np.abs(c[1::2]) < 1e-13)
    assert np.any(np.abs(c[0::2]) > 1e-3)


def test_quadrature_rejects_unnormalised_profile(well):
    prof = CollapseProfile(lambda y: np.full(np.shape(y), 2.0), -0.1, 0.1)
    with pytest.raises(ValidationError):
        coefficients_by_quadrature(well, prof, 5)


def test_complex_profile_gives_complex_coefficients(well, slit):
    rect = CollapseProfile.rectangular(slit)
    phased = CollapseProfile(lambda y: 1j * rect(y), slit.lo, slit.hi)
    c = coefficients_by_quadrature(well, phased, 20).values
    real = slit_coefficients(well, slit, 20).values
    np.testing.assert_allclose(c, 1j * real, atol=1e-13)


def test_parseval_deficit_convergence(well, slit, coeffs50k):
    d50k = parseval_deficit(coeffs50k)
    assert 0 <= d50k < 1e-3
    # tail of sum c_n^2 ~ 2L / (a pi^2 N)
    assert d50k == pytest.approx(2 / (0.01 * math.pi**2 * 50000), rel=0.01)
    assert parseval_deficit(coeffs50k.truncate(100)) > 10 * d50k


@settings(max_examples=25, deadline=None)
@given(
    center=st.floats(-0.45, 0.45),
    width=st.floats(1e-3, 0.5),
)
def test_oracle_equivalence_property(center, width):
    well = WellConfig(1.0)
    lim = 0.5 - 1e-6
    if abs(center) + width / 2 >= lim:
        width = 2 * (lim - abs(center))
    slit = SlitAperture(center, width)
    closed = slit_coefficients(well, slit, 150).values
    quad = coefficients_by_quadrature(well, CollapseProfile.rectangular(slit), 150).values
    assert np.max(np.abs(closed - quad) / np.maximum(1.0, np.abs(closed))) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(
    center=st.floats(-0.4, 0.4),
    width=st.floats(1e-3, 0.19),
    k=st.integers(-3, 3),
)
def test_scaling_covariance(center, width, k):
    s = 2.0**k
    base = slit_coefficients(WellConfig(1.0), SlitAperture(center, width), 300).values
    scaled = slit_coefficients(WellConfig(s), SlitAperture(s * center, s * width), 300).values
    np.testing.assert_allclose(scaled, base, rtol=1e-13, atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(center=st.floats(-0.4, 0.4), width=st.floats(1e-3, 0.19))
def test_parseval_partial_sums(center, width):
    c = slit_coefficients(WellConfig(1.0), SlitAperture(center, width), 3000).values
    partial = np.cumsum(c * c)
    assert np.all(np.diff(partial) >= 0)
    assert partial[-1] <= 1 + 1e-12
