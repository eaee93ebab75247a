"""Scaled-complex arithmetic: exact algebra carried as (log|.|, phase)."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dysonflow import ScaledComplex, scaled_sum
from dysonflow.contours import gauss_hermite_log

finite = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)
nonzero_complex = st.builds(
    complex,
    st.floats(min_value=-1e3, max_value=1e3),
    st.floats(min_value=-1e3, max_value=1e3),
).filter(lambda z: abs(z) > 1e-6)


@given(nonzero_complex)
def test_roundtrip(z):
    back = ScaledComplex.from_complex(z).to_complex()
    assert abs(back - z) <= 1e-15 * abs(z)


@given(nonzero_complex, nonzero_complex)
def test_mul_matches_complex(u, v):
    w = (ScaledComplex.from_complex(u) * ScaledComplex.from_complex(v)).to_complex()
    assert abs(w - u * v) <= 1e-13 * abs(u * v)


@given(nonzero_complex, nonzero_complex)
def test_div_matches_complex(u, v):
    w = (ScaledComplex.from_complex(u) / ScaledComplex.from_complex(v)).to_complex()
    assert abs(w - u / v) <= 1e-13 * abs(u / v)


@given(nonzero_complex, nonzero_complex)
def test_add_matches_complex(u, v):
    w = (ScaledComplex.from_complex(u) + ScaledComplex.from_complex(v)).to_complex()
    assert abs(w - (u + v)) <= 1e-13 * (abs(u) + abs(v))


@given(nonzero_complex)
def test_neg_and_sub(z):
    a = ScaledComplex.from_complex(z)
    assert (a - a).is_zero or abs((a - a).to_complex()) <= 1e-13 * abs(z)
    assert abs((-a).to_complex() + z) <= 1e-15 * abs(z)


@given(nonzero_complex)
def test_conjugate(z):
    a = ScaledComplex.from_complex(z).conjugate().to_complex()
    assert abs(a - z.conjugate()) <= 1e-15 * abs(z)


@given(finite, nonzero_complex)
def test_exp_matches_log(s, z):
    # e^{s} carried in the scale, phase in the mantissa
    a = ScaledComplex.exp(s + 1j * z.real / 100.0)
    assert abs(a.abs_log() - s) <= 1e-12 * max(1.0, abs(s))


def test_extreme_scales_cancel():
    # product of e^{+40000} and e^{-40000} magnitudes is order one even
    # though neither factor is representable as a float
    big = ScaledComplex.from_log(40000.0, 1.0 + 2.0j)
    tiny = ScaledComplex.from_log(-40000.0, 0.5 - 0.1j)
    prod = (big * tiny).to_complex()
    assert abs(prod - (1 + 2j) * (0.5 - 0.1j)) < 1e-12


def test_extreme_ratio():
    big = ScaledComplex.from_log(30000.0, 2.0 + 0j)
    assert abs(big.ratio(big) - 1.0) < 1e-15
    other = ScaledComplex.from_log(29999.0, 1.0 + 0j)
    assert abs(other.ratio(big) - math.exp(-1.0) / 2.0) < 1e-14


def test_zero_handling():
    zero = ScaledComplex.from_complex(0.0)
    assert zero.is_zero
    one = ScaledComplex.from_complex(1.0)
    assert (zero * one).is_zero
    assert abs((zero + one).to_complex() - 1.0) < 1e-15


@given(st.lists(nonzero_complex, min_size=1, max_size=20))
def test_scaled_sum_matches_direct(zs):
    log_mag = np.array([math.log(abs(z)) for z in zs])
    mant = np.array([z / abs(z) for z in zs])
    got = scaled_sum(log_mag, mant).to_complex()
    want = sum(zs)
    assert abs(got - want) <= 1e-12 * sum(abs(z) for z in zs)


def test_scaled_sum_all_neg_inf_is_zero():
    log_mag = np.array([-math.inf, -math.inf])
    mant = np.array([1.0 + 0j, 1.0 + 0j])
    assert scaled_sum(log_mag, mant).is_zero


def test_scaled_sum_ignores_neg_inf_entries():
    # a single zero sample must not poison the rest
    log_mag = np.array([0.0, -math.inf, 0.0])
    mant = np.array([1.0 + 0j, 1.0 + 0j, 1.0j])
    got = scaled_sum(log_mag, mant).to_complex()
    assert abs(got - (1.0 + 1.0j)) < 1e-14


def test_scaled_sum_beyond_float_range():
    log_mag = np.array([80000.0, 80000.0])
    mant = np.array([1.0 + 0j, -0.5 + 0j])
    out = scaled_sum(log_mag, mant)
    assert abs(out.abs_log() - (80000.0 + math.log(0.5))) < 1e-9
    assert abs(out.mantissa.real) > 0


def test_gauss_hermite_log_matches_numpy():
    nodes, log_w = gauss_hermite_log(40)
    ref_x, ref_w = np.polynomial.hermite.hermgauss(40)
    assert np.allclose(nodes, ref_x, rtol=0, atol=1e-13)
    assert np.allclose(np.exp(log_w), ref_w, rtol=1e-12, atol=0)


def test_gauss_hermite_log_large_order_finite():
    # hermgauss weights underflow past ~ n = 740; the log form must not
    nodes, log_w = gauss_hermite_log(900)
    assert np.all(np.isfinite(log_w))
    assert np.all(np.isfinite(nodes))
    # weights integrate e^{-x^2}: total mass sqrt(pi)
    total = scaled_sum(log_w, np.ones(len(log_w), dtype=complex)).to_complex()
    assert abs(total - math.sqrt(math.pi)) < 1e-10


def test_mantissa_normalized():
    # invariant: |mantissa| in [1, e) for every nonzero value
    for z in (3.7 - 2j, 1e-12 + 0j, -5e14j, 0.999 + 0j):
        a = ScaledComplex.from_complex(z)
        assert 1.0 <= abs(a.mantissa) < math.e
