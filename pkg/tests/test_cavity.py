import cmath
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combnoise.cavity import (
    ApproximationWarning,
    CavityParams,
    decoupling_factor,
    f3db,
    interconvert_quadratures,
    phase_transfer,
    transmission_exact,
    transmission_highfinesse,
    transmission_lowfreq,
)
from combnoise.errors import DomainError


def test_derived_quantities(ref_cavity):
    p = ref_cavity
    assert p.t_max == pytest.approx((p.t1 * p.t2 / (1 - p.r1 * p.r2)) ** 2, rel=1e-15)
    assert p.f_coeff == pytest.approx(1 / math.sin(math.pi / (2 * 420)) ** 2, rel=1e-9)
    assert p.finesse == pytest.approx(420, rel=1e-12)
    assert p.f_c == pytest.approx(76e6 / 840, rel=1e-12)
    assert p.f_c == pytest.approx(90.48e3, abs=5)


def test_lossless_symmetric_default(ref_cavity):
    p = ref_cavity
    assert p.r1 == p.r2
    assert p.r1**2 + p.t1**2 == pytest.approx(1.0, rel=1e-14)
    assert p.t_max == pytest.approx(1.0, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(2.0, 1e4), st.floats(1e6, 1e9), st.floats(0.01, 1.0))
def test_constructors_round_trip(finesse, f_rep, t_max):
    p = CavityParams.from_finesse(finesse, f_rep, t_max)
    assert p.finesse == pytest.approx(finesse, rel=1e-9)
    assert p.t_max == pytest.approx(t_max, rel=1e-9)
    q = CavityParams(p.r1, p.r2, p.t1, p.t2, p.f_rep)
    back = CavityParams.from_finesse(q.finesse, q.f_rep, q.t_max)
    for a, b in zip((back.r1, back.r2, back.t1, back.t2), (p.r1, p.r2, p.t1, p.t2)):
        assert a == pytest.approx(b, rel=1e-9)


def test_invalid_coefficients():
    with pytest.raises(DomainError):
        CavityParams(1.0, 0.9, 0.1, 0.1, 76e6)
    with pytest.raises(DomainError):
        CavityParams(0.9, 0.9, 0.0, 0.1, 76e6)
    with pytest.raises(DomainError):
        CavityParams(0.9, 0.9, 0.1, 0.1, -1.0)


def test_exact_on_resonance(ref_cavity):
    p = ref_cavity
    t0 = transmission_exact(0.0, p)
    assert t0.imag == 0.0
    assert t0.real == pytest.approx(math.sqrt(p.t_max), rel=1e-12)


def test_exact_periodic_in_magnitude(ref_cavity):
    p = ref_cavity
    assert abs(transmission_exact(p.f_rep, p)) == pytest.approx(abs(transmission_exact(0.0, p)), rel=1e-12)
    assert abs(transmission_exact(p.f_rep + 3e4, p)) == pytest.approx(abs(transmission_exact(3e4, p)), rel=1e-9)


def test_exact_half_power_at_cutoff(ref_cavity):
    p = ref_cavity
    ratio = abs(transmission_exact(p.f_c, p)) ** 2 / abs(transmission_exact(0.0, p)) ** 2
    assert ratio == pytest.approx(0.5, rel=1e-3)


def test_lowfreq_against_exact(ref_cavity):
    p = ref_cavity
    assert transmission_lowfreq(0.0, p) == math.sqrt(p.t_max)
    f = np.linspace(0, 5 * p.f_c, 2001)
    rel = np.abs(transmission_lowfreq(f, p) - transmission_exact(f, p)) / np.abs(transmission_exact(f, p))
    assert rel.max() < 0.01


def test_lowfreq_imaginary_part_linear(ref_cavity):
    p = ref_cavity
    f = 1.0
    assert transmission_lowfreq(2 * f, p).imag / transmission_lowfreq(f, p).imag == pytest.approx(2.0, rel=1e-9)


def test_lowfreq_warns_out_of_range(ref_cavity):
    with pytest.warns(ApproximationWarning):
        transmission_lowfreq(ref_cavity.f_rep / 5, ref_cavity)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        transmission_lowfreq(ref_cavity.f_rep / 20, ref_cavity)


def test_highfinesse_lorentzian_points(ref_cavity):
    p = ref_cavity
    t = transmission_highfinesse(p.f_c, p)
    assert t.real == pytest.approx(math.sqrt(p.t_max) / 2, rel=1e-15)
    assert cmath.phase(t) == pytest.approx(math.pi / 4, rel=1e-15)


def test_highfinesse_against_exact(ref_cavity):
    p = ref_cavity
    f = np.linspace(0, 10 * p.f_c, 2001)
    ratio = np.abs(transmission_highfinesse(f, p)) / np.abs(transmission_exact(f, p))
    assert np.all(np.abs(ratio - 1) <= 0.01)


def test_highfinesse_warns_for_low_finesse():
    p = CavityParams.from_finesse(20.0, 76e6)
    with pytest.warns(ApproximationWarning):
        transmission_highfinesse(1e5, p)


def test_approximation_errors_pinned(ref_cavity):
    # regression pin of the sweep oracle at 420 / 76 MHz (both ~2.3e-4)
    p = ref_cavity
    f = np.linspace(0, 10 * p.f_c, 4001)
    ex = transmission_exact(f, p)
    err_hf = np.max(np.abs(np.abs(transmission_highfinesse(f, p)) / np.abs(ex) - 1))
    err_lf = np.max(np.abs(np.abs(transmission_lowfreq(f, p)) / np.abs(ex) - 1))
    assert err_hf <= 3e-4
    assert err_lf <= 3e-4


def test_phase_transfer_points(ref_cavity):
    p = ref_cavity
    assert phase_transfer(0.0, p) == 1.0
    assert phase_transfer(p.f_c, p) == pytest.approx(0.5, rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1e7))
def test_phase_transfer_is_real_part_of_lorentzian(ref_cavity, f):
    p = ref_cavity
    h = phase_transfer(f, p)
    assert abs(transmission_highfinesse(f, p).real / math.sqrt(p.t_max) - h) <= 1e-12


@settings(max_examples=200, deadline=None)
@given(st.floats(1.0, 1e7), st.floats(1.0001, 10.0))
def test_transfer_monotone(ref_cavity, f, factor):
    p = ref_cavity
    assert phase_transfer(f * factor, p) < phase_transfer(f, p)
    assert decoupling_factor(f * factor, p) > decoupling_factor(f, p)


def test_decoupling_factor_points(ref_cavity):
    p = ref_cavity
    assert decoupling_factor(0.0, p) == 0.0
    assert decoupling_factor(p.f_c, p) == pytest.approx(0.25, rel=1e-14)
    assert 10 * math.log10(decoupling_factor(p.f_c, p)) == pytest.approx(-6.0206, abs=1e-4)
    assert decoupling_factor(1e3 * p.f_c, p) == pytest.approx(1.0, abs=1e-5)


def test_f3db(ref_cavity):
    p = ref_cavity
    assert f3db(p) / p.f_c == pytest.approx(1.5538, abs=1e-3)
    assert f3db(p) == pytest.approx(140.6e3, rel=1e-3)
    # the rounded 90 kHz cutoff gives the quoted 135 kHz
    assert f3db(p) == pytest.approx(135e3, rel=0.05)
    assert decoupling_factor(f3db(p), p) == pytest.approx(0.5, abs=1e-12)


def test_interconvert_special_cases():
    assert interconvert_quadratures(2.0, 3.0, 0.5) == (1.0, 1.5)
    x, p = interconvert_quadratures(2.0, 3.0, 1j)
    assert (x, p) == (-3.0, 2.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10), st.complex_numbers(max_magnitude=5.0))
def test_interconvert_scales_norm(x0, p0, t):
    x, p = interconvert_quadratures(x0, p0, t)
    assert x * x + p * p == pytest.approx(abs(t) ** 2 * (x0 * x0 + p0 * p0), rel=1e-9, abs=1e-12)
    # identical to multiplying the complex field by t
    z = t * complex(x0, p0)
    assert x == pytest.approx(z.real, abs=1e-12) and p == pytest.approx(z.imag, abs=1e-12)
