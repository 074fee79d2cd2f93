import itertools
import random
from fractions import Fraction
from math import cos, gcd, pi

import mpmath as mp
import numpy as np
import pytest

import salemflow as sf
from salemflow.numberfield import ReducedForm
from salemflow.orbit import (adaptive_indicator_measure,
                             cosine_indicator_measure, fractional_orbit_array,
                             fractional_orbit_sequence, independence_probe)

DEG6_SALEM = (1, 0, -1, -1, -1, 0, 1)


def _random_reduced(rng, d, coeff_bound, L_bound):
    while True:
        L = rng.randint(1, L_bound)
        l = tuple(rng.randint(-coeff_bound, coeff_bound) for _ in range(d))
        if all(c == 0 for c in l):
            continue
        g = L
        for c in l:
            g = gcd(g, abs(c))
        if g == 1:
            return ReducedForm(L, l)


# -- trace orbits ------------------------------------------------------------------

def test_orbit_half_example(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    orb = sf.trace_orbit(example_salem.field, eta, 10)
    assert orb.period == 5
    assert orb.residues == (0, 1, 1, 1, 1)
    assert list(orb.integer_traces(8)) == [4, 1, 3, 7, 7, 16, 27, 43]


def test_orbit_integer_eta(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/1", 4)
    orb = sf.trace_orbit(example_salem.field, eta, 4)
    assert orb.period == 1
    assert orb.residues == (0,)


def test_orbit_period_bound_random(example_salem):
    rng = random.Random(314)
    for _ in range(60):
        eta = _random_reduced(rng, 4, 4, 5)
        orb = sf.trace_orbit(example_salem.field, eta, 4)
        assert orb.period <= eta.denominator ** 4


def test_orbit_purely_periodic_shift(example_salem):
    rng = random.Random(42)
    for _ in range(25):
        eta = _random_reduced(rng, 4, 3, 4)
        orb = sf.trace_orbit(example_salem.field, eta, 4)
        traces = list(orb.integer_traces(2 * orb.period + 4))
        L = eta.denominator
        for n in range(orb.period + 4):
            assert traces[n] % L == traces[n + orb.period] % L
            assert traces[n] % L == orb.residue(n)


def test_orbit_horizon_precondition(example_salem):
    with pytest.raises(ValueError):
        sf.trace_orbit(example_salem.field, ReducedForm.from_text(
            "1,0,0,0/2", 4), 2)


# -- the trace identity ------------------------------------------------------------

def _identity_residual(salem, eta, n_max):
    field = salem.field
    orb = sf.trace_orbit(field, eta, field.degree)
    amp = sf.amplitude_data(eta, salem)
    num = eta.numerator_element(field)
    with mp.workprec(salem.precision + 32):
        val = mp.re(field.embed(num, 0))
        s0 = mp.re(field.embed(num, 1))
        worst = mp.mpf(0)
        for n, t in enumerate(orb.integer_traces(n_max + 1)):
            rhs = val * salem.alpha ** n + s0 * salem.alpha ** (-n) \
                + 2 * amp.cosine_sum(n)
            worst = max(worst, abs(t - rhs))
    return worst


def test_trace_identity_residual(example_salem):
    rng = random.Random(2718)
    for _ in range(8):
        eta = _random_reduced(rng, 4, 10, 5)
        assert _identity_residual(example_salem, eta, 200) < 1e-12


def test_trace_identity_residual_shrinks():
    salem256 = sf.SalemNumber.from_min_poly((1, -1, -1, -1, 1), 256)
    salem512 = sf.SalemNumber.from_min_poly((1, -1, -1, -1, 1), 512)
    eta = ReducedForm.from_text("3,-2,0,1/4", 4)
    r256 = _identity_residual(salem256, eta, 200)
    r512 = _identity_residual(salem512, eta, 200)
    assert r512 < r256 < 1e-12


# -- amplitude data ----------------------------------------------------------------

def test_amplitude_constant_eta(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/1", 4)
    amp = sf.amplitude_data(eta, example_salem)
    assert all(abs(u - 1) < 1e-40 for u in amp.re_parts)
    assert all(abs(v) < 1e-40 for v in amp.im_parts)
    assert all(abs(h - 1) < 1e-40 for h in amp.magnitudes)


def test_amplitude_alpha_eta(example_salem):
    eta = ReducedForm.from_text("0,1,0,0/1", 4)
    amp = sf.amplitude_data(eta, example_salem)
    th = example_salem.thetas[0]
    with mp.workprec(280):
        assert abs(amp.re_parts[0] - mp.cos(2 * mp.pi * th)) < 1e-40
        assert abs(amp.im_parts[0] - mp.sin(2 * mp.pi * th)) < 1e-40
        assert abs(amp.magnitudes[0] - 1) < 1e-40


def test_amplitude_total_is_max_of_cosine_sum(example_salem):
    eta = ReducedForm.from_text("2,-1,0,3/3", 4)
    amp = sf.amplitude_data(eta, example_salem)
    xs = np.linspace(0.0, 1.0, 200001)
    vals = float(amp.magnitudes[0]) * np.cos(
        2 * np.pi * xs - float(amp.phases[0]))
    assert abs(vals.max() - float(amp.total)) < 1e-9


# -- fractional orbits -------------------------------------------------------------

def test_fractional_orbit_n0(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    assert abs(sf.fractional_orbit(eta, example_salem, 0) - 0.5) < 1e-40
    eta2 = ReducedForm.from_text("1,2,0,0/3", 4)
    x = eta2.to_element(example_salem.field)
    with mp.workprec(300):
        direct = mp.frac(example_salem.field.embed(x, 0).real)
        assert abs(sf.fractional_orbit(eta2, example_salem, 0) - direct) \
            < 1e-40


def test_fractional_orbit_matches_direct_power(example_salem):
    rng = random.Random(5)
    for _ in range(5):
        eta = _random_reduced(rng, 4, 6, 4)
        x = eta.to_element(example_salem.field)
        seq = fractional_orbit_sequence(eta, example_salem, 200)
        with mp.workprec(600):
            valx = example_salem.field.embed(x, 0).real
            for n in (0, 1, 7, 50, 123, 200):
                direct = mp.frac(valx * example_salem.alpha ** n)
                assert abs(seq[n] - direct) < 1e-10


def test_fractional_orbit_array_matches_mpf(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    arr = fractional_orbit_array(eta, example_salem, 300)
    seq = fractional_orbit_sequence(eta, example_salem, 300)
    assert max(abs(arr[n] - float(seq[n])) for n in range(301)) < 1e-9


# -- frequencies -------------------------------------------------------------------

def test_empirical_full_interval(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    assert sf.empirical_frequency(eta, example_salem, (0, 1), 500) == 1


def test_empirical_degenerate_interval(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    f = sf.empirical_frequency(eta, example_salem, (0.3, 0.3), 2000)
    assert f == 0


def test_empirical_complement_sums_to_one(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    a, b = 0.21, 0.68
    f1 = sf.empirical_frequency(eta, example_salem, (a, b), 4000)
    f2 = sf.empirical_frequency(eta, example_salem, (0, a), 4000)
    f3 = sf.empirical_frequency(eta, example_salem, (b, 1), 4000)
    assert f1 + f2 + f3 == 1


def test_torus_full_interval(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    assert sf.torus_frequency(eta, example_salem, (0, 1)) == 1.0


def test_torus_closed_form_vs_certified_bisection():
    # H = 1, L = 1 profile: measure{frac(-2cos 2 pi x) in J}
    for (a, b) in [(0.25, 0.75), (0.1, 0.2), (0.0, 0.37), (0.6, 1.0)]:
        closed = cosine_indicator_measure(2.0, 0.0, (a, b))
        lo, hi = adaptive_indicator_measure(2.0, 0.0, (a, b), tol=1e-10)
        assert lo - 1e-10 <= closed <= hi + 1e-10


def test_torus_monotone_and_additive(example_salem):
    eta = ReducedForm.from_text("1,1,0,0/3", 4)
    f_small = sf.torus_frequency(eta, example_salem, (0.3, 0.5))
    f_big = sf.torus_frequency(eta, example_salem, (0.2, 0.6))
    assert f_small <= f_big + 1e-9
    f1 = sf.torus_frequency(eta, example_salem, (0.2, 0.4))
    f2 = sf.torus_frequency(eta, example_salem, (0.4, 0.6))
    assert abs((f1 + f2) - f_big) < 1e-8


def test_torus_vs_empirical_panel(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/1", 4)
    emp = sf.empirical_frequency(eta, example_salem, (0.25, 0.75), 100000)
    tor = sf.torus_frequency(eta, example_salem, (0.25, 0.75))
    assert abs(float(emp) - tor) <= 0.02


def test_torus_degree6_m2():
    salem = sf.SalemNumber.from_min_poly(DEG6_SALEM)
    assert salem.m == 2
    eta = ReducedForm.from_text("1,0,0,0,0,0/2", 6)
    tor = sf.torus_frequency(eta, salem, (0.25, 0.75))
    emp = sf.empirical_frequency(eta, salem, (0.25, 0.75), 20000)
    assert abs(float(emp) - tor) <= 0.02


# -- sup distance and searches -----------------------------------------------------

def test_sup_distance_range(example_salem):
    eta = ReducedForm.from_text("1,0,0,0/2", 4)
    s = sf.sup_orbit_distance(eta, example_salem, 500)
    assert 0 <= s <= 0.5


def test_sup_distance_stable_across_precision():
    eta = ReducedForm.from_text("1,0,0,0/1", 4)
    vals = []
    for prec in (256, 512):
        salem = sf.SalemNumber.from_min_poly((1, -1, -1, -1, 1), prec)
        vals.append(sf.sup_orbit_distance(eta, salem, 1000, exact=True))
    assert abs(vals[0] - vals[1]) < 1e-12


def test_search_small_eta_trivial_epsilon(example_salem):
    res = sf.search_small_eta(example_salem, 0.5, 1, 1, 50)
    assert res.qualifies
    assert res.scanned > 0


def test_search_small_eta_monotone_in_bound(example_salem):
    r1 = sf.search_small_eta(example_salem, 0.1, 1, 2, 300)
    r2 = sf.search_small_eta(example_salem, 0.1, 2, 2, 300)
    assert r2.best_sup <= r1.best_sup + 1e-12


# -- rational independence ---------------------------------------------------------

def test_probe_example_field_no_relation(example_salem):
    report = sf.rational_independence_probe(example_salem, 1000, 10 ** 6)
    assert not report.relation_found
    assert report.min_residual > 1e-7
    assert report.cf_suspects == ()


def test_probe_synthetic_rational_relation():
    with mp.workprec(256):
        report = independence_probe([mp.mpf(1) / 3], 5, 1000, 256)
    assert report.relation_found
    assert report.min_residual < 1e-70
    assert report.best_coeffs == (3,)
    assert any(s[1:3] == (1, 3) for s in report.cf_suspects)


def test_probe_m2_degree6():
    salem = sf.SalemNumber.from_min_poly(DEG6_SALEM)
    report = sf.rational_independence_probe(salem, 60, 10 ** 5)
    assert not report.relation_found
    assert report.min_residual > 1e-9
