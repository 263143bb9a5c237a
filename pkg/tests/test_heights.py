import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from freeping import INFINITY, IterationCapExceeded, normalize_map, point
from freeping.heights import (CanonicalHeightEstimate, PreperiodicityVerdict, Verdict,
                              canonical_height, escapes, functoriality_constants,
                              height_ceiling, is_preperiodic, naive_height, replay_verdict)
from freeping.projective import evaluate

z2 = normalize_map([1, 0, 0], [0, 0, 1])
z2m2 = normalize_map([1, 0, -2], [0, 0, 1])
z2m1 = normalize_map([1, 0, -1], [0, 0, 1])
z3 = normalize_map([1, 0, 0, 0], [0, 0, 0, 1])
lattes_like = normalize_map([1, 0, 1], [0, 2, 0])      # (z^2+1)/(2z)
cubic = normalize_map([2, -1, 0, 3], [1, 0, 5, -1])


def h(p):
    return math.log(p.magnitude)


def test_naive_height_examples():
    assert naive_height(point(2)).log_value == math.log(2)
    assert naive_height(INFINITY).log_value == 0.0
    assert naive_height(INFINITY).magnitude == 1
    v = naive_height(point(7, 3))
    assert v.magnitude == 7 and v.log_value == math.log(7)


def test_functoriality_constants_examples():
    assert functoriality_constants(z2).c_plus == pytest.approx(math.log(3))
    assert functoriality_constants(z2m2).c_plus == pytest.approx(math.log(6))
    b = functoriality_constants(lattes_like)
    assert b.c == max(b.c_plus, b.c_minus)
    assert b.resultant != 0


@pytest.mark.parametrize("f", [z2, z2m2, z2m1, z3, lattes_like, cubic])
def test_functoriality_bounds_hold_on_samples(f):
    # oracle: exact heights of 10^3 sampled points and their images
    b = functoriality_constants(f)
    rng = random.Random(1)
    d = f.degree
    for _ in range(1000):
        p = point(rng.randint(-10**6, 10**6), rng.randint(1, 10**6))
        q = evaluate(f, p)
        assert d * h(p) - b.c_minus <= h(q) + 1e-9
        assert h(q) <= d * h(p) + b.c_plus + 1e-9


def test_monomial_defect_is_zero():
    rng = random.Random(2)
    for _ in range(200):
        p = point(rng.randint(-10**4, 10**4), rng.randint(1, 10**4))
        assert evaluate(z3, p).magnitude == p.magnitude**3


def test_canonical_height_power_map():
    est = canonical_height(z2, point(2), 5e-10)
    assert est.contains(math.log(2))
    assert est.width <= 1e-9
    assert est.n <= 40


def test_canonical_height_fixed_point_is_zero():
    assert canonical_height(z2m2, point(2), 1e-9).contains(0.0)


def test_canonical_height_chebyshev_closed_form():
    # oracle: z^2-2 is conjugate to w -> w^2 via z = w + 1/w; 3 = phi^2 + phi^-2,
    # so the height is log(phi^2) = log((3 + sqrt 5)/2)
    target = math.log((3 + math.sqrt(5)) / 2)
    est = canonical_height(z2m2, point(3), 1e-6)
    assert est.contains(target)
    assert est.width <= 2e-6


def test_canonical_height_big_integer_orbit_oracle():
    # oracle: 12 exact big-integer iterations of z^2-2 at 3
    x = 3
    for _ in range(12):
        x = x * x - 2
    approx = math.log(x) / 2**12
    est = canonical_height(z2m2, point(3), 1e-6)
    assert abs(est.value_at_n - approx) < 1e-3


def test_canonical_height_iteration_cap():
    with pytest.raises(IterationCapExceeded) as info:
        canonical_height(z2, point(3), 1e-12, max_iterations=5)
    assert isinstance(info.value.partial, CanonicalHeightEstimate)


def test_canonical_height_rejects_bad_input():
    with pytest.raises(ValueError):
        canonical_height(normalize_map([1, 1], [0, 1]), point(2))
    with pytest.raises(ValueError):
        canonical_height(z2, point(2), 0)


def test_enclosure_json():
    obj = canonical_height(z2, point(2), 1e-6).to_json()
    assert set(obj) == {"lower", "upper", "n", "value_at_n"}


# --- preperiodicity ------------------------------------------------------------

def test_is_preperiodic_examples():
    v = is_preperiodic(z2m1, point(0))
    assert v.verdict is Verdict.PREPERIODIC
    assert v.tail == 0 and v.cycle == (point(0), point(-1))
    v = is_preperiodic(z2, point(2))
    assert v.verdict is Verdict.WANDERING
    assert v.escape.magnitude ** (z2.degree - 1) > v.escape.threshold
    v = is_preperiodic(z2m2, point(2))
    assert v.is_preperiodic and v.cycle == (point(2),)


def test_is_preperiodic_tail():
    v = is_preperiodic(z2m2, point(-2))
    assert v.is_preperiodic and v.tail == 1 and v.cycle == (point(2),)


def test_escape_first_iterate_above_threshold():
    v = is_preperiodic(z2, point(2))
    orbit = [point(2), point(4), point(16), point(256)]
    for k in range(v.escape.n):
        assert not escapes(z2, orbit[k])
    assert orbit[v.escape.n] == v.escape.point


def test_height_ceiling_bounds_preperiodic_points():
    T = height_ceiling(z2m2)
    for a in range(-T - 3, T + 4):
        p = point(a)
        if is_preperiodic(z2m2, p).is_preperiodic:
            assert p.magnitude <= T


def test_verdict_json_round_trip_and_replay():
    for f, p in [(z2m1, point(0)), (z2, point(3, 2)), (z2m2, point(-2))]:
        v = is_preperiodic(f, p)
        back = PreperiodicityVerdict.from_json(v.to_json())
        assert back == v
        assert replay_verdict(f, p, back)


def test_replay_rejects_tampered_certificates():
    v = is_preperiodic(z2m1, point(0))
    bad = PreperiodicityVerdict(Verdict.PREPERIODIC, tail=0, cycle=(point(0),))
    assert replay_verdict(z2m1, point(0), v)
    assert not replay_verdict(z2m1, point(0), bad)
    w = is_preperiodic(z2, point(2))
    assert not replay_verdict(z2, point(1), w)


def test_verdict_invariant():
    with pytest.raises(ValueError):
        PreperiodicityVerdict(Verdict.PREPERIODIC)


# --- properties ------------------------------------------------------------------

def _random_map(rng, d):
    while True:
        F = [rng.randint(-3, 3) for _ in range(d + 1)]
        G = [rng.randint(-3, 3) for _ in range(d + 1)]
        try:
            return normalize_map(F, G)
        except ValueError:
            continue


@settings(max_examples=40, deadline=None)
@given(st.integers(-10**4, 10**4), st.integers(1, 10**4), st.integers(0, 10**6))
def test_functional_equation_property(a, b, seed):
    rng = random.Random(seed)
    f = _random_map(rng, rng.choice([2, 3]))
    p = point(a, b)
    x = canonical_height(f, p, 1e-7)
    y = canonical_height(f, evaluate(f, p), 1e-7)
    d = f.degree
    assert y.lower <= d * x.upper + 1e-12 and d * x.lower <= y.upper + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(-10**3, 10**3), st.integers(1, 10**3))
def test_boundedness_property(a, b):
    f = z2m2
    p = point(a, b)
    est = canonical_height(f, p, 1e-6)
    C = functoriality_constants(f).c
    assert abs(est.value_at_n - naive_height(p).log_value) <= C / (f.degree - 1) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([z2, z2m1, z2m2]), st.integers(-6, 6), st.integers(1, 4))
def test_preperiodic_iff_zero_height(f, a, b):
    p = point(a, b)
    v = is_preperiodic(f, p)
    est = canonical_height(f, p, 1e-3)
    if v.is_preperiodic:
        assert est.contains(0.0)
    else:
        assert canonical_height(f, p, 1e-9).lower > 0


def test_monotone_refinement():
    from freeping.heights import _enclosures, functoriality_constants as fc
    widths = [hi - lo for _, lo, hi, _ in
              _enclosures(z2m2, point(5, 3), fc(z2m2), 128, 30, 4096)]
    assert all(w2 <= w1 for w1, w2 in zip(widths, widths[1:]))
