import math
import random

import numpy as np
import pytest
import sympy

from illumination.errors import DomainError, EvenOrder, PointOnGraph
from illumination.solver import (
    Finite,
    IlluminationQuery,
    SolverConfig,
    WindowLimited,
    check_hypotheses,
    find_tangencies,
    illumination_index,
    offset,
    offset_derivative,
)

from helpers import quartic_value, random_convex_quartic, random_function

ERF_F = "(sqrt(pi)/2)*x*erf(x)+exp(-x^2)/2-1/2"


def report(f, r, s, t, **cfg):
    return find_tangencies(IlluminationQuery(f, r, s, t, SolverConfig(**cfg)))


def centers(rep):
    return [sol.c for sol in rep.solutions]


# -- offset ----------------------------------------------------------------------------


@pytest.mark.parametrize("c, expected", [(1, 0), (3, 0), (0, -3)])
def test_offset_parabola(c, expected):
    assert offset("x^2", 1, 2, 3, c) == expected


def test_offset_derivative_examples():
    assert offset_derivative("x^2", 1, 2, 1) == 2
    assert offset_derivative("exp(x)", 3, 1, 0) == pytest.approx(1 / 6, rel=1e-15)
    for f, r in [("sin(x)", 1), ("exp(x)+x^4", 3), ("erf(x)", 5)]:
        assert offset_derivative(f, r, 0.8, 0.8) == 0


def test_offset_derivative_matches_difference_quotient():
    rng = random.Random(5)
    for _ in range(30):
        f = random_function(rng, 3)
        r = rng.choice([1, 3])
        s, c = rng.uniform(-2, 2), rng.uniform(-2, 2)
        h = 1e-5
        fd = (offset(f, r, s, 0, c + h) - offset(f, r, s, 0, c - h)) / (2 * h)
        assert offset_derivative(f, r, s, c) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_offset_rejects_even_order():
    with pytest.raises(EvenOrder):
        offset("x^2", 2, 0, 0, 1)


# -- fixtures ---------------------------------------------------------------------------


def test_parabola_two_tangents():
    rep = report("x^2", 1, 2, 3)
    assert rep.classification == Finite(2)
    assert centers(rep) == pytest.approx([1, 3], abs=1e-9)


def test_exp_plus_quartic_cubic_order():
    rep = report("exp(x)+x^4", 3, 0, 0)
    assert rep.classification == Finite(2)
    assert centers(rep) == pytest.approx([-0.9953, 0.9782], abs=5e-4)


def test_point_above_parabola_has_no_tangent():
    assert report("x^2", 1, 1, 3).classification == Finite(0)


def test_erf_integral_has_no_tangent_through_low_point():
    rep = report(ERF_F, 1, 0, -0.6)
    assert rep.distinct_tangent_count == 0
    cls = rep.classification
    assert isinstance(cls, WindowLimited) and not cls.suspected_unbounded
    assert cls.half_width == 2.0**20
    assert all(n == 0 for _, n in rep.history)


def test_sine_is_window_limited_and_growing():
    rep = report("sin(x)", 1, 0.3, 0.1)
    cls = rep.classification
    assert isinstance(cls, WindowLimited) and cls.suspected_unbounded
    assert cls.half_width >= 40 * math.pi and cls.count >= 20
    counts = [n for _, n in rep.history]
    assert counts == sorted(counts)


@pytest.mark.parametrize(
    "f, r, s, t, expected",
    [("x^2", 1, 0, -1, 2), ("exp(x)", 3, 0, 0, 1), ("x^3", 1, 1, 0.5, 3)],
)
def test_illumination_index_examples(f, r, s, t, expected):
    assert illumination_index(IlluminationQuery(f, r, s, t)).count == expected


def test_exp_cubic_root_location():
    # P_c(0) = e^c (1 - c + c^2/2 - c^3/6) vanishes where the cubic factor does
    rep = report("exp(x)", 3, 0, 0)
    (sol,) = rep.solutions
    cubic_roots = np.roots([-1 / 6, 1 / 2, -1, 1])
    real = cubic_roots[np.abs(cubic_roots.imag) < 1e-12].real
    assert sol.c == pytest.approx(real[0], abs=1e-10)


def test_inflection_tangent_counts_once():
    # for x^3 and P = (1, 0) the offset is c^2 (3 - 2c): a touching root at 0
    rep = report("x^3", 1, 1, 0)
    assert rep.classification == Finite(2)
    assert centers(rep) == pytest.approx([0, 1.5], abs=1e-6)


def test_multiple_tangent_is_one_line():
    # y = 0 is tangent to (x^2 - 1)^2 at both x = -1 and x = 1
    rep = report("(x^2-1)^2", 1, 0, 0)
    assert centers(rep) == pytest.approx([-1, 1])
    assert [sol.dedup_group for sol in rep.solutions] == [0, 0]
    assert rep.classification == Finite(1)


def test_point_on_graph_rejected():
    with pytest.raises(PointOnGraph):
        report("x^2", 1, 2, 4)
    with pytest.raises(PointOnGraph):
        report("sin(x)", 1, 1, math.sin(1) + 1e-10)


def test_domain_error_propagates():
    with pytest.raises(DomainError):
        report("ln(x)", 1, 1, -5)


def test_index_cap_forces_window_limited():
    rep = report("x^2", 1, 2, 3, index_cap=1)
    assert isinstance(rep.classification, WindowLimited)
    assert len(rep.solutions) == 1


@pytest.mark.parametrize(
    "kwargs",
    [dict(scan_points=8), dict(index_cap=0), dict(root_abs_tol=0), dict(initial_half_width=-1),
     dict(max_half_width=float("inf"))],
)
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        SolverConfig(**kwargs)


def test_report_invariants():
    rep = report("x^3", 1, 1, 0.5)
    assert rep.distinct_tangent_count <= len(rep.solutions)
    assert rep.classification.count == rep.distinct_tangent_count
    lo, hi = rep.window
    assert lo < min(centers(rep)) and max(centers(rep)) < hi


# -- hypothesis diagnostics ------------------------------------------------------------------


def test_hypotheses_parabola():
    rep = check_hypotheses("x^2", 1, 10, 1024)
    assert rep.sampled_min_derivative == 2 and rep.verdict == "Applicable"


def test_hypotheses_cubic():
    rep = check_hypotheses("x^3", 1, 10, 1024)
    assert rep.sampled_min_derivative == pytest.approx(-60)
    assert rep.sign_changes == 1 and rep.verdict == "NotNonnegative"


def test_hypotheses_erf_integral():
    rep = check_hypotheses(ERF_F, 1, 6, 1024)
    assert rep.tail_lower_bound == pytest.approx(math.exp(-36), rel=1e-6)
    assert rep.sampled_min_derivative >= 0
    assert rep.verdict == "NoPositiveTailBound"
    assert rep.T_est == 3


def test_hypotheses_sine_changes_sign_often():
    rep = check_hypotheses("sin(x)", 1, 20, 4000)
    assert rep.verdict == "NotNonnegative" and rep.sign_changes == 13


# -- properties --------------------------------------------------------------------------


def test_cubic_order_quartic_against_closed_form():
    # P_c(s) = f(s) - alpha (s - c)^4 for a quartic, so c = s -+ (gap / alpha)^(1/4)
    rng = random.Random(17)
    for _ in range(40):
        text, coeffs = random_convex_quartic(rng)
        s = rng.uniform(-3, 3)
        gap = rng.uniform(0.1, 10)
        rep = report(text, 3, s, quartic_value(coeffs, s) - gap)
        root = (gap / coeffs[0]) ** 0.25
        assert rep.classification == Finite(2)
        assert centers(rep) == pytest.approx([s - root, s + root], abs=1e-8)


def test_residual_contract_on_fixture_families():
    rng = random.Random(23)
    cases = [("sin(x)", 1, 0.3, 0.1), ("x^3", 1, 1, 0.5), ("exp(x)+x^4", 3, 0, 0), ("x^2", 1, 2, 3)]
    for _ in range(20):
        text, coeffs = random_convex_quartic(rng)
        s = rng.uniform(-3, 3)
        cases.append((text, rng.choice([1, 3]), s, quartic_value(coeffs, s) - rng.uniform(0.1, 10)))
    for f, r, s, t in cases:
        for sol in report(f, r, s, t).solutions:
            assert abs(offset(f, r, s, t, sol.c)) <= 1e-8 * max(1.0, abs(t)), (f, sol.c)


def test_residual_is_at_floating_point_limit_for_random_functions():
    # a steep offset cannot be resolved below |h'(c)| * ulp(c); that is the only slack allowed
    rng = random.Random(23)
    for _ in range(40):
        f = random_function(rng, 3)
        r = rng.choice([1, 3])
        s, t = rng.uniform(-2, 2), rng.uniform(-3, 3)
        try:
            rep = report(f, r, s, t, max_half_width=64.0)
        except PointOnGraph:
            continue
        for sol in rep.solutions:
            slope = abs(offset_derivative(f, r, s, sol.c))
            limit = max(1e-8 * max(1.0, abs(t)), 4 * slope * np.spacing(abs(sol.c)))
            assert abs(offset(f, r, s, t, sol.c)) <= limit, (f, sol.c)


def _dense_sign_changes(poly, s, t, lo, hi, n=1_000_000):
    c = np.linspace(lo, hi, n)
    h = poly(c) + poly.deriv()(c) * (s - c) - t
    sign = np.sign(h)
    return int(np.count_nonzero(sign[:-1] * sign[1:] < 0)) + int(np.count_nonzero(h == 0))


def test_polynomial_root_count_matches_brute_force_oracles():
    rng = random.Random(31)
    x = sympy.Symbol("x")
    checked = 0
    while checked < 25:
        degree = rng.randint(2, 6)
        coeffs = [round(rng.uniform(-2, 2), 3) for _ in range(degree + 1)]
        if abs(coeffs[-1]) < 0.2:
            continue
        poly = np.polynomial.Polynomial(coeffs)
        text = "+".join(f"({a})*x^{k}" for k, a in enumerate(coeffs))
        s, t = rng.uniform(-2, 2), rng.uniform(-4, 4)
        if abs(poly(s) - t) < 0.05:
            continue
        rep = report(text, 1, s, t)
        lo, hi = rep.window
        assert len(rep.solutions) == _dense_sign_changes(poly, s, t, lo, hi), (text, s, t)
        # Sturm-sequence count on the exact rational polynomial
        fx = sum(sympy.Rational(str(a)) * x**k for k, a in enumerate(coeffs))
        hx = sympy.Poly(sympy.expand(fx + sympy.diff(fx, x) * (sympy.nsimplify(s) - x)
                                     - sympy.nsimplify(t)), x)
        sturm = hx.count_roots(sympy.nsimplify(lo), sympy.nsimplify(hi))
        distinct = len(set(round(v, 6) for v in centers(rep)))
        assert distinct == sturm, (text, s, t)
        checked += 1


def test_raising_dedup_tol_never_increases_count():
    for f, r, s, t in [("sin(x)", 1, 0.3, 0.1), ("x^3", 1, 1, 0.5), ("(x^2-1)^2", 1, 0.2, -0.5)]:
        counts = [
            report(f, r, s, t, dedup_tol=tol, max_half_width=40.0).distinct_tangent_count
            for tol in (1e-14, 1e-8, 1e-4, 1e-2, 0.1, 1.0, 10.0)
        ]
        assert counts == sorted(counts, reverse=True), (f, counts)
        assert counts[-1] < counts[0] or counts[0] <= 1


def test_convex_family_small_sample():
    rng = random.Random(41)
    for _ in range(10):
        text, coeffs = random_convex_quartic(rng)
        for r in (1, 3):
            s = rng.uniform(-3, 3)
            t = quartic_value(coeffs, s) - rng.uniform(0.1, 10)
            assert illumination_index(IlluminationQuery(text, r, s, t)) == Finite(2)
