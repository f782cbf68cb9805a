import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kepler_alpha.model import TAU, DomainError, EccentricityError, OrbitPoint, eval_f
from kepler_alpha.solver import (
    ConvergenceError,
    bisection_oracle,
    fixed_point_baseline,
    iterations_for_digits,
    newton_iterates,
    newton_step,
    solve,
)
from kepler_alpha.starters import Branch, StarterValue

# mpmath roots
ROOT_09_05 = 1.3844127202021626
ROOT_099_0001 = 0.088548596330182
ROOT_05_HALF_PI = 2.0209799380897702


def test_newton_step_examples():
    assert newton_step(OrbitPoint(0.0, 1.0), 3.0) == 1.0
    assert newton_step(OrbitPoint(0.5, 1.0), 1.0) == pytest.approx(1.5764693526547991, abs=1e-15)
    p = OrbitPoint(0.5, math.pi)
    assert newton_step(p, math.pi) == math.pi


@pytest.mark.parametrize("N, n", [(1, 3), (15, 6), (307, 10)])
def test_iteration_budget(N, n):
    assert iterations_for_digits(N) == n


def test_iteration_budget_rejects_zero():
    with pytest.raises(DomainError):
        iterations_for_digits(0)


def test_solve_circular_orbit():
    r = solve(0.0, TAU + 1.0, tol=1e-14)
    assert r.E == pytest.approx(TAU + 1.0, abs=1e-14)
    assert r.iterations <= 1 and r.certified


def test_solve_high_eccentricity():
    r = solve(0.9, 0.5, tol=1e-13)
    assert r.residual <= 1e-13
    assert r.iterations <= 10
    assert abs(r.E - ROOT_09_05) <= 1e-12
    assert abs(r.E - bisection_oracle(OrbitPoint(0.9, 0.5))) <= 1e-12


@pytest.mark.parametrize("kw", [{"tol": 1e-12}, {"digits": 5}, {}])
def test_solve_at_pi(kw):
    assert solve(0.5, math.pi, **kw).E == math.pi


def test_solve_reflected_and_wrapped():
    r = solve(0.5, -math.pi / 2, digits=15)
    assert r.E == pytest.approx(-ROOT_05_HALF_PI, abs=1e-14)
    r = solve(0.5, 3 * TAU + math.pi / 2)
    assert r.E == pytest.approx(3 * TAU + ROOT_05_HALF_PI, abs=1e-13)


def test_digits_cap():
    r = solve(0.7, 1.0, digits=307)
    assert r.digits_capped and r.iterations == iterations_for_digits(15)
    assert not solve(0.7, 1.0, digits=15).digits_capped


def test_mode_conflict_and_bad_tol():
    with pytest.raises(DomainError):
        solve(0.5, 1.0, digits=5, tol=1e-10)
    with pytest.raises(DomainError):
        solve(0.5, 1.0, tol=0.0)


@pytest.mark.parametrize("e", [1.0, 1.2])
def test_solve_rejects_unbound_orbits(e):
    with pytest.raises(EccentricityError):
        solve(e, 1.0)


def test_user_initial_value():
    r = solve(0.5, 1.0, initial=1.0, tol=1e-14)
    assert r.certified and r.starter.kind is None
    bad = solve(0.999, 0.001, initial=3.0, digits=3)
    assert not bad.certified
    sv = StarterValue(2.0, None, Branch.M)
    assert solve(0.5, 1.0, initial=sv).starter is sv


def test_residual_mode_cap():
    # a tolerance no binary64 value can meet forces the defensive cap
    with pytest.raises(ConvergenceError):
        solve(0.9, 0.5, tol=1e-300)


def test_fixed_point_examples():
    assert fixed_point_baseline(OrbitPoint(0.0, 1.0), 0.0, 1) == 1.0
    p = OrbitPoint(0.2, 1.0)
    root = bisection_oracle(p)
    assert abs(fixed_point_baseline(p, 1.0, 5) - root) <= 0.2**5 * abs(1.0 - root) + 1e-15
    p = OrbitPoint(0.9, 0.1)
    assert abs(fixed_point_baseline(p, 0.1, 20) - bisection_oracle(p)) > 1e-3


def test_oracle_examples():
    assert bisection_oracle(OrbitPoint(0.0, 1.234)) == pytest.approx(1.234, abs=1e-15)
    p = OrbitPoint(0.5, math.pi / 2)
    E = bisection_oracle(p)
    assert abs(eval_f(p, E)) <= 1.5e-15 + 1e-16
    assert E == pytest.approx(ROOT_05_HALF_PI, abs=1e-15)
    p = OrbitPoint(0.99, 0.001)
    trace = []
    E = bisection_oracle(p, 1e-15, trace)
    assert E == pytest.approx(ROOT_099_0001, abs=1e-14)
    lo, hi = trace[-1]
    assert eval_f(p, lo) <= 0.0 <= eval_f(p, hi)


def test_oracle_tolerance_floor():
    with pytest.raises(DomainError):
        bisection_oracle(OrbitPoint(0.5, 1.0), 1e-16)


@given(st.floats(0.0, 0.9999), st.floats(0.0, math.pi))
@settings(max_examples=200)
def test_oracle_keeps_bracket(e, M):
    p = OrbitPoint(e, M)
    trace = []
    E = bisection_oracle(p, 1e-15, trace)
    for lo, hi in trace:
        assert eval_f(p, lo) <= 0.0 <= eval_f(p, hi)
    assert 0.0 <= E <= math.pi


@given(st.floats(0.0, 0.999), st.floats(0.0, math.pi))
@settings(max_examples=200)
def test_quadratic_contraction(e, M):
    p = OrbitPoint(e, M)
    root = bisection_oracle(p)
    E0 = solve(e, M, digits=1).starter.value
    it = newton_iterates(p, E0, 4)
    for n in range(1, 5):
        assert abs(it[n] - root) <= 0.5 ** (2**n - 1) * abs(E0 - root) + 1e-12


def test_solve_agrees_with_oracle_on_sample():
    rng = np.random.default_rng(21)
    for e, M in zip(rng.uniform(0, 0.999, 300), rng.uniform(-20, 20, 300)):
        r = solve(float(e), float(M))
        assert abs(r.E - float(e) * math.sin(r.E) - float(M)) <= 1e-13
