"""Acceptance criteria, one test each, at their stated tolerances and budgets.

Each test prints a single ``[PASS]`` / ``[FAIL]`` line.  Run directly with
``python3 tests/test_acceptance.py`` for just the summary.
"""

import math
import struct
import time

import numpy as np
import pytest
from scipy.stats import qmc

from kepler_alpha import lookup
from kepler_alpha.alpha import ALPHA0, alpha0, alpha_arrays, alpha_test, gamma, gamma_bruteforce
from kepler_alpha.model import OrbitPoint
from kepler_alpha.regions import REGION_STARTER, RegionId, containment_checks, region_mask
from kepler_alpha.solver import (
    bisection_oracle,
    fixed_point_baseline,
    iterations_for_digits,
    newton_iterates,
)
from kepler_alpha.starters import CLASSICAL, StarterKind, starter_array, thm1_starter
from kepler_alpha.sweep import find_corner_failure, sweep
from kepler_alpha.verify import region_samples, rng_for

SEED = 20240607
ALPHA0_REF = "0.17157287525380990239"


def c01_alpha0():
    err = abs(alpha0() - float(ALPHA0_REF))
    return err <= 1e-15, f"|alpha0 - ref| = {err:.1e}"


def c02_thm1_totality():
    m = sweep(StarterKind.THM1, 1000)
    fails = int((~m.passes).sum())
    ok = m.alpha.size == 1_001_000 and fails == 0 and m.pass_fraction == 1.0
    return ok, f"{m.alpha.size} nodes, failures={fails}, max alpha={np.nanmax(m.alpha):.5f}"


def c03_cubic_totality():
    m = sweep(StarterKind.S10, 1000)
    e = m.e_values[:, None] > 0
    fails = int((e & ~m.passes).sum())
    return fails == 0, f"{int(np.broadcast_to(e, m.passes.shape).sum())} nodes with e > 0, failures={fails}"


def c04_gamma_oracle():
    rng = rng_for(SEED)
    e = rng.uniform(0.0, 0.9999, 10_000)
    M = rng.uniform(0.0, math.pi, 10_000)
    E = rng.uniform(0.0, math.pi, 10_000)
    worst = 0.0
    for a, b, c in zip(e, M, E):
        p = OrbitPoint(float(a), float(b))
        g, _ = gamma(p, float(c))
        worst = max(worst, abs(g - gamma_bruteforce(p, float(c), 200)) / max(1.0, g))
    return worst <= 1e-12, f"worst scaled gap {worst:.1e}"


def c05_contraction():
    rng = rng_for(SEED + 1)
    e = rng.uniform(0.0, 0.999, 1000)
    M = rng.uniform(0.0, math.pi, 1000)
    bad, worst = 0, -math.inf
    for a, b in zip(e, M):
        p = OrbitPoint(float(a), float(b))
        root = bisection_oracle(p, 1e-15)
        E0 = thm1_starter(p).value
        it = newton_iterates(p, E0, 4)
        for n in range(1, 5):
            slack = 0.5 ** (2**n - 1) * abs(E0 - root) + 1e-12 - abs(it[n] - root)
            worst = max(worst, -slack)
            bad += slack < 0
    return bad == 0, f"violations={bad}, tightest margin={-worst:.2e}"


def c06_iteration_budget():
    n = iterations_for_digits(307)
    return n == 10, f"iterations_for_digits(307) = {n}"


def c07_region_soundness():
    parts, ok = [], True
    for r in RegionId:
        e, M = region_samples(r, 10_000, seed=SEED)
        alpha, _, _ = alpha_arrays(e, M, starter_array(REGION_STARTER[r], e, M))
        fails = int((~(alpha < ALPHA0)).sum())
        inside = bool(region_mask(r, e, M).all()) and e.size == 10_000
        ok &= inside and fails == 0
        parts.append(f"{r.name}:{fails}")
    return ok, "failures " + " ".join(parts)


def c08_containments():
    rep = containment_checks(samples=1_000_000, seed=SEED)
    n = {k: len(v) for k, v in rep.counterexamples.items()}
    return bool(rep), f"{rep.samples} samples, counterexamples {n}"


def c09_lookup():
    t = lookup.build_table(0.5)
    entries_ok = bool(lookup.check_entries(t).all())
    u = qmc.Halton(d=2, scramble=True, seed=SEED).random(20_000)
    fails = checked = 0
    for a, b in u:
        p = OrbitPoint(float(a), math.pi * float(b))
        if lookup.in_corner(t.eps, p):
            continue
        checked += 1
        fails += not alpha_test(p, lookup.table_starter(t, p).value).passes
        if checked == 10_000:
            break

    t0 = time.perf_counter()
    big = lookup.build_table(0.1)
    build_s = time.perf_counter() - t0
    rng = rng_for(SEED + 2)
    big_fails = big_checked = 0
    while big_checked < 1000:
        p = OrbitPoint(float(rng.uniform(0, 1)), float(rng.uniform(0, math.pi)))
        if lookup.in_corner(big.eps, p):
            continue
        big_checked += 1
        big_fails += not alpha_test(p, lookup.table_starter(big, p).value).passes
    ok = (t.N == 60 and entries_ok and checked == 10_000 and fails == 0
          and big.N == 1499 and build_s < 60 and big_fails == 0)
    return ok, (f"N=60 entries ok={entries_ok}, {checked} samples failures={fails}; "
                f"eps=0.1 N={big.N} built in {build_s:.1f}s, 1000 samples failures={big_fails}")


def c10_corner_probe():
    hits = {k.name: find_corner_failure(k, 0.99, 0.05) for k in CLASSICAL[:9]}
    ok = all(h is not None and h[0] >= 0.99 and h[1] <= 0.05 for h in hits.values())
    missing = [k for k, h in hits.items() if h is None]
    first = hits["S1"]
    return ok, f"S1-S9 all fail, e.g. S1 at {first}" if ok else f"no failure found for {missing}"


def c11_fixed_point_rate():
    rng = rng_for(SEED + 3)
    e = rng.uniform(0.0, 0.999, 1000)
    M = rng.uniform(0.0, math.pi, 1000)
    E0 = rng.uniform(0.0, math.pi, 1000)
    bad = 0
    for a, b, c in zip(e, M, E0):
        p = OrbitPoint(float(a), float(b))
        root = bisection_oracle(p, 1e-15)
        E = float(c)
        for _ in range(20):
            nxt = fixed_point_baseline(p, E, 1)
            bad += abs(nxt - root) > p.e * abs(E - root) + 1e-14
            E = nxt
    return bad == 0, f"violations={bad} over 20000 steps"


def c12_serialization():
    t = lookup.build_table(0.5)
    data = lookup.serialize(t)
    exact = lookup.deserialize(data) == t and len(data) == 29304
    corrupt = [
        data[:-1],
        b"XALT" + data[4:],
        data[:4] + struct.pack("<I", 9) + data[8:],
        data + b"\0" * 8,
        data[:lookup.HEADER_SIZE] + np.full(60 * 61, -1.0).tobytes(),
    ]
    rejected = 0
    for blob in corrupt:
        try:
            lookup.deserialize(blob)
        except lookup.TableFormatError:
            rejected += 1
    return exact and rejected == len(corrupt), f"bit-exact={exact}, rejected {rejected}/{len(corrupt)} corrupt streams"


CRITERIA = [
    (1, "alpha0 constant", c01_alpha0, 1),
    (2, "piecewise starter passes on the 1000-grid", c02_thm1_totality, 60),
    (3, "cubic starter passes wherever e > 0", c03_cubic_totality, 60),
    (4, "gamma matches brute force", c04_gamma_oracle, 5),
    (5, "quadratic contraction", c05_contraction, 5),
    (6, "iteration budget for 307 digits", c06_iteration_budget, 1),
    (7, "analytic region soundness", c07_region_soundness, 30),
    (8, "region containments", c08_containments, 10),
    (9, "lookup table certificate", c09_lookup, 70),
    (10, "classical starters fail near the corner", c10_corner_probe, 10),
    (11, "fixed-point linear rate", c11_fixed_point_rate, 5),
    (12, "table serialization", c12_serialization, 1),
]


def evaluate(fn, budget):
    t0 = time.perf_counter()
    ok, detail = fn()
    dt = time.perf_counter() - t0
    ok = bool(ok) and dt < budget
    return ok, f"{detail}; {dt:.2f}s (budget {budget}s)"


def line(num, title, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {title} -- {detail}"


@pytest.mark.parametrize("num, title, fn, budget", CRITERIA, ids=[f"c{c[0]:02d}" for c in CRITERIA])
def test_criterion(num, title, fn, budget, capsys):
    ok, detail = evaluate(fn, budget)
    with capsys.disabled():
        print("\n" + line(num, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for num, title, fn, budget in CRITERIA:
        ok, detail = evaluate(fn, budget)
        results.append(ok)
        print(line(num, title, ok, detail), flush=True)
    print(f"{sum(results)}/{len(results)} criteria passed")
    raise SystemExit(0 if all(results) else 1)
