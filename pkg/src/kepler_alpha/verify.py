"""Randomised and low-discrepancy verification suites.

Every suite is keyed by an integer seed: uniform samples come from a Philox
(counter-based) generator and region samples from a scrambled Halton
sequence, so reruns with the same seed are identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import lookup
from .alpha import ALPHA0, alpha_arrays, alpha_test
from .model import OrbitPoint
from .regions import BANDS, REGION_STARTER, RegionId, containment_checks, region_mask
from .solver import bisection_oracle, fixed_point_baseline, newton_iterates
from .starters import CLASSICAL, StarterKind, starter_array, thm1_array, thm1_starter
from .sweep import find_corner_failure

SUITES = ("regions", "contraction", "thm1", "corner", "lookup")


@dataclass
class SuiteResult:
    name: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)

    def check(self, label: str, ok: bool, detail: str = "") -> bool:
        self.passed &= bool(ok)
        self.lines.append(f"{'PASS' if ok else 'FAIL'}  {label}" + (f"  ({detail})" if detail else ""))
        return bool(ok)

    def note(self, text: str) -> None:
        self.lines.append(f"INFO  {text}")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def region_samples(r: RegionId, n: int, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """``n`` low-discrepancy points inside region ``r``.

    Each band is sampled by mapping a Halton pair ``(u, v)`` to
    ``e = e_min + u*(e_max - e_min)`` and ``M = lo(e) + v*(hi(e) - lo(e))``, so
    thin parts of a band get as many points per unit of ``e`` as wide parts.
    Points landing on an excluded boundary are dropped and replaced.
    """
    bands = BANDS[r]
    per_band = [n // len(bands) + (1 if k < n % len(bands) else 0) for k in range(len(bands))]
    es, Ms = [], []
    for k, (band, want) in enumerate(zip(bands, per_band)):
        sampler = qmc.Halton(d=2, scramble=True, seed=seed * 1009 + k)
        got_e, got_M, have = [], [], 0
        while have < want:
            u = sampler.random(max(2 * (want - have), 64))
            e = band.e_min + u[:, 0] * (band.e_max - band.e_min)
            lo, hi = band.m_limits(e)
            ok = (e < 1.0) & (hi > lo)
            e, lo, hi, v = e[ok], lo[ok], hi[ok], u[ok, 1]
            M = lo + v * (hi - lo)
            inside = band.contains(e, M)
            got_e.append(e[inside])
            got_M.append(M[inside])
            have += int(inside.sum())
        es.append(np.concatenate(got_e)[:want])
        Ms.append(np.concatenate(got_M)[:want])
    return np.concatenate(es), np.concatenate(Ms)


def suite_regions(samples: int = 10_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("regions")
    for r in RegionId:
        e, M = region_samples(r, samples, seed)
        kind = REGION_STARTER[r]
        inside = region_mask(r, e, M)
        alpha, _, _ = alpha_arrays(e, M, starter_array(kind, e, M))
        fails = int((~(alpha < ALPHA0)).sum())
        res.check(
            f"{r.name}: {kind.name} passes on {e.size} samples",
            inside.all() and e.size == samples and fails == 0,
            f"failures={fails}, max alpha={np.nanmax(alpha):.6f}",
        )
    c = containment_checks(samples=1_000_000, seed=seed)
    res.check("(12 alpha0)^(1/4) > 8/(27 sqrt(6) alpha0)", c.constant_inequality)
    for name, bad in c.counterexamples.items():
        res.check(f"{name} on {c.samples} samples", not bad, f"counterexamples={bad[:3]}")
    return res


def contraction_samples(samples: int, seed: int, e_max: float = 0.999):
    rng = rng_for(seed)
    e = rng.uniform(0.0, e_max, samples)
    M = rng.uniform(0.0, math.pi, samples)
    return e, M


def suite_contraction(samples: int = 1000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("contraction")
    e, M = contraction_samples(samples, seed)
    newton_bad = fixed_bad = residual_bad = 0
    worst = 0.0
    for a, b in zip(e, M):
        p = OrbitPoint(float(a), float(b))
        root = bisection_oracle(p, 1e-15)
        E0 = thm1_starter(p).value
        it = newton_iterates(p, E0, 4)
        err0 = abs(E0 - root)
        for n in range(1, 5):
            bound = 0.5 ** (2**n - 1) * err0 + 1e-12
            worst = max(worst, abs(it[n] - root) - bound)
            newton_bad += abs(it[n] - root) > bound
        f = [abs(x - p.e * math.sin(x) - p.M) for x in it]
        residual_bad += any(f[n + 1] > f[n] for n in range(1, 4))
        E = E0
        for _ in range(20):
            nxt = fixed_point_baseline(p, E, 1)
            fixed_bad += abs(nxt - root) > p.e * abs(E - root) + 1e-14
            E = nxt
    res.check(f"Newton quadratic contraction, n=1..4, {samples} points", newton_bad == 0,
              f"violations={newton_bad}, worst excess={worst:.3g}")
    res.check(f"fixed-point linear rate, n=0..19, {samples} points", fixed_bad == 0,
              f"violations={fixed_bad}")
    res.note(f"residual increased after the first Newton step at {residual_bad} points (reported only)")
    return res


def suite_thm1(samples: int = 1_000_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("thm1")
    rng = rng_for(seed)
    e = rng.uniform(0.0, 1.0, samples)
    M = rng.uniform(0.0, math.pi, samples)
    E, branch = thm1_array(e, M)
    res.check("every sample takes one of the five branches",
              bool(np.isin(branch, [1, 2, 3, 4, 5]).all() and np.isfinite(E).all()))
    alpha, _, _ = alpha_arrays(e, M, E)
    fails = int((~(alpha < ALPHA0)).sum())
    res.check(f"alpha-test passes at all {samples} samples", fails == 0,
              f"failures={fails}, max alpha={alpha.max():.6f}")
    b5 = branch == 5
    res.check("cube-root branch samples lie in R7",
              bool(region_mask(RegionId.R7, e[b5], M[b5]).all()), f"{int(b5.sum())} samples")
    k = min(samples, 2000)
    scalar = [thm1_starter(OrbitPoint(float(a), float(b))) for a, b in zip(e[:k], M[:k])]
    res.check("scalar and vectorised starters agree",
              all(int(s.branch) == int(c) for s, c in zip(scalar, branch[:k]))
              and np.allclose([s.value for s in scalar], E[:k], rtol=1e-14, atol=0.0))
    counts = np.bincount(branch, minlength=6)[1:]
    res.note("branch counts " + ", ".join(f"{i + 1}:{c}" for i, c in enumerate(counts)))
    return res


def suite_corner(samples: int = 0, seed: int = 0) -> SuiteResult:
    res = SuiteResult("corner")
    for kind in CLASSICAL[:9]:
        hit = find_corner_failure(kind, 0.99, 0.05)
        res.check(f"{kind.name} fails somewhere in [0.99, 1) x (0, 0.05]", hit is not None,
                  f"at {hit}" if hit else "")
    for kind in (StarterKind.THM1, StarterKind.S10):
        hit = find_corner_failure(kind, 0.99, 0.05)
        res.check(f"{kind.name} has no failure in [0.99, 1) x (0, 0.05]", hit is None,
                  f"at {hit}" if hit else "")
    return res


def suite_lookup(samples: int = 10_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("lookup")
    t = lookup.build_table(0.5)
    res.check("eps=0.5 gives N=60", t.N == 60, f"N={t.N}")
    res.check("all entries satisfy bracket and residual bounds", bool(lookup.check_entries(t).all()))
    res.check("serialization round trip is bit-exact", lookup.deserialize(lookup.serialize(t)) == t)

    u = qmc.Halton(d=2, scramble=True, seed=seed).random(2 * samples)
    fails = checked = 0
    for a, b in u:
        p = OrbitPoint(float(a), math.pi * float(b))
        if lookup.in_corner(t.eps, p):
            continue
        checked += 1
        fails += not alpha_test(p, lookup.table_starter(t, p).value).passes
        if checked == samples:
            break
    res.check(f"table starter passes at {checked} samples outside the corner",
              fails == 0 and checked == samples, f"failures={fails}")

    t9 = lookup.build_table(0.09)
    rng = rng_for(seed)
    n = max(1, samples // 10)
    e = rng.uniform(1.0 - t9.eps, 1.0, n)
    M = rng.uniform(0.0, math.acos(1.0 - t9.eps), n)
    fails = sum(
        not alpha_test(p, lookup.table_starter(t9, p).value).passes
        for p in (OrbitPoint(float(a), float(b)) for a, b in zip(e, M))
    )
    res.check(f"eps=0.09 corner fallback passes at {n} corner samples", fails == 0,
              f"failures={fails}")
    return res


def run_suite(name: str, samples: int | None = None, seed: int = 0) -> SuiteResult:
    fn = {
        "regions": suite_regions,
        "contraction": suite_contraction,
        "thm1": suite_thm1,
        "corner": suite_corner,
        "lookup": suite_lookup,
    }[name]
    return fn(seed=seed) if samples is None else fn(samples=samples, seed=seed)
