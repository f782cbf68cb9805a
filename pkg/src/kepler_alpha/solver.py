"""Newton's method from a certified starter, plus two reference iterations.

Starting from an approximate zero the Newton iterates satisfy
``|E_n - E| <= (1/2)**(2**n - 1) * |E_0 - E|``, so a fixed number of steps
reaches any requested accuracy.  The fixed-point iteration and the bisection
root finder are kept as a slow baseline and a ground-truth oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .alpha import alpha_test
from .model import (
    DomainError,
    OrbitPoint,
    check_eccentricity,
    eval_f,
    reduce_anomaly,
    restore_anomaly,
)
from .starters import StarterValue, thm1_starter

if TYPE_CHECKING:
    from .lookup import LookupTable

#: Digits beyond this cannot be resolved in binary64.
MAX_DIGITS = 15
RESIDUAL_MODE_MAX_ITER = 50
ORACLE_TOL_FLOOR = 1e-15


class ConvergenceError(RuntimeError):
    """Newton failed to meet a residual tolerance within the iteration cap."""


@dataclass(frozen=True)
class SolveResult:
    E: float
    iterations: int
    residual: float
    starter: StarterValue
    certified: bool
    digits_capped: bool = False


def newton_step(p: OrbitPoint, E: float) -> float:
    return E - eval_f(p, E) / (1.0 - p.e * math.cos(E))


def newton_iterates(p: OrbitPoint, E0: float, n: int) -> list[float]:
    """``[E_0, E_1, ..., E_n]``."""
    out = [E0]
    for _ in range(n):
        out.append(newton_step(p, out[-1]))
    return out


def iterations_for_digits(N: int) -> int:
    """Newton steps from a certified starter in ``[0, pi]`` to reach ``10**-N``."""
    if N < 1:
        raise DomainError(f"digits must be >= 1, got {N}")
    return math.ceil(math.log2(1.0 + math.log2(math.pi) + N * math.log2(10.0)))


def solve(
    e: float,
    M_raw: float,
    *,
    digits: int | None = None,
    tol: float | None = None,
    table: LookupTable | None = None,
    initial: float | StarterValue | None = None,
) -> SolveResult:
    """Solve ``E - e*sin(E) = M_raw`` for any real mean anomaly.

    Exactly one of ``digits`` (run a fixed number of Newton steps) or ``tol``
    (iterate until ``|f(E)| <= tol``) may be given; with neither, 15 digits
    are requested.  The starter is the piecewise certified starter unless a
    lookup ``table`` or an explicit ``initial`` value (applied to the reduced
    problem) is supplied.  ``residual`` is measured on the reduced problem.
    """
    check_eccentricity(e)
    if digits is not None and tol is not None:
        raise DomainError("give either digits or tol, not both")
    reduction = reduce_anomaly(M_raw, e)
    p = reduction.canonical

    if initial is not None:
        st = initial if isinstance(initial, StarterValue) else StarterValue(float(initial), None)
        certified = alpha_test(p, st.value).passes
    elif table is not None:
        from .lookup import table_starter

        st = table_starter(table, p)
        certified = True
    else:
        st = thm1_starter(p)
        certified = True

    E = st.value
    capped = False
    if tol is None:
        N = MAX_DIGITS if digits is None else digits
        if N > MAX_DIGITS:
            N, capped = MAX_DIGITS, True
        iterations = iterations_for_digits(N)
        for _ in range(iterations):
            E = newton_step(p, E)
    else:
        if not tol > 0.0:
            raise DomainError(f"tol must be positive, got {tol!r}")
        iterations = 0
        while abs(eval_f(p, E)) > tol:
            if iterations == RESIDUAL_MODE_MAX_ITER:
                raise ConvergenceError(
                    f"no convergence to {tol:g} in {iterations} steps at e={e!r}, M={p.M!r}"
                )
            E = newton_step(p, E)
            iterations += 1

    return SolveResult(
        E=restore_anomaly(E, reduction),
        iterations=iterations,
        residual=abs(eval_f(p, E)),
        starter=st,
        certified=certified,
        digits_capped=capped,
    )


def fixed_point_baseline(p: OrbitPoint, E0: float, n: int) -> float:
    """``n`` steps of ``E <- M + e*sin(E)``; error shrinks at least by ``e`` per step."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    E = E0
    for _ in range(n):
        E = p.M + p.e * math.sin(E)
    return E


def bisection_oracle(
    p: OrbitPoint, tol: float = ORACLE_TOL_FLOOR, trace: list | None = None
) -> float:
    """Root of the Kepler function by plain bisection on ``[0, pi]``.

    The bracket keeps ``f(lo) <= 0 <= f(hi)`` throughout and stops once it is
    no wider than ``tol`` or cannot be split further.  Each bracket is
    appended to ``trace`` when one is given.
    """
    if not tol >= ORACLE_TOL_FLOOR:
        raise DomainError(f"tol must be >= {ORACLE_TOL_FLOOR}, got {tol!r}")
    lo, hi = 0.0, math.pi
    while hi - lo > tol:
        if trace is not None:
            trace.append((lo, hi))
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if eval_f(p, mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
