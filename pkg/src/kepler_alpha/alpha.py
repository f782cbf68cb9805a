"""Smale's alpha-test for the Kepler function.

For ``f(E) = E - e*sin(E) - M`` the normalised higher derivatives
``|f^(k)(E)| / f'(E)`` take only two values: ``e*|sin E|/f'`` for even ``k``
and ``e*|cos E|/f'`` for odd ``k >= 3``.  So gamma, the supremum over all
``k >= 2`` of ``(x_k / k!)**(1/(k-1))``, reduces to two one-parameter scans.
Each scan is cut short by the monotonicity criterion: once
``x >= k! / (k+1)**(k-1)`` the sequence ``(x/j!)**(1/(j-1))`` is decreasing
for every ``j >= k``, so no later term can beat the running maximum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import DomainError, OrbitPoint

#: Terms up to this order are evaluated directly; above it in log domain.
DIRECT_DOMAIN_MAX_K = 20
# Relative slack on the stopping test so rounding never stops a scan early.
_STOP_SLACK = 1e-12
_MAX_SCAN_K = 10_000


def alpha0() -> float:
    """The approximate-zero threshold ``3 - 2*sqrt(2)``."""
    return 3.0 - 2.0 * math.sqrt(2.0)


ALPHA0 = alpha0()


@dataclass(frozen=True)
class AlphaReport:
    beta: float
    gamma: float
    alpha: float
    passes: bool
    gamma_argmax_k: int


def term(x: float, k: int) -> float:
    """``(x / k!) ** (1/(k-1))`` for ``x > 0`` and ``k >= 2``."""
    if k <= DIRECT_DOMAIN_MAX_K:
        return (x / math.factorial(k)) ** (1.0 / (k - 1))
    return math.exp((math.log(x) - math.lgamma(k + 1)) / (k - 1))


def log_term(x: float, k: int) -> float:
    return (math.log(x) - math.lgamma(k + 1)) / (k - 1)


def lemma_threshold(k: int) -> float:
    """``k! / (k+1)**(k-1)``; decreasing in ``k``, underflows to 0 near k=750."""
    if k <= DIRECT_DOMAIN_MAX_K:
        return math.factorial(k) / (k + 1) ** (k - 1)
    return math.exp(math.lgamma(k + 1) - (k - 1) * math.log(k + 1))


def _stops(x: float, k: int) -> bool:
    return x >= lemma_threshold(k) * (1.0 + _STOP_SLACK)


def parity_sup(x: float, first_k: int) -> tuple[float, int, int]:
    """Supremum of ``term(x, k)`` over ``k = first_k, first_k + 2, ...``.

    Returns ``(sup, argmax_k, last_k)`` where ``last_k`` is the order at
    which the scan stopped.  ``x == 0`` gives ``(0.0, 0, first_k)``.
    """
    if x <= 0.0:
        return 0.0, 0, first_k
    best, best_k = 0.0, 0
    k = first_k
    while k <= _MAX_SCAN_K:
        t = term(x, k)
        if t > best:
            best, best_k = t, k
        if _stops(x, k):
            return best, best_k, k
        k += 2
    raise RuntimeError(f"gamma scan did not terminate for x={x!r}")  # pragma: no cover


def _normalised_magnitudes(p: OrbitPoint, E: float) -> tuple[float, float, float]:
    fp = 1.0 - p.e * math.cos(E)
    return fp, p.e * abs(math.sin(E)) / fp, p.e * abs(math.cos(E)) / fp


def beta(p: OrbitPoint, E_tilde: float) -> float:
    fp = 1.0 - p.e * math.cos(E_tilde)
    return abs(E_tilde - p.e * math.sin(E_tilde) - p.M) / fp


def gamma(p: OrbitPoint, E_tilde: float) -> tuple[float, int]:
    """Return ``(gamma, argmax_k)``; ties report the smallest ``k``."""
    _, x_even, x_odd = _normalised_magnitudes(p, E_tilde)
    g_even, k_even, _ = parity_sup(x_even, 2)
    g_odd, k_odd, _ = parity_sup(x_odd, 3)
    if g_even > g_odd or (g_even == g_odd and k_even < k_odd):
        return g_even, k_even
    if g_odd == 0.0:
        return 0.0, 0
    return g_odd, k_odd


def gamma_bruteforce(p: OrbitPoint, E_tilde: float, k_max: int) -> float:
    """Maximum of the first ``k_max - 1`` gamma terms, all in log domain."""
    if k_max < 2:
        raise DomainError(f"k_max must be >= 2, got {k_max}")
    _, x_even, x_odd = _normalised_magnitudes(p, E_tilde)
    best = -math.inf
    for k in range(2, k_max + 1):
        x = x_even if k % 2 == 0 else x_odd
        if x > 0.0:
            best = max(best, log_term(x, k))
    return math.exp(best) if best > -math.inf else 0.0


def alpha_test(p: OrbitPoint, E_tilde: float) -> AlphaReport:
    b = beta(p, E_tilde)
    g, k = gamma(p, E_tilde)
    a = b * g
    return AlphaReport(beta=b, gamma=g, alpha=a, passes=a < ALPHA0, gamma_argmax_k=k)


def is_approximate_zero(p: OrbitPoint, E_tilde: float) -> bool:
    return alpha_test(p, E_tilde).passes


# ---------------------------------------------------------------------------
# array versions used by sweeps and batch verification


def parity_sup_array(x: np.ndarray, first_k: int) -> np.ndarray:
    """Vectorised :func:`parity_sup`; only points still scanning are touched."""
    x = np.asarray(x, dtype=float)
    best = np.zeros(x.shape)
    flat = best.reshape(-1)
    idx = np.flatnonzero(x > 0.0)
    xs = x.reshape(-1)[idx]
    k = first_k
    while idx.size:
        if k > _MAX_SCAN_K:  # pragma: no cover
            raise RuntimeError("gamma scan did not terminate")
        if k <= DIRECT_DOMAIN_MAX_K:
            t = (xs / math.factorial(k)) ** (1.0 / (k - 1))
        else:
            t = np.exp((np.log(xs) - math.lgamma(k + 1)) / (k - 1))
        flat[idx] = np.maximum(flat[idx], t)
        keep = xs < lemma_threshold(k) * (1.0 + _STOP_SLACK)
        idx, xs = idx[keep], xs[keep]
        k += 2
    return best


def alpha_arrays(e, M, E) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Elementwise ``(alpha, beta, gamma)``; NaN starters give NaN alpha."""
    e, M, E = np.broadcast_arrays(
        np.asarray(e, dtype=float), np.asarray(M, dtype=float), np.asarray(E, dtype=float)
    )
    with np.errstate(invalid="ignore"):
        sinE, cosE = np.sin(E), np.cos(E)
        fp = 1.0 - e * cosE
        b = np.abs(E - e * sinE - M) / fp
        g = np.maximum(
            parity_sup_array(e * np.abs(sinE) / fp, 2),
            parity_sup_array(e * np.abs(cosE) / fp, 3),
        )
    return b * g, b, g


def passes_array(alpha: np.ndarray) -> np.ndarray:
    return np.asarray(alpha) < ALPHA0
