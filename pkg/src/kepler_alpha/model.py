"""Kepler's equation on the canonical domain ``0 <= e < 1``, ``0 <= M <= pi``.

The Kepler function is ``f(E) = E - e*sin(E) - M``.  Every other module works
on :class:`OrbitPoint` instances; raw mean anomalies are folded into the
canonical half-turn by :func:`reduce_anomaly` and unfolded by
:func:`restore_anomaly`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TAU = 2.0 * math.pi


class DomainError(ValueError):
    """Input outside the domain an operation is defined on."""


class EccentricityError(DomainError):
    """Eccentricity outside ``[0, 1)``; raised for ``e >= 1`` in particular."""


def check_eccentricity(e: float) -> float:
    e = float(e)
    if not math.isfinite(e) or e < 0.0 or e >= 1.0:
        raise EccentricityError(f"eccentricity must lie in [0, 1), got {e!r}")
    return e


@dataclass(frozen=True)
class OrbitPoint:
    """A problem instance ``(e, M)`` with ``0 <= e < 1`` and ``0 <= M <= pi``."""

    e: float
    M: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "e", check_eccentricity(self.e))
        M = float(self.M)
        if not math.isfinite(M) or M < 0.0 or M > math.pi:
            raise DomainError(f"canonical mean anomaly must lie in [0, pi], got {M!r}")
        object.__setattr__(self, "M", M)


@dataclass(frozen=True)
class AnomalyReduction:
    canonical: OrbitPoint
    reflected: bool
    revolutions: int


@dataclass(frozen=True)
class EllipseGeometry:
    a: float
    b: float

    @classmethod
    def from_eccentricity(cls, a: float, e: float) -> "EllipseGeometry":
        e = check_eccentricity(e)
        return cls(a=float(a), b=float(a) * math.sqrt(1.0 - e * e))


def eval_f(p: OrbitPoint, E: float) -> float:
    return E - p.e * math.sin(E) - p.M


def eval_f_derivative(p: OrbitPoint, E: float, k: int) -> float:
    """k-th derivative of the Kepler function at ``E``.

    Beyond the first, derivatives cycle with period four:
    ``e*sin, e*cos, -e*sin, -e*cos`` for ``k = 2, 3, 4, 5``.
    """
    if k < 1:
        raise DomainError(f"derivative order must be >= 1, got {k}")
    if k == 1:
        return 1.0 - p.e * math.cos(E)
    phase = k % 4
    if phase == 2:
        return p.e * math.sin(E)
    if phase == 3:
        return p.e * math.cos(E)
    if phase == 0:
        return -p.e * math.sin(E)
    return -p.e * math.cos(E)


def reduce_anomaly(M_raw: float, e: float = 0.0) -> AnomalyReduction:
    """Fold an arbitrary mean anomaly into ``[0, pi]``.

    Angles whose principal value lies in ``(pi, 2*pi)`` are reflected to
    ``2*pi - principal``; solutions are reflected back by
    :func:`restore_anomaly`.
    """
    M_raw = float(M_raw)
    if not math.isfinite(M_raw):
        raise DomainError(f"mean anomaly must be finite, got {M_raw!r}")
    q, principal = divmod(M_raw, TAU)
    revolutions = int(q)
    # divmod can round a tiny negative remainder up to exactly TAU
    if principal >= TAU:
        principal = 0.0
        revolutions += 1
    reflected = principal > math.pi
    M = TAU - principal if reflected else principal
    return AnomalyReduction(OrbitPoint(e, M), reflected, revolutions)


def restore_anomaly(E_canonical: float, r: AnomalyReduction) -> float:
    if r.reflected:
        return TAU * (r.revolutions + 1) - E_canonical
    return TAU * r.revolutions + E_canonical


def eccentric_to_position(g: EllipseGeometry, E: float) -> tuple[float, float]:
    return g.a * math.cos(E), g.b * math.sin(E)
