"""Starter formulas for Newton's method on Kepler's equation.

Classical starters ``S1`` to ``S10`` are the textbook closed forms.  The analytic starters (``0``, ``pi``, ``2*pi/3``,
``pi/2``, ``M/(1-e)`` and the cube-root corner formula) are the pieces of
the piecewise starter :func:`thm1_starter`, which is an approximate zero on
all of ``[0, 1) x [0, pi]``.

Formula helpers accept floats or numpy arrays.  Where a formula is undefined
(``S10`` at ``e = 0``) the array helpers return NaN, and the scalar API
raises :class:`~kepler_alpha.model.DomainError`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .alpha import ALPHA0
from .model import DomainError, OrbitPoint

PI = math.pi
TWO_PI_OVER_3 = 2.0 * math.pi / 3.0
PI_OVER_2 = math.pi / 2.0
PI_OVER_4 = math.pi / 4.0
PI_OVER_7 = math.pi / 7.0

#: ``(12*alpha0)**(1/4)``, the coefficient of the ``M/(1-e)`` branch bound.
FOURTH_ROOT_12_ALPHA0 = (12.0 * ALPHA0) ** 0.25


class StarterKind(enum.Enum):
    S1 = "s1"
    S2 = "s2"
    S3 = "s3"
    S4 = "s4"
    S5 = "s5"
    S6 = "s6"
    S7 = "s7"
    S8 = "s8"
    S9 = "s9"
    S10 = "s10"
    ZERO = "zero"
    PI = "pi"
    TWO_PI_OVER_3 = "two-pi-over-3"
    PI_OVER_2 = "pi-over-2"
    M_OVER_1_MINUS_E = "m-over-1-minus-e"
    CUBE_ROOT_CORNER = "cube-root-corner"
    THM1 = "thm1"

    @classmethod
    def parse(cls, name: str) -> "StarterKind":
        key = name.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == key or kind.name.lower().replace("_", "-") == key:
                return kind
        raise DomainError(f"unknown starter {name!r}")


CLASSICAL = tuple(StarterKind(f"s{i}") for i in range(1, 11))
ANALYTIC = (
    StarterKind.ZERO,
    StarterKind.PI,
    StarterKind.TWO_PI_OVER_3,
    StarterKind.PI_OVER_2,
    StarterKind.M_OVER_1_MINUS_E,
    StarterKind.CUBE_ROOT_CORNER,
)


class Branch(enum.IntEnum):
    """Which piece of the piecewise starter produced a value."""

    M = 1
    TWO_PI_OVER_3 = 2
    PI_OVER_2 = 3
    M_OVER_1_MINUS_E = 4
    CUBE_ROOT = 5


@dataclass(frozen=True)
class StarterValue:
    value: float
    kind: StarterKind | None
    branch: Branch | None = None


# ---------------------------------------------------------------------------
# formulas (float or ndarray)


def s10_cardano(e, M):
    """Real root of ``E*(1-e) + e*E**3/6 = M`` in Cardano form."""
    with np.errstate(divide="ignore", invalid="ignore"):
        r = 3.0 * M / e
        q = 2.0 * (1.0 - e) / e
        s = np.cbrt(np.sqrt(r * r + q**3) + r)
        return s - q / s


def cube_root_corner(e, M):
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.cbrt(6.0 * M * e * e)
        return c / e - 2.0 * (1.0 - e) / c


def m_over_1_minus_e(e, M):
    return M / (1.0 - e)


def m_over_1_minus_e_bound(e):
    """Upper bound on ``M`` below which ``M/(1-e)`` is used near the corner."""
    with np.errstate(divide="ignore"):
        return FOURTH_ROOT_12_ALPHA0 * (1.0 - e) ** 1.5 / np.sqrt(e)


def _s3(e, M):
    return M + e * np.sin(M) * (1.0 + e * np.cos(M))


def _s4(e, M):
    return M + e


def _s6(e, M):
    return M + e * (PI - M) / (1.0 + e)


_FORMULAS = {
    StarterKind.S1: lambda e, M: M + 0.0 * e,
    StarterKind.S2: lambda e, M: M + e * np.sin(M),
    StarterKind.S3: _s3,
    StarterKind.S4: _s4,
    StarterKind.S5: lambda e, M: M + e * np.sin(M) / (1.0 - np.sin(M + e) + np.sin(M)),
    StarterKind.S6: _s6,
    StarterKind.S7: lambda e, M: np.minimum(
        np.minimum(m_over_1_minus_e(e, M), _s4(e, M)), _s6(e, M)
    ),
    StarterKind.S8: lambda e, M: _s3(e, M) + e**4 * (PI - _s3(e, M)) / (20.0 * PI),
    StarterKind.S9: lambda e, M: M
    + e * np.sin(M) / np.sqrt(1.0 - 2.0 * e * np.cos(M) + e * e),
    StarterKind.S10: s10_cardano,
    StarterKind.ZERO: lambda e, M: 0.0 * (e + M),
    StarterKind.PI: lambda e, M: PI + 0.0 * (e + M),
    StarterKind.TWO_PI_OVER_3: lambda e, M: TWO_PI_OVER_3 + 0.0 * (e + M),
    StarterKind.PI_OVER_2: lambda e, M: PI_OVER_2 + 0.0 * (e + M),
    StarterKind.M_OVER_1_MINUS_E: m_over_1_minus_e,
    StarterKind.CUBE_ROOT_CORNER: cube_root_corner,
}


def thm1_array(e, M) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`thm1_starter`: ``(values, branch codes)``."""
    e = np.asarray(e, dtype=float)
    M = np.asarray(M, dtype=float)
    e, M = np.broadcast_arrays(e, M)
    b1 = (e <= 0.5) | (M >= TWO_PI_OVER_3)
    b2 = (e >= 0.5) & (PI_OVER_4 <= M) & (M <= TWO_PI_OVER_3)
    b3 = (e >= 0.5) & (PI_OVER_7 <= M) & (M <= PI_OVER_4)
    b4 = (e >= 0.5) & (M <= PI_OVER_7) & (M < m_over_1_minus_e_bound(e))
    branch = np.select([b1, b2, b3, b4], [1, 2, 3, 4], default=5).astype(np.int8)
    value = np.select(
        [branch == 1, branch == 2, branch == 3, branch == 4],
        [M, np.full_like(M, TWO_PI_OVER_3), np.full_like(M, PI_OVER_2), m_over_1_minus_e(e, M)],
        default=cube_root_corner(e, M),
    )
    return value, branch


def starter_array(kind: StarterKind, e, M) -> np.ndarray:
    """Evaluate any starter elementwise; undefined points come back as NaN."""
    if kind is StarterKind.THM1:
        return thm1_array(e, M)[0]
    e = np.asarray(e, dtype=float)
    M = np.asarray(M, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.asarray(_FORMULAS[kind](e, M), dtype=float)
    out = np.broadcast_to(out, np.broadcast_shapes(e.shape, M.shape)).copy()
    out[~applicable_array(kind, e, M)] = np.nan
    return out


def applicable_array(kind: StarterKind, e, M) -> np.ndarray:
    """Mask of grid points where ``kind`` is defined."""
    e, M = np.broadcast_arrays(np.asarray(e, dtype=float), np.asarray(M, dtype=float))
    if kind is StarterKind.S10:
        return e > 0.0
    if kind is StarterKind.CUBE_ROOT_CORNER:
        return (e > 0.0) & (M > 0.0)
    return np.ones(e.shape, dtype=bool)


# ---------------------------------------------------------------------------
# scalar API


def classical_starter(kind: StarterKind, p: OrbitPoint) -> StarterValue:
    if kind not in CLASSICAL:
        raise DomainError(f"{kind.name} is not a classical starter")
    if kind is StarterKind.S10 and p.e == 0.0:
        raise DomainError("S10 is undefined at e = 0 (S1 = M is exact there)")
    return StarterValue(float(_FORMULAS[kind](p.e, p.M)), kind)


def analytic_starter(kind: StarterKind, p: OrbitPoint) -> StarterValue:
    if kind not in ANALYTIC:
        raise DomainError(f"{kind.name} is not an analytic starter")
    if kind is StarterKind.CUBE_ROOT_CORNER and (p.M <= 0.0 or p.e <= 0.0):
        raise DomainError("the cube-root starter needs M > 0 and e > 0")
    return StarterValue(float(_FORMULAS[kind](p.e, p.M)), kind)


def thm1_starter(p: OrbitPoint) -> StarterValue:
    """Piecewise starter that passes the alpha-test everywhere.

    Branches are tried in order and the first match wins::

        M          if e <= 1/2 or M >= 2pi/3
        2pi/3      if e >= 1/2 and pi/4 <= M <= 2pi/3
        pi/2       if e >= 1/2 and pi/7 <= M <= pi/4
        M/(1-e)    if e >= 1/2, M <= pi/7 and M < (12 alpha0)^(1/4) (1-e)^(3/2) / sqrt(e)
        cbrt(6Me^2)/e - 2(1-e)/cbrt(6Me^2)   otherwise
    """
    e, M = p.e, p.M
    kind = StarterKind.THM1
    if e <= 0.5 or M >= TWO_PI_OVER_3:
        return StarterValue(M, kind, Branch.M)
    if PI_OVER_4 <= M <= TWO_PI_OVER_3:
        return StarterValue(TWO_PI_OVER_3, kind, Branch.TWO_PI_OVER_3)
    if PI_OVER_7 <= M <= PI_OVER_4:
        return StarterValue(PI_OVER_2, kind, Branch.PI_OVER_2)
    if M < FOURTH_ROOT_12_ALPHA0 * (1.0 - e) ** 1.5 / math.sqrt(e):
        return StarterValue(M / (1.0 - e), kind, Branch.M_OVER_1_MINUS_E)
    # M = 0 always takes the M/(1-e) branch since its bound is positive
    assert M > 0.0, "cube-root branch reached with M = 0"
    c = (6.0 * M * e * e) ** (1.0 / 3.0)
    return StarterValue(c / e - 2.0 * (1.0 - e) / c, kind, Branch.CUBE_ROOT)


def starter(kind: StarterKind, p: OrbitPoint) -> StarterValue:
    """Dispatch to the classical, analytic or piecewise starter."""
    if kind is StarterKind.THM1:
        return thm1_starter(p)
    if kind in CLASSICAL:
        return classical_starter(kind, p)
    return analytic_starter(kind, p)
