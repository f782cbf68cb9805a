"""Regions of the ``(e, M)`` plane where a given analytic starter is certified.

Each region is a union of bands ``{e_min <= e <(=) e_max, lower <(=) M <(=) upper}``
with each inequality kept strict or inclusive exactly as in its certified
form.  Predicates accept floats or numpy arrays.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .alpha import ALPHA0
from .model import OrbitPoint
from .starters import (
    FOURTH_ROOT_12_ALPHA0,
    PI_OVER_4,
    PI_OVER_7,
    TWO_PI_OVER_3,
    StarterKind,
    thm1_array,
)

SQRT6 = math.sqrt(6.0)
CUBE_ROOT_24_ALPHA0 = (24.0 * ALPHA0) ** (1.0 / 3.0)


class RegionId(enum.Enum):
    R1 = "r1"
    R2 = "r2"
    R3 = "r3"
    R4 = "r4"
    R5 = "r5"
    R6 = "r6"
    R7 = "r7"
    THM_EM = "thm-em"
    THM_E2PI3 = "thm-e2pi3"
    THM_EPI2 = "thm-epi2"


Bound = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class Band:
    e_min: float
    e_max: float
    e_max_strict: bool
    upper: Bound
    upper_strict: bool
    lower: Bound | None = None
    lower_strict: bool = False

    def contains(self, e, M):
        e = np.asarray(e, dtype=float)
        M = np.asarray(M, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = (e >= self.e_min) & ((e < self.e_max) if self.e_max_strict else (e <= self.e_max))
            hi = self.upper(e)
            ok &= (M < hi) if self.upper_strict else (M <= hi)
            if self.lower is not None:
                lo = self.lower(e)
                ok &= (M > lo) if self.lower_strict else (M >= lo)
        return ok & (M >= 0.0) & (M <= math.pi)

    def m_limits(self, e):
        """``(lo, hi)`` for ``M`` at eccentricity ``e``, clipped to ``[0, pi]``."""
        with np.errstate(divide="ignore", invalid="ignore"):
            hi = np.minimum(self.upper(np.asarray(e, dtype=float)), math.pi)
            lo = np.zeros_like(hi) if self.lower is None else np.maximum(self.lower(e), 0.0)
        return lo, hi


def _const(c: float) -> Bound:
    return lambda e: np.full(np.shape(e), c)


def _r2_upper(e):
    return SQRT6 * ALPHA0 * (1.0 - e) ** 1.5 / np.sqrt(e)


def _r6_upper(e):
    return FOURTH_ROOT_12_ALPHA0 * (1.0 - e) ** 1.5 / np.sqrt(e)


def _r5_upper(e):
    return np.minimum(
        FOURTH_ROOT_12_ALPHA0 * (1.0 - e) ** 1.5 / np.sqrt(e),
        CUBE_ROOT_24_ALPHA0 * (1.0 - e) ** (4.0 / 3.0) / np.cbrt(e),
    )


def _r7_lower(e):
    return 8.0 * (1.0 - e) ** 1.5 / (27.0 * SQRT6 * ALPHA0 * np.sqrt(e))


_R1 = Band(0.0, 3 / 11, False, upper=lambda e: 4.0 * ALPHA0 * (1.0 - e), upper_strict=False)
_R2 = Band(3 / 11, 1.0, True, upper=_r2_upper, upper_strict=False)
_R3 = Band(
    0.0, 3 / 5, False,
    upper=_const(math.pi), upper_strict=False,
    lower=lambda e: math.pi - 4.0 * ALPHA0 * (1.0 + e), lower_strict=True,
)
_R4 = Band(
    3 / 5, 1.0, True,
    upper=_const(math.pi), upper_strict=False,
    lower=lambda e: math.pi - SQRT6 * ALPHA0 * (1.0 + e) ** 1.5 / np.sqrt(e), lower_strict=True,
)
_R5 = Band(0.0, 3 / 11, False, upper=_r5_upper, upper_strict=True)
_R6 = Band(3 / 11, 1.0, True, upper=_r6_upper, upper_strict=True)
_R7 = Band(
    3 / 11, 1.0, True,
    upper=_const(PI_OVER_7), upper_strict=False,
    lower=_r7_lower, lower_strict=True,
)

#: Region components; a region is the union of its bands.
BANDS: dict[RegionId, tuple[Band, ...]] = {
    RegionId.R1: (_R1,),
    RegionId.R2: (_R2,),
    RegionId.R3: (_R3,),
    RegionId.R4: (_R4,),
    RegionId.R5: (_R5,),
    RegionId.R6: (_R6,),
    RegionId.R7: (_R7,),
    RegionId.THM_EM: (
        Band(0.0, 0.5, False, upper=_const(math.pi), upper_strict=False),
        Band(0.0, 1.0, True, upper=_const(math.pi), upper_strict=False,
             lower=_const(TWO_PI_OVER_3), lower_strict=False),
        _R2,
    ),
    RegionId.THM_E2PI3: (
        Band(0.5, 1.0, True, upper=_const(TWO_PI_OVER_3), upper_strict=False,
             lower=_const(PI_OVER_4), lower_strict=False),
    ),
    RegionId.THM_EPI2: (
        Band(0.5, 1.0, True, upper=_const(PI_OVER_4), upper_strict=False,
             lower=_const(PI_OVER_7), lower_strict=False),
    ),
}

#: The starter each region certifies.
REGION_STARTER: dict[RegionId, StarterKind] = {
    RegionId.R1: StarterKind.ZERO,
    RegionId.R2: StarterKind.ZERO,
    RegionId.R3: StarterKind.PI,
    RegionId.R4: StarterKind.PI,
    RegionId.R5: StarterKind.M_OVER_1_MINUS_E,
    RegionId.R6: StarterKind.M_OVER_1_MINUS_E,
    RegionId.R7: StarterKind.CUBE_ROOT_CORNER,
    RegionId.THM_EM: StarterKind.S1,
    RegionId.THM_E2PI3: StarterKind.TWO_PI_OVER_3,
    RegionId.THM_EPI2: StarterKind.PI_OVER_2,
}

#: The analytic region known for a starter, as a union of region ids.
STARTER_REGIONS: dict[StarterKind, tuple[RegionId, ...]] = {}
for _r, _k in REGION_STARTER.items():
    STARTER_REGIONS.setdefault(_k, ())
    STARTER_REGIONS[_k] += (_r,)


def region_mask(r: RegionId, e, M) -> np.ndarray:
    mask = None
    for band in BANDS[r]:
        inside = band.contains(e, M)
        mask = inside if mask is None else mask | inside
    return mask


def starter_region_mask(kind: StarterKind, e, M) -> np.ndarray:
    """Points covered by the certified region(s) of ``kind``.

    The piecewise starter and ``S10`` are certified everywhere (``S10`` only
    where it is defined, ``e > 0``); starters without a certified region get an empty
    mask.
    """
    e, M = np.broadcast_arrays(np.asarray(e, dtype=float), np.asarray(M, dtype=float))
    if kind is StarterKind.THM1:
        return np.ones(e.shape, dtype=bool)
    if kind is StarterKind.S10:
        return e > 0.0
    mask = np.zeros(e.shape, dtype=bool)
    for r in STARTER_REGIONS.get(kind, ()):
        mask |= region_mask(r, e, M)
    return mask


def in_region(r: RegionId, p: OrbitPoint) -> bool:
    return bool(region_mask(r, p.e, p.M))


@dataclass
class ContainmentReport:
    """Outcome of :func:`containment_checks`; truthy when nothing failed."""

    samples: int
    constant_inequality: bool
    counterexamples: dict[str, list[tuple[float, float]]]

    def __bool__(self) -> bool:
        return self.constant_inequality and not any(self.counterexamples.values())


def containment_checks(samples: int = 1_000_000, seed: int = 0) -> ContainmentReport:
    """Sample-based check of the region inclusions used by the proofs.

    Checks ``R1 <= R5``, ``R2 <= R6``, that every cube-root point of the
    piecewise starter with ``e >= 1/2`` and ``M <= pi/7`` lies in ``R7``, and
    the constant inequality ``(12 alpha0)^(1/4) > 8 / (27 sqrt(6) alpha0)``.
    Half the samples cover the whole domain and half the corner box
    ``[3/11, 1) x [0, pi/7]`` where the regions are thin.
    """
    from scipy.stats import qmc

    half = samples // 2
    u = qmc.Halton(d=2, scramble=True, seed=seed).random(samples)
    e = np.concatenate([u[:half, 0], 3 / 11 + (1 - 3 / 11) * u[half:, 0]])
    M = np.concatenate([math.pi * u[:half, 1], PI_OVER_7 * u[half:, 1]])

    def failures(mask):
        idx = np.flatnonzero(mask)[:10]
        return [(float(e[i]), float(M[i])) for i in idx]

    _, branch = thm1_array(e, M)
    corner = (branch == 5) & (e >= 0.5) & (M <= PI_OVER_7)
    return ContainmentReport(
        samples=samples,
        constant_inequality=FOURTH_ROOT_12_ALPHA0 > 8.0 / (27.0 * SQRT6 * ALPHA0),
        counterexamples={
            "R1 in R5": failures(region_mask(RegionId.R1, e, M) & ~region_mask(RegionId.R5, e, M)),
            "R2 in R6": failures(region_mask(RegionId.R2, e, M) & ~region_mask(RegionId.R6, e, M)),
            "cube-root branch in R7": failures(corner & ~region_mask(RegionId.R7, e, M)),
        },
    )
