"""Grid sweeps of the alpha-test and their CSV / PGM renderings.

A sweep of size ``n`` evaluates a starter at ``e = i/n`` (``i < n``) and
``M = pi*j/n`` (``j <= n``).  Rows can be spread over worker processes;
results are reassembled in grid order so output never depends on scheduling.
"""

from __future__ import annotations

import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import IO

import numpy as np

from .alpha import ALPHA0, alpha_arrays
from .regions import starter_region_mask
from .starters import PI_OVER_7, StarterKind, applicable_array, starter_array

PGM_PASS = 255
PGM_FAIL = 0
PGM_NOT_APPLICABLE = 128


@dataclass
class RegionMap:
    grid_n: int
    starter: StarterKind
    alpha: np.ndarray  # (grid_n, grid_n + 1); NaN where not applicable
    applicable: np.ndarray

    @property
    def passes(self) -> np.ndarray:
        return self.applicable & (self.alpha < ALPHA0)

    @property
    def e_values(self) -> np.ndarray:
        return np.arange(self.grid_n) / self.grid_n

    @property
    def M_values(self) -> np.ndarray:
        return math.pi * (np.arange(self.grid_n + 1) / self.grid_n)

    @property
    def pass_fraction(self) -> float:
        return float(self.passes.mean())

    def summary(self) -> "SweepSummary":
        return SweepSummary.from_map(self)


@dataclass
class SweepSummary:
    """Pass fraction plus failing cells in the corner box ``e >= 1/2, M <= pi/7``."""

    starter: StarterKind
    pass_fraction: float
    failures: int
    not_applicable: int
    corner_failures: list[tuple[float, float]] = field(default_factory=list)

    @classmethod
    def from_map(cls, m: RegionMap) -> "SweepSummary":
        e, M = np.meshgrid(m.e_values, m.M_values, indexing="ij")
        fail = m.applicable & ~m.passes
        corner = fail & (e >= 0.5) & (M <= PI_OVER_7)
        return cls(
            starter=m.starter,
            pass_fraction=m.pass_fraction,
            failures=int(fail.sum()),
            not_applicable=int((~m.applicable).sum()),
            corner_failures=[(float(a), float(b)) for a, b in zip(e[corner], M[corner])],
        )


def grid_points(grid_n: int, rows: slice = slice(None)) -> tuple[np.ndarray, np.ndarray]:
    e = (np.arange(grid_n) / grid_n)[rows]
    M = math.pi * (np.arange(grid_n + 1) / grid_n)
    return np.meshgrid(e, M, indexing="ij")


def _sweep_rows(kind_value: str, grid_n: int, start: int, stop: int):
    kind = StarterKind(kind_value)
    e, M = grid_points(grid_n, slice(start, stop))
    E = starter_array(kind, e, M)
    alpha, _, _ = alpha_arrays(e, M, E)
    applicable = applicable_array(kind, e, M)
    alpha[~applicable] = np.nan
    return alpha, applicable


def sweep(kind: StarterKind, grid_n: int, workers: int = 1) -> RegionMap:
    """Alpha-test ``kind`` on every node of the ``grid_n`` grid."""
    if grid_n < 2:
        raise ValueError(f"grid_n must be >= 2, got {grid_n}")
    workers = max(1, min(workers, grid_n))
    bounds = np.linspace(0, grid_n, workers + 1).astype(int)
    jobs = [(kind.value, grid_n, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    if workers == 1:
        parts = [_sweep_rows(*job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_sweep_rows, *zip(*jobs)))
    alpha = np.concatenate([a for a, _ in parts])
    applicable = np.concatenate([m for _, m in parts])
    return RegionMap(grid_n=grid_n, starter=kind, alpha=alpha, applicable=applicable)


def find_corner_failure(
    kind: StarterKind, e_min: float, M_max: float, max_level: int = 7
) -> tuple[float, float] | None:
    """Search ``[e_min, 1) x (0, M_max]`` for a point where ``kind`` fails.

    Level ``L`` tries a ``4*2**L`` square grid; the first failing point of the
    coarsest failing level is returned in row-major order.  Points where the
    starter is undefined are skipped.
    """
    if not (e_min < 1.0 and M_max > 0.0):
        raise ValueError("need e_min < 1 and M_max > 0")
    for level in range(max_level + 1):
        n = 4 * 2**level
        e = e_min + (1.0 - e_min) * (np.arange(n) / n)
        M = M_max * (np.arange(1, n + 1) / n)
        e, M = np.meshgrid(e, M, indexing="ij")
        keep = (e >= 0.0) & (e < 1.0) & (M <= math.pi)
        E = starter_array(kind, e, M)
        alpha, _, _ = alpha_arrays(e, M, E)
        fail = keep & applicable_array(kind, e, M) & ~(alpha < ALPHA0)
        hits = np.flatnonzero(fail)
        if hits.size:
            k = hits[0]
            return float(e.flat[k]), float(M.flat[k])
    return None


# ---------------------------------------------------------------------------
# writers


def _open_text(destination) -> tuple[IO[str], bool]:
    if isinstance(destination, (str, os.PathLike)):
        return open(destination, "w", newline="", encoding="ascii"), True
    return destination, False


def _fmt(x: float) -> str:
    return format(x, ".17g")


def write_region_csv(m: RegionMap, destination) -> None:
    """Columns ``e,M,alpha,passes``; ``passes`` is ``1``, ``0`` or ``na``."""
    out, close = _open_text(destination)
    try:
        e_txt = [_fmt(x) for x in m.e_values]
        M_txt = [_fmt(x) for x in m.M_values]
        passes = m.passes
        buf = io.StringIO()
        buf.write("e,M,alpha,passes\n")
        for i, et in enumerate(e_txt):
            row_alpha = m.alpha[i]
            for j, mt in enumerate(M_txt):
                if m.applicable[i, j]:
                    flag = "1" if passes[i, j] else "0"
                else:
                    flag = "na"
                buf.write(f"{et},{mt},{_fmt(row_alpha[j])},{flag}\n")
        out.write(buf.getvalue())
    finally:
        if close:
            out.close()


def pgm_bytes(m: RegionMap) -> bytes:
    """Binary PGM: one row per eccentricity, one column per mean anomaly."""
    pixels = np.where(m.passes, PGM_PASS, PGM_FAIL).astype(np.uint8)
    pixels[~m.applicable] = PGM_NOT_APPLICABLE
    header = f"P5\n{m.grid_n + 1} {m.grid_n}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_region_pgm(m: RegionMap, destination) -> None:
    data = pgm_bytes(m)
    if isinstance(destination, (str, os.PathLike)):
        with open(destination, "wb") as fh:
            fh.write(data)
    else:
        destination.write(data)


def write_region_mask_csv(kind: StarterKind, grid_n: int, destination) -> None:
    """Analytic-region overlay for ``kind`` on the sweep grid: ``e,M,in_region``."""
    e, M = grid_points(grid_n)
    mask = starter_region_mask(kind, e, M)
    out, close = _open_text(destination)
    try:
        buf = io.StringIO()
        buf.write("e,M,in_region\n")
        for a, b, c in zip(e.ravel(), M.ravel(), mask.ravel()):
            buf.write(f"{_fmt(a)},{_fmt(b)},{int(c)}\n")
        out.write(buf.getvalue())
    finally:
        if close:
            out.close()
