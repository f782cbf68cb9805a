"""Piecewise-constant starter tables.

For ``N > (pi + 2) / (2 * alpha0 * eps**2)`` the grid values ``E_ij`` with
``|E_ij - (i/N) sin(E_ij) - pi*j/N| < 1/N`` pass the alpha-test at every
``(e, M)`` served by cell ``i = floor(N e)``, ``j = ceil(M N / pi)``, except
in the corner ``[1 - eps, 1) x [0, arccos(1 - eps)]``.  When
``eps < 1 - cos(pi/7)`` corner queries fall back to the ``M/(1-e)`` and
cube-root branches of the piecewise starter.

Binary layout (little-endian)::

    offset  size  field
    0       4     magic b"KALT"
    4       4     version, u32 (= 1)
    8       8     eps, f64
    16      8     N, u64
    24      8*N*(N+1)  entries, f64, row-major (i outer, j inner)
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .alpha import ALPHA0
from .model import DomainError, OrbitPoint
from .starters import (
    FOURTH_ROOT_12_ALPHA0,
    PI_OVER_7,
    Branch,
    StarterValue,
)

MAGIC = b"KALT"
VERSION = 1
_HEADER = struct.Struct("<4sIdQ")
HEADER_SIZE = _HEADER.size

#: Corner fallback is only valid for ``eps`` below this.
CORNER_EPS_LIMIT = 1.0 - math.cos(math.pi / 7.0)


class UnsupportedRegionError(DomainError):
    """Query falls in the table's excluded corner and no fallback applies."""


class TableFormatError(ValueError):
    """Serialized table is truncated, mislabelled or inconsistent."""


@dataclass(frozen=True, eq=False)
class LookupTable:
    eps: float
    N: int
    entries: np.ndarray  # shape (N, N + 1)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LookupTable):
            return NotImplemented
        return (
            struct.pack("<d", self.eps) == struct.pack("<d", other.eps)
            and self.N == other.N
            and self.entries.shape == other.entries.shape
            and self.entries.tobytes() == other.entries.tobytes()
        )

    __hash__ = None  # type: ignore[assignment]


def _check_eps(eps: float) -> float:
    eps = float(eps)
    if not (0.0 < eps < 1.0):
        raise DomainError(f"eps must lie in (0, 1), got {eps!r}")
    return eps


def size_bound(eps: float) -> float:
    return (math.pi + 2.0) / (2.0 * ALPHA0 * eps * eps)


def table_size_for_eps(eps: float) -> int:
    """Smallest integer ``N`` strictly above ``(pi + 2) / (2 alpha0 eps^2)``."""
    return math.floor(size_bound(_check_eps(eps))) + 1


def _cell_targets(N: int, i, j):
    """``(i/N, pi*j/N)``: the eccentricity and mean anomaly of cell ``(i, j)``."""
    # pi*(j/N) is exactly pi at j = N; (pi*j)/N can round past it
    return np.asarray(i) / N, math.pi * (np.asarray(j) / N)


def cell_residual(N: int, i, j, E) -> np.ndarray:
    e_i, M_j = _cell_targets(N, i, j)
    return E - e_i * np.sin(E) - M_j


def build_table(eps: float) -> LookupTable:
    """Bisect every cell on ``[pi*j/N, pi]`` until the residual drops below ``1/N``.

    Endpoints are tested first, so rows ``i = 0`` hold ``pi*j/N`` exactly and
    the column ``j = N`` holds ``pi``.
    """
    N = table_size_for_eps(eps)
    i, j = np.meshgrid(np.arange(N), np.arange(N + 1), indexing="ij")
    i, j = i.ravel(), j.ravel()
    lo = _cell_targets(N, i, j)[1]
    hi = np.full(lo.shape, math.pi)
    out = np.empty(lo.shape)
    limit = 1.0 / N

    active = np.ones(lo.shape, dtype=bool)
    for edge in (lo, hi):
        hit = active & (np.abs(cell_residual(N, i, j, edge)) < limit)
        out[hit] = edge[hit]
        active &= ~hit

    idx = np.flatnonzero(active)
    lo, hi, ii, jj = lo[idx], hi[idx], i[idx], j[idx]
    while idx.size:
        mid = 0.5 * (lo + hi)
        g = cell_residual(N, ii, jj, mid)
        done = np.abs(g) < limit
        out[idx[done]] = mid[done]
        below = g < 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        keep = ~done
        idx, lo, hi, ii, jj = idx[keep], lo[keep], hi[keep], ii[keep], jj[keep]

    entries = out.reshape(N, N + 1)
    entries.flags.writeable = False
    return LookupTable(eps=float(eps), N=N, entries=entries)


def in_corner(eps: float, p: OrbitPoint) -> bool:
    return p.e >= 1.0 - eps and p.M <= math.acos(1.0 - eps)


def cell_index(t: LookupTable, p: OrbitPoint) -> tuple[int, int]:
    # clamp guards rounding of N*e and M*N/pi at the upper edges
    i = min(math.floor(t.N * p.e), t.N - 1)
    j = min(math.ceil(p.M * t.N / math.pi), t.N)
    return i, j


def table_starter(t: LookupTable, p: OrbitPoint) -> StarterValue:
    if in_corner(t.eps, p):
        if t.eps >= CORNER_EPS_LIMIT:
            raise UnsupportedRegionError(
                f"(e={p.e!r}, M={p.M!r}) is in the excluded corner and eps={t.eps!r} "
                f">= 1 - cos(pi/7); no corner fallback is available"
            )
        e, M = p.e, p.M
        if e >= 0.5 and M <= PI_OVER_7 and M < FOURTH_ROOT_12_ALPHA0 * (1.0 - e) ** 1.5 / math.sqrt(e):
            return StarterValue(M / (1.0 - e), None, Branch.M_OVER_1_MINUS_E)
        c = (6.0 * M * e * e) ** (1.0 / 3.0)
        return StarterValue(c / e - 2.0 * (1.0 - e) / c, None, Branch.CUBE_ROOT)
    i, j = cell_index(t, p)
    return StarterValue(float(t.entries[i, j]), None, None)


def check_entries(t: LookupTable, i=None, j=None) -> np.ndarray:
    """Boolean mask of entries meeting the bracket and residual bounds."""
    if i is None:
        i, j = np.meshgrid(np.arange(t.N), np.arange(t.N + 1), indexing="ij")
    E = t.entries[i, j]
    low = _cell_targets(t.N, i, j)[1]
    return (low <= E) & (E <= math.pi) & (np.abs(cell_residual(t.N, i, j, E)) < 1.0 / t.N)


# ---------------------------------------------------------------------------
# serialization


def serialize(t: LookupTable) -> bytes:
    header = _HEADER.pack(MAGIC, VERSION, t.eps, t.N)
    return header + np.ascontiguousarray(t.entries, dtype="<f8").tobytes()


def deserialize(data: bytes, spot_checks: int = 100) -> LookupTable:
    if len(data) < HEADER_SIZE:
        raise TableFormatError(f"stream too short for header: {len(data)} bytes")
    magic, version, eps, N = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TableFormatError(f"bad magic {magic!r}")
    if version != VERSION:
        raise TableFormatError(f"unsupported version {version}")
    if not (0.0 < eps < 1.0) or N < 1:
        raise TableFormatError(f"invalid header eps={eps!r}, N={N}")
    expected = HEADER_SIZE + 8 * N * (N + 1)
    if len(data) != expected:
        raise TableFormatError(f"size mismatch: expected {expected} bytes, got {len(data)}")
    if not N > size_bound(eps):
        raise TableFormatError(f"N={N} too small for eps={eps!r}")
    entries = np.frombuffer(data, dtype="<f8", offset=HEADER_SIZE).reshape(N, N + 1)
    t = LookupTable(eps=eps, N=N, entries=entries.astype(float))
    t.entries.flags.writeable = False
    rng = np.random.Generator(np.random.Philox(0))
    i = rng.integers(0, N, size=spot_checks)
    j = rng.integers(0, N + 1, size=spot_checks)
    bad = ~check_entries(t, i, j)
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise TableFormatError(f"entry ({i[k]}, {j[k]}) violates the table invariants")
    return t


def save(t: LookupTable, path) -> None:
    Path(path).write_bytes(serialize(t))


def load(path) -> LookupTable:
    return deserialize(Path(path).read_bytes())


def to_json(t: LookupTable) -> str:
    return json.dumps({"eps": t.eps, "N": t.N, "entries": t.entries.ravel().tolist()})


def from_json(text: str) -> LookupTable:
    obj = json.loads(text)
    N = int(obj["N"])
    entries = np.asarray(obj["entries"], dtype=float)
    if entries.size != N * (N + 1):
        raise TableFormatError(f"expected {N * (N + 1)} entries, got {entries.size}")
    entries = entries.reshape(N, N + 1)
    entries.flags.writeable = False
    return LookupTable(eps=float(obj["eps"]), N=N, entries=entries)
