"""Integer homology of chain complexes via Smith normal form.

Matrices may be dense (numpy) or scipy.sparse. The dense stage runs in int64
only while entries are small enough that no update can overflow, and falls
back to exact Python ints otherwise.
"""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass
from math import gcd
from typing import Sequence

import numpy as np
import scipy.sparse as sp


class ChainComplexError(ValueError):
    """Raised when consecutive boundary maps do not compose to zero."""

    def __init__(self, k: int):
        super().__init__(f"d_{k} o d_{k + 1} != 0")
        self.k = k


@dataclass(frozen=True)
class SmithNormalForm:
    invariant_factors: tuple[int, ...]
    shape: tuple[int, int]

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


def _to_columns(m) -> tuple[dict[int, dict[int, int]], tuple[int, int]]:
    if sp.issparse(m):
        coo = sp.coo_matrix(m)
        cols: dict[int, dict[int, int]] = {}
        for r, c, v in zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()):
            if v:
                col = cols.setdefault(c, {})
                col[r] = col.get(r, 0) + int(v)
        return {c: {r: v for r, v in col.items() if v} for c, col in cols.items()}, coo.shape
    arr = np.asarray(m)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d matrix")
    cols = {}
    for r, c in zip(*np.nonzero(arr)):
        cols.setdefault(int(c), {})[int(r)] = int(arr[r, c])
    return cols, arr.shape


def _eliminate_units(cols: dict[int, dict[int, int]], density: float = 0.05) -> int:
    """Strip unit pivots from a sparse column dict in place; returns how many.

    A unit pivot at (r, c) lets column operations clear row r, after which
    row r and column c split off as a 1x1 block with invariant factor 1.
    Pivots are chosen to keep fill low: among the few shortest columns, the
    unit entry whose row is shortest. Stops early once the active block is
    denser than ``density``, leaving the rest to the dense stage.
    """
    rows: dict[int, set[int]] = {}
    for c, col in cols.items():
        for r in col:
            rows.setdefault(r, set()).add(c)
    nnz = sum(len(col) for col in cols.values())
    heap = [(len(col), c) for c, col in cols.items()]
    heapq.heapify(heap)
    found = 0
    while heap:
        if nnz > density * len(rows) * len(cols):
            break
        # pull a few current shortest columns holding a unit entry
        picked = []
        while heap and len(picked) < 4:
            size, c = heapq.heappop(heap)
            col = cols.get(c)
            if col is None or size != len(col) or c in picked:
                continue  # stale entry; a fresh one was pushed on change
            picked.append(c)
        best = None
        for c in picked:
            col = cols[c]
            for r, v in col.items():
                if v in (1, -1):
                    score = ((len(col) - 1) * (len(rows[r]) - 1), c, r)
                    if best is None or score < best:
                        best = score
        for c in picked:
            if (best is None or c != best[1]) and _has_unit(cols[c]):
                heapq.heappush(heap, (len(cols[c]), c))
        if best is None:
            if not heap:
                break
            continue
        _, c, r = best
        col = cols[c]
        u = col[r]
        for c2 in sorted(rows[r] - {c}):
            other = cols[c2]
            f = other[r] * u
            for rr, v in col.items():
                nv = other.get(rr, 0) - f * v
                if nv:
                    if rr not in other:
                        rows[rr].add(c2)
                        nnz += 1
                    other[rr] = nv
                elif rr in other:
                    del other[rr]
                    rows[rr].discard(c2)
                    nnz -= 1
            if other:
                heapq.heappush(heap, (len(other), c2))
            else:
                del cols[c2]
        for rr in col:
            rows[rr].discard(c)
            if not rows[rr]:
                del rows[rr]
        nnz -= len(col)
        del cols[c]
        found += 1
    for c in [c for c, col in cols.items() if not col]:
        del cols[c]
    return found


def _has_unit(col: dict[int, int]) -> bool:
    return any(v in (1, -1) for v in col.values())


_INT64_SAFE = 1 << 30  # |a|, |q| below this keep a - q * b inside int64


def _safe(a: np.ndarray) -> np.ndarray:
    if a.dtype != object and a.size and np.abs(a).max() > _INT64_SAFE:
        return a.astype(object)
    return a


def _pick_pivot(a: np.ndarray) -> tuple[int, int] | None:
    """Unit entry with the smallest Markowitz count, else the smallest entry."""
    nz = a != 0
    if not nz.any():
        return None
    mag = np.abs(a)
    unit = mag == 1
    big = np.iinfo(np.int64).max
    if unit.any():
        cost = np.outer(nz.sum(axis=1) - 1, nz.sum(axis=0) - 1)
        score = np.where(unit, cost, big)
    elif a.dtype == object:
        score = np.where(nz, mag.astype(float), np.inf)
    else:
        score = np.where(nz, mag, big)
    return divmod(int(np.argmin(score)), a.shape[1])


def _diagonalize(a: np.ndarray) -> list[int]:
    """Nonzero diagonal of a dense integer matrix after row/column reduction.

    Unit pivots are taken in Markowitz order to slow down fill and growth;
    otherwise the pivot is an entry of minimal absolute value, and a smaller
    remainder in its row or column replaces it until both are cleared.
    Works in int64 while that is provably overflow-free, then in Python ints.
    Entries are not yet chained.
    """
    a = np.array(a)
    if a.dtype != object:
        a = a.astype(np.int64)
    diag = []
    while a.size:
        if a.dtype != object:
            a = a[(a != 0).any(axis=1)][:, (a != 0).any(axis=0)]
        pos = _pick_pivot(a)
        if pos is None:
            break
        i, j = pos
        while True:
            a = _safe(a)
            p = a[i, j]
            q = a[:, j] // p
            q[i] = 0
            hit = np.flatnonzero(q)
            if hit.size:
                a[hit] -= np.outer(q[hit], a[i])
                a = _safe(a)
            q = a[i] // p
            q[j] = 0
            hit = np.flatnonzero(q)
            if hit.size:
                a[:, hit] -= np.outer(a[:, j], q[hit])
            rest = [(abs(int(a[r, j])), r, j) for r in np.flatnonzero(a[:, j]) if r != i]
            rest += [(abs(int(a[i, c])), i, c) for c in np.flatnonzero(a[i]) if c != j]
            if not rest:
                break
            _, i, j = min(rest)
        diag.append(abs(int(a[i, j])))
        a = np.delete(np.delete(a, i, axis=0), j, axis=1)
    return diag


def _chain(diag: list[int]) -> list[int]:
    """Turn a diagonal into a divisibility chain (diag(a, b) ~ diag(gcd, lcm))."""
    ones = sum(1 for x in diag if x == 1)
    d = sorted(x for x in diag if x != 1)
    n = len(d)
    for i in range(n):
        for j in range(i + 1, n):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] * d[j] // g
    return [1] * ones + d


def smith_normal_form(m) -> SmithNormalForm:
    """Invariant factors ``d_1 | d_2 | ... | d_r`` of an integer matrix."""
    cols, shape = _to_columns(m)
    units = _eliminate_units(cols)
    rest: list[int] = []
    if cols:
        row_ids = sorted({r for col in cols.values() for r in col})
        row_pos = {r: i for i, r in enumerate(row_ids)}
        col_ids = sorted(cols)
        dense = np.zeros((len(row_ids), len(col_ids)), dtype=object)
        for j, c in enumerate(col_ids):
            for r, v in cols[c].items():
                dense[row_pos[r], j] = v
        if all(abs(v) <= _INT64_SAFE for col in cols.values() for v in col.values()):
            dense = dense.astype(np.int64)
        rest = _chain(_diagonalize(dense))
    factors = _chain([1] * units + rest)
    return SmithNormalForm(tuple(factors), (int(shape[0]), int(shape[1])))


def matrix_rank(m) -> int:
    return smith_normal_form(m).rank


@dataclass(frozen=True)
class HomologyResult:
    """Betti numbers and torsion coefficients, indexed by dimension."""

    betti: tuple[int, ...]
    torsion: tuple[tuple[int, ...], ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(range(len(self.betti)))

    def group(self, k: int) -> str:
        b = self.betti[k]
        parts = []
        if b == 1:
            parts.append("Z")
        elif b > 1:
            parts.append(f"Z^{b}")
        parts.extend(f"Z_{t}" for t in self.torsion[k])
        return " ⊕ ".join(parts) if parts else "0"

    def is_trivial(self, k: int) -> bool:
        return self.betti[k] == 0 and not self.torsion[k]

    def format(self, show_trivial: bool = False) -> str:
        """Compact text like ``H0=Z, H1=Z_3, H2=Z^20``."""
        items = [f"H{k}={self.group(k)}" for k in self.dims if show_trivial or not self.is_trivial(k)]
        return ", ".join(items) if items else "all groups trivial"

    def __str__(self) -> str:
        return self.format()

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "betti": list(self.betti), "torsion": [list(t) for t in self.torsion]}

    def to_json_text(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, data: dict) -> "HomologyResult":
        return cls(tuple(data["betti"]), tuple(tuple(t) for t in data["torsion"]))

    def trimmed(self) -> "HomologyResult":
        """Drop trailing dimensions whose chain groups were empty (all trivial)."""
        k = len(self.betti)
        while k > 1 and self.is_trivial(k - 1):
            k -= 1
        return HomologyResult(self.betti[:k], self.torsion[:k])


def _composes_to_zero(a, b) -> bool:
    a_cols, _ = _to_columns(a)
    b_cols, _ = _to_columns(b)
    for col in b_cols.values():
        acc: dict[int, int] = {}
        for r, v in col.items():
            for rr, w in a_cols.get(r, {}).items():
                acc[rr] = acc.get(rr, 0) + v * w
        if any(acc.values()):
            return False
    return True


def homology_of_chain_complex(matrices: Sequence, dims: Sequence[int]) -> HomologyResult:
    """Homology of ``C_d -> ... -> C_1 -> C_0``.

    Args:
        matrices: ``[d_1, ..., d_d]``; ``d_k`` has shape ``(dims[k-1], dims[k])``.
        dims: ranks of the chain groups ``C_0, ..., C_d``.

    Raises:
        ChainComplexError: if some ``d_k o d_{k+1}`` is nonzero.
        ValueError: on inconsistent shapes.
    """
    dims = [int(d) for d in dims]
    if len(matrices) != max(len(dims) - 1, 0):
        raise ValueError(f"need {len(dims) - 1} boundary matrices, got {len(matrices)}")
    for k, m in enumerate(matrices, start=1):
        if tuple(m.shape) != (dims[k - 1], dims[k]):
            raise ValueError(f"d_{k} has shape {m.shape}, expected {(dims[k - 1], dims[k])}")
    for k in range(1, len(matrices)):
        if not _composes_to_zero(matrices[k - 1], matrices[k]):
            raise ChainComplexError(k)
    snfs = [smith_normal_form(m) for m in matrices]
    ranks = [0] + [s.rank for s in snfs] + [0]
    betti = tuple(dims[k] - ranks[k] - ranks[k + 1] for k in range(len(dims)))
    torsion = tuple(snfs[k].torsion if k < len(snfs) else () for k in range(len(dims)))
    return HomologyResult(betti, torsion)
