"""Graphs, matchings and matching complexes.

Vertices of ``K_n`` are identified with ``0..n-1`` and carry a level
coordinate: vertex ``v`` sits at level ``v // 3 + 1`` and slot ``v % 3 + 1``,
so the flattening order is level-major, slot-minor. Edges are ranked by the
4-tuple ``(i1, j1, i2, j2)`` of their endpoint coordinates, which for this
flattening is the same as the lexicographic order on ``(u, v)`` with
``u < v``.

A k-simplex of a matching complex is a sorted tuple of ``k + 1`` edge ids.
The sorted order doubles as the orientation of the simplex.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from itertools import combinations
from math import comb, factorial
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

Simplex = tuple[int, ...]
Cell = tuple[int, int]  # (dimension, index within dimension)


def vertex_coords(v: int) -> tuple[int, int]:
    """(level, slot) of vertex ``v``, both 1-based."""
    return v // 3 + 1, v % 3 + 1


def vertex_from_coords(level: int, slot: int) -> int:
    return 3 * (level - 1) + (slot - 1)


def edge_label(u: int, v: int) -> tuple[int, int, int, int]:
    """Canonical label ``(i1, j1, i2, j2)`` of the edge ``uv``."""
    if u > v:
        u, v = v, u
    return vertex_coords(u) + vertex_coords(v)


@dataclass(frozen=True)
class Graph:
    """A simple undirected graph on ``0..n_vertices-1``.

    ``edges`` is kept sorted in the canonical edge order; the position of an
    edge in that tuple is its edge id.
    """

    n_vertices: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if self.n_vertices < 1:
            raise ValueError("a graph needs at least one vertex")
        normalized = []
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge ({u}, {v}) out of range")
            normalized.append((min(u, v), max(u, v)))
        normalized.sort(key=lambda e: edge_label(*e))
        if len(set(normalized)) != len(normalized):
            raise ValueError("duplicate edge")
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def is_complete(self) -> bool:
        return len(self.edges) == comb(self.n_vertices, 2)

    def edge_id(self, u: int, v: int) -> int:
        return self.edges.index((min(u, v), max(u, v)))

    def to_json(self) -> dict:
        return {"n": self.n_vertices, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> "Graph":
        return cls(int(data["n"]), tuple((int(u), int(v)) for u, v in data["edges"]))


def build_complete_graph(n: int) -> Graph:
    """The complete graph ``K_n`` with its edges in canonical order."""
    if n < 1:
        raise ValueError(f"K_n needs n >= 1, got {n}")
    return Graph(n, tuple(combinations(range(n), 2)))


def is_levelled_edge(u: int, v: int) -> bool:
    return u // 3 == v // 3


class MatchingComplex:
    """All matchings of a graph, graded by dimension.

    ``simplices[k]`` is the lexicographically sorted list of k-simplices
    (matchings with ``k + 1`` edges). The empty matching is not stored.
    Facet and coface tables are built lazily and cached.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self._edge_masks = [(1 << u) | (1 << v) for u, v in graph.edges]
        self.simplices: list[list[Simplex]] = []
        self.masks: list[list[int]] = []
        layer = [((e,), m) for e, m in enumerate(self._edge_masks)]
        n_edges = len(self._edge_masks)
        while layer:
            self.simplices.append([s for s, _ in layer])
            self.masks.append([m for _, m in layer])
            nxt = []
            for s, m in layer:
                for e in range(s[-1] + 1, n_edges):
                    em = self._edge_masks[e]
                    if not m & em:
                        nxt.append((s + (e,), m | em))
            layer = nxt
        self._index = [{s: i for i, s in enumerate(layer)} for layer in self.simplices]
        self._facets: dict[int, np.ndarray] = {}
        self._cofaces: dict[int, list[list[int]]] = {}

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def __len__(self) -> int:
        return sum(len(s) for s in self.simplices)

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k <= self.dim else 0

    def index(self, simplex: Iterable[int]) -> Cell:
        """Cell id of a simplex given by its edge ids (any order)."""
        s = tuple(sorted(simplex))
        k = len(s) - 1
        if k < 0 or k > self.dim or s not in self._index[k]:
            raise KeyError(f"{s} is not a simplex of this complex")
        return k, self._index[k][s]

    def find(self, simplex: Iterable[int]) -> Cell | None:
        try:
            return self.index(simplex)
        except KeyError:
            return None

    def simplex(self, cell: Cell) -> Simplex:
        k, i = cell
        return self.simplices[k][i]

    def mask(self, cell: Cell) -> int:
        """Bitmask of the vertices covered by the matching."""
        k, i = cell
        return self.masks[k][i]

    def edge_mask(self, e: int) -> int:
        return self._edge_masks[e]

    def facet_table(self, k: int) -> np.ndarray:
        """Array of shape ``(f_k, k + 1)``; row ``i`` lists the facet indices
        of the k-simplex ``i``, column ``j`` being the facet with edge ``j``
        deleted (incidence ``(-1)**j``)."""
        if not 1 <= k <= self.dim:
            raise ValueError(f"no facets in dimension {k}")
        if k not in self._facets:
            lower = self._index[k - 1]
            table = np.empty((len(self.simplices[k]), k + 1), dtype=np.int64)
            for i, s in enumerate(self.simplices[k]):
                for j in range(k + 1):
                    table[i, j] = lower[s[:j] + s[j + 1:]]
            table.flags.writeable = False
            self._facets[k] = table
        return self._facets[k]

    def facets(self, cell: Cell) -> list[tuple[Cell, int]]:
        """``[(facet cell, incidence number), ...]`` in deletion order."""
        k, i = cell
        if k == 0:
            return []
        row = self.facet_table(k)[i]
        return [((k - 1, int(f)), -1 if j % 2 else 1) for j, f in enumerate(row)]

    def cofaces(self, cell: Cell) -> list[Cell]:
        k, i = cell
        if k >= self.dim:
            return []
        if k not in self._cofaces:
            up: list[list[int]] = [[] for _ in self.simplices[k]]
            for b, row in enumerate(self.facet_table(k + 1)):
                for f in row:
                    up[int(f)].append(b)
            self._cofaces[k] = up
        return [(k + 1, b) for b in self._cofaces[k][i]]

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "simplices": {str(k): [list(s) for s in layer] for k, layer in enumerate(self.simplices)},
        }

    def format_simplex(self, cell: Cell) -> str:
        """Edge list like ``v(1,2)-v(2,2) v(1,3)-v(2,3)``."""
        parts = []
        for e in self.simplex(cell):
            u, v = self.graph.edges[e]
            (a, b), (c, d) = vertex_coords(u), vertex_coords(v)
            parts.append(f"v({a},{b})-v({c},{d})")
        return " ".join(parts)


def build_matching_complex(graph: Graph) -> MatchingComplex:
    return MatchingComplex(graph)


def f_vector(complex_: MatchingComplex) -> tuple[int, ...]:
    return tuple(len(layer) for layer in complex_.simplices)


def f_vector_formula(n: int) -> tuple[int, ...]:
    """Closed-form f-vector of ``M_n``: ``f_i = n! / (2^(i+1) (i+1)! (n-2i-2)!)``."""
    out = []
    i = 0
    while n - 2 * i - 2 >= 0:
        out.append(factorial(n) // (2 ** (i + 1) * factorial(i + 1) * factorial(n - 2 * i - 2)))
        i += 1
    return tuple(out)


def euler_characteristic(complex_: MatchingComplex) -> int:
    return sum((-1) ** i * f for i, f in enumerate(f_vector(complex_)))


def incidence_number(beta: Sequence[int], alpha: Sequence[int]) -> int:
    """Incidence ``<beta, alpha>`` of oriented simplices given as edge-id
    sequences (sorted order is the orientation)."""
    beta = tuple(sorted(beta))
    alpha = tuple(sorted(alpha))
    if len(beta) != len(alpha) + 1:
        raise ValueError(
            f"incidence needs dim(beta) = dim(alpha) + 1, got {len(beta) - 1} and {len(alpha) - 1}"
        )
    for i in range(len(beta)):
        if beta[:i] + beta[i + 1:] == alpha:
            return -1 if i % 2 else 1
    return 0


def simplicial_boundary_matrix(complex_: MatchingComplex, k: int) -> sp.csc_matrix:
    """Sparse ``f_{k-1} x f_k`` matrix of the boundary map in dimension k."""
    if not 1 <= k:
        raise ValueError(f"boundary index must be >= 1, got {k}")
    if k > complex_.dim:
        if k == 1 and complex_.dim == 0:
            return sp.csc_matrix((complex_.count(0), 0), dtype=np.int64)
        raise ValueError(f"k={k} exceeds the complex dimension {complex_.dim}")
    table = complex_.facet_table(k)
    n_cols = table.shape[0]
    rows = table.ravel()
    cols = np.repeat(np.arange(n_cols), k + 1)
    signs = np.tile(np.array([(-1) ** j for j in range(k + 1)], dtype=np.int64), n_cols)
    return sp.csc_matrix((signs, (rows, cols)), shape=(complex_.count(k - 1), n_cols), dtype=np.int64)


def simplicial_chain_complex(complex_: MatchingComplex) -> tuple[list, list[int]]:
    """``([d_1, ..., d_dim], [f_0, ..., f_dim])`` ready for homology."""
    dims = list(f_vector(complex_))
    mats = [simplicial_boundary_matrix(complex_, k) for k in range(1, complex_.dim + 1)]
    return mats, dims


def boundary_matrix_csv(matrix, row_labels: Sequence[str], col_labels: Sequence[str]) -> str:
    """Dense CSV: header of column labels, then one labelled row per row."""
    dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(col_labels))
    for label, row in zip(row_labels, dense):
        writer.writerow([label] + [int(x) for x in row])
    return buf.getvalue()


def complex_to_json_text(complex_: MatchingComplex) -> str:
    return json.dumps(complex_.to_json(), sort_keys=True)
