"""Explicit gradient vector fields on matching complexes of complete graphs.

The vertex set of ``K_n`` is split into levels ``V_1, V_2, ...`` of three
vertices each (the last level may hold one or two). ``M`` is built by
sweeping the full levels in order; at level ``i`` a matching still unpaired
is matched with a levelled edge of ``V_i`` when it covers exactly one vertex
of ``V_i`` or none. ``M_circ`` and ``M_star`` extend ``M`` on even ``n`` and
``n = 1 (mod 3)`` respectively; ``M_double_star`` cancels two more critical
pairs on ``M_7``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .complex import (
    Cell,
    MatchingComplex,
    build_complete_graph,
    build_matching_complex,
    vertex_coords,
    vertex_from_coords,
)
from .morse import (
    DiscreteVectorField,
    Pair,
    cancel_critical_pairs,
    check_acyclic,
    critical_simplices,
    validate_field,
)

FIELD_KINDS = ("M", "M_circ", "M_star", "M_double_star")


class ConstructionError(RuntimeError):
    """A built field failed validation; indicates a bug, not bad input."""


@dataclass(frozen=True)
class LevelPartition:
    n: int
    levels: tuple[tuple[int, ...], ...]

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(v) for v in self.levels)

    @property
    def full_levels(self) -> int:
        return self.n // 3

    def level_of(self, v: int) -> int:
        return vertex_coords(v)[0]


def build_level_partition(n: int) -> LevelPartition:
    if n < 5:
        raise ValueError(f"the level construction needs n >= 5, got {n}")
    levels = tuple(tuple(range(s, min(s + 3, n))) for s in range(0, n, 3))
    return LevelPartition(n, levels)


def connectivity_bound(n: int) -> int:
    """``floor((n + 1) / 3) - 1``."""
    if n < 1:
        raise ValueError("n must be positive")
    return (n + 1) // 3 - 1


@dataclass
class FieldBuildTrace:
    """Pairs added level by level. ``None`` stands for the empty matching.

    ``single[i]`` / ``empty[i]`` hold the pairs of level ``i + 1`` whose lower
    cell covers exactly one / no vertex of that level; ``unpaired[k - 1]`` is
    the set of cells left unpaired after level ``k``.
    """

    single: list[list[tuple[Optional[Cell], Cell]]] = field(default_factory=list)
    empty: list[list[tuple[Optional[Cell], Cell]]] = field(default_factory=list)
    unpaired: list[frozenset[Cell]] = field(default_factory=list)
    last: list[Pair] | None = None


def _complete_complex(n: int, complex_: MatchingComplex | None) -> MatchingComplex:
    if complex_ is None:
        return build_matching_complex(build_complete_graph(n))
    g = complex_.graph
    if g.n_vertices != n or not g.is_complete:
        raise ValueError(f"expected the matching complex of K_{n}")
    return complex_


def build_field_M(
    n: int, complex_: MatchingComplex | None = None, *, reverse: bool = False
) -> tuple[DiscreteVectorField, FieldBuildTrace]:
    """The level-sweep gradient field on ``M_n`` together with its build trace.

    ``reverse`` only changes the iteration order (used to check that the
    result does not depend on it).
    """
    partition = build_level_partition(n)
    cx = _complete_complex(n, complex_)
    edge_id = {e: i for i, e in enumerate(cx.graph.edges)}
    cells = [(k, i) for k in range(cx.dim + 1) for i in range(cx.count(k))]
    if reverse:
        cells.reverse()

    used: set[Cell] = set()
    empty_used = False
    pairs: list[Pair] = []
    trace = FieldBuildTrace()

    def extend(cell: Optional[Cell], u: int, v: int) -> Cell:
        base = cx.simplex(cell) if cell is not None else ()
        return cx.index(base + (edge_id[(u, v)],))

    for lvl in partition.levels[: partition.full_levels]:
        a, b, c = lvl
        level_mask = (1 << a) | (1 << b) | (1 << c)
        single, empty = [], []
        candidates: list[Optional[Cell]] = [None] if not empty_used else []
        candidates += [x for x in cells if x not in used]
        for alpha in candidates:
            cov = cx.mask(alpha) & level_mask if alpha is not None else 0
            if cov == 0:
                empty.append((alpha, extend(alpha, b, c)))
            elif cov & (cov - 1) == 0:
                rest = [x for x in lvl if not cov >> x & 1]
                single.append((alpha, extend(alpha, *rest)))
        new = single + empty
        touched = [x for p in new for x in p if x is not None]
        if len(set(touched)) != len(touched) or used.intersection(touched):
            raise ConstructionError(f"level {vertex_coords(a)[0]} pairs collide")
        used.update(touched)
        empty_used = True
        pairs.extend((x, y) for x, y in new if x is not None)
        trace.single.append(sorted(single, key=_pair_key))
        trace.empty.append(sorted(empty, key=_pair_key))
        trace.unpaired.append(frozenset(x for x in cells if x not in used))

    if n % 3 == 2:
        a, b = partition.levels[-1]
        level_mask = (1 << a) | (1 << b)
        last = []
        for alpha in cells:
            if alpha not in used and not cx.mask(alpha) & level_mask:
                last.append((alpha, extend(alpha, a, b)))
        touched = [x for p in last for x in p]
        if len(set(touched)) != len(touched) or used.intersection(touched):
            raise ConstructionError("last-level pairs collide")
        used.update(touched)
        pairs.extend(last)
        trace.last = sorted(last)

    field_ = DiscreteVectorField(cx, pairs)
    _verify(field_, "M")
    return field_, trace


def _pair_key(p):
    a, b = p
    return ((-1, -1) if a is None else a, b)


def _verify(field_: DiscreteVectorField, name: str) -> None:
    problem = validate_field(field_)
    if problem is not None:
        raise ConstructionError(f"{name} is not a discrete vector field: {problem}")
    loop = check_acyclic(field_)
    if loop is not None:
        raise ConstructionError(f"{name} has a closed path: {loop}")


def extend_to_M_circ(field_M: DiscreteVectorField) -> DiscreteVectorField:
    """Pair every critical top cell (a perfect matching) with the facet that
    drops the edge at the first vertex of the last level."""
    cx = field_M.complex
    n = cx.graph.n_vertices
    if n % 2 or n < 6:
        raise ValueError(f"M_circ needs an even n >= 6, got {n}")
    v_last = vertex_from_coords(-(-n // 3), 1)
    top = cx.dim
    new = []
    for t in critical_simplices(field_M).cells[top]:
        cell = (top, t)
        simplex = cx.simplex(cell)
        e = next(e for e in simplex if v_last in cx.graph.edges[e])
        face = cx.index(tuple(x for x in simplex if x != e))
        if not field_M.is_critical(face):
            raise ConstructionError(f"facet {face} of critical {cell} is already paired")
        new.append((face, cell))
    out = field_M.replace(add=new)
    _verify(out, "M_circ")
    return out


def extend_to_M_star(field_M: DiscreteVectorField) -> DiscreteVectorField:
    """Pair each critical 1-cell made of two V_1-V_2 cross-edges with the
    2-cell obtained by joining its free V_1 vertex to the last vertex."""
    cx = field_M.complex
    n = cx.graph.n_vertices
    if n % 3 != 1 or n < 7:
        raise ValueError(f"M_star needs n = 1 (mod 3) with n >= 7, got {n}")
    v_last = vertex_from_coords(n // 3 + 1, 1)
    edge_id = {e: i for i, e in enumerate(cx.graph.edges)}
    v1 = set(range(3))
    new = []
    report = critical_simplices(field_M)
    if len(report.cells) > 2:
        for i in report.cells[1]:
            cell = (1, i)
            edges = [cx.graph.edges[e] for e in cx.simplex(cell)]
            if not all(vertex_coords(u)[0] == 1 and vertex_coords(v)[0] == 2 for u, v in edges):
                continue
            (free,) = v1 - {u for u, _ in edges}
            beta = cx.index(cx.simplex(cell) + (edge_id[(free, v_last)],))
            if not field_M.is_critical(beta):
                raise ConstructionError(f"{beta} is already paired")
            new.append((cell, beta))
    out = field_M.replace(add=new)
    _verify(out, "M_star")
    return out


# Named cells of M_7, as (level, slot) endpoint pairs.
M7_CELLS: dict[str, tuple[tuple[tuple[int, int], tuple[int, int]], ...]] = {
    "xi": (((1, 2), (1, 3)),),
    "sigma1": (((1, 1), (1, 2)), ((2, 1), (2, 2))),
    "sigma2": (((1, 1), (1, 2)), ((2, 1), (2, 3))),
    "sigma3": (((1, 1), (1, 3)), ((2, 1), (2, 2))),
    "sigma4": (((1, 1), (1, 3)), ((2, 1), (2, 3))),
    "eta1": (((1, 2), (2, 2)), ((1, 3), (2, 3)), ((2, 1), (3, 1))),
    "eta2": (((1, 1), (2, 2)), ((1, 2), (2, 1)), ((2, 3), (3, 1))),
    "eta3": (((1, 1), (2, 3)), ((1, 2), (2, 2)), ((1, 3), (2, 1))),
    "psi13": (((1, 2), (2, 2)), ((1, 3), (2, 3))),
}

DISPLAY_NAMES = {
    "xi": "ξ", "sigma1": "σ1", "sigma2": "σ2", "sigma3": "σ3", "sigma4": "σ4",
    "eta1": "η1", "eta2": "η2", "eta3": "η3", "psi13": "ψ13",
}


def cell_from_coords(cx: MatchingComplex, edges) -> Cell:
    """Cell of the matching whose edges are given as ((i, j), (i', j')) pairs."""
    ids = []
    for p, q in edges:
        u, v = sorted((vertex_from_coords(*p), vertex_from_coords(*q)))
        ids.append(cx.graph.edge_id(u, v))
    return cx.index(ids)


def m7_named_cells(cx: MatchingComplex) -> dict[str, Cell]:
    if cx.graph.n_vertices != 7 or not cx.graph.is_complete:
        raise ValueError("named cells only exist on M_7")
    return {name: cell_from_coords(cx, edges) for name, edges in M7_CELLS.items()}


def build_M7_fields() -> dict[str, DiscreteVectorField]:
    """``M``, ``M_star`` and ``M_double_star`` on a shared ``M_7``."""
    field_M, _ = build_field_M(7)
    star = extend_to_M_star(field_M)
    names = m7_named_cells(star.complex)
    double = cancel_critical_pairs(star, [(names["eta1"], names["sigma4"]), (names["eta2"], names["sigma3"])])
    return {"M": field_M, "M_star": star, "M_double_star": double}


def build_field_M_double_star() -> DiscreteVectorField:
    return build_M7_fields()["M_double_star"]


def check_kind(kind: str, n: int) -> None:
    """Raise ValueError if construction ``kind`` is not defined for ``n``."""
    if kind not in FIELD_KINDS:
        raise ValueError(f"unknown field kind {kind!r}; choose from {', '.join(FIELD_KINDS)}")
    if n < 5:
        raise ValueError(f"{kind} needs n >= 5")
    if kind == "M_circ" and (n % 2 or n < 6):
        raise ValueError(f"M_circ needs an even n >= 6, got {n}")
    if kind == "M_star" and (n % 3 != 1 or n < 7):
        raise ValueError(f"M_star needs n = 1 (mod 3) with n >= 7, got {n}")
    if kind == "M_double_star" and n != 7:
        raise ValueError(f"M_double_star is only defined on M_7, got n={n}")


def build_field(kind: str, n: int, complex_: MatchingComplex | None = None) -> DiscreteVectorField:
    check_kind(kind, n)
    if kind == "M_double_star":
        return build_field_M_double_star()
    field_M, _ = build_field_M(n, complex_)
    if kind == "M_circ":
        return extend_to_M_circ(field_M)
    if kind == "M_star":
        return extend_to_M_star(field_M)
    return field_M


def applicable_kinds(n: int) -> list[str]:
    out = []
    for kind in FIELD_KINDS:
        try:
            check_kind(kind, n)
        except ValueError:
            continue
        out.append(kind)
    return out
