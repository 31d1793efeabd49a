"""Discrete vector fields, gradient paths and the Morse chain complex."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .complex import Cell, Graph, MatchingComplex, boundary_matrix_csv
from .homology import HomologyResult, homology_of_chain_complex

Pair = tuple[Cell, Cell]


class DiscreteVectorField:
    """A set of pairs ``(alpha, beta)`` of cells of a matching complex.

    Pairs are stored as given (sorted) so that :func:`validate_field` can
    report malformed input; the lookup maps ``up``/``down`` assume validity.
    """

    def __init__(self, complex_: MatchingComplex, pairs: Iterable[Pair]):
        self.complex = complex_
        self.pairs: tuple[Pair, ...] = tuple(sorted((tuple(a), tuple(b)) for a, b in pairs))
        self.up: dict[Cell, Cell] = {a: b for a, b in self.pairs}
        self.down: dict[Cell, Cell] = {b: a for a, b in self.pairs}

    def __len__(self) -> int:
        return len(self.pairs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DiscreteVectorField)
            and other.complex is self.complex
            and other.pairs == self.pairs
        )

    def __hash__(self):
        return hash(self.pairs)

    def is_paired(self, cell: Cell) -> bool:
        return cell in self.up or cell in self.down

    def is_critical(self, cell: Cell) -> bool:
        return not self.is_paired(cell)

    def replace(self, remove: Iterable[Pair] = (), add: Iterable[Pair] = ()) -> "DiscreteVectorField":
        remove = set(remove)
        kept = [p for p in self.pairs if p not in remove]
        return DiscreteVectorField(self.complex, kept + list(add))

    def to_json(self, construction: str | None = None, n: int | None = None) -> dict:
        data = {
            "complex": self.complex.graph.to_json(),
            "pairs": [[a[0], a[1], b[1]] for a, b in self.pairs],
        }
        if construction is not None:
            data["construction"] = construction
            data["n"] = n if n is not None else self.complex.graph.n_vertices
        return data

    def to_json_text(self, construction: str | None = None, n: int | None = None) -> str:
        return json.dumps(self.to_json(construction, n), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict, complex_: MatchingComplex | None = None) -> "DiscreteVectorField":
        if complex_ is None:
            complex_ = MatchingComplex(Graph.from_json(data["complex"]))
        pairs = [((d, s), (d + 1, t)) for d, s, t in data["pairs"]]
        return cls(complex_, pairs)


@dataclass(frozen=True)
class FieldViolation:
    kind: str  # "missing-cell", "dimension-gap", "non-face", "doubly-matched"
    pair: Pair
    detail: str


def validate_field(field_: DiscreteVectorField) -> FieldViolation | None:
    """First violation of the discrete-vector-field axioms, or None."""
    cx = field_.complex
    seen: dict[Cell, Pair] = {}
    for a, b in field_.pairs:
        for c in (a, b):
            k, i = c
            if not (0 <= k <= cx.dim and 0 <= i < cx.count(k)):
                return FieldViolation("missing-cell", (a, b), f"{c} is not a cell")
        if b[0] != a[0] + 1:
            return FieldViolation("dimension-gap", (a, b), f"dimensions {a[0]} and {b[0]}")
        if not set(cx.simplex(a)) < set(cx.simplex(b)):
            return FieldViolation("non-face", (a, b), f"{a} is not a face of {b}")
        for c in (a, b):
            if c in seen:
                return FieldViolation("doubly-matched", (a, b), f"{c} already in pair {seen[c]}")
            seen[c] = (a, b)
    return None


def _successors(field_: DiscreteVectorField, alpha: Cell) -> list[tuple[Cell, Cell, int, int]]:
    """``(beta, alpha', <beta, alpha>, <beta, alpha'>)`` for each step of a
    gradient path leaving ``alpha``; empty unless alpha is paired upward."""
    return _steps(field_.complex, field_.up, alpha)


def _steps(cx: MatchingComplex, up: dict[Cell, Cell], alpha: Cell) -> list[tuple[Cell, Cell, int, int]]:
    beta = up.get(alpha)
    if beta is None:
        return []
    faces = cx.facets(beta)
    own = next(s for f, s in faces if f == alpha)
    return [(beta, f, own, s) for f, s in faces if f != alpha]


def check_acyclic(field_: DiscreteVectorField) -> tuple[Cell, ...] | None:
    """None if the field has no nontrivial closed path, else one such path
    ``alpha_0, beta_0, alpha_1, ..., alpha_0``."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color: dict[Cell, int] = {}
    for root in sorted(field_.up):
        if color.get(root, WHITE) != WHITE:
            continue
        color[root] = GRAY
        stack = [(root, iter(_successors(field_, root)))]
        while stack:
            node, it = stack[-1]
            step = next(it, None)
            if step is None:
                color[node] = BLACK
                stack.pop()
                continue
            _, nxt, _, _ = step
            if nxt not in field_.up:
                continue
            c = color.get(nxt, WHITE)
            if c == GRAY:
                trail = [n for n, _ in stack]
                loop = trail[trail.index(nxt):] + [nxt]
                path: list[Cell] = []
                for x in loop[:-1]:
                    path += [x, field_.up[x]]
                return tuple(path + [nxt])
            if c == WHITE:
                color[nxt] = GRAY
                stack.append((nxt, iter(_successors(field_, nxt))))
    return None


def is_gradient(field_: DiscreteVectorField) -> bool:
    return validate_field(field_) is None and check_acyclic(field_) is None


@dataclass(frozen=True)
class CriticalReport:
    cells: tuple[tuple[int, ...], ...]  # per dimension, sorted indices

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.cells)

    def in_dim(self, k: int) -> tuple[Cell, ...]:
        return tuple((k, i) for i in self.cells[k]) if k < len(self.cells) else ()

    def __contains__(self, cell: Cell) -> bool:
        k, i = cell
        return k < len(self.cells) and i in self.cells[k]

    def format(self) -> str:
        return "critical: " + " ".join(f"dim{k}={m}" for k, m in enumerate(self.counts) if m)


def critical_simplices(field_: DiscreteVectorField) -> CriticalReport:
    cx = field_.complex
    return CriticalReport(tuple(
        tuple(i for i in range(cx.count(k)) if not field_.is_paired((k, i)))
        for k in range(cx.dim + 1)
    ))


@dataclass(frozen=True)
class GradientPath:
    cells: tuple[Cell, ...]
    multiplicity: int

    @property
    def source(self) -> Cell:
        return self.cells[0]

    @property
    def target(self) -> Cell:
        return self.cells[-1]

    @property
    def length(self) -> int:
        """Number of pairs used."""
        return (len(self.cells) - 1) // 2


def path_multiplicity(complex_: MatchingComplex, cells: Sequence[Cell]) -> int:
    """Signed multiplicity of a gradient path: the product over its pairs of
    ``-<beta_i, alpha_i> <beta_i, alpha_{i+1}>``."""
    cells = [tuple(c) for c in cells]
    if len(cells) % 2 != 1:
        raise ValueError("a gradient path has an odd number of cells")
    d = cells[0][0]
    m = 1
    for i in range(0, len(cells) - 1, 2):
        a, b, a2 = cells[i], cells[i + 1], cells[i + 2]
        if a[0] != d or a2[0] != d or b[0] != d + 1:
            raise ValueError(f"dimensions along the path must alternate {d}, {d + 1}")
        if a == a2:
            raise ValueError("consecutive lower cells must differ")
        inc = dict(complex_.facets(b))
        if a not in inc or a2 not in inc:
            raise ValueError(f"{a} or {a2} is not a facet of {b}")
        m *= -inc[a] * inc[a2]
    return m


def _enumerate(field_: DiscreteVectorField, source: Cell, accept) -> list[tuple[Cell, ...]]:
    """All gradient paths from ``source`` whose final cell satisfies ``accept``.

    Memoized per cell; terminates because the field is acyclic.
    """
    memo: dict[Cell, list[tuple[Cell, ...]]] = {}
    stack = [source]
    while stack:
        a = stack[-1]
        if a in memo:
            stack.pop()
            continue
        succ = _successors(field_, a)
        pending = [nxt for _, nxt, _, _ in succ if nxt not in memo]
        if pending:
            stack.extend(pending)
            continue
        out = [(a,)] if accept(a) else []
        for beta, nxt, _, _ in succ:
            out.extend((a, beta) + tail for tail in memo[nxt])
        memo[a] = out
        stack.pop()
    return sorted(memo[source])


def paths_between(field_: DiscreteVectorField, source: Cell, target: Cell) -> list[GradientPath]:
    """Every gradient path from ``source`` to ``target`` (trivial path included
    when they coincide), in lexicographic order of the visited cells."""
    if source[0] != target[0]:
        raise ValueError("source and target must have the same dimension")
    cx = field_.complex
    return [GradientPath(p, path_multiplicity(cx, p)) for p in _enumerate(field_, source, lambda c: c == target)]


def paths_from_critical_cofaces(field_: DiscreteVectorField, eta: Cell) -> list[tuple[Cell, GradientPath]]:
    """For each facet of ``eta``, all gradient paths from it to a critical cell."""
    if eta[0] < 1:
        raise ValueError("eta must have dimension >= 1")
    cx = field_.complex
    out = []
    for face, _ in sorted(cx.facets(eta)):
        for p in _enumerate(field_, face, field_.is_critical):
            out.append((face, GradientPath(p, path_multiplicity(cx, p))))
    return out


def morse_boundary_coefficient(field_: DiscreteVectorField, tau: Cell, sigma: Cell) -> int:
    """``sum over facets s of tau of <tau, s> * sum of m(path) over paths s -> sigma``."""
    if sigma[0] != tau[0] - 1:
        raise ValueError("sigma must have dimension dim(tau) - 1")
    total = 0
    for face, inc in field_.complex.facets(tau):
        total += inc * sum(p.multiplicity for p in paths_between(field_, face, sigma))
    return total


@dataclass(frozen=True, eq=False)
class MorseComplex:
    """Critical cells per dimension and the boundary matrices between them.

    ``boundaries[k - 1]`` is the ``m_{k-1} x m_k`` matrix of the Morse
    boundary in dimension ``k``.
    """

    critical: tuple[tuple[int, ...], ...]
    boundaries: tuple[np.ndarray, ...]

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(c) for c in self.critical)

    def boundary(self, k: int) -> np.ndarray:
        return self.boundaries[k - 1]

    def homology(self) -> HomologyResult:
        return homology_of_chain_complex(list(self.boundaries), list(self.counts))

    def is_chain_complex(self) -> bool:
        for a, b in zip(self.boundaries, self.boundaries[1:]):
            if a.size and b.size and np.any(a.astype(object) @ b.astype(object)):
                return False
        return True


def _flow(field_: DiscreteVectorField, d: int, crit_pos: dict[int, int]) -> dict[int, dict[int, int]]:
    """For every d-cell, the signed path counts to each critical d-cell.

    ``flow[a][j]`` is the sum of multiplicities of all gradient paths from
    ``(d, a)`` to the j-th critical d-cell.
    """
    cx = field_.complex
    memo: dict[int, dict[int, int]] = {}
    up = field_.up
    table = cx.facet_table(d + 1) if d + 1 <= cx.dim else None

    def succ(a: int):
        beta = up.get((d, a))
        if beta is None:
            return None, []
        row = table[beta[1]].tolist()
        own = row.index(a)
        s_own = -1 if own % 2 else 1
        # multiplicity factor of a step a -> beta -> f is -<beta,a><beta,f>
        return beta, [(f, -s_own * (-1 if j % 2 else 1)) for j, f in enumerate(row) if f != a]

    for start in range(cx.count(d)):
        if start in memo:
            continue
        stack = [start]
        while stack:
            a = stack[-1]
            if a in memo:
                stack.pop()
                continue
            if a in crit_pos:
                memo[a] = {crit_pos[a]: 1}
                stack.pop()
                continue
            _, steps = succ(a)
            pending = [f for f, _ in steps if f not in memo]
            if pending:
                stack.extend(pending)
                continue
            acc: dict[int, int] = {}
            for f, w in steps:
                for j, v in memo[f].items():
                    acc[j] = acc.get(j, 0) + w * v
            memo[a] = {j: v for j, v in acc.items() if v}
            stack.pop()
    return memo


def build_morse_complex(field_: DiscreteVectorField) -> MorseComplex:
    cx = field_.complex
    report = critical_simplices(field_)
    mats = []
    for k in range(1, cx.dim + 1):
        lower = report.cells[k - 1]
        upper = report.cells[k]
        pos = {a: j for j, a in enumerate(lower)}
        mat = np.zeros((len(lower), len(upper)), dtype=np.int64)
        if lower and upper:
            flow = _flow(field_, k - 1, pos)
            table = cx.facet_table(k)
            for col, t in enumerate(upper):
                for j, f in enumerate(table[t].tolist()):
                    s = -1 if j % 2 else 1
                    for row, v in flow[f].items():
                        mat[row, col] += s * v
        mats.append(mat)
    return MorseComplex(report.cells, tuple(mats))


def morse_homology(field_: DiscreteVectorField) -> HomologyResult:
    return build_morse_complex(field_).homology()


def sign_scheme_boundary(field_: DiscreteVectorField, eta: Cell) -> dict[Cell, int]:
    """Boundary of a critical cell by counting signs along each path.

    Every path ``eta -> alpha_0 -> beta_0 -> ... -> sigma`` contributes
    ``(-1)**(r + s)``, where ``r`` counts the ``-1`` incidences on its arrows
    (the first arrow out of ``eta`` included) and ``s`` counts its ``beta`` cells.
    """
    cx = field_.complex
    out: dict[Cell, int] = {}
    for face, path in paths_from_critical_cofaces(field_, eta):
        labels = [dict(cx.facets(eta))[face]]
        cells = path.cells
        for i in range(0, len(cells) - 1, 2):
            inc = dict(cx.facets(cells[i + 1]))
            labels += [inc[cells[i]], inc[cells[i + 2]]]
        r = labels.count(-1)
        s = path.length
        out[path.target] = out.get(path.target, 0) + (-1) ** (r + s)
    return {c: v for c, v in sorted(out.items()) if v}


class CancellationError(ValueError):
    pass


class NotCriticalError(CancellationError):
    pass


class PathCountError(CancellationError):
    def __init__(self, request: Pair, path_count: int):
        super().__init__(f"{path_count} paths from the facets of {request[0]} to {request[1]}; need exactly 1")
        self.request = request
        self.path_count = path_count


class PermutationConditionError(CancellationError):
    def __init__(self, permutation: tuple[int, ...]):
        super().__init__(f"paths exist along the non-identity permutation {permutation}")
        self.permutation = permutation


def _paths_to(field_: DiscreteVectorField, beta: Cell, alpha: Cell) -> list[GradientPath]:
    out = []
    for face, _ in field_.complex.facets(beta):
        out.extend(paths_between(field_, face, alpha))
    return out


def _permutation_witness(exists: list[list[bool]]) -> tuple[int, ...] | None:
    """A non-identity permutation ``pi`` with ``exists[i][pi[i]]`` for all i.

    With the diagonal all true, such a permutation exists iff the digraph
    ``i -> j`` (i != j, exists[i][j]) has a cycle; the cycle plus fixed points
    is the witness.
    """
    r = len(exists)
    for start in range(r):
        # DFS for a cycle through start
        stack = [(start, [start])]
        seen = set()
        while stack:
            node, trail = stack.pop()
            for j in range(r):
                if j == node or not exists[node][j]:
                    continue
                if j == start:
                    pi = list(range(r))
                    for a, b in zip(trail, trail[1:] + [start]):
                        pi[a] = b
                    return tuple(pi)
                if j not in seen and j > start:
                    seen.add(j)
                    stack.append((j, trail + [j]))
    return None


def cancel_critical_pairs(field_: DiscreteVectorField, requests: Sequence[Pair]) -> DiscreteVectorField:
    """Cancel critical pairs ``(beta, alpha)`` by reversing the unique
    gradient path from a facet of ``beta`` to ``alpha``.

    Several requests are reversed simultaneously, which requires that no
    non-identity permutation of the targets is reachable.

    Raises:
        NotCriticalError: a requested cell is not critical, repeated, or has the wrong dimension.
        PathCountError: the number of paths for a request is not exactly one.
        PermutationConditionError: the simultaneous-cancellation condition fails.
    """
    requests = [(tuple(b), tuple(a)) for b, a in requests]
    if not requests:
        return field_
    used = set()
    for beta, alpha in requests:
        if beta[0] != alpha[0] + 1:
            raise NotCriticalError(f"dim {beta} must be dim {alpha} + 1")
        for c in (beta, alpha):
            if not field_.is_critical(c):
                raise NotCriticalError(f"{c} is not critical")
            if c in used:
                raise NotCriticalError(f"{c} appears in two requests")
            used.add(c)
    chosen = []
    for req in requests:
        paths = _paths_to(field_, *req)
        if len(paths) != 1:
            raise PathCountError(req, len(paths))
        chosen.append(paths[0])
    if len(requests) > 1:
        exists = [
            [i == j or (requests[i][0][0] == requests[j][0][0] and bool(_paths_to(field_, requests[i][0], requests[j][1])))
             for j in range(len(requests))]
            for i in range(len(requests))
        ]
        witness = _permutation_witness(exists)
        if witness is not None:
            raise PermutationConditionError(witness)
    remove, add = [], []
    for (beta, _), path in zip(requests, chosen):
        cells = path.cells
        for i in range(0, len(cells) - 1, 2):
            remove.append((cells[i], cells[i + 1]))
            add.append((cells[i + 2], cells[i + 1]))
        add.append((cells[0], beta))
    out = field_.replace(remove, add)
    problem = validate_field(out)
    if problem is not None:
        raise CancellationError(f"reversal produced an invalid field: {problem}")
    loop = check_acyclic(out)
    if loop is not None:
        raise CancellationError(f"reversal produced a closed path: {loop}")
    return out


@dataclass(frozen=True)
class MorseInequalityViolation:
    kind: str  # "weak", "euler", "strong"
    index: int
    detail: str


def verify_morse_inequalities(counts: Sequence[int], betti: Sequence[int] | HomologyResult) -> MorseInequalityViolation | None:
    if isinstance(betti, HomologyResult):
        betti = betti.betti
    n = max(len(counts), len(betti))
    m = list(counts) + [0] * (n - len(counts))
    b = list(betti) + [0] * (n - len(betti))
    for i in range(n):
        if m[i] < b[i]:
            return MorseInequalityViolation("weak", i, f"m_{i}={m[i]} < b_{i}={b[i]}")
    for i in range(n):
        sm = sum((-1) ** (i - j) * m[j] for j in range(i + 1))
        sb = sum((-1) ** (i - j) * b[j] for j in range(i + 1))
        if sm < sb:
            return MorseInequalityViolation("strong", i, f"alternating sums {sm} < {sb}")
    em = sum((-1) ** i * x for i, x in enumerate(m))
    eb = sum((-1) ** i * x for i, x in enumerate(b))
    if em != eb:
        return MorseInequalityViolation("euler", n - 1, f"{em} != {eb}")
    return None


def random_gradient_field(complex_: MatchingComplex, rng: random.Random) -> DiscreteVectorField:
    """Greedy random gradient field: candidate pairs in shuffled order, each
    kept only if both cells are free and no closed path appears."""
    candidates = [(f, (k, b))
                  for k in range(1, complex_.dim + 1)
                  for b in range(complex_.count(k))
                  for f, _ in complex_.facets((k, b))]
    rng.shuffle(candidates)
    up: dict[Cell, Cell] = {}
    used: set[Cell] = set()
    for a, b in candidates:
        if a in used or b in used:
            continue
        up[a] = b
        if _returns_to(complex_, up, a):
            del up[a]
            continue
        used.update((a, b))
    return DiscreteVectorField(complex_, up.items())


def _returns_to(cx: MatchingComplex, up: dict[Cell, Cell], alpha: Cell) -> bool:
    """True if some nontrivial gradient path comes back to ``alpha``."""
    seen = set()
    stack = [nxt for _, nxt, _, _ in _steps(cx, up, alpha)]
    while stack:
        c = stack.pop()
        if c == alpha:
            return True
        if c in seen or c not in up:
            continue
        seen.add(c)
        stack.extend(nxt for _, nxt, _, _ in _steps(cx, up, c))
    return False


def morse_boundary_csv(field_: DiscreteVectorField, morse: MorseComplex, k: int, names: dict[Cell, str] | None = None) -> str:
    cx = field_.complex
    names = names or {}

    def label(c: Cell) -> str:
        return names.get(c) or cx.format_simplex(c)

    rows = [label((k - 1, i)) for i in morse.critical[k - 1]]
    cols = [label((k, i)) for i in morse.critical[k]]
    return boundary_matrix_csv(morse.boundary(k), rows, cols)


def paths_to_dot(field_: DiscreteVectorField, eta: Cell, names: dict[Cell, str] | None = None) -> str:
    """DOT digraph of all gradient paths from the facets of ``eta`` to
    critical cells. Pair arcs are bold; face arcs carry incidence numbers."""
    cx = field_.complex
    names = names or {}
    fams = paths_from_critical_cofaces(field_, eta)
    nodes: dict[Cell, None] = {eta: None}
    arcs: dict[tuple[Cell, Cell], str] = {}
    inc_eta = dict(cx.facets(eta))
    for face, path in fams:
        arcs[(eta, face)] = f'label="{inc_eta[face]:+d}"'
        cells = path.cells
        for c in cells:
            nodes[c] = None
        for i in range(0, len(cells) - 1, 2):
            a, b, a2 = cells[i], cells[i + 1], cells[i + 2]
            inc = dict(cx.facets(b))
            arcs[(a, b)] = f'label="{inc[a]:+d}", style=bold, arrowhead=tee'
            arcs[(b, a2)] = f'label="{inc[a2]:+d}"'

    def node_id(c: Cell) -> str:
        return f"c{c[0]}_{c[1]}"

    lines = [f'digraph "{names.get(eta, node_id(eta))}" {{', "  rankdir=LR;"]
    for c in nodes:
        text = cx.format_simplex(c)
        if c in names:
            text = f"{names[c]}: {text}"
        shape = "doublecircle" if field_.is_critical(c) else "box"
        lines.append(f'  {node_id(c)} [label="{text}", shape={shape}];')
    for (a, b), attrs in arcs.items():
        lines.append(f"  {node_id(a)} -> {node_id(b)} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
