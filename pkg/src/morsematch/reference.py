"""Published values for ``M_7`` used by the self-test and the CLI table check.

Each boundary-table row gives a critical 2-cell as three edges in (level,
slot) coordinates, and its Morse boundary as ``{sigma index: coefficient}``.
"""

from __future__ import annotations

_V = {f"{i}{j}": (i, j) for i in (1, 2, 3) for j in (1, 2, 3)}


def _row(edges: str, image: dict[int, int]):
    cells = tuple((_V[e[:2]], _V[e[3:]]) for e in edges.split())
    return cells, image


BOUNDARY_TABLE = (
    _row("11-21 12-22 13-23", {2: 1, 3: -1}),
    _row("11-22 12-23 21-31", {1: 1, 2: -1, 3: -1}),
    _row("11-21 12-23 22-31", {1: 1, 3: -1, 4: 1}),
    _row("11-21 12-22 23-31", {2: 1, 3: 1, 4: -1}),
    _row("11-21 12-23 13-22", {1: 1, 4: -1}),
    _row("11-23 12-22 21-31", {1: -1, 2: 1, 4: -1}),
    _row("11-23 12-21 22-31", {1: -1, 4: 1}),
    _row("11-22 12-21 23-31", {2: -1, 3: 1}),
    _row("11-23 12-22 13-21", {1: -1, 2: 1, 3: 1}),
    _row("11-22 13-23 21-31", {1: -1, 3: 1, 4: -1}),
    _row("11-21 13-23 22-31", {1: -1, 2: 1, 3: 1}),
    _row("11-21 13-22 23-31", {1: 1, 2: -1, 4: 1}),
    _row("11-22 12-21 13-23", {2: -1, 3: -1, 4: 1}),
    _row("11-23 13-22 21-31", {2: -1, 3: -1, 4: 1}),
    _row("11-23 13-21 22-31", {2: 1, 3: -1}),
    _row("11-22 13-21 23-31", {1: 1, 4: -1}),
    _row("11-22 12-23 13-21", {1: 1, 2: -1, 4: 1}),
    _row("12-22 13-23 21-31", {1: -1, 4: 1}),
    _row("12-21 13-23 22-31", {1: -1, 2: 1, 4: -1}),
    _row("12-21 13-22 23-31", {1: 1, 2: -1, 3: -1}),
    _row("11-23 12-21 13-22", {1: -1, 3: 1, 4: -1}),
    _row("12-23 13-22 21-31", {2: -1, 3: 1}),
    _row("12-23 13-21 22-31", {2: 1, 3: 1, 4: -1}),
    _row("12-22 13-21 23-31", {1: 1, 3: -1, 4: 1}),
)

# Number of gradient paths from the facets of each named 2-cell to critical 1-cells.
PATH_COUNTS = {"eta1": 2, "eta2": 2, "eta3": 5}

M7_HOMOLOGY = ((1, 0, 20), ((), (3,), ()))
