"""Batch command-line front end.

    morsematch [global flags] <command> [args]

Global flags (accepted before or after the command): ``--format``,
``--out``, ``--seed``, ``--max-n``, ``--check`` and ``-v``. The environment
variable ``MORSEMATCH_MAX_N`` sets the default for ``--max-n``.

Exit status: 0 when everything requested succeeded, 1 when a check or a
computation failed, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .complex import (
    Cell,
    MatchingComplex,
    build_complete_graph,
    build_matching_complex,
    euler_characteristic,
    f_vector,
    simplicial_boundary_matrix,
    simplicial_chain_complex,
    boundary_matrix_csv,
)
from .constructions import (
    DISPLAY_NAMES,
    FIELD_KINDS,
    ConstructionError,
    applicable_kinds,
    build_field,
    cell_from_coords,
    check_kind,
    m7_named_cells,
)
from .homology import HomologyResult, homology_of_chain_complex
from .morse import (
    CancellationError,
    DiscreteVectorField,
    PathCountError,
    PermutationConditionError,
    build_morse_complex,
    cancel_critical_pairs,
    check_acyclic,
    critical_simplices,
    paths_from_critical_cofaces,
    paths_to_dot,
    validate_field,
)
from .reference import BOUNDARY_TABLE

DEFAULT_MAX_N = 13
FORMATS = ("text", "json", "csv", "dot")

ALIASES = {}
for _key, _shown in DISPLAY_NAMES.items():
    ALIASES[_key] = _key
    ALIASES[_shown] = _key


class UsageError(Exception):
    """Bad command-line input; exit status 2."""


class Failure(Exception):
    """A requested check or computation failed; exit status 1."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    fmt: str
    out: Path | None
    seed: int
    max_n: int
    check: bool
    verbose: int


# -- cell names and formatting ---------------------------------------------


def is_m7(cx: MatchingComplex) -> bool:
    return cx.graph.n_vertices == 7 and cx.graph.is_complete


def cell_names(cx: MatchingComplex) -> dict[Cell, str]:
    """Display names of the named ``M_7`` cells; empty for other complexes."""
    if not is_m7(cx):
        return {}
    return {cell: DISPLAY_NAMES[key] for key, cell in m7_named_cells(cx).items()}


def cell_label(cx: MatchingComplex, cell: Cell, names: dict[Cell, str]) -> str:
    return names.get(cell) or cx.format_simplex(cell)


def short_label(cell: Cell, names: dict[Cell, str]) -> str:
    return names.get(cell) or f"{cell[0]}:{cell[1]}"


def parse_cell(text: str, cx: MatchingComplex) -> Cell:
    """``DIM:INDEX`` or one of the ``M_7`` aliases (``eta1``, ``η1``, ...)."""
    if ":" in text:
        try:
            k, i = (int(x) for x in text.split(":"))
        except ValueError:
            raise UsageError(f"bad cell {text!r}; use DIM:INDEX") from None
        if not (0 <= k <= cx.dim and 0 <= i < cx.count(k)):
            raise UsageError(f"no cell {text} in this complex")
        return k, i
    key = ALIASES.get(text)
    if key is None:
        raise UsageError(f"unknown cell {text!r}; use DIM:INDEX or one of {', '.join(DISPLAY_NAMES)}")
    if not is_m7(cx):
        raise UsageError(f"alias {text!r} only names cells of M_7")
    return m7_named_cells(cx)[key]


def format_chain(coeffs: dict[Cell, int], names: dict[Cell, str]) -> str:
    """Signed sum like ``-σ1 + σ4``; ``0`` for the zero chain."""
    out = ""
    for cell in sorted(coeffs):
        v = coeffs[cell]
        if not v:
            continue
        mag = "" if abs(v) == 1 else str(abs(v))
        term = f"{mag}{short_label(cell, names)}"
        if not out:
            out = ("-" if v < 0 else "") + term
        else:
            out += (" - " if v < 0 else " + ") + term
    return out or "0"


def _tuple_text(values: Sequence[int]) -> str:
    return "(" + ", ".join(str(v) for v in values) + ")"


# -- reusable renderers --------------------------------------------------------


def boundary_table_rows(field_: DiscreteVectorField | None = None) -> list[tuple[Cell, dict[Cell, int]]]:
    """Morse boundary of every critical 2-cell of ``M_star`` on ``M_7``."""
    if field_ is None:
        field_ = build_field("M_star", 7)
    mc = build_morse_complex(field_)
    d2 = mc.boundary(2)
    rows = []
    for j, t in enumerate(mc.critical[2]):
        image = {(1, mc.critical[1][i]): int(d2[i, j]) for i in range(d2.shape[0]) if d2[i, j]}
        rows.append(((2, t), image))
    return rows


def boundary_table_text(fmt: str = "text") -> str:
    field_ = build_field("M_star", 7)
    cx = field_.complex
    names = cell_names(cx)
    rows = boundary_table_rows(field_)
    sigmas = [c for c in sorted(names) if c[0] == 1 and names[c].startswith("σ")]
    if fmt == "csv":
        lines = ["cell,matching," + ",".join(names[s] for s in sigmas)]
        for cell, image in rows:
            coeffs = ",".join(str(image.get(s, 0)) for s in sigmas)
            lines.append(f"{cell[0]}:{cell[1]},{cell_label(cx, cell, names)},{coeffs}")
        return "\n".join(lines) + "\n"
    if fmt == "json":
        data = [
            {
                "cell": list(cell),
                "label": cell_label(cx, cell, names),
                "edges": [list(cx.graph.edges[e]) for e in cx.simplex(cell)],
                "image": {names[s]: v for s, v in sorted(image.items())},
            }
            for cell, image in rows
        ]
        return json.dumps(data, ensure_ascii=False, indent=1) + "\n"
    width = max(len(cell_label(cx, c, names)) for c, _ in rows)
    lines = [f"{c[0]}:{c[1]:<4} {cell_label(cx, c, names):<{width}}  ->  {format_chain(img, names)}" for c, img in rows]
    return "\n".join(lines) + "\n"


def reference_mismatches() -> list[str]:
    """Rows of the computed table that disagree with the published one."""
    field_ = build_field("M_star", 7)
    cx = field_.complex
    named = m7_named_cells(cx)
    sigma = {i: named[f"sigma{i}"] for i in range(1, 5)}
    computed = dict(boundary_table_rows(field_))
    names = cell_names(cx)
    bad = []
    for edges, image in BOUNDARY_TABLE:
        cell = cell_from_coords(cx, edges)
        want = {sigma[i]: v for i, v in image.items()}
        if computed.get(cell) != want:
            bad.append(f"{cell_label(cx, cell, names)}: got {format_chain(computed.get(cell, {}), names)}, "
                       f"table has {format_chain(want, names)}")
    if len(computed) != len(BOUNDARY_TABLE):
        bad.append(f"{len(computed)} critical 2-cells, table has {len(BOUNDARY_TABLE)}")
    return bad


def default_path_dim(field_: DiscreteVectorField) -> int:
    counts = critical_simplices(field_).counts
    dims = [k for k in range(1, len(counts)) if counts[k]]
    return dims[-1] if dims else 1


def paths_listing(field_: DiscreteVectorField, dim: int, cells: Sequence[Cell] | None = None):
    report = critical_simplices(field_)
    chosen = list(cells) if cells is not None else list(report.in_dim(dim))
    return [(eta, paths_from_critical_cofaces(field_, eta)) for eta in chosen]


def paths_text(field_: DiscreteVectorField, dim: int, cells: Sequence[Cell] | None = None) -> str:
    cx = field_.complex
    names = cell_names(cx)
    lines = []
    for eta, fam in paths_listing(field_, dim, cells):
        head = names.get(eta, f"{eta[0]}:{eta[1]}")
        noun = "path" if len(fam) == 1 else "paths"
        lines.append(f"{head} [{cx.format_simplex(eta)}]: {len(fam)} {noun}")
        for _, path in fam:
            chain = " -> ".join(short_label(c, names) for c in path.cells)
            lines.append(f"  {chain}  m={path.multiplicity:+d}")
    return "\n".join(lines) + ("\n" if lines else "")


def paths_json(field_: DiscreteVectorField, dim: int, cells: Sequence[Cell] | None = None) -> str:
    cx = field_.complex
    names = cell_names(cx)
    data = []
    for eta, fam in paths_listing(field_, dim, cells):
        data.append({
            "cell": list(eta),
            "label": cell_label(cx, eta, names),
            "paths": [
                {"cells": [list(c) for c in p.cells], "target": list(p.target), "multiplicity": p.multiplicity}
                for _, p in fam
            ],
        })
    return json.dumps(data, ensure_ascii=False, indent=1) + "\n"


def homology_csv(h: HomologyResult) -> str:
    lines = ["dim,betti,torsion"]
    for k in h.dims:
        lines.append(f"{k},{h.betti[k]},{' '.join(str(t) for t in h.torsion[k])}")
    return "\n".join(lines) + "\n"


# -- commands ------------------------------------------------------------------


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is not None:
        cfg.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _need_n(n: int, cfg: RunConfig) -> None:
    if not 2 <= n <= cfg.max_n:
        raise UsageError(f"n must be between 2 and {cfg.max_n} (raise with --max-n), got {n}")


def _reject_format(cfg: RunConfig, allowed: Sequence[str]) -> None:
    if cfg.fmt not in allowed:
        raise UsageError(f"--format {cfg.fmt} is not supported by '{cfg.command}' (use {', '.join(allowed)})")


def _build(n: int, kind: str, cfg: RunConfig) -> DiscreteVectorField:
    _need_n(n, cfg)
    try:
        check_kind(kind, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        return build_field(kind, n)
    except ConstructionError as exc:
        raise Failure(f"internal construction failure: {exc}") from None


def _load_field(path: str) -> tuple[DiscreteVectorField, str | None]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        field_ = DiscreteVectorField.from_json(data)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"cannot read field from {path}: {exc}") from None
    problem = validate_field(field_)
    if problem is not None:
        raise Failure(f"{path}: not a discrete vector field ({problem.kind}: {problem.detail})")
    loop = check_acyclic(field_)
    if loop is not None:
        raise Failure(f"{path}: closed path {' -> '.join(f'{k}:{i}' for k, i in loop)}")
    return field_, data.get("construction")


def _source_field(args, cfg: RunConfig) -> tuple[DiscreteVectorField, str | None]:
    if getattr(args, "input", None):
        return _load_field(args.input)
    if args.n is None or args.kind is None:
        raise UsageError("give N and KIND, or --input FILE")
    return _build(args.n, args.kind, cfg), args.kind


def cmd_complex(args, cfg: RunConfig) -> int:
    _need_n(args.n, cfg)
    _reject_format(cfg, ("text", "json", "csv"))
    cx = build_matching_complex(build_complete_graph(args.n))
    f = f_vector(cx)
    chi = euler_characteristic(cx)
    if args.boundary is not None:
        k = args.boundary
        if not 1 <= k <= max(cx.dim, 1):
            raise UsageError(f"boundary index must be in 1..{max(cx.dim, 1)}")
        m = simplicial_boundary_matrix(cx, k)
        rows = [f"{k - 1}:{i}" for i in range(m.shape[0])]
        cols = [f"{k}:{i}" for i in range(m.shape[1])]
        _emit(cfg, boundary_matrix_csv(m, rows, cols))
        return 0
    if cfg.fmt == "json":
        data = cx.to_json() if cfg.verbose else {"graph": cx.graph.to_json()}
        data.update({"f": list(f), "chi": chi, "dim": cx.dim})
        _emit(cfg, json.dumps(data, sort_keys=True) + "\n")
    elif cfg.fmt == "csv":
        _emit(cfg, "dim,count\n" + "".join(f"{k},{x}\n" for k, x in enumerate(f)))
    else:
        _emit(cfg, f"f = {_tuple_text(f)}, chi = {chi}\ndim = {cx.dim}\n")
    return 0


def cmd_field(args, cfg: RunConfig) -> int:
    _reject_format(cfg, ("text", "json"))
    field_, kind = _source_field(args, cfg)
    cx = field_.complex
    report = critical_simplices(field_)
    n = cx.graph.n_vertices
    field_json = field_.to_json_text(kind, n) + "\n" if kind else field_.to_json_text() + "\n"
    if cfg.out is not None:
        cfg.out.write_text(field_json, encoding="utf-8")
    if cfg.fmt == "json" and cfg.out is None:
        sys.stdout.write(field_json)
        return 0
    if cfg.fmt == "json":
        sys.stdout.write(json.dumps({"critical_counts": list(report.counts), "out": str(cfg.out)}) + "\n")
        return 0
    lines = [report.format()]
    if cfg.verbose:
        names = cell_names(cx)
        for k in range(len(report.cells)):
            for cell in report.in_dim(k):
                tag = f"  [{names[cell]}]" if cell in names else ""
                lines.append(f"  {k}:{cell[1]}  {cx.format_simplex(cell)}{tag}")
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def _parse_mode(mode: str) -> tuple[str, str | None]:
    if mode == "simplicial":
        return "simplicial", None
    if mode == "morse":
        return "morse", "M"
    if mode.startswith("morse:"):
        kind = mode.split(":", 1)[1]
        if kind not in FIELD_KINDS:
            raise UsageError(f"unknown field kind {kind!r}; choose from {', '.join(FIELD_KINDS)}")
        return "morse", kind
    raise UsageError(f"bad mode {mode!r}; use simplicial, morse or morse:KIND")


def cmd_homology(args, cfg: RunConfig) -> int:
    _reject_format(cfg, ("text", "json", "csv"))
    mode, kind = _parse_mode(args.mode)
    morse: dict[str, HomologyResult] = {}
    simplicial: HomologyResult | None = None
    if args.input:
        field_, label = _load_field(args.input)
        cx = field_.complex
        morse[label or "file"] = build_morse_complex(field_).homology()
        if cfg.check or mode == "simplicial":
            simplicial = homology_of_chain_complex(*simplicial_chain_complex(cx))
    else:
        if args.n is None:
            raise UsageError("give N or --input FILE")
        _need_n(args.n, cfg)
        if mode == "simplicial" or cfg.check:
            cx = build_matching_complex(build_complete_graph(args.n))
            simplicial = homology_of_chain_complex(*simplicial_chain_complex(cx))
        kinds = [kind] if kind else (applicable_kinds(args.n) if cfg.check else [])
        if cfg.check and not kinds:
            raise UsageError(f"no field construction for n={args.n}; --check needs n >= 5")
        for k in kinds:
            morse[k] = build_morse_complex(_build(args.n, k, cfg)).homology()

    primary = simplicial if mode == "simplicial" else next(iter(morse.values()))
    ok = all(h == simplicial for h in morse.values()) if cfg.check else True

    if cfg.fmt == "json":
        data: dict = {}
        if simplicial is not None:
            data["simplicial"] = simplicial.to_json()
        if morse:
            data["morse"] = {k: h.to_json() for k, h in morse.items()}
        if cfg.check:
            data["ok"] = ok
        _emit(cfg, json.dumps(data, sort_keys=True) + "\n")
    elif cfg.fmt == "csv":
        _emit(cfg, homology_csv(primary))
    else:
        lines = [primary.format()]
        if cfg.check:
            if ok:
                lines.append("OK (morse == simplicial)")
            else:
                lines = [f"simplicial: {simplicial.format()}"]
                lines += [f"morse ({k}): {h.format()}" for k, h in morse.items()]
                lines.append("MISMATCH (morse != simplicial)")
        _emit(cfg, "\n".join(lines) + "\n")
    return 0 if ok else 1


def cmd_boundary_table(args, cfg: RunConfig) -> int:
    _reject_format(cfg, ("text", "json", "csv"))
    text = boundary_table_text(cfg.fmt)
    bad = reference_mismatches() if cfg.check else []
    if cfg.check and cfg.fmt == "text":
        text += ("OK (matches reference table)\n" if not bad else "MISMATCH\n" + "".join(f"  {b}\n" for b in bad))
    _emit(cfg, text)
    if bad and cfg.fmt != "text":
        sys.stderr.write("".join(f"mismatch: {b}\n" for b in bad))
    return 1 if bad else 0


def cmd_paths(args, cfg: RunConfig) -> int:
    _reject_format(cfg, ("text", "json", "dot"))
    field_, _ = _source_field(args, cfg)
    cx = field_.complex
    cells = None
    if args.cell:
        cells = [parse_cell(c, cx) for c in args.cell]
        for c in cells:
            if not field_.is_critical(c) or c[0] < 1:
                raise UsageError(f"{c[0]}:{c[1]} is not a critical cell of dimension >= 1")
    dim = args.dim if args.dim is not None else default_path_dim(field_)
    if cells is None and not 1 <= dim <= cx.dim:
        raise UsageError(f"--dim must be in 1..{cx.dim}")
    if cfg.fmt == "json":
        _emit(cfg, paths_json(field_, dim, cells))
    elif cfg.fmt == "dot":
        names = cell_names(cx)
        chosen = cells if cells is not None else critical_simplices(field_).in_dim(dim)
        _emit(cfg, "".join(paths_to_dot(field_, eta, names) for eta in chosen))
    else:
        _emit(cfg, paths_text(field_, dim, cells))
    return 0


def cmd_cancel(args, cfg: RunConfig) -> int:
    _reject_format(cfg, ("text", "json"))
    if args.field_file and args.build:
        raise UsageError("give a field file or --build, not both")
    if args.field_file:
        field_, kind = _load_field(args.field_file)
    elif args.build:
        n_text, kind = args.build
        try:
            n = int(n_text)
        except ValueError:
            raise UsageError(f"bad n {n_text!r}") from None
        field_ = _build(n, kind, cfg)
    else:
        raise UsageError("give a field file or --build N KIND")
    cx = field_.complex
    names = cell_names(cx)
    requests = [(parse_cell(b, cx), parse_cell(a, cx)) for b, a in (args.pair or [])]
    try:
        out = cancel_critical_pairs(field_, requests)
    except PathCountError as exc:
        beta, alpha = exc.request
        raise Failure(
            f"{exc.path_count} paths from the facets of {short_label(beta, names)} to "
            f"{short_label(alpha, names)}; cancellation needs exactly 1"
        ) from None
    except PermutationConditionError as exc:
        raise Failure(f"simultaneous cancellation refused: paths realise the permutation {exc.permutation}") from None
    except CancellationError as exc:
        raise Failure(str(exc)) from None
    report = critical_simplices(out)
    # the header names a construction only when the result still is one
    if requests:
        kind = "M_double_star" if is_m7(cx) and out.pairs == build_field("M_double_star", 7).pairs else None
    field_json = (out.to_json_text(kind) if kind else out.to_json_text()) + "\n"
    if cfg.out is not None:
        cfg.out.write_text(field_json, encoding="utf-8")
    if cfg.fmt == "json" and cfg.out is None:
        sys.stdout.write(field_json)
    else:
        sys.stdout.write(f"{report.format()}\ncounts {_tuple_text(report.counts)}\n")
    return 0


def cmd_selftest(args, cfg: RunConfig) -> int:
    from .acceptance import CRITERIA, format_report, run_all

    numbers = None
    if args.only:
        try:
            numbers = sorted({int(x) for x in args.only.split(",")})
        except ValueError:
            raise UsageError("--only takes a comma-separated list of criterion numbers") from None
        known = {c.number for c in CRITERIA}
        if not set(numbers) <= known:
            raise UsageError(f"unknown criteria {sorted(set(numbers) - known)}")
    _reject_format(cfg, ("text",))
    results = run_all(numbers, cfg.seed)
    _emit(cfg, format_report(results))
    return 0 if all(r.passed for r in results) else 1


# -- argument parsing ----------------------------------------------------------


def _add_global(parser: argparse.ArgumentParser, top: bool) -> None:
    def default(value):
        return value if top else argparse.SUPPRESS

    parser.add_argument("--format", choices=FORMATS, default=default("text"), help="output format")
    parser.add_argument("--out", type=Path, default=default(None), help="write the primary output here")
    parser.add_argument("--seed", type=int, default=default(0), help="RNG seed for randomized checks")
    parser.add_argument("--max-n", type=int, default=default(None), help=f"largest n accepted (default {DEFAULT_MAX_N})")
    parser.add_argument("--check", action="store_true", default=default(False), help="also run the cross-checks")
    parser.add_argument("-v", "--verbose", action="count", default=default(0))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="morsematch", description="Discrete Morse theory on matching complexes.")
    _add_global(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str):
        p = sub.add_parser(name, help=help_text)
        _add_global(p, top=False)
        return p

    p = add("complex", "f-vector, Euler characteristic and dimension of M_n")
    p.add_argument("n", type=int)
    p.add_argument("--boundary", type=int, metavar="K", help="print the simplicial boundary matrix d_K as CSV")
    p.set_defaults(func=cmd_complex)

    p = add("field", "build and validate a gradient field; report critical cells")
    p.add_argument("n", type=int, nargs="?")
    p.add_argument("kind", nargs="?", choices=FIELD_KINDS)
    p.add_argument("--input", metavar="FILE", help="validate a field stored as JSON instead")
    p.set_defaults(func=cmd_field)

    p = add("homology", "integer homology, simplicial or from a Morse complex")
    p.add_argument("n", type=int, nargs="?")
    p.add_argument("--mode", default="simplicial", help="simplicial, morse or morse:KIND")
    p.add_argument("--input", metavar="FILE", help="Morse homology of a field stored as JSON")
    p.set_defaults(func=cmd_homology)

    p = add("boundary-table", "Morse boundary of the 24 critical 2-cells of M_star on M_7")
    p.set_defaults(func=cmd_boundary_table)

    p = add("paths", "gradient paths from critical cells to critical cells one dimension down")
    p.add_argument("n", type=int, nargs="?")
    p.add_argument("kind", nargs="?", choices=FIELD_KINDS)
    p.add_argument("--input", metavar="FILE", help="use a field stored as JSON")
    p.add_argument("--dim", type=int, help="dimension of the source critical cells")
    p.add_argument("--cell", action="append", help="only this critical cell (DIM:INDEX or alias); repeatable")
    p.set_defaults(func=cmd_paths)

    p = add("cancel", "cancel critical pairs by reversing their unique gradient paths")
    p.add_argument("field_file", nargs="?")
    p.add_argument("--build", nargs=2, metavar=("N", "KIND"), help="start from a built field instead of a file")
    p.add_argument("--pair", nargs=2, action="append", metavar=("BETA", "ALPHA"), help="critical pair to cancel; repeatable")
    p.set_defaults(func=cmd_cancel)

    p = add("selftest", "run the numbered acceptance checks and print a pass/fail matrix")
    p.add_argument("--only", help="comma-separated criterion numbers")
    p.set_defaults(func=cmd_selftest)
    return parser


def _max_n(value: int | None) -> int:
    if value is not None:
        return value
    env = os.environ.get("MORSEMATCH_MAX_N")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"MORSEMATCH_MAX_N must be an integer, got {env!r}") from None
    return DEFAULT_MAX_N


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            fmt=args.format,
            out=args.out,
            seed=args.seed,
            max_n=_max_n(args.max_n),
            check=args.check,
            verbose=args.verbose,
        )
        return args.func(args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"morsematch: error: {exc}\n")
        return 2
    except Failure as exc:
        sys.stderr.write(f"morsematch: {exc}\n")
        return 1
