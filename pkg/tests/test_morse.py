"""Discrete vector fields, gradient paths, Morse complexes and cancellation."""

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morsematch.acceptance import random_graph
from morsematch.complex import Graph, MatchingComplex, build_complete_graph, build_matching_complex, simplicial_chain_complex
from morsematch.constructions import build_field, build_field_M, cell_from_coords
from morsematch.homology import HomologyResult, homology_of_chain_complex
from morsematch.morse import (
    DiscreteVectorField,
    NotCriticalError,
    PathCountError,
    PermutationConditionError,
    _permutation_witness,
    build_morse_complex,
    cancel_critical_pairs,
    check_acyclic,
    critical_simplices,
    is_gradient,
    morse_boundary_coefficient,
    morse_homology,
    path_multiplicity,
    paths_between,
    paths_from_critical_cofaces,
    random_gradient_field,
    sign_scheme_boundary,
    validate_field,
    verify_morse_inequalities,
)
from morsematch.reference import BOUNDARY_TABLE


def at(cx, *edges):
    """Cell from edges written as 'ij-kl' in (level, slot) digits."""
    pairs = [((int(e[0]), int(e[1])), (int(e[3]), int(e[4]))) for e in edges]
    return cell_from_coords(cx, pairs)


@pytest.fixture(scope="module")
def three_edges():
    # three disjoint edges: the matching complex is a full triangle
    return build_matching_complex(Graph(6, ((0, 1), (2, 3), (4, 5))))


# -- validation and acyclicity ---------------------------------------------


def test_empty_field_is_valid(three_edges):
    f = DiscreteVectorField(three_edges, [])
    assert validate_field(f) is None
    assert check_acyclic(f) is None
    assert critical_simplices(f).counts == (3, 3, 1)


def test_doubly_matched(three_edges):
    cx = three_edges
    a, ab, abc = cx.index([0]), cx.index([0, 1]), cx.index([0, 1, 2])
    v = validate_field(DiscreteVectorField(cx, [(a, ab), (ab, abc)]))
    assert v.kind == "doubly-matched"
    assert str(ab) in v.detail


def test_other_violations(three_edges):
    cx = three_edges
    a, bc, abc = cx.index([0]), cx.index([1, 2]), cx.index([0, 1, 2])
    assert validate_field(DiscreteVectorField(cx, [(a, bc)])).kind == "non-face"
    assert validate_field(DiscreteVectorField(cx, [(a, abc)])).kind == "dimension-gap"
    assert validate_field(DiscreteVectorField(cx, [(a, (1, 9))])).kind == "missing-cell"


def test_closed_path_witness(three_edges):
    cx = three_edges
    a, b, c = (cx.index([i]) for i in range(3))
    ab, bc, ac = cx.index([0, 1]), cx.index([1, 2]), cx.index([0, 2])
    f = DiscreteVectorField(cx, [(a, ab), (b, bc), (c, ac)])
    assert validate_field(f) is None
    loop = check_acyclic(f)
    assert loop is not None
    assert loop[0] == loop[-1]
    assert set(loop) == {a, b, c, ab, bc, ac}
    # each step is a pair followed by a different facet of the paired cell
    for i in range(0, len(loop) - 1, 2):
        assert f.up[loop[i]] == loop[i + 1]
        assert loop[i + 2] in dict(cx.facets(loop[i + 1]))
        assert loop[i + 2] != loop[i]
    assert not is_gradient(f)


@pytest.mark.parametrize("n", range(5, 10))
def test_M_is_gradient(n):
    assert is_gradient(build_field_M(n)[0])


# -- paths and multiplicities ----------------------------------------------


def test_trivial_path(star, names):
    (p,) = paths_between(star, names["sigma1"], names["sigma1"])
    assert p.cells == (names["sigma1"],)
    assert p.multiplicity == 1
    assert p.length == 0


def test_paths_to_xi(star, names):
    cx = star.complex
    xi = names["xi"]
    a0, b0 = at(cx, "11-12"), at(cx, "11-12", "22-23")
    a1, b1 = at(cx, "22-23"), at(cx, "12-13", "22-23")
    (g1,) = paths_between(star, a0, xi)
    assert g1.cells == (a0, b0, a1, b1, xi)
    assert g1.multiplicity == path_multiplicity(cx, g1.cells) == 1
    a0p, b0p = at(cx, "21-22"), at(cx, "12-13", "21-22")
    (g2,) = paths_between(star, a0p, xi)
    assert g2.cells == (a0p, b0p, xi)
    assert g2.multiplicity == 1


def test_paths_from_psi13(star, names):
    (to4,) = paths_between(star, names["psi13"], names["sigma4"])
    (to1,) = paths_between(star, names["psi13"], names["sigma1"])
    assert to4.multiplicity == 1
    assert to1.multiplicity == -1


@pytest.mark.parametrize("eta, count, targets", [
    ("eta1", 2, {"sigma1", "sigma4"}),
    ("eta2", 2, {"sigma2", "sigma3"}),
    ("eta3", 5, None),
])
def test_path_families(star, names, eta, count, targets):
    fams = paths_from_critical_cofaces(star, names[eta])
    assert len(fams) == count
    if targets is not None:
        assert {p.target for _, p in fams} == {names[t] for t in targets}
    if eta == "eta1":
        assert {face for face, _ in fams} == {names["psi13"]}


def test_multiplicity_rejects_malformed(star, names):
    cx = star.complex
    with pytest.raises(ValueError):
        path_multiplicity(cx, [names["sigma1"], names["eta1"]])
    with pytest.raises(ValueError):
        path_multiplicity(cx, [names["sigma1"], names["eta3"], names["sigma1"]])
    with pytest.raises(ValueError):
        paths_between(star, names["xi"], names["sigma1"])


def test_every_multiplicity_is_a_sign(star):
    for k, i in ((2, i) for i in critical_simplices(star).cells[2]):
        for _, p in paths_from_critical_cofaces(star, (k, i)):
            assert p.multiplicity in (-1, 1)


# -- Morse boundary ----------------------------------------------------------


def test_boundary_coefficients(star, names):
    assert morse_boundary_coefficient(star, names["eta1"], names["sigma1"]) == -1
    assert morse_boundary_coefficient(star, names["eta1"], names["sigma4"]) == 1
    assert morse_boundary_coefficient(star, names["sigma1"], names["xi"]) == 0
    assert morse_boundary_coefficient(star, names["eta3"], names["sigma2"]) == 1


def test_boundary_table(star, names):
    cx = star.complex
    morse = build_morse_complex(star)
    assert morse.counts == (1, 4, 24)
    assert not morse.boundary(1).any()
    assert morse.boundary(1).shape == (1, 4)
    d2 = morse.boundary(2)
    assert np.linalg.matrix_rank(d2.astype(float)) == 4
    sigmas = [names[f"sigma{i}"][1] for i in range(1, 5)]
    assert list(morse.critical[1]) == sorted(sigmas)
    seen = set()
    for edges, image in BOUNDARY_TABLE:
        eta = cell_from_coords(cx, edges)
        col = morse.critical[2].index(eta[1])
        got = {i: int(d2[morse.critical[1].index(sigmas[i - 1]), col]) for i in range(1, 5)}
        assert {i: v for i, v in got.items() if v} == image
        seen.add(eta)
    assert len(seen) == 24


def test_sign_scheme_matches_path_sum(star, names):
    xi_free = {names[f"sigma{i}"]: f"sigma{i}" for i in range(1, 5)}
    assert {xi_free[c]: v for c, v in sign_scheme_boundary(star, names["eta2"]).items()} == {"sigma2": -1, "sigma3": 1}
    assert {xi_free[c]: v for c, v in sign_scheme_boundary(star, names["eta3"]).items()} == {
        "sigma1": -1, "sigma2": 1, "sigma3": 1}
    for i in critical_simplices(star).cells[2]:
        eta = (2, i)
        expected = {s: morse_boundary_coefficient(star, eta, s) for s in xi_free}
        assert sign_scheme_boundary(star, eta) == {s: v for s, v in sorted(expected.items()) if v}


def test_sign_scheme_without_paths():
    # M on M_8 has no critical 1-cells, so no critical 2-cell has a path down
    f, _ = build_field_M(8)
    report = critical_simplices(f)
    assert report.counts[1] == 0
    eta = report.in_dim(2)[0]
    assert paths_from_critical_cofaces(f, eta) == []
    assert sign_scheme_boundary(f, eta) == {}


def test_M_circ_on_M8_is_perfect():
    morse = build_morse_complex(build_field("M_circ", 8))
    assert morse.counts == (1, 0, 132, 0)
    assert morse.boundary(2).size == 0
    assert morse.boundary(3).size == 0
    assert morse.homology() == HomologyResult((1, 0, 132, 0), ((), (), (), ()))


@pytest.mark.parametrize("kind, n", [
    ("M", 5), ("M", 6), ("M", 7), ("M_star", 7), ("M_double_star", 7), ("M", 8), ("M_circ", 8), ("M", 9),
])
def test_morse_equals_simplicial(kind, n):
    f = build_field(kind, n)
    morse = build_morse_complex(f)
    assert morse.is_chain_complex()
    assert morse.homology() == homology_of_chain_complex(*simplicial_chain_complex(f.complex))


# -- cancellation -----------------------------------------------------------


def test_double_star(star, names):
    reqs = [(names["eta1"], names["sigma4"]), (names["eta2"], names["sigma3"])]
    out = cancel_critical_pairs(star, reqs)
    assert critical_simplices(out).counts == (1, 2, 22)
    assert is_gradient(out)
    assert out.is_critical(names["sigma1"]) and out.is_critical(names["sigma2"])
    assert morse_homology(out).format() == "H0=Z, H1=Z_3, H2=Z^20"
    # unaffected pairs survive; the difference is the reversed paths
    removed = set(star.pairs) - set(out.pairs)
    added = set(out.pairs) - set(star.pairs)
    expected_removed, expected_added = set(), set()
    for beta, alpha in reqs:
        fams = [p for face, _ in star.complex.facets(beta) for p in paths_between(star, face, alpha)]
        (p,) = fams
        c = p.cells
        for i in range(0, len(c) - 1, 2):
            expected_removed.add((c[i], c[i + 1]))
            expected_added.add((c[i + 2], c[i + 1]))
        expected_added.add((c[0], beta))
    assert removed == expected_removed
    assert added == expected_added


def test_empty_request_is_identity(star):
    assert cancel_critical_pairs(star, []) is star


def test_rejects_zero_paths(star, names):
    with pytest.raises(PathCountError) as err:
        cancel_critical_pairs(star, [(names["eta1"], names["sigma3"])])
    assert err.value.path_count == 0


def test_rejects_multiple_paths(star, names):
    # five paths leave eta3; at least one target is reached more than once or not at all
    counts = {}
    for _, p in paths_from_critical_cofaces(star, names["eta3"]):
        counts[p.target] = counts.get(p.target, 0) + 1
    sigma, c = max(counts.items(), key=lambda kv: kv[1])
    assert c >= 2
    with pytest.raises(PathCountError) as err:
        cancel_critical_pairs(star, [(names["eta3"], sigma)])
    assert err.value.path_count == c


def test_rejects_non_critical(star, names):
    cx = star.complex
    paired = star.pairs[0][1]
    with pytest.raises(NotCriticalError):
        cancel_critical_pairs(star, [(paired, names["sigma1"])])
    with pytest.raises(NotCriticalError):
        cancel_critical_pairs(star, [(names["eta1"], names["xi"])])
    with pytest.raises(NotCriticalError):
        cancel_critical_pairs(star, [(names["eta1"], names["sigma4"]), (names["eta2"], names["sigma4"])])


def test_permutation_witness():
    assert _permutation_witness([[True]]) is None
    assert _permutation_witness([[True, True], [False, True]]) is None
    assert _permutation_witness([[True, True], [True, True]]) == (1, 0)
    w = _permutation_witness([[True, True, False], [False, True, True], [True, False, True]])
    assert sorted(w) == [0, 1, 2] and w != (0, 1, 2)
    for i, j in enumerate(w):
        assert [[True, True, False], [False, True, True], [True, False, True]][i][j]


def test_permutation_condition_rejects_crossing(star, names):
    # eta1 reaches both sigma1 and sigma4, eta2 both sigma2 and sigma3. Look for
    # two unique-path requests whose targets are also reachable crosswise.
    crit2 = [(2, i) for i in critical_simplices(star).cells[2]]
    sigmas = [names[f"sigma{i}"] for i in range(1, 5)]
    reach = {}
    for eta in crit2:
        for s in sigmas:
            reach[eta, s] = len([p for f, _ in star.complex.facets(eta) for p in paths_between(star, f, s)])
    found = None
    for e1 in crit2:
        for e2 in crit2:
            if e1 >= e2:
                continue
            for s1 in sigmas:
                for s2 in sigmas:
                    if s1 != s2 and reach[e1, s1] == 1 and reach[e2, s2] == 1 and reach[e1, s2] and reach[e2, s1]:
                        found = (e1, s1, e2, s2)
                        break
    assert found is not None
    e1, s1, e2, s2 = found
    with pytest.raises(PermutationConditionError) as err:
        cancel_critical_pairs(star, [(e1, s1), (e2, s2)])
    assert err.value.permutation == (1, 0)


# -- Morse inequalities -------------------------------------------------------


def test_inequalities(star):
    assert verify_morse_inequalities((1, 4, 24), (1, 0, 20)) is None
    assert verify_morse_inequalities((1, 0, 132, 0), (1, 0, 132, 0)) is None
    v = verify_morse_inequalities((0, 2), (1, 1))
    assert v.kind == "weak" and v.index == 0
    v = verify_morse_inequalities((1, 2, 1), (1, 0, 0))
    assert v.kind == "strong" and v.index == 2
    v = verify_morse_inequalities((1, 2), (0, 0))
    assert v.kind == "euler"


# -- random gradient fields ----------------------------------------------------


@pytest.mark.parametrize("seed", range(100))
def test_random_fields_preserve_homology(seed):
    rng = random.Random(seed)
    cx = build_matching_complex(random_graph(rng))
    f = random_gradient_field(cx, rng)
    assert is_gradient(f), f"seed={seed}"
    morse = build_morse_complex(f)
    assert morse.is_chain_complex(), f"seed={seed}"
    assert morse.homology() == homology_of_chain_complex(*simplicial_chain_complex(cx)), f"seed={seed}"
    assert verify_morse_inequalities(morse.counts, morse.homology()) is None


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_field_boundary_via_paths(seed):
    rng = random.Random(seed)
    cx = build_matching_complex(random_graph(rng, max_n=6))
    f = random_gradient_field(cx, rng)
    morse = build_morse_complex(f)
    # the DP used by build_morse_complex agrees with explicit path sums
    for k in range(1, len(morse.critical)):
        d = morse.boundary(k)
        for j, t in enumerate(morse.critical[k]):
            for i, s in enumerate(morse.critical[k - 1]):
                assert d[i, j] == morse_boundary_coefficient(f, (k, t), (k - 1, s))


def test_random_field_is_seeded():
    cx = build_matching_complex(build_complete_graph(6))
    a = random_gradient_field(cx, random.Random(3))
    b = random_gradient_field(cx, random.Random(3))
    assert a == b and len(a) > 0


def test_json_roundtrip(star):
    again = DiscreteVectorField.from_json(star.to_json("M_star"), star.complex)
    assert again == star
    fresh = DiscreteVectorField.from_json(star.to_json())
    assert fresh.pairs == star.pairs
    assert isinstance(fresh.complex, MatchingComplex)


def test_M10_fields_agree_with_simplicial():
    simplicial = None
    for kind in ("M", "M_circ", "M_star"):
        f = build_field(kind, 10)
        if simplicial is None:
            simplicial = homology_of_chain_complex(*simplicial_chain_complex(f.complex))
        assert morse_homology(f) == simplicial, kind
    # pinned from the simplicial route; the torsion survives into the Morse complex
    assert simplicial.format() == "H0=Z, H2=Z_3, H3=Z^1216"


@pytest.mark.slow
def test_M11_morse_equals_simplicial():
    f, _ = build_field_M(11)
    assert morse_homology(f) == homology_of_chain_complex(*simplicial_chain_complex(f.complex))
