"""Cancel two critical pairs of M_7 by reversing gradient paths.

Shows the unique path behind each request, the field after both reversals,
and a request that has to be refused because no path exists.

    python3 demos/cancel_pairs.py
"""

from morsematch.constructions import DISPLAY_NAMES, build_field, m7_named_cells
from morsematch.morse import (
    PathCountError,
    cancel_critical_pairs,
    critical_simplices,
    morse_homology,
    paths_between,
)


def main():
    star = build_field("M_star", 7)
    cx = star.complex
    names = m7_named_cells(cx)
    label = {c: DISPLAY_NAMES[k] for k, c in names.items()}

    requests = [(names["eta1"], names["sigma4"]), (names["eta2"], names["sigma3"])]
    for beta, alpha in requests:
        for face, _ in cx.facets(beta):
            for path in paths_between(star, face, alpha):
                steps = " -> ".join(label.get(c, f"{c[0]}:{c[1]}") for c in path.cells)
                print(f"{label[beta]} -> {steps}  (m={path.multiplicity:+d})")

    double = cancel_critical_pairs(star, requests)
    print("\nbefore:", critical_simplices(star).counts)
    print("after: ", critical_simplices(double).counts)
    print("homology unchanged:", morse_homology(double))

    try:
        cancel_critical_pairs(star, [(names["eta1"], names["sigma3"])])
    except PathCountError as err:
        print(f"\nrefused: {err.path_count} paths from the facets of η1 to σ3")


if __name__ == "__main__":
    main()
