"""Morse complex of M_7 and where its 3-torsion comes from.

Builds the level-sweep field, extends it on the last level, prints the
critical cells, the boundary of every critical 2-cell in terms of the four
critical 1-cells, and the resulting homology.

    python3 demos/m7_torsion.py
"""

from morsematch.cli import boundary_table_text
from morsematch.constructions import build_field, m7_named_cells
from morsematch.homology import smith_normal_form
from morsematch.morse import build_morse_complex, critical_simplices


def main():
    star = build_field("M_star", 7)
    cx = star.complex
    names = m7_named_cells(cx)
    report = critical_simplices(star)
    print(report.format())
    for name in ("xi", "sigma1", "sigma2", "sigma3", "sigma4"):
        print(f"  {name:7s} {cx.format_simplex(names[name])}")

    morse = build_morse_complex(star)
    print("\nd1 =", morse.boundary(1).tolist())
    print("\nd2, one row per critical 2-cell:")
    print(boundary_table_text(), end="")

    snf = smith_normal_form(morse.boundary(2))
    print(f"\ninvariant factors of d2: {snf.invariant_factors}")
    print("homology:", morse.homology())


if __name__ == "__main__":
    main()
