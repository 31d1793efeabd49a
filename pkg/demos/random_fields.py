"""Random gradient fields never change homology.

Draws seeded random graphs, pairs cells greedily at random without creating
closed paths, and compares the homology of the Morse complex with the
simplicial one.

    python3 demos/random_fields.py [seed] [count]
"""

import random
import sys

from morsematch.acceptance import random_graph
from morsematch.complex import build_matching_complex, f_vector, simplicial_chain_complex
from morsematch.homology import homology_of_chain_complex
from morsematch.morse import build_morse_complex, random_gradient_field


def main(seed=0, count=10):
    rng = random.Random(seed)
    for _ in range(count):
        g = random_graph(rng)
        cx = build_matching_complex(g)
        morse = build_morse_complex(random_gradient_field(cx, rng))
        simplicial = homology_of_chain_complex(*simplicial_chain_complex(cx))
        ok = "ok" if morse.homology() == simplicial else "MISMATCH"
        print(f"n={g.n_vertices} |E|={len(g.edges):2d} f={f_vector(cx)} critical={morse.counts} {simplicial}  {ok}")


if __name__ == "__main__":
    main(*(int(a) for a in sys.argv[1:3]))
