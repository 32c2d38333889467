"""Small counterexample graphs with pinned property profiles.

These four graphs certify that the passive-attack and active-attack anonymity
notions are incomparable, and that the automorphism-count property admits a
degree-unique vertex. They are written out by the `fixtures` CLI subcommand as
edge-list files plus a JSON file of expected property outcomes, so external
tooling can replay the regression.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from anonlab.graph import Graph, save_edge_list


def mirrored_squares() -> Graph:
    """Two 4-cycles joined through a central path; the left-right mirror plus
    the in-square swaps pair every vertex, so all orbits have size >= 2, yet
    single-source distance vectors already isolate vertices."""
    return Graph(
        10,
        [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (6, 8), (7, 9), (8, 9)],
    )


def bowtie() -> Graph:
    """Two triangles sharing a vertex. The shared vertex is unique by degree
    (so no non-trivial symmetry covers it), yet every distance vector to a
    single probe vertex is shared by at least two vertices."""
    return Graph(5, [(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4)])


def uneven_barbell() -> Graph:
    """K4 bridged to a triangle. Satisfies neither of the two anonymity
    notions, but the exact adversary oracle still caps any two-sybil attack
    at probability 1/2."""
    return Graph(
        7,
        [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (4, 6), (5, 6)],
    )


def double_broom() -> Graph:
    """Tree with a centre vertex (id 6) joining two 3-star branches. The
    mirror is a non-trivial automorphism that fixes the centre, so the
    automorphism-count property holds at k=2 even though the centre is the
    sole vertex with degree 2."""
    return Graph(7, [(0, 2), (1, 2), (2, 6), (3, 6), (3, 4), (3, 5)])


FIXTURES = {
    "mirrored_squares": mirrored_squares,
    "bowtie": bowtie,
    "uneven_barbell": uneven_barbell,
    "double_broom": double_broom,
}

# expected property reports, exactly what the acceptance suite pins
EXPECTED = {
    "mirrored_squares": {
        "reports": [
            {"property": "k-symmetry", "k": 2, "l": None, "holds": True},
            {"property": "kl-anonymity", "k": 2, "l": 2, "holds": False},
        ],
    },
    "bowtie": {
        "reports": [
            {"property": "kl-anonymity", "k": 2, "l": 1, "holds": True},
            {"property": "k-symmetry", "k": 2, "l": None, "holds": False},
        ],
        "max_k_degree": 1,
    },
    "uneven_barbell": {
        "reports": [
            {"property": "k-symmetry", "k": 2, "l": None, "holds": False},
            {"property": "kl-anonymity", "k": 2, "l": 2, "holds": False},
        ],
        "max_attack_success": {"l": 2, "at_most": "1/2"},
    },
    "double_broom": {
        "reports": [
            {"property": "k-automorphism", "k": 2, "l": None, "holds": True},
        ],
        "max_k_degree": 1,
    },
}


def write_fixtures(out_dir: str | os.PathLike) -> list[str]:
    """Write the four graphs as edge-list files plus expectations.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in FIXTURES.items():
        path = out / f"{name}.el"
        save_edge_list(build(), path, header=name)
        written.append(str(path))
    expect_path = out / "expectations.json"
    expect_path.write_text(json.dumps(EXPECTED, indent=2) + "\n", encoding="utf-8")
    written.append(str(expect_path))
    return written
