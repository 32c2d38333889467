"""Graph anonymisation laboratory.

Defends social graphs against sybil-based re-identification by enforcing
k-symmetry through vertex alignment tables, and measures the defence with
a reconstructed robust attack plus an exact brute-force adversary oracle.
"""

from anonlab.graph import Graph, load_edge_list, save_edge_list

__all__ = ["Graph", "load_edge_list", "save_edge_list"]
