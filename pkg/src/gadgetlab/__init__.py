"""Desk-scale constructors and exact checkers for hypergraph-coloring
hardness gadgets: GF(2) Fourier tooling, block games and layered PCPs,
three gadget builders, biased-cube and correlated-space analysis, and
exact hypergraph oracles."""

__version__ = "0.1.0"
