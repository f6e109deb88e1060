"""The 4-uniform hypergraph over folded Hadamard-code positions.

Vertices are (block, canonical coset representative) pairs; hyperedges
come from sampled verifier triples (U, W, W') sharing a variable block.
The no-case pipeline unfolds block indicators, takes their spectra, and
builds the two prover strategies together with the quadratic-form
inequality they certify.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction


from . import gf2
from .games import (BlockGeometry, EquationBlock, Lin3Instance, VariableBlock,
                    block_geometry, sample_round)
from .verify import GenericHypergraph

MAX_ENUMERATE_R = 2


@dataclass(frozen=True)
class GadgetBlock:
    index: int
    block: EquationBlock
    geometry: BlockGeometry
    vertex_base: int
    reps: tuple[int, ...]
    rep_pos: dict[int, int] = field(compare=False, default_factory=dict)

    def vertex_id(self, x_bits: int) -> int:
        return self.vertex_base + self.rep_pos[self.geometry.subspace.reduce_bits(x_bits)]


@dataclass(frozen=True)
class Triple:
    """One verifier pairing: variable block U shared by blocks W and W'.

    Carries its own geometries: the subspace data is a property of the
    block, but the projection positions depend on this triple's U.
    """

    u: VariableBlock
    w_index: int
    wp_index: int
    geom_w: BlockGeometry
    geom_wp: BlockGeometry


@dataclass
class HadamardGadget:
    source: Lin3Instance
    r: int
    mode: str
    blocks: list[GadgetBlock]
    triples: list[Triple]
    edges_per_triple: list[list[tuple[int, int, int, int]]]
    dropped_degenerate: int
    seed: int

    @property
    def vertex_count(self) -> int:
        return sum(len(b.reps) for b in self.blocks)

    def all_edges(self) -> list[tuple[int, int, int, int]]:
        out = set()
        for edges in self.edges_per_triple:
            out.update(edges)
        return sorted(out)

    def iter_triple_edges(self, triple_index: int):
        """Raw folded hyperedges of one triple; in stream mode they are
        generated on demand, deduplicated within the triple."""
        if self.mode == "enumerate":
            yield from self.edges_per_triple[triple_index]
        else:
            seen: set[tuple[int, int, int, int]] = set()
            for edge, _ in _raw_edges(self, self.triples[triple_index]):
                if edge is not None and edge not in seen:
                    seen.add(edge)
                    yield edge

    def block_of_vertex(self, vid: int) -> GadgetBlock:
        for b in self.blocks:
            if b.vertex_base <= vid < b.vertex_base + len(b.reps):
                return b
        raise KeyError(vid)

    def to_hypergraph(self) -> GenericHypergraph:
        vertices = tuple(range(self.vertex_count))
        meta = {
            "kind": "hadamard",
            "r": self.r,
            "blocks": [list(b.block.eq_ids) for b in self.blocks],
            "triples": [
                {"u": list(t.u.var_ids), "w": t.w_index, "wp": t.wp_index}
                for t in self.triples
            ],
            "dropped_degenerate": self.dropped_degenerate,
        }
        return GenericHypergraph(4, vertices, tuple(self.all_edges()),
                                 {v: Fraction(1) for v in vertices}, meta)


def _raw_edges(g: "HadamardGadget", triple: Triple):
    """Yield (sorted folded 4-tuple or None-if-degenerate, raw choice)."""
    bw = g.blocks[triple.w_index]
    bwp = g.blocks[triple.wp_index]
    m = 3 * g.r + 1
    lift_w = [triple.geom_w.lift_bits(z) for z in range(1 << g.r)]
    lift_wp = [triple.geom_wp.lift_bits(z) for z in range(1 << g.r)]
    hw = triple.geom_w.h_w.bits
    for z in range(1, 1 << g.r):
        shift_w = lift_w[z] ^ hw
        shift_wp = lift_wp[z]
        for x in range(1 << m):
            v1 = bw.vertex_id(x)
            v2 = bw.vertex_id(x ^ shift_w)
            for y in range(1 << m):
                v3 = bwp.vertex_id(y)
                v4 = bwp.vertex_id(y ^ shift_wp)
                ids = (v1, v2, v3, v4)
                if len(set(ids)) < 4:
                    yield None, (x, y, z)
                else:
                    yield tuple(sorted(ids)), (x, y, z)


def build(inst: Lin3Instance, r: int, mode: str = "enumerate",
          triples: int = 2, seed: int = 0, distinct_blocks: bool = False,
          budget: int = 10**6) -> HadamardGadget:
    """Instantiate a gadget from sampled verifier triples.

    Each triple is a round (W, U) plus a second block W' drawn uniformly
    among blocks whose i-th equation contains the i-th variable of U.
    Raw hyperedges touching fewer than 4 distinct folded positions are
    dropped and counted.
    """
    if mode not in ("enumerate", "stream"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "enumerate" and r > MAX_ENUMERATE_R:
        raise ValueError(f"enumerate mode caps r at {MAX_ENUMERATE_R}, got {r}")
    rng = random.Random(seed)
    eq_with_var: dict[int, list[int]] = {}
    for ei, (i, j, k, _) in enumerate(inst.equations):
        for v in (i, j, k):
            eq_with_var.setdefault(v, []).append(ei)

    blocks: list[GadgetBlock] = []
    block_index: dict[tuple[int, ...], int] = {}

    def register(block: EquationBlock, picks: VariableBlock) -> int:
        key = block.eq_ids
        if key in block_index:
            return block_index[key]
        geom = block_geometry(block, picks, inst)
        base = sum(len(b.reps) for b in blocks)
        reps = tuple(v.bits for v in geom.subspace.coset_reps())
        gb = GadgetBlock(len(blocks), block, geom, base, reps,
                         {rep: t for t, rep in enumerate(reps)})
        blocks.append(gb)
        block_index[key] = gb.index
        return gb.index

    triple_list: list[Triple] = []
    for _ in range(triples):
        for _attempt in range(budget):
            w_block, picks = sample_round(inst, r, rng, budget=budget)
            wp_ids = tuple(rng.choice(eq_with_var[v]) for v in picks.var_ids)
            seen: set[int] = set()
            ok = True
            for e in wp_ids:
                i, j, k, _ = inst.equations[e]
                if i in seen or j in seen or k in seen:
                    ok = False
                    break
                seen.update((i, j, k))
            if not ok:
                continue
            if distinct_blocks and wp_ids == w_block.eq_ids:
                continue
            wp_block = EquationBlock.from_instance(inst, wp_ids)
            wp_picks = VariableBlock(r, picks.var_ids)
            wi = register(w_block, picks)
            wpi = register(wp_block, wp_picks)
            triple_list.append(Triple(
                picks, wi, wpi,
                block_geometry(w_block, picks, inst),
                block_geometry(wp_block, wp_picks, inst),
            ))
            break
        else:
            raise RuntimeError("could not sample a consistent W' within budget")

    gadget = HadamardGadget(inst, r, mode, blocks, triple_list, [], 0, seed)
    dropped = 0
    if mode == "enumerate":
        for triple in triple_list:
            seen_edges: set[tuple[int, int, int, int]] = set()
            for edge, _raw in _raw_edges(gadget, triple):
                if edge is None:
                    dropped += 1
                else:
                    seen_edges.add(edge)
            gadget.edges_per_triple.append(sorted(seen_edges))
    gadget.dropped_degenerate = dropped
    return gadget


@dataclass
class YesColoringResult:
    colors: dict[int, int]
    removed: frozenset[int]
    good_blocks: list[int]
    checked_edges: int
    surviving_edges: int
    violations: list[tuple[int, int, int, int]]

    @property
    def ok(self) -> bool:
        return not self.violations


def yes_coloring(g: HadamardGadget, sigma) -> YesColoringResult:
    """Color good-block positions by the folded planted-code value and
    certify the four-term parity on every surviving hyperedge."""
    sigma = list(sigma)
    if len(sigma) != g.source.n:
        raise ValueError("assignment must cover all instance variables")
    colors: dict[int, int] = {}
    removed: set[int] = set()
    good: list[int] = []
    for gb in g.blocks:
        block_ok = all(
            sigma[gb.block.var_order[3 * t]] ^ sigma[gb.block.var_order[3 * t + 1]]
            ^ sigma[gb.block.var_order[3 * t + 2]] == gb.block.rhs[t]
            for t in range(g.r)
        )
        if block_ok:
            good.append(gb.index)
            code = 0
            for pos, var in enumerate(gb.block.var_order):
                code |= sigma[var] << pos
            code |= 1 << (3 * g.r)
            for t, rep in enumerate(gb.reps):
                colors[gb.vertex_base + t] = gf2.dot_bits(code, rep)
        else:
            removed.update(range(gb.vertex_base, gb.vertex_base + len(gb.reps)))

    checked = 0
    surviving = 0
    violations: list[tuple[int, int, int, int]] = []
    for ti in range(len(g.triples)):
        for edge in g.iter_triple_edges(ti):
            checked += 1
            if any(v in removed for v in edge):
                continue
            surviving += 1
            parity = colors[edge[0]] ^ colors[edge[1]] ^ colors[edge[2]] ^ colors[edge[3]]
            if parity != 1:
                violations.append(edge)
    return YesColoringResult(colors, frozenset(removed), good, checked, surviving, violations)


@dataclass
class ProverStrategy:
    """Distribution over admissible characters with its unrenormalized mass."""

    support: dict[int, float]
    admissible_mass: float
    deficit: float

    @property
    def defined(self) -> bool:
        return bool(self.support)

    def probabilities(self) -> dict[int, float]:
        if not self.support:
            raise ValueError("strategy has empty support")
        return {a: m / self.admissible_mass for a, m in self.support.items()}


@dataclass
class StrategyReport:
    prover2: ProverStrategy
    prover1: ProverStrategy
    lhs: float
    rhs: float
    holds: bool
    independent_on_triple: bool
    spectrum_w: gf2.FourierSpectrum
    spectrum_wp: gf2.FourierSpectrum


def _indicator_table(g: HadamardGadget, gb: GadgetBlock, indicator: set[int]) -> gf2.RealTable:
    folded = {
        rep: 1.0 if gb.vertex_base + t in indicator else 0.0
        for t, rep in enumerate(gb.reps)
    }
    return gf2.unfold(gf2.FoldedTable(gb.geometry.subspace, folded))


def extract_strategies(g: HadamardGadget, indicator, triple_index: int) -> StrategyReport:
    """Spectra of the unfolded block indicators, the two prover
    strategies, and both sides of the quadratic-form inequality."""
    indicator = set(indicator)
    triple = g.triples[triple_index]
    bw = g.blocks[triple.w_index]
    bwp = g.blocks[triple.wp_index]
    table_a = _indicator_table(g, bw, indicator)
    table_b = _indicator_table(g, bwp, indicator)
    spec_a = gf2.fourier_transform(table_a)
    spec_b = gf2.fourier_transform(table_b)
    hw = triple.geom_w.h_w.bits

    support2 = {
        a: float(spec_a.coeffs[a] ** 2)
        for a in spec_a.support()
        if gf2.dot_bits(a, hw) == 1
    }
    mass2 = sum(support2.values())
    prover2 = ProverStrategy(support2, mass2, 1.0 - mass2)
    support1 = {b: float(spec_b.coeffs[b] ** 2) for b in spec_b.support()}
    mass1 = sum(support1.values())
    prover1 = ProverStrategy(support1, mass1, 1.0 - mass1)

    by_proj: dict[int, float] = {}
    for b in spec_b.support():
        pb = triple.geom_wp.project_bits(b)
        by_proj[pb] = by_proj.get(pb, 0.0) + float(spec_b.coeffs[b] ** 2)
    lhs = 0.0
    for a, mass in support2.items():
        lhs += mass * by_proj.get(triple.geom_w.project_bits(a), 0.0)
    rhs = float(spec_a.coeffs[0] ** 2 * spec_b.coeffs[0] ** 2) - 2.0 ** (-g.r)

    independent = True
    for edge in g.iter_triple_edges(triple_index):
        if all(v in indicator for v in edge):
            independent = False
            break
    return StrategyReport(prover2, prover1, lhs, rhs, lhs >= rhs - 1e-10,
                          independent, spec_a, spec_b)


def z_average_identity(spec_a: gf2.FourierSpectrum, spec_b: gf2.FourierSpectrum,
                       geom_w: BlockGeometry, geom_wp: BlockGeometry,
                       x_bits: int, y_bits: int) -> tuple[float, float]:
    """Both sides of the z-averaging step: the projection-matched
    character sum against the plain average over all shifts z.
    """
    table_a = gf2.inverse_fourier_transform(spec_a)
    table_b = gf2.inverse_fourier_transform(spec_b)
    hw = geom_w.h_w.bits
    r = geom_w.r
    spectral = 0.0
    by_proj: dict[int, float] = {}
    for b in spec_b.support():
        pb = geom_wp.project_bits(b)
        by_proj[pb] = by_proj.get(pb, 0.0) + float(spec_b.coeffs[b]) * gf2.chi(b, y_bits)
    for a in spec_a.support():
        term = float(spec_a.coeffs[a]) * gf2.chi(a, x_bits) * gf2.chi(a, hw)
        spectral += term * by_proj.get(geom_w.project_bits(a), 0.0)
    averaged = 0.0
    for z in range(1 << r):
        averaged += (table_a[x_bits ^ geom_w.lift_bits(z) ^ hw]
                     * table_b[y_bits ^ geom_wp.lift_bits(z)])
    averaged /= 1 << r
    return spectral, averaged
