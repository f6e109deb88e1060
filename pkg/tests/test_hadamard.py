"""Folded Hadamard-code gadget: build, YES coloring, NO pipeline."""
import random

import pytest

from gadgetlab import games, gf2, hadamard, verify


@pytest.fixture(scope="module")
def planted():
    inst, sigma = games.gen_3lin(10, 10, 4)
    return inst, sigma


@pytest.fixture(scope="module")
def gadget(planted):
    inst, _ = planted
    return hadamard.build(inst, r=1, triples=2, seed=11)


@pytest.fixture(scope="module")
def one_triple(planted):
    inst, _ = planted
    return hadamard.build(inst, r=1, triples=1, seed=3, distinct_blocks=True)


class TestBuild:
    def test_raw_choice_count_r1(self, one_triple):
        raw = list(hadamard._raw_edges(one_triple, one_triple.triples[0]))
        assert len(raw) == 16 * 16 * 1

    def test_vertices_per_block(self, gadget):
        for b in gadget.blocks:
            assert len(b.reps) == 2 ** (2 * gadget.r + 1)

    def test_edges_have_four_distinct_vertices(self, gadget):
        for edge in gadget.all_edges():
            assert len(set(edge)) == 4

    def test_degenerate_raw_edges_counted(self, gadget):
        kept = sum(len(set(e)) for e in gadget.all_edges())
        assert gadget.dropped_degenerate >= 0
        assert kept > 0

    def test_enumerate_r_cap(self, planted):
        inst, _ = planted
        with pytest.raises(ValueError, match="caps r"):
            hadamard.build(inst, r=3, triples=1)

    def test_stream_mode_matches_enumerate(self, planted):
        inst, _ = planted
        enum = hadamard.build(inst, r=1, triples=1, seed=5)
        stream = hadamard.build(inst, r=1, triples=1, seed=5, mode="stream")
        assert sorted(stream.iter_triple_edges(0)) == enum.edges_per_triple[0]

    def test_deterministic_under_seed(self, planted):
        inst, _ = planted
        a = hadamard.build(inst, r=1, triples=2, seed=7)
        b = hadamard.build(inst, r=1, triples=2, seed=7)
        assert a.all_edges() == b.all_edges()

    def test_shared_block_keeps_per_triple_projections(self):
        # one equation forces every triple onto the same block while the
        # sampled variable blocks differ; each triple's edges must follow
        # its own projection, not the block's first registration
        inst = games.Lin3Instance(3, ((0, 1, 2, 1),))
        gadget = hadamard.build(inst, r=1, triples=6, seed=2)
        assert len(gadget.blocks) == 1
        assert len({t.u.var_ids for t in gadget.triples}) > 1
        for ti, triple in enumerate(gadget.triples):
            bw = gadget.blocks[triple.w_index]
            bwp = gadget.blocks[triple.wp_index]
            geom_w = games.block_geometry(bw.block, triple.u, inst)
            geom_wp = games.block_geometry(bwp.block, triple.u, inst)
            expected = set()
            for z in range(1, 2):
                shift_w = geom_w.lift_bits(z) ^ geom_w.h_w.bits
                shift_wp = geom_wp.lift_bits(z)
                for x in range(16):
                    for y in range(16):
                        ids = (bw.vertex_id(x), bw.vertex_id(x ^ shift_w),
                               bwp.vertex_id(y), bwp.vertex_id(y ^ shift_wp))
                        if len(set(ids)) == 4:
                            expected.add(tuple(sorted(ids)))
            assert set(gadget.iter_triple_edges(ti)) == expected

    def test_export_round_trip(self, gadget):
        h = gadget.to_hypergraph()
        again = verify.GenericHypergraph.from_json_dict(h.to_json_dict())
        assert again == h
        assert len(h.to_edge_list().splitlines()) == len(h.edges)


class TestYesColoring:
    def test_planted_removes_nothing_and_parity_holds(self, gadget, planted):
        _, sigma = planted
        res = hadamard.yes_coloring(gadget, sigma)
        assert res.removed == frozenset()
        assert res.violations == []
        assert res.surviving_edges == res.checked_edges > 0

    def test_every_surviving_edge_bichromatic(self, gadget, planted):
        _, sigma = planted
        res = hadamard.yes_coloring(gadget, sigma)
        for edge in gadget.all_edges():
            colors = [res.colors[v] for v in edge]
            assert colors[0] ^ colors[1] ^ colors[2] ^ colors[3] == 1
            assert len(set(colors)) == 2

    def test_bad_block_vertices_all_removed(self, gadget, planted):
        inst, sigma = planted
        bad = list(sigma)
        touched = gadget.blocks[0].block.var_order[0]
        bad[touched] ^= 1
        res = hadamard.yes_coloring(gadget, bad)
        for gb in gadget.blocks:
            good = all(
                bad[gb.block.var_order[3 * t]] ^ bad[gb.block.var_order[3 * t + 1]]
                ^ bad[gb.block.var_order[3 * t + 2]] == gb.block.rhs[t]
                for t in range(gadget.r)
            )
            ids = set(range(gb.vertex_base, gb.vertex_base + len(gb.reps)))
            if good:
                assert not ids & res.removed
            else:
                assert ids <= res.removed

    def test_assignment_length_checked(self, gadget):
        with pytest.raises(ValueError):
            hadamard.yes_coloring(gadget, [0, 1])


class TestExtractStrategies:
    def test_empty_indicator(self, one_triple):
        rep = hadamard.extract_strategies(one_triple, set(), 0)
        assert rep.lhs == 0.0
        assert rep.rhs == -2.0 ** (-one_triple.r)
        assert rep.holds
        assert not rep.prover2.defined

    def test_full_indicator_flagged_dependent(self, one_triple):
        rep = hadamard.extract_strategies(one_triple, set(range(one_triple.vertex_count)), 0)
        assert not rep.independent_on_triple
        assert rep.lhs >= 0.0

    def test_max_independent_set_satisfies_eq7(self, one_triple):
        h = one_triple.to_hypergraph()
        res = verify.max_independent_set(h)
        assert res.optimal
        rep = hadamard.extract_strategies(one_triple, res.vertices, 0)
        assert rep.independent_on_triple
        assert rep.lhs >= rep.rhs - 1e-10

    def test_independence_product_law_exhaustive(self, one_triple):
        h = one_triple.to_hypergraph()
        res = verify.max_independent_set(h)
        ind = res.vertices
        for edge in one_triple.iter_triple_edges(0):
            prod = 1
            for v in edge:
                prod *= 1 if v in ind else 0
            assert prod == 0

    def test_prover2_support_satisfies_block(self, one_triple, planted):
        inst, _ = planted
        rng = random.Random(10)
        indicator = {v for v in range(one_triple.vertex_count) if rng.random() < 0.5}
        rep = hadamard.extract_strategies(one_triple, indicator, 0)
        bw = one_triple.blocks[one_triple.triples[0].w_index]
        for alpha in rep.prover2.support:
            assert gf2.dot_bits(alpha, bw.geometry.h_w.bits) == 1
            bits = [(alpha >> i) & 1 for i in range(3 * one_triple.r)]
            for t in range(one_triple.r):
                assert bits[3 * t] ^ bits[3 * t + 1] ^ bits[3 * t + 2] == bw.block.rhs[t]

    def test_renormalized_probabilities(self, one_triple):
        rng = random.Random(12)
        indicator = {v for v in range(one_triple.vertex_count) if rng.random() < 0.7}
        rep = hadamard.extract_strategies(one_triple, indicator, 0)
        if rep.prover2.defined:
            assert sum(rep.prover2.probabilities().values()) == pytest.approx(1.0)
        assert rep.prover1.deficit == pytest.approx(1.0 - rep.prover1.admissible_mass)

    def test_block_spectra_obey_folding_lemma(self, one_triple):
        rng = random.Random(14)
        indicator = {v for v in range(one_triple.vertex_count) if rng.random() < 0.4}
        rep = hadamard.extract_strategies(one_triple, indicator, 0)
        bw = one_triple.blocks[one_triple.triples[0].w_index]
        bwp = one_triple.blocks[one_triple.triples[0].wp_index]
        for spec, sub in ((rep.spectrum_w, bw.geometry.subspace),
                          (rep.spectrum_wp, bwp.geometry.subspace)):
            for alpha in spec.support():
                for b in sub.basis:
                    assert gf2.dot_bits(alpha, b.bits) == 0


class TestZAveraging:
    def test_identity_on_random_folded_tables(self, one_triple):
        rng = random.Random(77)
        bw = one_triple.blocks[one_triple.triples[0].w_index]
        bwp = one_triple.blocks[one_triple.triples[0].wp_index]
        for _ in range(10):
            ta = gf2.unfold(gf2.FoldedTable(
                bw.geometry.subspace,
                {r.bits: rng.uniform(-1, 1) for r in bw.geometry.subspace.coset_reps()}))
            tb = gf2.unfold(gf2.FoldedTable(
                bwp.geometry.subspace,
                {r.bits: rng.uniform(-1, 1) for r in bwp.geometry.subspace.coset_reps()}))
            sa = gf2.fourier_transform(ta)
            sb = gf2.fourier_transform(tb)
            x = rng.randrange(16)
            y = rng.randrange(16)
            lhs, rhs = hadamard.z_average_identity(sa, sb, bw.geometry, bwp.geometry, x, y)
            assert lhs == pytest.approx(rhs, abs=1e-10)
