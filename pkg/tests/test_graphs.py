"""Graph builders and meeting-chain reductions."""

import numpy as np
import pytest

from eoe import graphs
from eoe.graphs import (
    build_bipartite,
    build_complete,
    build_generic,
    build_ring,
    meeting_chain,
    pair_class,
    parse_graph_spec,
)
from eoe.oracle import exact_pmf_N


def as_generic(g):
    return build_generic(g.n, g.edges(), edge_transitive=True)


class TestBuilders:
    def test_complete_triangle(self):
        g = build_complete(3)
        assert [g.degree(v) for v in range(3)] == [2, 2, 2]

    def test_complete_edge(self):
        g = build_complete(2)
        assert g.edges() == [(0, 1)]

    def test_complete_ten(self):
        g = build_complete(10)
        assert len(g.edges()) == 45  # n(n-1)/2
        assert all(g.degree(v) == 9 for v in range(10))

    def test_complete_too_small(self):
        with pytest.raises(ValueError):
            build_complete(1)

    def test_star(self):
        g = build_bipartite(1, 5)
        assert g.degree(0) == 4
        assert all(g.degree(v) == 1 for v in range(1, 5))

    def test_bipartite_edge_counts(self):
        assert len(build_bipartite(2, 6).edges()) == 8
        g = build_bipartite(3, 6)
        assert len(g.edges()) == 9
        assert all(g.degree(v) == 3 for v in range(6))

    def test_bipartite_bad_partition(self):
        with pytest.raises(ValueError):
            build_bipartite(0, 4)
        with pytest.raises(ValueError):
            build_bipartite(4, 4)

    def test_ring(self):
        g = build_ring(4)
        assert all(g.degree(v) == 2 for v in range(4))
        chain = meeting_chain(build_ring(6))
        assert chain.n_states == 4  # distances 0..3

    def test_ring_odd_accepted(self):
        g = build_ring(5)
        assert g.n == 5
        meeting_chain(g)  # generic handling; closed form rejected in transforms

    def test_ring_too_small(self):
        with pytest.raises(ValueError):
            build_ring(2)

    def test_generic_validation(self):
        with pytest.raises(ValueError):
            build_generic(3, [(0, 1)])  # disconnected
        with pytest.raises(ValueError):
            build_generic(2, [(0, 0)])  # self-loop

    def test_parse_specs(self):
        assert parse_graph_spec("complete:5").family == "complete"
        g = parse_graph_spec("bipartite:2:6")
        assert (g.m, g.n) == (2, 6)
        assert parse_graph_spec("ring:8").n == 8
        with pytest.raises(ValueError):
            parse_graph_spec("torus:4")

    def test_edge_list_roundtrip(self, tmp_path):
        path = tmp_path / "edges.txt"
        path.write_text("0 1\n1 2\n2 0\n")
        g = parse_graph_spec(f"generic:{path}")
        assert g.n == 3 and len(g.edges()) == 3


class TestMeetingChain:
    def test_rows_sum_to_one(self):
        for g in (build_complete(7), build_bipartite(2, 6), build_ring(9),
                  as_generic(build_ring(6))):
            k = meeting_chain(g).kernel
            assert np.abs(k.sum(axis=1) - 1.0).max() <= 1e-14

    def test_complete_meet_probability(self):
        # the jumping walker picks among n-1 vertices
        for n in (2, 3, 7, 12):
            chain = meeting_chain(build_complete(n))
            assert chain.kernel[chain.start, chain.met] == pytest.approx(
                1.0 / (n - 1), abs=1e-15)

    def test_bipartite_branches(self):
        chain = meeting_chain(build_bipartite(2, 6))
        p = 0.5 * (1 / 2 + 1 / 4)
        assert chain.kernel[1, 0] == pytest.approx(p, abs=1e-15)
        assert chain.kernel[1, 2] == pytest.approx(1 - p, abs=1e-15)
        assert chain.kernel[2, 1] == 1.0

    def test_ring_even_antipodal_moves_down(self):
        chain = meeting_chain(build_ring(8))
        assert chain.kernel[4, 3] == 1.0
        assert chain.kernel[2, 1] == chain.kernel[2, 3] == 0.5

    def test_ring_odd_antipodal_self_loop(self):
        chain = meeting_chain(build_ring(7))
        assert chain.kernel[3, 3] == 0.5
        assert chain.kernel[3, 2] == 0.5

    def test_met_absorbing(self):
        chain = meeting_chain(build_bipartite(1, 4))
        row = chain.kernel[chain.met]
        assert row[chain.met] == 1.0 and row.sum() == 1.0

    def test_pair_class(self):
        g = build_ring(8)
        assert pair_class(g, 0, 1) == 1
        assert pair_class(g, 0, 4) == 4
        assert pair_class(g, 7, 0) == 1
        gb = build_bipartite(2, 5)
        assert pair_class(gb, 0, 1) == 2  # same side
        assert pair_class(gb, 0, 3) == 1

    def test_generic_start_must_be_edge(self):
        g = as_generic(build_ring(6))
        with pytest.raises(ValueError):
            meeting_chain(g, start_pair=(0, 2))


class TestFamilyGenericEquivalence:
    @pytest.mark.parametrize("g", [
        build_complete(5), build_complete(12), build_bipartite(1, 6),
        build_bipartite(2, 7), build_bipartite(3, 9), build_ring(8),
        build_ring(12), build_ring(7),
    ], ids=lambda g: g.spec_string())
    def test_jump_count_law_matches_pair_chain(self, g):
        fam, fam_tail = exact_pmf_N(meeting_chain(g), 200)
        gen, gen_tail = exact_pmf_N(meeting_chain(as_generic(g)), 200)
        assert 0.5 * np.abs(fam - gen).sum() <= 1e-12
        assert abs(fam_tail - gen_tail) <= 1e-12

    @pytest.mark.parametrize("g", [
        build_complete(5), build_ring(7), build_bipartite(2, 5), build_bipartite(1, 6),
    ], ids=lambda g: g.spec_string())
    def test_start_edge_irrelevant(self, g):
        gg = as_generic(g)
        ref = None
        for edge in gg.edges():
            pmf, _ = exact_pmf_N(meeting_chain(gg, start_pair=edge), 120)
            if ref is None:
                ref = pmf
            else:
                assert np.abs(pmf - ref).max() <= 1e-12

    def test_mass_conservation(self):
        for g in (build_complete(6), build_ring(10), build_bipartite(2, 8)):
            pmf, tail = exact_pmf_N(meeting_chain(g), 300)
            assert pmf.sum() + tail == pytest.approx(1.0, abs=1e-12)
