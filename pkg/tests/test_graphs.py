from __future__ import annotations

import math

import pytest

from spreadlab.graphs import (
    Graph,
    JoinSpec,
    brute_force_max_spread,
    build_join,
    check_lemma21,
    clique_join_spread,
    complete_bipartite,
    cycle,
    ellipse_deviation,
    is_threshold,
    join_spread_formula,
    kpq_ellipse_deviation,
    threshold_graph,
    threshold_sequences,
)


def test_from_edges_and_degrees():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert g.m == 3
    assert g.degrees() == (2, 2, 1, 1)
    assert g.is_connected()
    assert not Graph.from_edges(4, [(0, 1)]).is_connected()


def test_rejects_loops_and_bad_vertices():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 5)])


def test_cycle_spreads():
    assert cycle(6).spread() == pytest.approx(4.0, abs=1e-12)
    # odd cycles miss -2
    assert cycle(5).spread() == pytest.approx(2 - 2 * math.cos(4 * math.pi / 5), abs=1e-12)


@pytest.mark.parametrize("p,q", [(1, 1), (2, 3), (4, 4), (3, 7)])
def test_complete_bipartite_spread(p, q):
    assert complete_bipartite(p, q).spread() == pytest.approx(2 * math.sqrt(p * q), abs=1e-12)


@pytest.mark.parametrize("n1,n2,n3", [(3, 0, 2), (4, 2, 3), (0, 3, 3), (5, 1, 0), (1, 0, 1), (6, 0, 4)])
def test_join_formula_matches_matrix(n1, n2, n3):
    g = build_join(JoinSpec(n1, n2, n3))
    assert join_spread_formula(n1, n2, n3) == pytest.approx(g.spread(), abs=1e-10)


@pytest.mark.parametrize("n1,n2", [(2, 1), (4, 2), (7, 3)])
def test_clique_join_closed_form(n1, n2):
    assert clique_join_spread(n1, n2) == pytest.approx(build_join(JoinSpec(n1, 0, n2)).spread(), abs=1e-10)


def test_extremal_spec():
    assert JoinSpec.extremal(9) == JoinSpec(6, 0, 3)
    assert JoinSpec.extremal(10) == JoinSpec(6, 0, 4)
    with pytest.raises(ValueError):
        JoinSpec(-1, 0, 2)


def test_threshold_sequences_are_threshold():
    for k in range(1, 7):
        seqs = threshold_sequences(k)
        assert len(seqs) == 2 ** (k - 1)
        assert all(is_threshold(threshold_graph(s)) for s in seqs)
    assert not is_threshold(cycle(4).adjacency)


def test_structure_of_extremal_join():
    rep = check_lemma21(build_join(JoinSpec.extremal(9)))
    assert rep.adjacent_violations == 0 and rep.nonadjacent_violations == 0
    assert rep.join and rep.positive_threshold and rep.negative_threshold


def test_structure_check_rejects_disconnected():
    with pytest.raises(ValueError):
        check_lemma21(Graph.from_edges(4, [(0, 1), (2, 3)]))


@pytest.mark.parametrize("p,q", [(2, 3), (3, 5), (4, 4)])
def test_kpq_ellipse_deviation(p, q):
    assert ellipse_deviation(complete_bipartite(p, q)) == pytest.approx(kpq_ellipse_deviation(p, q), abs=1e-10)


def test_regular_graph_has_zero_ellipse_deviation():
    assert ellipse_deviation(cycle(6)) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_full_and_threshold_modes_agree(n):
    full = brute_force_max_spread(n, "full")
    thr = brute_force_max_spread(n, "threshold_join")
    assert full.best_spread == pytest.approx(thr.best_spread, abs=1e-10)
    assert full.bound_violations == 0


def test_full_mode_counts_labelled_graphs():
    res = brute_force_max_spread(4, "full")
    assert res.graphs_scored == 2 ** 6


def test_brute_force_validates():
    with pytest.raises(ValueError):
        brute_force_max_spread(8, "full")
    with pytest.raises(ValueError):
        brute_force_max_spread(5, "other")
