import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from wildarc import kernels
from wildarc.chainrec import (build_cover, chain_components, epsilon_chain_exists, transition_graph,
                              verify_lyapunov)
from wildarc.errors import DepthTooLarge, DomainEscape, EdgeBudgetExceeded


def identity(p):
    return np.asarray(p, dtype=float)


def halve(p):
    return 0.5 * np.asarray(p, dtype=float)


def north_south(p):
    # slow drift from x=-1 (repeller) to x=+1 (attractor), contraction across
    p = np.asarray(p, dtype=float)
    return np.column_stack([p[:, 0] + 0.2 * (1 - p[:, 0] ** 2), p[:, 1] / 2, p[:, 2] / 2])


def edge_keys(g):
    s, d = g.edge_array()
    return s * g.n_vertices + d


@pytest.fixture(scope="module")
def graphs0(diffeos):
    f = diffeos[0]
    return {d: transition_graph(build_cover(2.0, d), f) for d in (3, 4, 5)}


@pytest.fixture(scope="module")
def fixed0(census):
    return {r.name: r.location for r in census[0] if not r.is_north}


# ---------------------------------------------------------------- cover


def test_cover_indexing_round_trip():
    c = build_cover(2.0, 3)
    assert c.side == 8 and c.count == 512 and c.width == 0.5
    idx = np.arange(c.count)
    assert np.array_equal(c.linear(c.triples(idx)), idx)
    assert np.array_equal(c.index_of(c.center(idx)), idx)
    assert c.index_of([[2.0, 2.0, 2.0]])[0] == c.count - 1
    assert c.index_of([[2.1, 0.0, 0.0]])[0] == -1
    assert c.boundary_mask().sum() == 512 - 6 ** 3


def test_coarsen_maps_children_to_parent():
    fine, coarse = build_cover(1.0, 4), build_cover(1.0, 2)
    x = np.random.default_rng(0).uniform(-1, 1, size=(500, 3))
    assert np.array_equal(fine.coarsen(fine.index_of(x), 2), coarse.index_of(x))
    with pytest.raises(ValueError):
        coarse.coarsen([0], 3)


def test_depth_guard():
    with pytest.raises(DepthTooLarge):
        build_cover(2.0, 11)
    with pytest.raises(ValueError):
        build_cover(0.0, 3)


# ---------------------------------------------------------------- graph


def test_halved_box_is_covered():
    c = build_cover(2.0, 3)
    g = transition_graph(c, halve, with_infinity=False)
    for b in range(c.count):
        lo = c.lower_corner(b)
        if np.any(lo < 0):
            continue
        inner = c.index_of(0.5 * (lo + np.random.default_rng(b).uniform(0, c.width, size=(50, 3))))
        assert set(inner.tolist()) <= set(g.successors(b).tolist())


def test_identity_has_every_self_loop():
    g = transition_graph(build_cover(1.0, 2), identity, with_infinity=False)
    assert g.self_loops().all()
    dec = chain_components(g, merge_touching=False)
    assert dec.count == g.cover.count == 64


def test_north_south_toy_has_two_components():
    g = transition_graph(build_cover(1.0, 4), north_south, with_infinity=False)
    dec = chain_components(g)
    assert dec.count == 2
    west, east = dec.component_of([-1.0, 0, 0]), dec.component_of([1.0, 0, 0])
    assert {west, east} == {0, 1}
    assert epsilon_chain_exists(g, [-1.0, 0, 0], [1.0, 0, 0])
    assert not epsilon_chain_exists(g, [1.0, 0, 0], [-1.0, 0, 0])
    assert verify_lyapunov(dec.lyapunov, g, dec.recurrent).ok


def test_domain_escape():
    with pytest.raises(DomainEscape):
        transition_graph(build_cover(1.0, 2), lambda p: 2.0 * np.asarray(p))


def test_edge_budget():
    with pytest.raises(EdgeBudgetExceeded):
        transition_graph(build_cover(1.0, 3), identity, edge_budget=10)


def test_bad_arguments():
    c = build_cover(1.0, 2)
    with pytest.raises(ValueError):
        transition_graph(c, identity, samples_per_axis=1)
    with pytest.raises(ValueError):
        transition_graph(c, identity, padding=0.0)
    with pytest.raises(ValueError):
        transition_graph(c, identity, enclosure="interval")


def test_infinity_cell_feeds_the_boundary():
    g = transition_graph(build_cover(1.0, 2), halve)
    inf = g.inf_cell
    assert inf == 64
    assert set(g.successors(inf).tolist()) == set(np.flatnonzero(g.cover.boundary_mask()).tolist()) | {inf}


@pytest.mark.parametrize("depth", [3, 4, 5])
def test_outer_approximation_is_sound(graphs0, diffeos, depth):
    g = graphs0[depth]
    x = np.random.default_rng(depth).uniform(-2, 2, size=(100_000, 3))
    y = diffeos[0].apply(x)
    key = g.cover.index_of(x) * g.n_vertices + g.cover.index_of(y)
    assert np.isin(key, edge_keys(g)).all()


def test_same_seed_same_edges(diffeos):
    c = build_cover(2.0, 3)
    a = transition_graph(c, diffeos[0], seed=7)
    b = transition_graph(c, diffeos[0], seed=7, threads=1)
    assert np.array_equal(a.indptr, b.indptr) and np.array_equal(a.indices, b.indices)


def test_lipschitz_enclosure_is_looser(diffeos):
    c = build_cover(2.0, 3)
    hull = transition_graph(c, diffeos[0])
    lip = transition_graph(c, diffeos[0], enclosure="lipschitz")
    assert np.isin(edge_keys(hull), edge_keys(lip)).mean() > 0.99
    assert lip.n_edges >= hull.n_edges


# ---------------------------------------------------------------- decomposition


def test_scc_matches_scipy(graphs0):
    g = graphs0[4]
    dec = chain_components(g, merge_touching=False)
    s, d = g.edge_array()
    m = csr_matrix((np.ones(len(s)), (s, d)), shape=(g.n_vertices,) * 2)
    n, ref = connected_components(m, directed=True, connection="strong")
    assert int(dec.labels.max()) + 1 == n
    # same partition up to relabelling
    pairs = np.unique(np.stack([dec.labels, ref], axis=1), axis=0)
    assert len(pairs) == n


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 40), st.data())
def test_scc_on_random_graphs(n, data):
    m = data.draw(st.integers(0, 3 * n))
    src = np.array(data.draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m)), dtype=np.int64)
    dst = np.array(data.draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m)), dtype=np.int64)
    key = np.unique(src * n + dst)
    s, d = key // n, key % n
    indptr = np.concatenate([[0], np.cumsum(np.bincount(s, minlength=n))]).astype(np.int64)
    labels = kernels.strong_components(n, indptr, d.astype(np.int64))
    ref_n, ref = connected_components(csr_matrix((np.ones(len(s)), (s, d)), shape=(n, n)),
                                      directed=True, connection="strong")
    assert int(labels.max()) + 1 == ref_n
    assert len(np.unique(np.stack([labels, ref], axis=1), axis=0)) == ref_n


def test_census_at_depth_five(graphs0, fixed0):
    g = graphs0[5]
    dec = chain_components(g)
    assert dec.count == 4
    homes = [dec.component_of(p) for p in fixed0.values()]
    assert None not in homes and len(set(homes)) == 3
    inf_comp = [k for k, c in enumerate(dec.components) if g.inf_cell in c]
    assert len(inf_comp) == 1 and inf_comp[0] not in homes
    assert verify_lyapunov(dec.lyapunov, g, dec.recurrent).ok
    # the infinity cell is the unique source
    assert dec.lyapunov[g.inf_cell] == 1.0


def test_coarse_cover_over_merges(diffeos):
    g = transition_graph(build_cover(2.0, 2), diffeos[0])
    assert chain_components(g).count < 4


@pytest.mark.parametrize("fine", [4, 5])
def test_recurrent_set_refines(graphs0, fine):
    coarse_dec = chain_components(graphs0[fine - 1])
    fine_dec = chain_components(graphs0[fine])
    parents = graphs0[fine].cover.coarsen(fine_dec.recurrent_boxes(), fine - 1)
    assert np.isin(parents, coarse_dec.recurrent_boxes()).all()


def test_epsilon_chains(graphs0, fixed0):
    g = graphs0[5]
    S, sigma, omega = fixed0["S"], fixed0["sigma"], fixed0["omega"]
    assert epsilon_chain_exists(g, omega, omega)
    assert epsilon_chain_exists(g, S, S)
    for v in ([1, 0, 0], [-1, 0, 0], [0, 1, 0]):
        near = sigma + 0.02 * np.array(v)
        assert epsilon_chain_exists(g, near, S)
        assert not epsilon_chain_exists(g, S, near)
    with pytest.raises(ValueError):
        epsilon_chain_exists(g, [3.0, 0, 0], S)


def test_realized_epsilon_is_at_least_the_box_diameter(graphs0):
    for d, g in graphs0.items():
        assert g.epsilon >= g.cover.diameter


# ---------------------------------------------------------------- lyapunov check


def test_norm_squared_under_homothety():
    g = transition_graph(build_cover(2.0, 4), halve, with_infinity=False)
    dec = chain_components(g)
    assert dec.count == 1
    v = np.sum(g.cover.center(np.arange(g.cover.count)) ** 2, axis=1)
    assert verify_lyapunov(v, g, dec.recurrent).ok


def test_constant_function_is_flagged():
    g = transition_graph(build_cover(2.0, 3), halve, with_infinity=False)
    dec = chain_components(g)
    rep = verify_lyapunov(np.zeros(g.n_vertices), g, dec.recurrent)
    assert not rep.ok and not rep.increasing_edges
    assert set(rep.not_decreasing) == set(np.flatnonzero(~dec.recurrent).tolist())


def test_increasing_edge_is_reported():
    g = transition_graph(build_cover(2.0, 2), halve, with_infinity=False)
    v = -np.sum(g.cover.center(np.arange(g.cover.count)) ** 2, axis=1)
    rep = verify_lyapunov(dict(enumerate(v)), g)
    assert rep.increasing_edges and len(rep) > 0
    with pytest.raises(ValueError):
        verify_lyapunov(np.zeros(3), g)
