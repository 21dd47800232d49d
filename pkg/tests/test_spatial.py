import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import gauss_seidel_cournot, reference_profits
from collabnet import fivefirm
from collabnet.costs import LinearCost, ShiftedConvexCost
from collabnet.cournot import AspatialMarket, cournot_quantities
from collabnet.errors import GraphError
from collabnet.graphs import CollaborationGraph, enumerate_graphs, enumerate_realizations
from collabnet.spatial import (
    SpatialMarket, batch_profits, spatial_condition, spatial_deviation_delta, spatial_quantities,
)
from collabnet.vi import equilibrium_vi


def test_five_firm_node_demand(five_market, five_cost):
    out = spatial_quantities(five_market, five_cost, fivefirm.FIGURE_1)
    # (103 - 5 - 1 - 2) / 6 at every node for every firm
    assert np.allclose(out.demands, 95 / 6, atol=1e-12)
    assert out.demands.shape == (3, 5)
    ref = gauss_seidel_cournot(five_market.alpha, five_cost.marginal_costs(fivefirm.FIGURE_1.degrees()),
                               five_market.shipping)
    assert np.allclose(ref, 95 / 6, atol=1e-12)
    assert np.allclose(out.profits, 3 * (95 / 6) ** 2, rtol=1e-12)


def test_single_node_zero_shipping_reduces_exactly():
    cost = ShiftedConvexCost.quadratic(5, 2, fivefirm.K)
    spatial = SpatialMarket.uniform(103, 0, 1, 5)
    aspatial = AspatialMarket(103, 5)
    for g in enumerate_realizations(fivefirm.K):
        a = cournot_quantities(aspatial, cost, g)
        s = spatial_quantities(spatial, cost, g)
        assert np.array_equal(s.demands[0], a.quantities)
        assert np.array_equal(s.profits, a.profits)
    for g in enumerate_graphs(4):
        lin, one = LinearCost(3, 0.5), SpatialMarket.uniform(20, 0, 1, 4)
        assert np.array_equal(spatial_quantities(one, lin, g).demands[0],
                              cournot_quantities(AspatialMarket(20, 4), lin, g).quantities)


def test_two_node_duopoly():
    market = SpatialMarket(np.array([10.0, 20.0]), np.zeros((2, 2)))
    out = spatial_quantities(market, ShiftedConvexCost.named("zero", [0, 0]), CollaborationGraph.empty(2))
    assert np.allclose(out.demands[0], 10 / 3) and np.allclose(out.demands[1], 20 / 3)
    assert np.allclose(out.prices, [10 / 3, 20 / 3])


def test_heterogeneous_shipping_matches_reference():
    rng = np.random.default_rng(3)
    alpha = rng.uniform(60, 90, 4)
    shipping = rng.uniform(0, 3, (4, 5))
    market = SpatialMarket(alpha, shipping)
    cost = LinearCost(4, 0.7)
    for g in [fivefirm.FIGURE_1, CollaborationGraph.empty(5), CollaborationGraph.complete(5)]:
        out = spatial_quantities(market, cost, g)
        c = cost.marginal_costs(g.degrees())
        ref = gauss_seidel_cournot(alpha, c, shipping)
        assert np.allclose(out.demands, ref, atol=1e-10)
        assert np.allclose(out.profits, reference_profits(alpha, c, shipping, ref), rtol=1e-10)


def test_condition_five_firm(five_market, five_cost):
    res = spatial_condition(five_market, five_cost)
    # 103 - 5 - 5*(1 + 18) - (1/2)*4*1
    assert res.value == 1.0 and res.holds
    assert not res.notes


def test_condition_large_shipping(five_cost):
    res = spatial_condition(fivefirm.market(shipping=2), five_cost)
    assert res.value == -4.0 and not res.holds


def test_condition_reduces_without_shipping(five_cost):
    from collabnet.cournot import aspatial_condition
    spatial = spatial_condition(SpatialMarket.uniform(103, 0, 3, 5), five_cost)
    assert spatial.value == aspatial_condition(AspatialMarket(103, 5), five_cost).value


def test_condition_heterogeneous_alpha(five_cost):
    market = SpatialMarket(np.array([103.0, 110.0, 120.0]), np.ones((3, 5)))
    res = spatial_condition(market, five_cost)
    assert res.value == 1.0
    assert any("min alpha" in note for note in res.notes)


def test_node_drop_delta(five_market, five_cost):
    res = spatial_deviation_delta(five_market, five_cost, fivefirm.FIGURE_1, 1, 2, "drop")
    # -(4/6) * (2*95/6 - 4/6) per node
    assert np.allclose(res.node_deltas, -62 / 3, rtol=1e-12)
    assert res.delta == pytest.approx(-62.0, rel=1e-12)
    h = fivefirm.FIGURE_1.drop_link(1, 2)
    c = five_cost.marginal_costs(h.degrees())
    ref = gauss_seidel_cournot(five_market.alpha, c, five_market.shipping)
    y = reference_profits(five_market.alpha, c, five_market.shipping, ref)
    assert res.delta == pytest.approx(y[1] - 3 * (95 / 6) ** 2, rel=1e-9)
    assert np.allclose(res.after, ref, atol=1e-10)


def test_spatial_deviation_errors(five_market, five_cost):
    with pytest.raises(GraphError):
        spatial_deviation_delta(five_market, five_cost, fivefirm.FIGURE_1, 0, 1, "add")
    with pytest.raises(GraphError):
        spatial_quantities(five_market, five_cost, CollaborationGraph.empty(4))


@st.composite
def spatial_instances(draw, max_n=6, max_v=4):
    n = draw(st.integers(2, max_n))
    v = draw(st.integers(1, max_v))
    k = draw(st.sampled_from(sorted({tuple(g.degrees()) for g in enumerate_graphs(min(n, 5))}))) if n <= 5 else \
        tuple(draw(st.sampled_from([[1] * 6, [2] * 6, [3] * 6, [5, 1, 1, 1, 1, 1], [2, 2, 2, 2, 1, 1]])))
    scale = draw(st.floats(0.1, 3))
    cost = ShiftedConvexCost.quadratic(draw(st.floats(0, 10)), draw(st.floats(0, 5)), k, scale)
    shipping = np.array(draw(st.lists(st.floats(0, 3), min_size=v * n, max_size=v * n))).reshape(v, n)
    base = cost.gamma0 + n * (shipping.max() + cost.f(n - 1)) + 0.5 * (n - 1) * scale
    alpha = base + np.array(draw(st.lists(st.floats(0.01, 40), min_size=v, max_size=v)))
    return SpatialMarket(alpha, shipping), cost


@settings(max_examples=40, deadline=None)
@given(inst=spatial_instances())
def test_condition_gives_nonnegative_demands_everywhere(inst):
    market, cost = inst
    n = market.n
    assert spatial_condition(market, cost).holds
    degrees = np.array([g.degrees() for g in enumerate_graphs(n)])
    d, _ = batch_profits(market, cost, degrees)
    assert d.min() >= 0


@settings(max_examples=25, deadline=None)
@given(inst=spatial_instances(max_n=5))
def test_spatial_deltas_negative_and_exact(inst):
    market, cost = inst
    for g in enumerate_realizations(cost.k):
        base = spatial_quantities(market, cost, g).profits
        for (i, j), direction in [(e, "drop") for e in g.sorted_edges()] + [(e, "add") for e in g.non_edges()]:
            h = g.drop_link(i, j) if direction == "drop" else g.add_link(i, j)
            direct = spatial_quantities(market, cost, h).profits - base
            for a, b in ((i, j), (j, i)):
                d = spatial_deviation_delta(market, cost, g, a, b, direction).delta
                assert d < 0
                assert abs(d - direct[a]) <= 1e-9 * max(1.0, abs(direct[a]))


def test_nodes_decouple(five_market, five_cost):
    # the joint multi-node solve agrees with independent per-node solves
    for g in (fivefirm.FIGURE_1, fivefirm.FIGURE_2, CollaborationGraph.empty(5)):
        closed = spatial_quantities(five_market, five_cost, g)
        joint, sol = equilibrium_vi(five_market, five_cost, g)
        assert np.allclose(joint.demands, closed.demands, atol=1e-8)
        for l in range(five_market.v):
            single = SpatialMarket(five_market.alpha[l:l + 1], five_market.shipping[l:l + 1])
            assert np.array_equal(spatial_quantities(single, five_cost, g).demands[0], closed.demands[l])


def test_batch_matches_single(five_market, five_cost):
    graphs = list(enumerate_graphs(4))
    market = fivefirm.market(n=4)
    cost = ShiftedConvexCost.quadratic(5, 2, [1, 2, 2, 1])
    d, y = batch_profits(market, cost, np.array([g.degrees() for g in graphs]))
    for row, g in enumerate(graphs):
        out = spatial_quantities(market, cost, g)
        assert np.allclose(d[row], out.demands, rtol=1e-14)
        assert np.allclose(y[row], out.profits, rtol=1e-12)


def test_outcome_export(five_market, five_cost):
    out = spatial_quantities(five_market, five_cost, fivefirm.FIGURE_1)
    lines = out.to_csv().splitlines()
    assert lines[0] == "node,firm,d,P_l,y"
    assert len(lines) == 1 + 15
    doc = json.loads(out.to_json())
    assert doc["path"] == "closed_form"
    assert len(doc["prices"]) == 3


def test_market_validation():
    with pytest.raises(ValueError):
        SpatialMarket(np.array([10.0]), -np.ones((1, 2)))
    with pytest.raises(ValueError):
        SpatialMarket(np.array([10.0, 5.0]), np.zeros((1, 2)))
    m = fivefirm.market()
    with pytest.raises(ValueError):
        m.alpha[0] = 1.0
