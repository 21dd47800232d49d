"""The five-firm worked example: alpha=103, gamma0=5, unit shipping,
``f(x) = x**2 + psi`` with ``psi = 2`` and target degrees ``k = [2,3,4,3,2]``.

``k`` has exactly two labeled realizations.  Firm 2 (degree 4) links to
everyone; the remaining degrees ``[1,2,2,1]`` on firms 0,1,3,4 form a path
with ends 0 and 4, either 0-1-3-4 or 0-3-1-4.
"""

from __future__ import annotations

from .costs import ShiftedConvexCost
from .graphs import CollaborationGraph
from .spatial import SpatialMarket

ALPHA = 103.0
GAMMA0 = 5.0
SHIPPING = 1.0
PSI = 2.0
K = (2, 3, 4, 3, 2)
NODES = 3

FIGURE_1 = CollaborationGraph.from_edges(5, [(0, 2), (1, 2), (2, 3), (2, 4), (0, 1), (1, 3), (3, 4)])
FIGURE_2 = CollaborationGraph.from_edges(5, [(0, 2), (1, 2), (2, 3), (2, 4), (0, 3), (1, 3), (1, 4)])


def cost(psi: float = PSI, k=K, gamma0: float = GAMMA0) -> ShiftedConvexCost:
    return ShiftedConvexCost.quadratic(gamma0, psi, k)


def market(alpha: float = ALPHA, shipping: float = SHIPPING, nodes: int = NODES, n: int = len(K)) -> SpatialMarket:
    return SpatialMarket.uniform(alpha, shipping, nodes, n)


def scenario_doc(alpha: float = ALPHA, psi: float = PSI, k=K, nodes: int = NODES, shipping: float = SHIPPING) -> dict:
    return {
        "market": {"alpha": alpha, "shipping": shipping, "nodes": nodes, "n": len(k)},
        "cost": {"type": "shifted_convex", "gamma0": GAMMA0, "base": "quadratic_psi", "psi": psi, "k": list(k)},
        "graph": {"edges": [list(e) for e in FIGURE_1.sorted_edges()]} if tuple(k) == K else {"k": list(k)},
    }
