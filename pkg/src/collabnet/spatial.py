"""Spatially separated markets.

Each transport node ``l`` has inverse demand ``alpha_l - D_l`` and firm ``i``
pays ``s_li`` per unit shipped there.  With constant marginal production
cost the firms' problems decouple by node, so each node is an independent
Cournot oligopoly with ``a = alpha_l - gamma0`` and ``b_i = s_li + f_i``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .costs import ShiftedConvexCost, _require_constant
from .cournot import _check_deviation, _condition, ConditionResult, closed_form, profit_change, shifted_quantities
from .errors import GraphError
from .graphs import CollaborationGraph


@dataclass(frozen=True, eq=False)
class SpatialMarket:
    """``alpha`` has shape ``(v,)``; ``shipping`` has shape ``(v, n)``."""

    alpha: np.ndarray
    shipping: np.ndarray

    def __post_init__(self):
        alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float))
        s = np.asarray(self.shipping, dtype=float)
        if s.ndim != 2 or s.shape[0] != alpha.shape[0]:
            raise ValueError(f"shipping must be (v, n) with v={alpha.shape[0]}, got {s.shape}")
        if np.any(alpha <= 0):
            raise ValueError("all node intercepts alpha_l must be > 0")
        if np.any(s < 0):
            raise ValueError("shipping costs must be >= 0")
        if s.shape[1] < 2:
            raise ValueError(f"need n >= 2 firms, got {s.shape[1]}")
        alpha.flags.writeable = False
        s.flags.writeable = False
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "shipping", s)

    @classmethod
    def uniform(cls, alpha, shipping, v: int, n: int) -> "SpatialMarket":
        """Broadcast scalar (or per-node) ``alpha`` and scalar/matrix ``shipping``."""
        a = np.broadcast_to(np.asarray(alpha, dtype=float), (v,)).copy()
        s = np.broadcast_to(np.asarray(shipping, dtype=float), (v, n)).copy()
        return cls(a, s)

    @property
    def v(self) -> int:
        return self.alpha.shape[0]

    @property
    def n(self) -> int:
        return self.shipping.shape[1]

    def permuted(self, perm) -> "SpatialMarket":
        """Market with firm ``i`` relabeled ``perm[i]``."""
        s = np.empty_like(self.shipping)
        s[:, list(perm)] = self.shipping
        return SpatialMarket(self.alpha.copy(), s)

    def to_json(self) -> dict:
        return {"alpha": self.alpha.tolist(), "shipping": self.shipping.tolist()}


@dataclass
class SpatialOutcome:
    degrees: np.ndarray
    demands: np.ndarray          # (v, n)
    node_totals: np.ndarray      # (v,)
    prices: np.ndarray           # (v,)
    costs: np.ndarray            # (n,) production marginal cost
    node_profits: np.ndarray     # (v, n)
    path: str = "closed_form"
    flags: list[str] = field(default_factory=list)

    @property
    def quantities(self) -> np.ndarray:
        return self.demands.sum(axis=0)

    @property
    def profits(self) -> np.ndarray:
        return self.node_profits.sum(axis=0)

    @property
    def feasible(self) -> bool:
        return "infeasible" not in self.flags

    def rows(self) -> list[dict]:
        v, n = self.demands.shape
        return [
            {"node": l, "firm": i, "d": float(self.demands[l, i]), "P_l": float(self.prices[l]),
             "y": float(self.node_profits[l, i])}
            for l in range(v) for i in range(n)
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["node", "firm", "d", "P_l", "y"], lineterminator="\n")
        w.writeheader()
        for r in self.rows():
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "kind": "spatial", "path": self.path, "flags": list(self.flags),
            "prices": self.prices.tolist(),
            "firms": [{"firm": i, "degree": int(self.degrees[i]), "q": float(self.quantities[i]),
                       "c": float(self.costs[i]), "Y": float(self.profits[i])}
                      for i in range(self.demands.shape[1])],
            "nodes": self.rows(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def spatial_outcome(market: SpatialMarket, costs: np.ndarray, d: np.ndarray, degrees, path: str) -> SpatialOutcome:
    totals = d.sum(axis=1)
    prices = market.alpha - totals
    y = d * (prices[:, None] - costs[None, :] - market.shipping)
    flags = []
    if np.any(d < 0):
        flags.append("infeasible")
    if np.any(costs < 0):
        flags.append("negative_marginal_cost")
    return SpatialOutcome(np.asarray(degrees), d, totals, prices, costs, y, path, flags)


def spatial_quantities(market: SpatialMarket, cost, g: CollaborationGraph) -> SpatialOutcome:
    _require_constant(cost)
    if g.n != market.n:
        raise GraphError(f"graph has {g.n} firms, market has {market.n}")
    deg = g.degrees()
    f = cost.offsets(deg)
    d = closed_form(market.alpha - cost.gamma0, market.shipping + f[None, :])
    return spatial_outcome(market, cost.gamma0 + f, d, deg, "closed_form")


def batch_profits(market: SpatialMarket, cost, degrees: np.ndarray):
    """Closed form over ``(M, n)`` degree rows; returns ``(d, Y)`` with ``d``
    shaped ``(M, v, n)`` and per-firm profits ``(M, n)``."""
    f = cost.offsets(degrees)                       # (M, n)
    b = market.shipping[None, :, :] + f[:, None, :]  # (M, v, n)
    d = closed_form(market.alpha[None, :] - cost.gamma0, b)
    prices = market.alpha[None, :] - d.sum(axis=2)
    y = d * (prices[:, :, None] - cost.gamma0 - b)
    return d, y.sum(axis=1)


def spatial_condition(market: SpatialMarket, cost: ShiftedConvexCost) -> ConditionResult:
    """Sufficient condition for nonnegative demands at every node on every graph.

    A single intercept enters the bound; with heterogeneous ``alpha_l`` the
    smallest one is used, which keeps the bound valid at every node.
    """
    notes = []
    alpha = float(market.alpha.min())
    if np.ptp(market.alpha) > 0:
        notes.append("heterogeneous node intercepts: bound uses min alpha_l")
    return _condition(alpha, cost.gamma0, market.n, float(market.shipping.max()), cost, notes)


@dataclass
class SpatialDeviationDelta:
    firm: int
    partner: int
    direction: str
    step: float
    node_deltas: np.ndarray
    before: np.ndarray
    after: np.ndarray

    @property
    def delta(self) -> float:
        return float(self.node_deltas.sum())

    def to_dict(self) -> dict:
        return {"firm": self.firm, "partner": self.partner, "direction": self.direction,
                "step": self.step, "delta": self.delta, "node_deltas": self.node_deltas.tolist()}


def spatial_deviation_delta(market: SpatialMarket, cost, g: CollaborationGraph, i: int, j: int,
                            direction: str) -> SpatialDeviationDelta:
    """Closed-form per-node and total profit change for firm ``i`` when the
    link ``ij`` is dropped or added, at a graph whose degrees equal ``k``."""
    step = _check_deviation(cost, g, i, j, direction)
    base = spatial_quantities(market, cost, g)
    after = shifted_quantities(base.demands.copy(), i, j, step)
    per_node = profit_change(base.demands[:, i], step, market.n)
    return SpatialDeviationDelta(i, j, direction, step, per_node, base.demands, after)
