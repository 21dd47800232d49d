"""Closed-form Cournot equilibrium for a single market with degree-dependent costs.

With inverse demand ``P = alpha - Q`` and constant marginal costs
``c_i = gamma0 + b_i`` the interior equilibrium is

    q_i = (a - n*b_i + sum_{j != i} b_j) / (n + 1),    a = alpha - gamma0,

and at an interior solution ``P - c_i = q_i`` so ``Y_i = q_i**2``.  Negative
closed-form quantities are not an error: the outcome is flagged
``infeasible`` and the caller routes to :mod:`collabnet.vi`.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .costs import ShiftedConvexCost, _require_constant, validate_convex_family
from .errors import DegreeMismatch, GraphError, InvalidCostFamily, UnsupportedModel
from .graphs import CollaborationGraph


@dataclass(frozen=True)
class AspatialMarket:
    alpha: float
    n: int

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.n < 2:
            raise ValueError(f"need n >= 2 firms, got {self.n}")

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "n": self.n}


@dataclass
class EquilibriumOutcome:
    degrees: np.ndarray
    quantities: np.ndarray
    total: float
    price: float
    costs: np.ndarray
    profits: np.ndarray
    path: str = "closed_form"
    flags: list[str] = field(default_factory=list)

    @property
    def feasible(self) -> bool:
        return "infeasible" not in self.flags

    def rows(self) -> list[dict]:
        return [
            {"firm": i, "degree": int(self.degrees[i]), "q": float(self.quantities[i]),
             "c": float(self.costs[i]), "Y": float(self.profits[i])}
            for i in range(len(self.quantities))
        ]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["firm", "degree", "q", "c", "Y"], lineterminator="\n")
        w.writeheader()
        for r in self.rows():
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"kind": "aspatial", "path": self.path, "flags": list(self.flags),
                "total": float(self.total), "price": float(self.price), "firms": self.rows()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def closed_form(a, b) -> np.ndarray:
    """Cournot quantities for profit ``a*q_i - Q*q_i - b_i*q_i``.

    ``b`` may carry leading batch dimensions; ``a`` broadcasts against them.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[-1]
    others = b.sum(axis=-1, keepdims=True) - b
    return (np.asarray(a, dtype=float)[..., None] - n * b + others) / (n + 1)


def _check_graph(market_n: int, g: CollaborationGraph):
    if g.n != market_n:
        raise GraphError(f"graph has {g.n} firms, market has {market_n}")


def outcome_from_quantities(alpha: float, costs: np.ndarray, q: np.ndarray, degrees, path: str) -> EquilibriumOutcome:
    total = float(q.sum())
    price = alpha - total
    profits = q * (price - costs)
    flags = []
    if np.any(q < 0):
        flags.append("infeasible")
    if np.any(costs < 0):
        flags.append("negative_marginal_cost")
    return EquilibriumOutcome(np.asarray(degrees), q, total, price, costs, profits, path, flags)


def cournot_quantities(market: AspatialMarket, cost, g: CollaborationGraph) -> EquilibriumOutcome:
    _require_constant(cost)
    _check_graph(market.n, g)
    deg = g.degrees()
    b = cost.offsets(deg)
    q = closed_form(market.alpha - cost.gamma0, b)
    return outcome_from_quantities(market.alpha, cost.gamma0 + b, q, deg, "closed_form")


def batch_profits(alpha: float, cost, degrees: np.ndarray):
    """Vectorised closed form over a ``(M, n)`` batch of degree rows.

    Returns ``(q, profits)``, both ``(M, n)``.
    """
    b = cost.offsets(degrees)
    q = closed_form(alpha - cost.gamma0, b)
    price = alpha - q.sum(axis=1, keepdims=True)
    return q, q * (price - (cost.gamma0 + b))


@dataclass(frozen=True)
class ConditionResult:
    value: float
    holds: bool
    terms: dict
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {"value": self.value, "holds": self.holds, "terms": self.terms, "notes": list(self.notes)}


def _condition(alpha: float, gamma0: float, n: int, max_shipping: float, cost: ShiftedConvexCost, notes=()):
    if not isinstance(cost, ShiftedConvexCost):
        raise InvalidCostFamily("nonnegativity condition needs a shifted convex cost family")
    report = validate_convex_family(cost, n)
    if not report.passed:
        raise InvalidCostFamily(f"cost family fails: {', '.join(report.failures())}")
    f_far = max(cost.f(n - 1), cost.f(1 - n))
    step = max(cost.delta_plus, cost.delta_minus)
    value = alpha - gamma0 - n * (max_shipping + f_far) - 0.5 * (n - 1) * step
    terms = {"alpha": alpha, "gamma0": gamma0, "n": n, "max_shipping": max_shipping,
             "f_far": f_far, "max_step": step,
             "f(n-1)": cost.f(n - 1), "f(1-n)": cost.f(1 - n),
             "f(1)": cost.f(1), "f(-1)": cost.f(-1), "f(0)": cost.f(0)}
    return ConditionResult(float(value), bool(value > 0), terms, tuple(notes))


def aspatial_condition(market: AspatialMarket, cost: ShiftedConvexCost) -> ConditionResult:
    """Sufficient condition for nonnegative equilibrium quantities on every graph.

    Returns the left-hand side value as well as the verdict, since the bound
    is often loose.
    """
    return _condition(market.alpha, cost.gamma0, market.n, 0.0, cost)


@dataclass
class DeviationDelta:
    firm: int
    partner: int
    direction: str
    step: float
    delta: float
    before: np.ndarray
    after: np.ndarray

    def to_dict(self) -> dict:
        return {"firm": self.firm, "partner": self.partner, "direction": self.direction,
                "step": self.step, "delta": self.delta}


def _check_deviation(cost, g: CollaborationGraph, i: int, j: int, direction: str) -> float:
    if not isinstance(cost, ShiftedConvexCost):
        raise UnsupportedModel("analytic deltas need a shifted convex cost family")
    if not np.array_equal(g.degrees(), np.asarray(cost.k)):
        raise DegreeMismatch(f"graph degrees {g.degrees().tolist()} differ from k={list(cost.k)}")
    if direction == "drop":
        if not g.has_edge(i, j):
            raise GraphError(f"cannot drop absent edge {(i, j)}")
        return cost.delta_minus
    if direction == "add":
        if i == j or g.has_edge(i, j):
            raise GraphError(f"cannot add edge {(i, j)}")
        return cost.delta_plus
    raise ValueError(f"direction must be 'drop' or 'add', got {direction!r}")


def shifted_quantities(q: np.ndarray, i: int, j: int, step: float) -> np.ndarray:
    """Quantities after firms ``i`` and ``j`` both see cost rise by ``step``."""
    n = q.shape[-1]
    out = q + 2 * step / (n + 1)
    out[..., i] = q[..., i] - step * n / (n + 1) + step / (n + 1)
    out[..., j] = q[..., j] - step * n / (n + 1) + step / (n + 1)
    return out


def profit_change(quantity, step: float, n: int):
    """``-step*r*(2*quantity - r*step)`` with ``r = (n-1)/(n+1)``."""
    r = (n - 1) / (n + 1)
    return -step * r * (2 * np.asarray(quantity, dtype=float) - r * step)


def analytic_deviation_delta(market: AspatialMarket, cost, g: CollaborationGraph, i: int, j: int,
                             direction: str) -> DeviationDelta:
    """Closed-form ``Y_i(g +/- ij) - Y_i(g)`` for a graph whose degrees equal ``k``."""
    step = _check_deviation(cost, g, i, j, direction)
    _check_graph(market.n, g)
    base = cournot_quantities(market, cost, g)
    after = shifted_quantities(base.quantities.copy(), i, j, step)
    delta = float(profit_change(base.quantities[i], step, market.n))
    return DeviationDelta(i, j, direction, step, delta, base.quantities, after)

