"""Pairwise stability of collaboration graphs.

A graph is pairwise stable when (1) no endpoint of an existing link gains
by dropping it, and (2) for every absent link, if one endpoint would gain
strictly from adding it then the other would lose strictly.  Payoffs come
from a :class:`PayoffOracle`; every deviation is re-solved from scratch,
independently of the analytic deltas audited in :func:`verify_theorem_class`.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .costs import ShiftedConvexCost, is_constant
from .cournot import AspatialMarket, analytic_deviation_delta, aspatial_condition, cournot_quantities
from .cournot import batch_profits as aspatial_batch
from .errors import CapExceeded, CollabNetError, NotGraphical, OracleFailure
from .graphs import DEFAULT_CAP, CollaborationGraph, edge_index, enumerate_realizations, is_graphical, random_realization
from .spatial import SpatialMarket, spatial_condition, spatial_deviation_delta, spatial_quantities
from .spatial import batch_profits as spatial_batch
from .vi import SolverConfig, equilibrium_vi

EPS = 1e-9


def strictly_greater(x: float, y: float, eps: float = EPS) -> bool:
    return x - y > eps * max(1.0, abs(x), abs(y))


class PayoffOracle:
    """Maps a graph to per-firm equilibrium profits.

    ``method`` is ``"closed_form"`` (closed form, falling back to the VI
    solver when a quantity comes out negative), ``"vi"`` (always iterative)
    or ``"custom"`` for an arbitrary callable.  ``paths`` counts which solver
    produced each evaluated payoff vector.
    """

    def __init__(self, fn: Callable[[CollaborationGraph], np.ndarray], method: str = "custom",
                 eps: float = EPS, market=None, cost=None, config: SolverConfig | None = None):
        self._fn = fn
        self.method = method
        self.eps = eps
        self.market = market
        self.cost = cost
        self.config = config or SolverConfig()
        self.paths: Counter = Counter()

    @classmethod
    def for_model(cls, market, cost, method: str = "closed_form", eps: float = EPS,
                  config: SolverConfig | None = None) -> "PayoffOracle":
        config = config or SolverConfig()
        oracle = cls(None, method, eps, market, cost, config)
        oracle._fn = oracle._model_payoffs
        return oracle

    def _model_payoffs(self, g: CollaborationGraph) -> np.ndarray:
        return self.outcome(g).profits

    def outcome(self, g: CollaborationGraph):
        if self.method == "closed_form" and is_constant(self.cost):
            if isinstance(self.market, AspatialMarket):
                out = cournot_quantities(self.market, self.cost, g)
            else:
                out = spatial_quantities(self.market, self.cost, g)
            if out.feasible:
                self.paths["closed_form"] += 1
                return out
        out, _ = equilibrium_vi(self.market, self.cost, g, self.config)
        self.paths["vi"] += 1
        return out

    def __call__(self, g: CollaborationGraph) -> np.ndarray:
        try:
            return np.asarray(self._fn(g), dtype=float)
        except CollabNetError as exc:
            raise OracleFailure(f"payoff evaluation failed on edges {g.sorted_edges()}: {exc}", g) from exc

    def table(self, n: int) -> np.ndarray:
        """Payoffs for every labeled graph on ``n`` nodes, indexed by edge bitmask."""
        m = len(edge_index(n))
        if self.method == "closed_form" and is_constant(self.cost):
            masks = np.arange(1 << m, dtype=np.int64)
            bits = (masks[:, None] >> np.arange(m)) & 1
            inc = np.zeros((m, n), dtype=np.int64)
            for b, (i, j) in enumerate(edge_index(n)):
                inc[b, i] = inc[b, j] = 1
            degrees = bits @ inc
            if isinstance(self.market, AspatialMarket):
                q, Y = aspatial_batch(self.market.alpha, self.cost, degrees)
                bad = np.any(q < 0, axis=1)
            else:
                d, Y = spatial_batch(self.market, self.cost, degrees)
                bad = np.any(d < 0, axis=(1, 2))
            self.paths["closed_form"] += int((~bad).sum())
            for mask in np.flatnonzero(bad):
                Y[mask] = self(CollaborationGraph.from_mask(n, int(mask)))
            return Y
        return np.array([self(CollaborationGraph.from_mask(n, mask)) for mask in range(1 << m)])


@dataclass
class Deviation:
    edge: tuple[int, int]
    direction: str
    delta_i: float
    delta_j: float

    def to_dict(self) -> dict:
        return {"edge": list(self.edge), "direction": self.direction,
                "delta_i": self.delta_i, "delta_j": self.delta_j}


@dataclass
class Violation:
    edge: tuple[int, int]
    kind: str          # "drop-profitable" | "add-mutually-beneficial"
    delta_i: float
    delta_j: float

    def to_dict(self) -> dict:
        return {"edge": list(self.edge), "type": self.kind, "delta_i": self.delta_i, "delta_j": self.delta_j}


@dataclass
class StabilityReport:
    graph: CollaborationGraph
    violations: list[Violation]
    deviations: list[Deviation]

    @property
    def stable(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "stable" if self.stable else "unstable"

    @property
    def deviations_checked(self) -> int:
        return len(self.deviations)

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "n": self.graph.n,
                "edges": [list(e) for e in self.graph.sorted_edges()],
                "deviations_checked": self.deviations_checked,
                "violations": [v.to_dict() for v in self.violations],
                "deviations": [d.to_dict() for d in self.deviations]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _add_violated(yi_new, yi, yj_new, yj, eps) -> bool:
    # negation of "Y_i(g+ij) > Y_i(g)  =>  Y_j(g+ij) < Y_j(g)"
    return strictly_greater(yi_new, yi, eps) and not strictly_greater(yj, yj_new, eps)


def is_pairwise_stable(g: CollaborationGraph, oracle: PayoffOracle) -> StabilityReport:
    eps = oracle.eps
    base = oracle(g)
    violations, deviations = [], []
    for i, j in g.sorted_edges():
        new = oracle(g.drop_link(i, j))
        dev = Deviation((i, j), "drop", float(new[i] - base[i]), float(new[j] - base[j]))
        deviations.append(dev)
        if strictly_greater(new[i], base[i], eps) or strictly_greater(new[j], base[j], eps):
            violations.append(Violation((i, j), "drop-profitable", dev.delta_i, dev.delta_j))
    for i, j in g.non_edges():
        new = oracle(g.add_link(i, j))
        dev = Deviation((i, j), "add", float(new[i] - base[i]), float(new[j] - base[j]))
        deviations.append(dev)
        if (_add_violated(new[i], base[i], new[j], base[j], eps)
                or _add_violated(new[j], base[j], new[i], base[i], eps)):
            violations.append(Violation((i, j), "add-mutually-beneficial", dev.delta_i, dev.delta_j))
    return StabilityReport(g, violations, deviations)


def _gt(x, y, eps):
    return x - y > eps * np.maximum(1.0, np.maximum(np.abs(x), np.abs(y)))


def stable_masks(table: np.ndarray, n: int, eps: float = EPS) -> np.ndarray:
    """Boolean stability verdict for every bitmask, from a full payoff table."""
    masks = np.arange(table.shape[0], dtype=np.int64)
    ok = np.ones(table.shape[0], dtype=bool)
    for b, (i, j) in enumerate(edge_index(n)):
        other = table[masks ^ (1 << b)]
        yi, yj, ni, nj = table[:, i], table[:, j], other[:, i], other[:, j]
        present = (masks >> b) & 1 == 1
        drop_bad = _gt(ni, yi, eps) | _gt(nj, yj, eps)
        add_bad = (_gt(ni, yi, eps) & ~_gt(yj, nj, eps)) | (_gt(nj, yj, eps) & ~_gt(yi, ni, eps))
        ok &= np.where(present, ~drop_bad, ~add_bad)
    return ok


def enumerate_stable_graphs(n: int, oracle: PayoffOracle, cap: int = DEFAULT_CAP) -> list[CollaborationGraph]:
    """All labeled stable graphs on ``n`` firms (exhaustive)."""
    if n > cap:
        raise CapExceeded(f"n={n} exceeds enumeration cap {cap}")
    table = oracle.table(n)
    ok = stable_masks(table, n, oracle.eps)
    return [CollaborationGraph.from_mask(n, int(m)) for m in np.flatnonzero(ok)]


@dataclass
class AuditRow:
    graph: int
    edge: tuple[int, int]
    direction: str
    firm: int
    analytic: float
    direct: float

    @property
    def error(self) -> float:
        return abs(self.analytic - self.direct) / max(1.0, abs(self.direct))

    def to_dict(self) -> dict:
        return {"graph": self.graph, "edge": list(self.edge), "direction": self.direction,
                "firm": self.firm, "analytic": self.analytic, "direct": self.direct, "rel_error": self.error}


@dataclass
class TheoremReport:
    k: list[int]
    mode: str
    condition: object
    status: str                      # "PASS" | "FAIL" | "hypothesis unmet"
    graphs: list[CollaborationGraph] = field(default_factory=list)
    reports: list[StabilityReport] = field(default_factory=list)
    audit: list[AuditRow] = field(default_factory=list)
    seed: int | None = None
    audit_tol: float = 1e-9

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    @property
    def max_audit_error(self) -> float:
        return max((r.error for r in self.audit), default=0.0)

    @property
    def all_deltas_negative(self) -> bool:
        return all(r.direct < 0 for r in self.audit)

    def to_dict(self) -> dict:
        return {
            "k": self.k, "mode": self.mode, "seed": self.seed, "status": self.status,
            "condition": self.condition.to_dict(),
            "graphs": [[list(e) for e in g.sorted_edges()] for g in self.graphs],
            "verdicts": [r.verdict for r in self.reports],
            "max_audit_error": self.max_audit_error,
            "all_deltas_negative": self.all_deltas_negative,
            "audit": [r.to_dict() for r in self.audit],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def model_condition(market, cost: ShiftedConvexCost):
    if isinstance(market, SpatialMarket):
        return spatial_condition(market, cost)
    return aspatial_condition(market, cost)


def analytic_delta(market, cost, g, i, j, direction) -> float:
    if isinstance(market, SpatialMarket):
        return spatial_deviation_delta(market, cost, g, i, j, direction).delta
    return analytic_deviation_delta(market, cost, g, i, j, direction).delta


def verify_theorem_class(k, market, cost: ShiftedConvexCost, mode: str = "exhaustive",
                         count: int | None = None, seed: int | None = None,
                         cap: int = DEFAULT_CAP, audit_tol: float = 1e-9,
                         oracle: PayoffOracle | None = None) -> TheoremReport:
    """Check that every graph realizing ``k`` is pairwise stable.

    ``mode="exhaustive"`` walks all realizations; ``mode="sampled"`` draws
    ``count`` edge-swap realizations from ``seed``.  Each deviation's
    closed-form profit change is compared with the oracle's recomputed
    difference.
    """
    k = [int(x) for x in k]
    if not is_graphical(k):
        raise NotGraphical(f"{k} is not graphical")
    cond = model_condition(market, cost)
    if not cond.holds:
        return TheoremReport(k, mode, cond, "hypothesis unmet", seed=seed, audit_tol=audit_tol)
    if mode == "exhaustive":
        graphs = list(enumerate_realizations(k, cap))
    elif mode == "sampled":
        if count is None or seed is None:
            raise ValueError("sampled mode needs both count and seed")
        graphs = [random_realization(k, seed + t) for t in range(count)]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    oracle = oracle or PayoffOracle.for_model(market, cost)
    report = TheoremReport(k, mode, cond, "PASS", graphs, seed=seed, audit_tol=audit_tol)
    for idx, g in enumerate(graphs):
        rep = is_pairwise_stable(g, oracle)
        report.reports.append(rep)
        for dev in rep.deviations:
            i, j = dev.edge
            report.audit.append(AuditRow(idx, dev.edge, dev.direction, i,
                                         analytic_delta(market, cost, g, i, j, dev.direction), dev.delta_i))
            report.audit.append(AuditRow(idx, dev.edge, dev.direction, j,
                                         analytic_delta(market, cost, g, j, i, dev.direction), dev.delta_j))
    if not all(r.stable for r in report.reports) or report.max_audit_error > audit_tol:
        report.status = "FAIL"
    return report
