"""JSON scenario documents consumed by the CLI.

A scenario is one JSON object::

    {
      "market": {"alpha": 103, "n": 5}                        # single market
             | {"alpha": 103 | [..], "shipping": 1 | [[..]], "nodes": 3, "n": 5},
      "cost":   {"type": "linear", ...} | {"type": "shifted_convex", ...},
      "graph":  "complete" | "empty" | {"edges": [[0, 1], ...]} | {"k": [...]},
      "solver": {"damping": 0.5, "max_iter": 10000, "tol": 1e-10, "step": null},
      "method": "closed_form" | "vi",
      "mode": "exhaustive" | "sampled", "count": 10, "seed": 0,
      "cap": 7, "out": "out/"
    }

Scalars broadcast: a scalar ``alpha`` applies to every node and a scalar
``shipping`` to every (node, firm) pair.  A market is spatial as soon as
``shipping`` or ``nodes`` is present or ``alpha`` is a list.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .costs import ShiftedConvexCost, cost_from_json
from .cournot import AspatialMarket
from .graphs import CollaborationGraph, realize_degree_sequence
from .spatial import SpatialMarket
from .vi import SolverConfig


class ScenarioError(ValueError):
    pass


def scenario_hash(doc: dict) -> str:
    payload = {k: v for k, v in doc.items() if k != "out"}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _firm_count(doc: dict) -> int:
    m = doc.get("market", {})
    if "n" in m:
        return int(m["n"])
    s = m.get("shipping")
    if isinstance(s, list) and s and isinstance(s[0], list):
        return len(s[0])
    k = doc.get("cost", {}).get("k")
    if k is not None:
        return len(k)
    g = doc.get("graph")
    if isinstance(g, dict) and "k" in g:
        return len(g["k"])
    raise ScenarioError("cannot infer firm count: give market.n")


def market_from_json(m: dict, n: int):
    if "alpha" not in m:
        raise ScenarioError("market.alpha is required")
    alpha = m["alpha"]
    spatial = "shipping" in m or "nodes" in m or isinstance(alpha, list)
    if not spatial:
        return AspatialMarket(float(alpha), n)
    shipping = m.get("shipping", 0.0)
    if isinstance(alpha, list):
        v = len(alpha)
    elif isinstance(shipping, list):
        v = len(shipping)
    else:
        v = int(m.get("nodes", 1))
    if "nodes" in m and int(m["nodes"]) != v:
        raise ScenarioError(f"market.nodes={m['nodes']} disagrees with alpha/shipping ({v} nodes)")
    try:
        return SpatialMarket.uniform(alpha, shipping, v, n)
    except ValueError as exc:
        raise ScenarioError(f"bad market: {exc}") from exc


def graph_from_json(spec, n: int) -> CollaborationGraph:
    if spec == "complete":
        return CollaborationGraph.complete(n)
    if spec == "empty" or spec is None:
        return CollaborationGraph.empty(n)
    if isinstance(spec, dict) and "edges" in spec:
        return CollaborationGraph.from_edges(n, spec["edges"])
    if isinstance(spec, dict) and "k" in spec:
        if len(spec["k"]) != n:
            raise ScenarioError(f"graph.k has {len(spec['k'])} entries, expected {n}")
        return realize_degree_sequence(spec["k"])
    raise ScenarioError(f"unrecognised graph spec {spec!r}")


@dataclass
class Scenario:
    doc: dict
    market: object
    cost: object
    graph: CollaborationGraph
    solver: SolverConfig
    method: str = "closed_form"
    mode: str = "exhaustive"
    count: int | None = None
    seed: int | None = None
    cap: int = 7
    out: str | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def hash(self) -> str:
        return scenario_hash(self.doc)

    @property
    def k(self) -> list[int]:
        g = self.doc.get("graph")
        if isinstance(g, dict) and "k" in g:
            return [int(x) for x in g["k"]]
        if isinstance(self.cost, ShiftedConvexCost):
            return list(self.cost.k)
        return self.graph.degrees().tolist()

    @classmethod
    def from_dict(cls, doc: dict) -> "Scenario":
        if not isinstance(doc, dict):
            raise ScenarioError("scenario must be a JSON object")
        for key in ("market", "cost"):
            if key not in doc:
                raise ScenarioError(f"scenario is missing {key!r}")
        n = _firm_count(doc)
        market = market_from_json(doc["market"], n)
        cost = cost_from_json(doc["cost"])
        if isinstance(cost, ShiftedConvexCost) and cost.n != n:
            raise ScenarioError(f"cost.k has {cost.n} entries, expected {n}")
        graph = graph_from_json(doc.get("graph", "empty"), n)
        solver = SolverConfig(**doc.get("solver", {}))
        method = doc.get("method", "closed_form")
        if method not in ("closed_form", "vi"):
            raise ScenarioError(f"unknown method {method!r}")
        mode = doc.get("mode", "exhaustive")
        if mode not in ("exhaustive", "sampled"):
            raise ScenarioError(f"unknown mode {mode!r}")
        seed = doc.get("seed")
        count = doc.get("count")
        if mode == "sampled" and (seed is None or count is None):
            raise ScenarioError("sampled mode requires 'seed' and 'count'")
        return cls(doc, market, cost, graph, solver, method, mode,
                   None if count is None else int(count), None if seed is None else int(seed),
                   int(doc.get("cap", 7)), doc.get("out"))

    @classmethod
    def load(cls, path: str | Path) -> "Scenario":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ScenarioError(f"cannot read scenario {path}: {exc}") from exc
        return cls.from_dict(doc)


def as_builtin(obj):
    """Make numpy scalars/arrays JSON-serialisable."""
    if isinstance(obj, dict):
        return {str(k): as_builtin(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [as_builtin(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return as_builtin(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
