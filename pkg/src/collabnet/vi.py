"""Iterative equilibrium solvers over the nonnegative orthant.

Decision vector ``x`` has shape ``(v, n)``: ``x[l, i]`` is what firm ``i``
sells at node ``l`` (``v = 1`` for the single-market model).  Firm ``i``'s
profit is

    Y_i = sum_l x[l, i] * (alpha_l - D_l - s_li) - q_i * f_i(q_i, deg_i),

with ``q_i = sum_l x[l, i]``, and its gradient in ``x[l, i]`` is

    alpha_l - D_l - s_li - f_i - x[l, i] - q_i * df_i/dq.

Equilibrium is the composed variational inequality over all firms with map
``F = -grad``.  Two methods are provided: damped Jacobi best response for
constant marginal costs, and a projected fixed-point iteration for
quantity-dependent costs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .costs import GeneralCost, check_slope, is_constant
from .cournot import AspatialMarket, outcome_from_quantities
from .errors import InvalidStart, NonConvergence, UnsupportedModel
from .graphs import CollaborationGraph
from .spatial import spatial_outcome


@dataclass(frozen=True)
class SolverConfig:
    """``damping=None`` picks ``min(0.5, 4/(n+2))``: plain 0.5 stops being a
    contraction for Jacobi best response once ``n >= 7``.  ``step=None``
    starts the projected iteration at ``1/(2n)``.  ``tol`` is floored at the
    round-off level of the largest intercept, below which no iterate can go."""

    damping: float | None = None
    max_iter: int = 10000
    tol: float = 1e-10
    step: float | None = None
    vi_samples: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.damping is not None and not 0 < self.damping <= 1:
            raise ValueError(f"damping must be in (0, 1], got {self.damping}")
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")

    def damping_for(self, n: int) -> float:
        return self.damping if self.damping is not None else min(0.5, 4.0 / (n + 2))


@dataclass(frozen=True, eq=False)
class ViProblem:
    alpha: np.ndarray          # (v,)
    shipping: np.ndarray       # (v, n)
    degrees: np.ndarray        # (n,)
    cost: GeneralCost
    constant_costs: np.ndarray | None = None   # (n,) when cost does not depend on q

    @classmethod
    def build(cls, market, cost, g: CollaborationGraph) -> "ViProblem":
        deg = g.degrees()
        if isinstance(market, AspatialMarket):
            alpha = np.array([float(market.alpha)])
            shipping = np.zeros((1, market.n))
        else:
            alpha, shipping = market.alpha, market.shipping
        if g.n != shipping.shape[1]:
            raise ValueError(f"graph has {g.n} firms, market has {shipping.shape[1]}")
        const = cost.marginal_costs(deg) if is_constant(cost) else None
        return cls(alpha, shipping, deg, GeneralCost.from_constant(cost), const)

    @property
    def shape(self) -> tuple[int, int]:
        return self.shipping.shape

    @property
    def dimension(self) -> int:
        return self.shipping.size

    def _x(self, x) -> np.ndarray:
        return np.asarray(x, dtype=float).reshape(self.shape)

    def marginal_costs(self, x) -> np.ndarray:
        x = self._x(x)
        if self.constant_costs is not None:
            return self.constant_costs
        return self.cost.marginal_costs(x.sum(axis=0), self.degrees)

    def gradient(self, x) -> np.ndarray:
        """Stacked profit gradient, shape ``(v, n)``."""
        x = self._x(x)
        q = x.sum(axis=0)
        D = x.sum(axis=1, keepdims=True)
        if self.constant_costs is not None:
            c, slope = self.constant_costs, 0.0
        else:
            c, slope = self.cost.marginal_costs(q, self.degrees), self.cost.slope(q, self.degrees)
        return self.alpha[:, None] - D - self.shipping - c[None, :] - x - (q * slope)[None, :]

    def vi_map(self, x) -> np.ndarray:
        return -self.gradient(x)

    def profits(self, x) -> np.ndarray:
        x = self._x(x)
        q = x.sum(axis=0)
        price = self.alpha - x.sum(axis=1)
        return (x * (price[:, None] - self.shipping)).sum(axis=0) - q * self.marginal_costs(x)


@dataclass
class Solution:
    x: np.ndarray
    residual: float
    iterations: int
    method: str
    trace: list[tuple[int, float, float]] = field(default_factory=list)
    vi_margin: float | None = None

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iteration", "residual", "max_change"])
        for it, r, ch in self.trace:
            w.writerow([it, repr(r), repr(ch)])
        return buf.getvalue()


def vi_residual(problem: ViProblem, x) -> float:
    """Natural-map residual ``||x - P_+(x - F(x))||_inf``; zero iff ``x`` solves the VI."""
    x = problem._x(x)
    return float(np.max(np.abs(x - np.maximum(0.0, x + problem.gradient(x)))))


def _scaled_tol(problem: ViProblem, config: SolverConfig) -> float:
    floor = 64 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(problem.alpha))))
    return max(config.tol, floor)


def _start(problem: ViProblem, x0) -> np.ndarray:
    if x0 is None:
        return np.zeros(problem.shape)
    x = problem._x(x0).copy()
    if np.any(x < 0):
        raise InvalidStart("starting point has negative entries")
    return x


def best_response(problem: ViProblem, x: np.ndarray) -> np.ndarray:
    others = x.sum(axis=1, keepdims=True) - x
    unc = (problem.alpha[:, None] - others - problem.constant_costs[None, :] - problem.shipping) / 2
    return np.maximum(0.0, unc)


def best_response_iterate(problem: ViProblem, config: SolverConfig = SolverConfig(), x0=None) -> Solution:
    """Damped simultaneous best response ``x <- (1-t) x + t BR(x)``."""
    if problem.constant_costs is None:
        raise UnsupportedModel("best response iteration needs constant marginal costs")
    x = _start(problem, x0)
    theta = config.damping_for(problem.shape[1])
    tol = _scaled_tol(problem, config)
    trace = []
    for it in range(1, config.max_iter + 1):
        new = (1 - theta) * x + theta * best_response(problem, x)
        change = float(np.max(np.abs(new - x)))
        x = new
        res = vi_residual(problem, x)
        trace.append((it, res, change))
        if not np.isfinite(res):
            break
        if res <= tol and change <= tol:
            return Solution(x, res, it, "best_response", trace)
    raise NonConvergence(f"best response did not converge in {len(trace)} iterations", trace, x)


def vi_margin(problem: ViProblem, x: np.ndarray, samples: int, seed: int) -> float:
    """Largest ``<grad(x), y - x>`` over random feasible ``y``, scaled by ``|y - x|``.

    At a solution this is ``<= 0`` up to round-off.
    """
    rng = np.random.default_rng(seed)
    g = problem.gradient(x)
    scale = max(1.0, float(np.max(x)))
    worst = -np.inf
    for _ in range(samples):
        y = rng.uniform(0.0, 2.0 * scale, size=x.shape)
        diff = y - x
        worst = max(worst, float(np.sum(g * diff)) / max(1.0, float(np.max(np.abs(diff)))))
    return worst


def solve_general(problem: ViProblem, config: SolverConfig = SolverConfig(), x0=None) -> Solution:
    """Projected iteration ``x <- P_+(x + step * grad(x))``; the step halves
    whenever a trial step would increase the residual."""
    if problem.constant_costs is None and problem.cost.dfdq is not None:
        rng = np.random.default_rng(config.seed)
        probes = [(rng.uniform(0.0, float(problem.alpha.max()), problem.shape[1]), problem.degrees)
                  for _ in range(4)]
        check_slope(problem.cost, probes)
    x = _start(problem, x0)
    step = config.step if config.step is not None else 1.0 / (2 * problem.shape[1])
    res = vi_residual(problem, x)
    tol = _scaled_tol(problem, config)
    trace = []
    for it in range(1, config.max_iter + 1):
        while True:
            trial = np.maximum(0.0, x + step * problem.gradient(x))
            trial_res = vi_residual(problem, trial)
            if trial_res <= res or step < 1e-12:
                break
            step /= 2
        change = float(np.max(np.abs(trial - x)))
        x, res = trial, trial_res
        trace.append((it, res, change))
        if res <= tol:
            margin = vi_margin(problem, x, config.vi_samples, config.seed)
            return Solution(x, res, it, "projection", trace, margin)
    raise NonConvergence(f"projected iteration did not converge in {config.max_iter} iterations", trace, x)


def solve(problem: ViProblem, config: SolverConfig = SolverConfig(), x0=None) -> Solution:
    if problem.constant_costs is not None:
        return best_response_iterate(problem, config, x0)
    return solve_general(problem, config, x0)


def equilibrium_vi(market, cost, g: CollaborationGraph, config: SolverConfig = SolverConfig()):
    """Equilibrium outcome computed by the iterative solver (``path='vi'``)."""
    problem = ViProblem.build(market, cost, g)
    sol = solve(problem, config)
    deg = g.degrees()
    costs = problem.marginal_costs(sol.x)
    if isinstance(market, AspatialMarket):
        out = outcome_from_quantities(market.alpha, costs, sol.x[0], deg, "vi")
    else:
        out = spatial_outcome(market, costs, sol.x, deg, "vi")
    out.flags = [f for f in out.flags if f != "infeasible"]
    return out, sol
