"""Marginal-cost models keyed on a firm's degree in the collaboration graph.

Two constant-in-quantity families are supported by the closed-form
solvers:

* :class:`LinearCost` -- ``c_i = gamma0 - gamma * deg_i``.
* :class:`ShiftedConvexCost` -- ``c_i = gamma0 + f(deg_i - k_i)`` where one
  base function ``f`` is shared by every firm and shifted by that firm's
  target degree ``k_i``.  ``f`` is stored as a table over the integers
  ``-(n-1) .. n-1``, which is the only domain ever evaluated.

:class:`GeneralCost` carries an arbitrary ``f(q, deg)`` and is only handled
by the iterative solver in :mod:`collabnet.vi`.

The constant families expose ``gamma0`` and ``offsets(degrees)``; the
closed-form Cournot formula takes ``a = alpha - gamma0`` and
``b_i = offsets(degrees)[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, GradientMismatch, InvalidCostFamily, UnsupportedModel


@dataclass(frozen=True)
class LinearCost:
    gamma0: float
    gamma: float

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")

    def offsets(self, degrees) -> np.ndarray:
        return -self.gamma * np.asarray(degrees, dtype=float)

    def marginal_costs(self, degrees) -> np.ndarray:
        return self.gamma0 + self.offsets(degrees)

    def to_json(self) -> dict:
        return {"type": "linear", "gamma0": self.gamma0, "gamma": self.gamma}


@dataclass(frozen=True)
class ShiftedConvexCost:
    gamma0: float
    table: tuple[float, ...]
    k: tuple[int, ...]
    base: str = "table"
    psi: float | None = None
    scale: float | None = None
    _arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        table = tuple(float(x) for x in self.table)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "table", table)
        n = len(k)
        if n < 1:
            raise InvalidCostFamily("shift vector k is empty")
        if len(table) != 2 * n - 1:
            raise InvalidCostFamily(
                f"table must cover -(n-1)..(n-1): expected {2 * n - 1} values, got {len(table)}"
            )
        object.__setattr__(self, "_arr", np.array(table))

    @property
    def n(self) -> int:
        return len(self.k)

    @classmethod
    def quadratic(cls, gamma0: float, psi: float, k: Sequence[int], scale: float = 1.0):
        """``f(x) = scale * x**2 + psi``."""
        n = len(k)
        xs = np.arange(-(n - 1), n)
        return cls(gamma0, tuple(scale * xs**2 + psi), tuple(k), base="quadratic_psi", psi=psi, scale=scale)

    @classmethod
    def from_function(cls, gamma0: float, f: Callable[[int], float], k: Sequence[int], base: str = "table"):
        n = len(k)
        return cls(gamma0, tuple(float(f(x)) for x in range(-(n - 1), n)), tuple(k), base=base)

    @classmethod
    def named(cls, base: str, k: Sequence[int], gamma0: float = 0.0, psi: float = 0.0, scale: float = 1.0):
        if base == "quadratic_psi":
            return cls.quadratic(gamma0, psi, k, scale)
        if base == "abs":
            return cls.from_function(gamma0, abs, k, base="abs")
        if base == "zero":
            return cls.from_function(gamma0, lambda x: 0.0, k, base="zero")
        raise InvalidCostFamily(f"unknown built-in base function {base!r}")

    def f(self, x):
        """Base function at integer argument(s) ``x`` in ``-(n-1)..n-1``."""
        x = np.asarray(x)
        n = self.n
        if np.any(np.abs(x) > n - 1):
            raise DomainError(f"argument outside -(n-1)..(n-1) = {-(n - 1)}..{n - 1}")
        out = self._arr[x + n - 1]
        return float(out) if out.ndim == 0 else out

    def firm_f(self, firm: int, degree: int) -> float:
        return self.f(int(degree) - self.k[firm])

    @property
    def delta_minus(self) -> float:
        return self.f(-1) - self.f(0)

    @property
    def delta_plus(self) -> float:
        return self.f(1) - self.f(0)

    def offsets(self, degrees) -> np.ndarray:
        """``f(deg_i - k_i)`` per firm; accepts a ``(..., n)`` batch."""
        d = np.asarray(degrees, dtype=np.int64)
        n = self.n
        if d.shape[-1] != n:
            raise DomainError(f"expected {n} degrees, got shape {d.shape}")
        if np.any(d < 0) or np.any(d > n - 1):
            raise DomainError(f"degree outside 0..{n - 1}")
        return self._arr[d - np.asarray(self.k) + n - 1]

    def marginal_costs(self, degrees) -> np.ndarray:
        return self.gamma0 + self.offsets(degrees)

    def to_json(self) -> dict:
        if self.base == "quadratic_psi" and (self.scale is None or self.scale == 1.0):
            return {"type": "shifted_convex", "gamma0": self.gamma0, "base": "quadratic_psi",
                    "psi": self.psi, "k": list(self.k)}
        if self.base == "quadratic_psi":
            return {"type": "shifted_convex", "gamma0": self.gamma0, "base": "quadratic_psi",
                    "psi": self.psi, "scale": self.scale, "k": list(self.k)}
        if self.base in ("abs", "zero"):
            return {"type": "shifted_convex", "gamma0": self.gamma0, "base": self.base, "k": list(self.k)}
        return {"type": "shifted_convex", "gamma0": self.gamma0, "base": "table",
                "values": list(self.table), "k": list(self.k)}


@dataclass(frozen=True)
class GeneralCost:
    """Quantity- and degree-dependent marginal cost ``f(q, deg)``.

    ``f`` and ``dfdq`` are vectorised over firms: they receive arrays ``q``
    and ``deg`` of length ``n`` (firm order) and return length-``n`` arrays,
    so firm-specific costs are expressed by position.  When ``dfdq`` is
    omitted a central finite difference is used.
    """

    f: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dfdq: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    fd_step: float = 1e-6

    def marginal_costs(self, q, degrees) -> np.ndarray:
        return np.asarray(self.f(np.asarray(q, float), np.asarray(degrees)), dtype=float)

    def slope(self, q, degrees) -> np.ndarray:
        q = np.asarray(q, float)
        if self.dfdq is not None:
            return np.asarray(self.dfdq(q, np.asarray(degrees)), dtype=float)
        return _fd_slope(self.f, q, degrees, self.fd_step)

    @classmethod
    def from_constant(cls, model) -> "GeneralCost":
        """Wrap a constant-marginal-cost model (zero slope in ``q``)."""
        if isinstance(model, GeneralCost):
            return model
        _require_constant(model)
        return cls(
            f=lambda q, d: model.marginal_costs(d) + 0.0 * q,
            dfdq=lambda q, d: np.zeros_like(q, dtype=float),
        )


def _fd_slope(f, q, degrees, h):
    q = np.asarray(q, float)
    degrees = np.asarray(degrees)
    out = np.empty_like(q)
    for i in range(q.size):
        up, dn = q.copy(), q.copy()
        up[i] += h
        dn[i] -= h
        out[i] = (np.asarray(f(up, degrees))[i] - np.asarray(f(dn, degrees))[i]) / (2 * h)
    return out


def check_slope(model: GeneralCost, probes: Sequence[tuple[np.ndarray, np.ndarray]], rtol: float = 1e-5) -> float:
    """Compare analytic ``dfdq`` against central differences at probe points.

    Returns the worst relative error; raises :class:`GradientMismatch` above
    ``rtol``.  Models without ``dfdq`` trivially pass.
    """
    if model.dfdq is None:
        return 0.0
    worst = 0.0
    for q, d in probes:
        an = model.slope(q, d)
        fd = _fd_slope(model.f, q, d, model.fd_step)
        err = np.max(np.abs(an - fd) / np.maximum(1.0, np.abs(fd)))
        worst = max(worst, float(err))
        if err > rtol:
            raise GradientMismatch(f"analytic dq-slope differs from finite differences by {err:.3g} at q={q}")
    return worst


def is_constant(model) -> bool:
    return isinstance(model, (LinearCost, ShiftedConvexCost))


def _require_constant(model):
    if not is_constant(model):
        raise UnsupportedModel(f"{type(model).__name__} has quantity-dependent cost; use the VI solver")


def marginal_cost(model, degree: int, firm: int = 0, quantity: float | None = None, n: int | None = None) -> float:
    """Marginal cost of ``firm`` at ``degree`` (and ``quantity`` for general models)."""
    if isinstance(model, ShiftedConvexCost):
        n = model.n
    if degree < 0 or (n is not None and degree > n - 1):
        raise DomainError(f"degree {degree} outside 0..{'n-1' if n is None else n - 1}")
    if isinstance(model, LinearCost):
        return model.gamma0 - model.gamma * degree
    if isinstance(model, ShiftedConvexCost):
        return model.gamma0 + model.firm_f(firm, degree)
    if isinstance(model, GeneralCost):
        if quantity is None:
            raise DomainError("general cost models need a quantity")
        if n is None:
            raise DomainError("general cost models need the firm count n")
        q = np.zeros(n)
        d = np.zeros(n, dtype=np.int64)
        q[firm], d[firm] = quantity, degree
        return float(model.marginal_costs(q, d)[firm])
    raise UnsupportedModel(f"unknown cost model {type(model).__name__}")


def delta_minus(model, firm: int = 0) -> float:
    """Cost increase from losing one collaborator at the target degree."""
    if not isinstance(model, ShiftedConvexCost):
        raise UnsupportedModel("delta_minus is defined for ShiftedConvexCost only")
    return model.delta_minus


def delta_plus(model, firm: int = 0) -> float:
    if not isinstance(model, ShiftedConvexCost):
        raise UnsupportedModel("delta_plus is defined for ShiftedConvexCost only")
    return model.delta_plus


@dataclass
class FamilyReport:
    """Outcome of :func:`validate_convex_family`; ``checks`` maps a check name
    to ``(passed, witness)`` where the witness is a failing grid point or
    firm index (``None`` on pass)."""

    checks: dict[str, tuple[bool, object]]

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.checks.values())

    def failures(self) -> list[str]:
        return [name for name, (ok, _) in self.checks.items() if not ok]


def validate_convex_family(model: ShiftedConvexCost, n: int | None = None) -> FamilyReport:
    if not isinstance(model, ShiftedConvexCost):
        raise UnsupportedModel("only ShiftedConvexCost is a shifted convex family")
    n = model.n if n is None else n
    xs = list(range(-(model.n - 1), model.n))
    fv = {x: model.f(x) for x in xs}
    # absorbs round-off in tabulated values only
    tol = 1e-12 * max(1.0, max(abs(v) for v in fv.values()))
    checks: dict[str, tuple[bool, object]] = {}

    bad = [x for x in xs if fv[x] < 0]
    checks["nonnegative"] = (not bad, bad[0] if bad else None)

    bad = [x for x in xs[1:-1] if fv[x + 1] - 2 * fv[x] + fv[x - 1] < -tol]
    checks["convex"] = (not bad, bad[0] if bad else None)

    bad = [x for x in xs if fv[x] < fv[0]]
    checks["minimum_at_zero"] = (not bad, bad[0] if bad else None)

    bad = [i for i, ki in enumerate(model.k) if not 0 <= ki <= n - 1]
    ok_len = len(model.k) == n
    checks["shifts_in_range"] = (not bad and ok_len, bad[0] if bad else (None if ok_len else "length"))
    return FamilyReport(checks)


def cost_from_json(spec: dict, n: int | None = None):
    """Build a cost model from its JSON form."""
    kind = spec.get("type")
    if kind == "linear":
        return LinearCost(float(spec["gamma0"]), float(spec["gamma"]))
    if kind == "shifted_convex":
        k = [int(x) for x in spec["k"]]
        gamma0 = float(spec.get("gamma0", 0.0))
        base = spec.get("base", "table")
        if base == "table":
            return ShiftedConvexCost(gamma0, tuple(spec["values"]), tuple(k), base="table")
        return ShiftedConvexCost.named(base, k, gamma0=gamma0, psi=float(spec.get("psi", 0.0)),
                                       scale=float(spec.get("scale", 1.0)))
    if kind == "general":
        raise UnsupportedModel("general cost models are supplied programmatically only")
    raise InvalidCostFamily(f"unknown cost model type {kind!r}")
