import numpy as np
import pytest

from collabnet import fivefirm


def gauss_seidel_cournot(alpha, costs, shipping=None, tol=1e-14, max_sweeps=100000):
    """Reference Cournot solver, kept independent of the package solvers.

    Sequential (Gauss-Seidel) best responses per market node; converges for
    linear demand because the reaction system matrix I + 11^T is SPD.
    ``alpha`` is (v,), ``costs`` (n,), ``shipping`` (v, n).  Returns (v, n).
    """
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    costs = np.asarray(costs, dtype=float)
    v, n = alpha.size, costs.size
    shipping = np.zeros((v, n)) if shipping is None else np.asarray(shipping, dtype=float)
    x = np.zeros((v, n))
    for l in range(v):
        for _ in range(max_sweeps):
            worst = 0.0
            for i in range(n):
                rest = x[l].sum() - x[l, i]
                new = max(0.0, (alpha[l] - rest - costs[i] - shipping[l, i]) / 2)
                worst = max(worst, abs(new - x[l, i]))
                x[l, i] = new
            if worst < tol:
                break
    return x


def reference_profits(alpha, costs, shipping, x):
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    price = alpha - x.sum(axis=1)
    return (x * (price[:, None] - costs[None, :] - shipping)).sum(axis=0)


@pytest.fixture
def five_market():
    return fivefirm.market()


@pytest.fixture
def five_cost():
    return fivefirm.cost()


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
