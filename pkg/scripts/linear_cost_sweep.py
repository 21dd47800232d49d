"""Stable-graph census under linear collaboration costs ``c_i = gamma0 - gamma*deg_i``.

With parameters keeping every quantity positive, each additional link lowers
a firm's cost and the complete graph should be the only stable network.
"""

import argparse

import numpy as np

from collabnet.costs import LinearCost
from collabnet.cournot import AspatialMarket
from collabnet.graphs import CollaborationGraph
from collabnet.stability import PayoffOracle, enumerate_stable_graphs


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=100.0)
    parser.add_argument("--gamma0", type=float, default=10.0)
    parser.add_argument("--gammas", default="0.25,0.5,1,2")
    parser.add_argument("--max-n", type=int, default=6)
    args = parser.parse_args()

    print("n,gamma,stable_graphs,complete_only")
    for n in range(2, args.max_n + 1):
        for gamma in (float(x) for x in args.gammas.split(",")):
            cost = LinearCost(args.gamma0, gamma)
            if np.any(cost.marginal_costs(np.full(n, n - 1)) < 0):
                continue
            stable = enumerate_stable_graphs(n, PayoffOracle.for_model(AspatialMarket(args.alpha, n), cost))
            print(f"{n},{gamma:g},{len(stable)},{stable == [CollaborationGraph.complete(n)]}")


if __name__ == "__main__":
    main()
