"""Sweep the demand intercept of the five-firm example.

For each alpha, prints the condition value, whether both realizations of
``k = [2,3,4,3,2]`` are pairwise stable, the smallest closed-form demand over
all 1024 graphs, and the number of stable graphs overall.  The condition is
sufficient, not necessary, so stability can survive below the threshold.
"""

import argparse

import numpy as np

from collabnet import fivefirm
from collabnet.graphs import CollaborationGraph, enumerate_realizations
from collabnet.spatial import batch_profits
from collabnet.stability import PayoffOracle, is_pairwise_stable, model_condition, stable_masks


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--start", type=float, default=90.0)
    parser.add_argument("--stop", type=float, default=110.0)
    parser.add_argument("--step", type=float, default=2.0)
    args = parser.parse_args()

    cost = fivefirm.cost()
    degrees = np.array([CollaborationGraph.from_mask(5, m).degrees() for m in range(1 << 10)])
    print("alpha,condition,class_stable,min_demand,stable_graphs")
    for alpha in np.arange(args.start, args.stop + 1e-9, args.step):
        market = fivefirm.market(alpha=float(alpha))
        oracle = PayoffOracle.for_model(market, cost)
        cond = model_condition(market, cost)
        class_stable = all(is_pairwise_stable(g, oracle).stable for g in enumerate_realizations(fivefirm.K))
        d, _ = batch_profits(market, cost, degrees)
        count = int(stable_masks(oracle.table(5), 5).sum())
        print(f"{alpha:g},{cond.value:g},{class_stable},{d.min():.6g},{count}")


if __name__ == "__main__":
    main()
