"""Run the five-firm worked example and print the markdown report.

    python3 scripts/reproduce_five_firm.py [--alpha 103] [--psi 2] [--out out/reproduction]
"""

import argparse
from pathlib import Path

from collabnet import fivefirm
from collabnet.cli import cmd_reproduce_paper


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--alpha", type=float, default=fivefirm.ALPHA)
    parser.add_argument("--psi", type=float, default=fivefirm.PSI)
    parser.add_argument("--nodes", type=int, default=fivefirm.NODES)
    parser.add_argument("--out", default="out/reproduction")
    args = parser.parse_args()
    out = Path(args.out)
    bundle = cmd_reproduce_paper(out, args.alpha, args.psi, fivefirm.K, args.nodes)
    print((out / "reproduction.md").read_text())
    return 0 if bundle["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
