"""Command-line front end.

    collabnet equilibrium     --scenario s.json [--out DIR] [--format csv|json]
    collabnet stability       --scenario s.json [--assert-stable] [--format json|dot]
    collabnet enumerate       --scenario s.json [--cap N] [--format json|dot]
    collabnet verify-theorem  --scenario s.json [--seed S]
    collabnet condition       --scenario s.json
    collabnet reproduce-paper [--alpha A] [--psi P] [--k 2,3,4,3,2] [--nodes V]

Exit codes: 0 ok, 2 validation failure, 3 solver non-convergence,
4 assertion failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, fivefirm
from .costs import is_constant
from .cournot import AspatialMarket, cournot_quantities
from .errors import CollabNetError, NonConvergence, OracleFailure
from .graphs import is_graphical
from .scenario import Scenario, as_builtin, scenario_hash
from .spatial import spatial_quantities
from .stability import PayoffOracle, enumerate_stable_graphs, is_pairwise_stable, model_condition, verify_theorem_class
from .vi import equilibrium_vi

EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGENCE, EXIT_ASSERTION = 0, 2, 3, 4


class AssertionFailure(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(as_builtin(obj), indent=2, sort_keys=True) + "\n"


def _envelope(command: str, digest: str, result: dict, paths: dict) -> dict:
    return {"tool": "collabnet", "version": __version__, "command": command,
            "scenario_hash": digest, "solver_paths": paths, "result": result}


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def _wants(formats, fmt: str, default: bool = True) -> bool:
    return fmt in formats if formats else default


def _oracle(scn: Scenario) -> PayoffOracle:
    return PayoffOracle.for_model(scn.market, scn.cost, scn.method, config=scn.solver)


def cmd_equilibrium(scn: Scenario, out: Path, formats=()) -> dict:
    path = "vi"
    outcome = None
    if scn.method == "closed_form" and is_constant(scn.cost):
        if isinstance(scn.market, AspatialMarket):
            outcome = cournot_quantities(scn.market, scn.cost, scn.graph)
        else:
            outcome = spatial_quantities(scn.market, scn.cost, scn.graph)
        path = "closed_form"
        if not outcome.feasible:
            outcome, path = None, "vi_fallback"
    if outcome is None:
        outcome, _ = equilibrium_vi(scn.market, scn.cost, scn.graph, scn.solver)
        outcome.path = path
    result = outcome.to_dict()
    if _wants(formats, "csv"):
        _write(out, "equilibrium.csv", outcome.to_csv())
    if _wants(formats, "json"):
        _write(out, "equilibrium.json", _dump(_envelope("equilibrium", scn.hash, result, {"equilibrium": path})))
    return result


def cmd_stability(scn: Scenario, out: Path, formats=()) -> dict:
    oracle = _oracle(scn)
    report = is_pairwise_stable(scn.graph, oracle)
    result = report.to_dict()
    if _wants(formats, "json"):
        _write(out, "stability.json", _dump(_envelope("stability", scn.hash, result, dict(oracle.paths))))
    if _wants(formats, "dot", default=False):
        _write(out, "stability.dot", scn.graph.to_dot("g"))
    return result


def cmd_enumerate(scn: Scenario, out: Path, formats=()) -> dict:
    oracle = _oracle(scn)
    stable = enumerate_stable_graphs(scn.n, oracle, scn.cap)
    result = {"n": scn.n, "count": len(stable),
              "graphs": [{"edges": [list(e) for e in g.sorted_edges()], "degrees": g.degrees().tolist()}
                         for g in stable]}
    if _wants(formats, "json"):
        _write(out, "stable_graphs.json", _dump(_envelope("enumerate", scn.hash, result, dict(oracle.paths))))
    if _wants(formats, "dot", default=False):
        _write(out, "stable_graphs.dot", "".join(g.to_dot(f"stable{idx}") for idx, g in enumerate(stable)))
    return result


def cmd_verify_theorem(scn: Scenario, out: Path, formats=()) -> dict:
    oracle = _oracle(scn)
    report = verify_theorem_class(scn.k, scn.market, scn.cost, scn.mode, scn.count, scn.seed, scn.cap,
                                  oracle=oracle)
    result = report.to_dict()
    if _wants(formats, "json"):
        _write(out, "verify_theorem.json", _dump(_envelope("verify-theorem", scn.hash, result, dict(oracle.paths))))
    if _wants(formats, "dot", default=False):
        _write(out, "realizations.dot", "".join(g.to_dot(f"g{idx}") for idx, g in enumerate(report.graphs)))
    return result


def cmd_condition(scn: Scenario, out: Path, formats=()) -> dict:
    cond = model_condition(scn.market, scn.cost)
    result = cond.to_dict()
    if _wants(formats, "json"):
        _write(out, "condition.json", _dump(_envelope("condition", scn.hash, result, {"condition": "closed_form"})))
    return result


def _fmt(x: float) -> str:
    return f"{x:g}"


def condition_chain(terms: dict) -> list[str]:
    a, g0, n, s = terms["alpha"], terms["gamma0"], terms["n"], terms["max_shipping"]
    fa, fb, f1, fm1, f0 = terms["f(n-1)"], terms["f(1-n)"], terms["f(1)"], terms["f(-1)"], terms["f(0)"]
    far = max(fa, fb)
    step = max(f1 - f0, fm1 - f0)
    half = 0.5 * (n - 1)
    return [
        f"{_fmt(a)}-{_fmt(g0)}-{n}·[{_fmt(s)}+max({_fmt(fa)},{_fmt(fb)})]"
        f"-1/2({n - 1})max{{{_fmt(f1)}-{_fmt(f0)},{_fmt(fm1)}-{_fmt(f0)}}} > 0",
        f"{_fmt(a - g0)}-{n}·{_fmt(s + far)}-{_fmt(half)}·{_fmt(step)} > 0",
        f"{_fmt(a - g0)}-{_fmt(n * (s + far))}-{_fmt(half * step)} > 0",
        f"{_fmt(a - g0 - n * (s + far) - half * step)} > 0",
    ]


def cmd_reproduce_paper(out: Path, alpha: float = fivefirm.ALPHA, psi: float = fivefirm.PSI,
                        k=fivefirm.K, nodes: int = fivefirm.NODES) -> dict:
    """Run the five-firm example end to end and write a markdown+JSON bundle.

    Returns the bundle; ``bundle["passed"]`` is False when any check fails.
    """
    k = tuple(int(x) for x in k)
    doc = fivefirm.scenario_doc(alpha, psi, k, nodes)
    digest = scenario_hash(doc)
    market = fivefirm.market(alpha, nodes=nodes, n=len(k))
    cost = fivefirm.cost(psi, k)
    cond = model_condition(market, cost)
    checks: dict[str, bool] = {"condition_holds": cond.holds, "k_graphical": is_graphical(k)}
    oracle = PayoffOracle.for_model(market, cost)
    figures = {}
    if k == fivefirm.K:
        for name, g in (("figure1", fivefirm.FIGURE_1), ("figure2", fivefirm.FIGURE_2)):
            rep = is_pairwise_stable(g, oracle)
            figures[name] = {"edges": [list(e) for e in g.sorted_edges()], "degrees": g.degrees().tolist(),
                             "verdict": rep.verdict, "deviations_checked": rep.deviations_checked}
            checks[f"{name}_stable"] = rep.stable
            _write(out, f"{name}.dot", g.to_dot(name))
    theorem = None
    if checks["k_graphical"]:
        rep = verify_theorem_class(list(k), market, cost, "exhaustive", oracle=oracle)
        theorem = {"status": rep.status, "realizations": len(rep.graphs),
                   "max_audit_error": rep.max_audit_error, "all_deltas_negative": rep.all_deltas_negative}
        checks["theorem_class_stable"] = rep.passed
        if rep.graphs:
            eq = spatial_quantities(market, cost, rep.graphs[0])
            theorem["demand"] = float(eq.demands[0, 0])
    bundle = {
        "tool": "collabnet", "version": __version__, "scenario_hash": digest, "scenario": doc,
        "condition": cond.to_dict(), "condition_chain": condition_chain(cond.terms),
        "figures": figures, "theorem": theorem, "checks": checks,
        "solver_paths": dict(oracle.paths), "passed": all(checks.values()),
    }
    _write(out, "reproduction.json", _dump(bundle))
    _write(out, "reproduction.md", _markdown(bundle))
    return bundle


def _markdown(b: dict) -> str:
    t = b["condition"]["terms"]
    lines = [
        "# Five-firm spatial collaboration example", "",
        f"tool collabnet {b['version']}, scenario `{b['scenario_hash']}`", "",
        "## Parameters", "",
        "| quantity | value |", "|---|---|",
        f"| alpha | {_fmt(t['alpha'])} |", f"| gamma0 | {_fmt(t['gamma0'])} |", f"| n | {t['n']} |",
        f"| max s_li | {_fmt(t['max_shipping'])} |",
        f"| f(n-1) | {_fmt(t['f(n-1)'])} |", f"| f(1-n) | {_fmt(t['f(1-n)'])} |",
        f"| f(1) | {_fmt(t['f(1)'])} |", f"| f(-1) | {_fmt(t['f(-1)'])} |", f"| f(0) | {_fmt(t['f(0)'])} |",
        "", "## Nonnegativity condition", "",
    ]
    lines += [f"    {ln}" for ln in b["condition_chain"]]
    verdict = "met" if b["condition"]["holds"] else "NOT met (theorem hypothesis unmet)"
    lines += ["", f"Condition value {_fmt(b['condition']['value'])}: {verdict}.", ""]
    if b["figures"]:
        lines += ["## Figure graphs", ""]
        for name, f in b["figures"].items():
            edges = ", ".join(f"{i}-{j}" for i, j in f["edges"])
            lines.append(f"- {name}: degrees {f['degrees']}, edges {edges}: **{f['verdict']}** "
                         f"({f['deviations_checked']} deviations checked)")
        lines.append("")
    if b["theorem"] is not None:
        th = b["theorem"]
        lines += ["## Degree-class verification", "",
                  f"- realizations checked: {th['realizations']}",
                  f"- status: {th['status']}",
                  f"- max |analytic - direct| (relative): {th['max_audit_error']:.3g}",
                  f"- all deviation deltas negative: {th['all_deltas_negative']}"]
        if "demand" in th:
            lines.append(f"- per-node demand at k-realizations: {th['demand']!r}")
        lines.append("")
    lines += ["## Checks", ""] + [f"- {name}: {'PASS' if ok else 'FAIL'}" for name, ok in b["checks"].items()]
    lines += ["", f"Overall: {'PASS' if b['passed'] else 'FAIL'}", ""]
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="collabnet", description=__doc__.splitlines()[0] if __doc__ else None)
    parser.add_argument("--version", action="version", version=f"collabnet {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, help="scenario JSON file")
    common.add_argument("--seed", type=int, help="seed for sampled modes (overrides scenario)")
    common.add_argument("--out", help="output directory (default: scenario 'out' or ./out)")
    common.add_argument("--cap", type=int, help="enumeration cap on firm count")
    common.add_argument("--assert-stable", action="store_true", help="exit 4 on an unstable verdict")
    common.add_argument("--format", action="append", choices=["csv", "json", "dot"],
                        help="restrict output formats (repeatable)")
    for name in ("equilibrium", "stability", "enumerate", "verify-theorem", "condition"):
        sub.add_parser(name, parents=[common])

    rp = sub.add_parser("reproduce-paper", help="run the five-firm example bundle")
    rp.add_argument("--alpha", type=float, default=fivefirm.ALPHA)
    rp.add_argument("--psi", type=float, default=fivefirm.PSI)
    rp.add_argument("--k", default=",".join(map(str, fivefirm.K)), help="comma-separated target degrees")
    rp.add_argument("--nodes", type=int, default=fivefirm.NODES, help="number of market nodes")
    rp.add_argument("--out", default="out/reproduction")
    return parser


COMMANDS = {
    "equilibrium": cmd_equilibrium,
    "stability": cmd_stability,
    "enumerate": cmd_enumerate,
    "verify-theorem": cmd_verify_theorem,
    "condition": cmd_condition,
}


def _summary(command: str, result: dict) -> str:
    if command == "equilibrium":
        return f"equilibrium via {result['path']}: " + " ".join(f"q{r['firm']}={r['q']:.6g}" for r in result["firms"])
    if command == "stability":
        return f"{result['verdict']} ({result['deviations_checked']} deviations, {len(result['violations'])} violations)"
    if command == "enumerate":
        return f"{result['count']} stable graph(s) on {result['n']} firms"
    if command == "verify-theorem":
        return f"{result['status']} (condition value {result['condition']['value']:g}, {len(result['graphs'])} graph(s))"
    if command == "condition":
        return f"{'PASS' if result['holds'] else 'FAIL'} value {result['value']:g}"
    return ""


def run(args) -> int:
    if args.command == "reproduce-paper":
        k = [int(x) for x in args.k.split(",") if x.strip()]
        bundle = cmd_reproduce_paper(Path(args.out), args.alpha, args.psi, k, args.nodes)
        print(f"condition value {bundle['condition']['value']:g}; overall {'PASS' if bundle['passed'] else 'FAIL'}")
        return EXIT_OK if bundle["passed"] else EXIT_ASSERTION

    scn = Scenario.load(args.scenario)
    if args.seed is not None:
        scn.seed = args.seed
    if args.cap is not None:
        scn.cap = args.cap
    out = Path(args.out or scn.out or "out")
    result = COMMANDS[args.command](scn, out, tuple(args.format or ()))
    print(_summary(args.command, result))
    if args.assert_stable:
        if args.command == "stability" and result["verdict"] != "stable":
            return EXIT_ASSERTION
        if args.command == "verify-theorem" and result["status"] != "PASS":
            return EXIT_ASSERTION
        if args.command == "condition" and not result["holds"]:
            return EXIT_ASSERTION
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except OracleFailure as exc:
        code = EXIT_NONCONVERGENCE if isinstance(exc.__cause__, NonConvergence) else EXIT_VALIDATION
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (CollabNetError, ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
