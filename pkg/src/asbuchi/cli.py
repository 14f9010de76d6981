"""Command-line interface.

Exit codes: 0 success, 1 divergence or validation failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import bench
from .engine import SymbolicEngine
from .explicit import OracleTooLarge, classical_explicit, impr_algo, impr_win_lose, oracle_almost_sure, win_lose
from .generators import GenError, GenParams, gen_layered_mdp, gen_layered_scc_graph, gen_random_mdp, perturb_mdp
from .model import Digraph, MdpFormatError, MdpGraph, read_mdp, write_mdp
from .scc import improved_scc_find, scc_diameters, scc_explicit, scc_find
from .symbolic import smdv_symb_impr_algo, symb_classical, symb_impr_algo, symb_impr_win_lose

SOLVERS = [
    "classical",
    "symb-classical",
    "impr",
    "symb-impr",
    "smdv",
    "win-lose",
    "impr-win-lose",
    "symb-impr-win-lose",
    "oracle",
]


class UsageError(Exception):
    pass


def _load(path: str) -> MdpGraph:
    if not Path(path).is_file():
        raise UsageError(f"no such file: {path}")
    return read_mdp(path)


def solve(g: MdpGraph, algo: str, target=None):
    """Run one solver; returns (winning ids, verdict stream or None, ledger dict or None)."""
    t = g.target if target is None else target
    if algo == "classical":
        return sorted(classical_explicit(g, t).states), None, None
    if algo == "impr":
        return sorted(impr_algo(g, t).states), None, None
    if algo == "win-lose":
        s = win_lose(g, t)
        return sorted(s.winning()), s, None
    if algo == "impr-win-lose":
        s = impr_win_lose(g, t)
        return sorted(s.winning()), s, None
    if algo == "oracle":
        return sorted(oracle_almost_sure(g, t).states), None, None
    eng = SymbolicEngine(g)
    if algo == "symb-impr-win-lose":
        s, rep = symb_impr_win_lose(g, t, eng)
        return rep.winning_ids(), s, rep.ledger.as_dict()
    fn = {"symb-classical": symb_classical, "symb-impr": symb_impr_algo, "smdv": smdv_symb_impr_algo}[algo]
    rep = fn(g, t, eng)
    return rep.winning_ids(), None, rep.ledger.as_dict()


def cmd_solve(args) -> int:
    g = _load(args.file)
    ids, stream, ledger = solve(g, args.algo)
    if args.stream:
        if stream is None:
            raise UsageError(f"--stream needs a win/lose solver, not {args.algo}")
        sys.stdout.write(stream.to_jsonl())
    else:
        print(" ".join(map(str, ids)))
    if args.ledger:
        if ledger is None:
            raise UsageError(f"--ledger needs a symbolic solver, not {args.algo}")
        print(json.dumps(ledger, sort_keys=True))
    return 0


def cmd_scc(args) -> int:
    g = _load(args.file)
    ref = scc_explicit(g)
    if args.algo == "explicit":
        part, ledger = ref, None
    else:
        eng = SymbolicEngine(g)
        part = (scc_find if args.algo == "prior" else improved_scc_find)(eng)
        ledger = eng.ledger.as_dict()
        if part.canonical() != ref.canonical():
            print("partition differs from the explicit decomposition", file=sys.stderr)
            return 1
    scc_diameters(part, g)
    print(part.to_json())
    if args.audit_bounds:
        if ledger is None:
            raise UsageError("--audit-bounds needs a symbolic algorithm")
        audit = audit_scc_bounds(g, part, ledger["image_steps"], args.algo)
        print(json.dumps(audit, sort_keys=True))
        if not audit["ok"]:
            return 1
    return 0


def audit_scc_bounds(g: Digraph, part, steps: int, algo: str) -> dict:
    n, big_n, d_star = g.n, part.count, part.d_star
    if algo == "prior":
        bound = 5 * n + 3 * big_n + 3
    elif d_star is None:
        bound = 3 * n + big_n + 3 * big_n + 3
    else:
        bound = min(3 * n + big_n, 5 * d_star + big_n) + 3 * big_n + 3
    return {"image_steps": steps, "bound": bound, "n": n, "N": big_n, "D_star": d_star, "ok": steps <= bound}


def _parse_params(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise UsageError(f"expected key=value, got {pair!r}")
        k, v = pair.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def cmd_gen(args) -> int:
    params = _parse_params(args.params)
    fields = {f for f in GenParams.__dataclass_fields__}
    typed = {}
    try:
        for k, v in params.items():
            if k in ("src", "epsilon"):
                continue
            if k not in fields:
                raise UsageError(f"unknown parameter {k!r}")
            kind = type(getattr(GenParams(), k))
            typed[k] = (v.lower() in ("1", "true", "yes")) if kind is bool else kind(v)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.kind == "mdp":
        write_mdp(gen_random_mdp(GenParams(**typed)), args.output)
    elif args.kind == "layered-mdp":
        write_mdp(gen_layered_mdp(GenParams(**typed)), args.output)
    elif args.kind == "perturb":
        if "src" not in params:
            raise UsageError("perturb needs src=<file>")
        g = _load(params["src"])
        write_mdp(perturb_mdp(g, float(params.get("epsilon", 0.05)), int(typed.get("seed", 0))), args.output)
    else:
        d, truth = gen_layered_scc_graph(GenParams(**typed))
        write_mdp(MdpGraph.build(d.n, d.edges()), args.output)
        Path(str(args.output) + ".truth.json").write_text(json.dumps(truth) + "\n")
    return 0


def cmd_bench(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        raise UsageError(f"no such file: {path}")
    try:
        cfg = bench.parse_config(path.read_text())
    except bench.ConfigError as exc:
        raise UsageError(str(exc)) from None
    if args.select_hard is not None:
        cfg.select_hard = args.select_hard
    report = bench.run_benchmark(cfg, progress=(lambda gid: print(gid, file=sys.stderr)) if args.verbose else None)
    bench.write_report(report, args.output)
    sys.stdout.write(report.to_markdown())
    for e in report.errors:
        print(e, file=sys.stderr)
    return 1 if report.errors else 0


def cmd_verify(args) -> int:
    g = _load(args.file)
    results = {}
    for algo in SOLVERS[:-1]:
        results[algo] = solve(g, algo)[0]
    try:
        results["oracle"] = solve(g, "oracle")[0]
        oracle = True
    except OracleTooLarge:
        oracle = False
    distinct = {tuple(v) for v in results.values()}
    count = len(SOLVERS) - 1
    if len(distinct) != 1:
        for algo, ids in results.items():
            print(f"{algo}: {' '.join(map(str, ids))}")
        print("solvers disagree")
        return 1
    print(f"{count} solvers + oracle agree" if oracle else f"{count} solvers agree (oracle infeasible)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="asbuchi", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="almost-sure Büchi winning set")
    p.add_argument("file")
    p.add_argument("--algo", choices=SOLVERS, default="symb-impr")
    p.add_argument("--stream", action="store_true", help="print Win/Lose events as JSON lines")
    p.add_argument("--ledger", action="store_true", help="print the symbolic step ledger as JSON")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("scc", help="SCC decomposition as JSON")
    p.add_argument("file")
    p.add_argument("--algo", choices=["explicit", "prior", "improved"], default="improved")
    p.add_argument("--audit-bounds", action="store_true")
    p.set_defaults(func=cmd_scc)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("kind", choices=["mdp", "layered-mdp", "perturb", "layered"])
    p.add_argument("params", nargs="*", help="key=value generator parameters")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark config")
    p.add_argument("config")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--select-hard", type=int, default=None, metavar="K")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="run every solver and the oracle, check agreement")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (MdpFormatError, GenError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
