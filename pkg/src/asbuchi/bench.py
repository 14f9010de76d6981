"""Benchmark harness: generate instances, run solvers, cross-check, report.

Config grammar: one ``key = value`` per line, ``#`` comments, blank lines
ignored. Lists are comma separated; integer ranges may be written ``a-b``
(inclusive). Keys:

``family``            mdp | layered-mdp | perturbed | layered | digraph
``sizes``             list of state counts
``density``           edges per state (``m = density * n``) or ``nlogn``
``layers``            layer count, or ``n/<k>`` for ``n // k`` layers
``intra_degree``      extra intra-layer edges per state (layered)
``inter_density``     inter-layer edges per state (layered)
``target_fraction``   fraction of target states (MDP families)
``player1_fraction``  fraction of player-1 states (MDP families)
``epsilon``           rewiring rate (perturbed, select-hard)
``perturbations``     perturbed copies per selected instance (select-hard)
``seeds``             list of 64-bit seeds
``algorithms``        solver names (see ``ALGORITHMS``)
``repetitions``       timed repetitions per run (median wall time kept)
``select_hard``       keep the k most expensive instances per size, then bench perturbations of them
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .engine import SymbolicEngine
from .explicit import classical_explicit, impr_algo, impr_win_lose, oracle_almost_sure, win_lose
from .generators import (
    GenParams,
    gen_digraph,
    gen_layered_mdp,
    gen_layered_scc_graph,
    gen_random_mdp,
    perturb_mdp,
)
from .model import MdpGraph
from .scc import improved_scc_find, scc_explicit, scc_find
from .symbolic import smdv_symb_impr_algo, symb_classical, symb_impr_algo, symb_impr_win_lose

CSV_COLUMNS = [
    "graph_id",
    "n",
    "m",
    "algorithm",
    "image_steps",
    "pre_steps",
    "post_steps",
    "cpre_steps",
    "cpre1_steps",
    "cardinality_ops",
    "wall_time_us",
    "result_size",
    "result_hash",
]

MDP_FAMILIES = {"mdp", "layered-mdp", "perturbed"}
GRAPH_FAMILIES = {"layered", "digraph"}


class ConfigError(ValueError):
    pass


def ids_hash(ids) -> str:
    return hashlib.sha256(json.dumps(sorted(ids)).encode()).hexdigest()


@dataclass
class RunResult:
    ids: list[int] | None  # winning ids, or None for partitions
    partition: tuple | None
    ledger: dict

    @property
    def size(self) -> int:
        return len(self.partition) if self.partition is not None else len(self.ids)

    @property
    def result_hash(self) -> str:
        if self.partition is not None:
            return hashlib.sha256(json.dumps(self.partition).encode()).hexdigest()
        return ids_hash(self.ids)


_ZERO = {k: 0 for k in ("image_steps", "pre_steps", "post_steps", "cpre_steps", "cpre1_steps", "cardinality_ops")}


def _explicit(fn):
    def run(g, t):
        return RunResult(sorted(fn(g, t)), None, dict(_ZERO))

    return run


def _symbolic(fn):
    def run(g, t):
        rep = fn(g, t, SymbolicEngine(g))
        return RunResult(rep.winning_ids(), None, rep.ledger.as_dict())

    return run


def _siwl(g, t):
    stream, rep = symb_impr_win_lose(g, t, SymbolicEngine(g))
    return RunResult(sorted(stream.winning()), None, rep.ledger.as_dict())


def _scc(fn):
    def run(g, _t=None):
        eng = SymbolicEngine(g)
        part = fn(eng)
        return RunResult(None, part.canonical(), eng.ledger.as_dict())

    return run


BUCHI_ALGORITHMS: dict[str, Callable] = {
    "classical": _explicit(lambda g, t: classical_explicit(g, t).states),
    "impr": _explicit(lambda g, t: impr_algo(g, t).states),
    "win-lose": _explicit(lambda g, t: win_lose(g, t).winning()),
    "impr-win-lose": _explicit(lambda g, t: impr_win_lose(g, t).winning()),
    "oracle": _explicit(lambda g, t: oracle_almost_sure(g, t).states),
    "symb-classical": _symbolic(symb_classical),
    "symb-impr": _symbolic(symb_impr_algo),
    "smdv": _symbolic(smdv_symb_impr_algo),
    "symb-impr-win-lose": _siwl,
}

SCC_ALGORITHMS: dict[str, Callable] = {
    "explicit": lambda g, _t=None: RunResult(None, scc_explicit(g).canonical(), dict(_ZERO)),
    "prior": _scc(scc_find),
    "improved": _scc(improved_scc_find),
}

ALGORITHMS = {**BUCHI_ALGORITHMS, **SCC_ALGORITHMS}


@dataclass
class BenchConfig:
    family: str = "mdp"
    sizes: list[int] = field(default_factory=lambda: [100])
    density: str = "4"
    layers: str = "n/10"
    intra_degree: float = 1.0
    inter_density: float = 1.0
    target_fraction: float = 0.05
    player1_fraction: float = 0.5
    epsilon: float = 0.05
    perturbations: int = 3
    seeds: list[int] = field(default_factory=lambda: [0])
    algorithms: list[str] = field(default_factory=list)
    repetitions: int = 1
    select_hard: int = 0

    def validate(self) -> None:
        if self.family not in MDP_FAMILIES | GRAPH_FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if not self.algorithms:
            raise ConfigError("empty algorithm list")
        table = BUCHI_ALGORITHMS if self.family in MDP_FAMILIES else SCC_ALGORITHMS
        for a in self.algorithms:
            if a not in table:
                raise ConfigError(f"algorithm {a!r} does not apply to family {self.family!r}")
        if not self.sizes or any(n < 1 for n in self.sizes):
            raise ConfigError("sizes must be positive")
        if self.repetitions < 1:
            raise ConfigError("repetitions must be at least 1")
        for name in ("target_fraction", "player1_fraction", "epsilon"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise ConfigError(f"{name}={v} outside [0, 1]")

    def edges_for(self, n: int) -> int:
        if self.density == "nlogn":
            return int(n * math.log(n)) if n > 1 else 1
        return min(int(round(float(self.density) * n)), n * n)

    def layers_for(self, n: int) -> int:
        if self.layers.startswith("n/"):
            return max(1, n // int(self.layers[2:]))
        return max(1, min(n, int(self.layers)))


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def parse_config(text: str) -> BenchConfig:
    cfg = BenchConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        try:
            if key in ("sizes", "seeds"):
                setattr(cfg, key, _int_list(value))
            elif key == "algorithms":
                cfg.algorithms = [a.strip() for a in value.split(",") if a.strip()]
            elif key in ("family", "density", "layers"):
                setattr(cfg, key, value)
            elif key in ("intra_degree", "inter_density", "target_fraction", "player1_fraction", "epsilon"):
                setattr(cfg, key, float(value))
            elif key in ("perturbations", "repetitions", "select_hard"):
                setattr(cfg, key, int(value))
            else:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    cfg.validate()
    return cfg


def make_instance(cfg: BenchConfig, n: int, seed: int):
    """Build one instance; returns (graph, target)."""
    p = GenParams(
        kind=cfg.family,
        n=n,
        m=cfg.edges_for(n),
        player1_fraction=cfg.player1_fraction,
        target_fraction=cfg.target_fraction,
        layers=cfg.layers_for(n),
        intra_degree=cfg.intra_degree,
        inter_density=cfg.inter_density,
        seed=seed,
    )
    if cfg.family == "mdp":
        g = gen_random_mdp(p)
    elif cfg.family == "layered-mdp":
        g = gen_layered_mdp(p)
    elif cfg.family == "perturbed":
        g = perturb_mdp(gen_random_mdp(p), cfg.epsilon, seed ^ 0xA5A5)
    elif cfg.family == "layered":
        g, _ = gen_layered_scc_graph(p)
        return g, None
    else:
        return gen_digraph(p), None
    return g, g.target


def _reference(g, target) -> str:
    if target is None:
        return scc_explicit(g).result_hash()
    return ids_hash(classical_explicit(g, target).states)


def run_instance(graph_id: str, g, target, algorithms, repetitions: int = 1) -> tuple[list[dict], list[str]]:
    """Run each algorithm; rows whose hash differs from the explicit reference are dropped and reported."""
    ref = _reference(g, target)
    rows, errors = [], []
    for name in algorithms:
        fn = ALGORITHMS[name]
        times = []
        res = None
        for _ in range(repetitions):
            t0 = time.perf_counter()
            r = fn(g, target)
            times.append(time.perf_counter() - t0)
            if res is not None and (r.ledger != res.ledger or r.result_hash != res.result_hash):
                errors.append(f"{graph_id} {name}: nondeterministic result")
            res = r
        if res.result_hash != ref:
            errors.append(f"{graph_id} {name}: result differs from the explicit reference")
            continue
        row = {"graph_id": graph_id, "n": g.n, "m": g.m, "algorithm": name}
        row.update({k: res.ledger[k] for k in _ZERO})
        row["wall_time_us"] = int(statistics.median(times) * 1e6)
        row["result_size"] = res.size
        row["result_hash"] = res.result_hash
        rows.append(row)
    return rows, errors


@dataclass
class BenchReport:
    rows: list[dict]
    errors: list[str]
    config: BenchConfig

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for r in sorted(self.rows, key=lambda r: (r["graph_id"], r["algorithm"])):
            w.writerow(r)
        return buf.getvalue()

    def means(self) -> dict[tuple[int, str], float]:
        acc: dict[tuple[int, str], list[int]] = {}
        for r in self.rows:
            acc.setdefault((r["n"], r["algorithm"]), []).append(r["image_steps"])
        return {k: statistics.fmean(v) for k, v in acc.items()}

    def to_markdown(self) -> str:
        means = self.means()
        algs = self.config.algorithms
        sizes = sorted({n for n, _ in means})
        improvement = "prior" in algs and "improved" in algs
        head = ["Number of states"] + algs + (["Percentage Improvement"] if improvement else [])
        lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
        for n in sizes:
            cells = [str(n)]
            for a in algs:
                v = means.get((n, a))
                cells.append("-" if v is None else f"{v:.1f}")
            if improvement:
                a, b = means.get((n, "prior")), means.get((n, "improved"))
                cells.append("-" if not a or b is None else f"{100 * (a - b) / a:.2f}")
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"


def _hard_instances(cfg: BenchConfig, n: int):
    """Keep the ``select_hard`` costliest seeds for size ``n`` and yield perturbed copies."""
    scored = []
    for seed in cfg.seeds:
        g, t = make_instance(cfg, n, seed)
        cost = sum(ALGORITHMS[a](g, t).ledger["image_steps"] for a in cfg.algorithms)
        scored.append((-cost, seed, g, t))
    scored.sort(key=lambda x: (x[0], x[1]))
    for _, seed, g, t in scored[: cfg.select_hard]:
        for j in range(cfg.perturbations):
            h = perturb_mdp(g, cfg.epsilon, (seed << 8) + j) if isinstance(g, MdpGraph) else g
            yield f"{cfg.family}-n{n}-s{seed}-p{j}", h, (t if t is None else h.target)


def _instances(cfg: BenchConfig):
    for n in cfg.sizes:
        if cfg.select_hard:
            yield from _hard_instances(cfg, n)
            continue
        for seed in cfg.seeds:
            g, t = make_instance(cfg, n, seed)
            yield f"{cfg.family}-n{n}-s{seed}", g, t


def run_benchmark(cfg: BenchConfig, progress: Callable[[str], None] | None = None) -> BenchReport:
    cfg.validate()
    rows, errors = [], []
    for graph_id, g, t in _instances(cfg):
        r, e = run_instance(graph_id, g, t, cfg.algorithms, cfg.repetitions)
        rows.extend(r)
        errors.extend(e)
        if progress is not None:
            progress(graph_id)
    return BenchReport(rows, errors, cfg)


def write_report(report: BenchReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(report.to_csv())
    (out / "table.md").write_text(report.to_markdown())
    meta = {"config": report.config.__dict__, "errors": report.errors}
    (out / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")

