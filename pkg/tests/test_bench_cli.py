import csv
import io
import json

import pytest

from asbuchi import Digraph, bench, m1
from asbuchi.cli import audit_scc_bounds, main
from asbuchi.model import write_mdp
from asbuchi.scc import SccPartition

SMALL = """
# tiny mixed run
family = layered-mdp
sizes = 20, 40
density = 3
layers = n/5
seeds = 1-3
algorithms = symb-classical, symb-impr, smdv
"""


@pytest.fixture
def m1_file(tmp_path):
    path = tmp_path / "m1.mdp"
    write_mdp(m1(), path)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# config


def test_parse_config():
    cfg = bench.parse_config(SMALL)
    assert cfg.family == "layered-mdp" and cfg.sizes == [20, 40] and cfg.seeds == [1, 2, 3]
    assert cfg.algorithms == ["symb-classical", "symb-impr", "smdv"]
    assert cfg.edges_for(20) == 60 and cfg.layers_for(40) == 8


def test_nlogn_density():
    cfg = bench.parse_config("density = nlogn\nalgorithms = smdv")
    assert cfg.edges_for(100) == 460


@pytest.mark.parametrize("text", [
    "algorithms =",
    "family = nope\nalgorithms = smdv",
    "algorithms = prior",
    "family = layered\nalgorithms = smdv",
    "sizes = x\nalgorithms = smdv",
    "color = red\nalgorithms = smdv",
    "just words",
    "repetitions = 0\nalgorithms = smdv",
    "epsilon = 2\nalgorithms = smdv",
])
def test_bad_configs(text):
    with pytest.raises(bench.ConfigError):
        bench.parse_config(text)


# harness


def test_single_instance_two_algorithms():
    g = m1()
    rows, errors = bench.run_instance("m1", g, g.target, ["symb-classical", "smdv"])
    assert not errors and len(rows) == 2
    assert rows[0]["result_hash"] == rows[1]["result_hash"]
    assert rows[0]["result_size"] == 2


def test_csv_columns_and_order():
    report = bench.run_benchmark(bench.parse_config(SMALL))
    assert not report.errors
    reader = csv.DictReader(io.StringIO(report.to_csv()))
    assert reader.fieldnames == bench.CSV_COLUMNS
    rows = list(reader)
    assert len(rows) == 2 * 3 * 3
    keys = [(r["graph_id"], r["algorithm"]) for r in rows]
    assert keys == sorted(keys)


def test_csv_deterministic_apart_from_wall_time():
    def strip(text):
        return [{k: v for k, v in r.items() if k != "wall_time_us"} for r in csv.DictReader(io.StringIO(text))]

    a = bench.run_benchmark(bench.parse_config(SMALL)).to_csv()
    b = bench.run_benchmark(bench.parse_config(SMALL)).to_csv()
    assert strip(a) == strip(b)


def test_solvers_agree_per_instance():
    report = bench.run_benchmark(bench.parse_config(SMALL))
    by_graph = {}
    for r in report.rows:
        by_graph.setdefault(r["graph_id"], set()).add(r["result_hash"])
    assert all(len(h) == 1 for h in by_graph.values())


def test_scc_table_has_improvement_column():
    cfg = bench.parse_config("family = layered\nsizes = 200\nlayers = n/20\nseeds = 0-1\nalgorithms = prior, improved")
    table = bench.run_benchmark(cfg).to_markdown()
    assert table.splitlines()[0] == "| Number of states | prior | improved | Percentage Improvement |"


def test_select_hard_perturbs_top_seeds():
    cfg = bench.parse_config(
        "family = mdp\nsizes = 30\nseeds = 0-5\nselect_hard = 2\nperturbations = 2\nalgorithms = symb-impr"
    )
    report = bench.run_benchmark(cfg)
    assert len(report.rows) == 4 and not report.errors


def test_mismatch_is_dropped(monkeypatch):
    fake = bench.RunResult([0, 1, 2, 3], None, dict(bench._ZERO))
    monkeypatch.setitem(bench.ALGORITHMS, "smdv", lambda g, t: fake)
    g = m1()
    rows, errors = bench.run_instance("m1", g, g.target, ["symb-impr", "smdv"])
    assert [r["algorithm"] for r in rows] == ["symb-impr"]
    assert errors and "smdv" in errors[0]


# cli


def test_cli_solve(capsys, m1_file):
    assert run(capsys, "solve", m1_file)[:2] == (0, "0 2\n")
    for algo in ("classical", "impr", "oracle", "win-lose", "symb-impr-win-lose"):
        assert run(capsys, "solve", m1_file, "--algo", algo)[1] == "0 2\n"


def test_cli_stream(capsys, m1_file):
    code, out, _ = run(capsys, "solve", m1_file, "--algo", "symb-impr-win-lose", "--stream")
    events = [json.loads(line) for line in out.splitlines()]
    assert code == 0
    assert [(e["verdict"], e["states"]) for e in events] == [("win", [0, 2]), ("lose", [1, 3])]


def test_cli_ledger(capsys, m1_file):
    code, out, _ = run(capsys, "solve", m1_file, "--algo", "symb-classical", "--ledger")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "0 2"
    assert json.loads(lines[1])["image_steps"] == 7


def test_cli_stream_needs_win_lose(capsys, m1_file):
    assert run(capsys, "solve", m1_file, "--algo", "smdv", "--stream")[0] == 2


def test_cli_verify(capsys, m1_file):
    assert run(capsys, "verify", m1_file)[:2] == (0, "8 solvers + oracle agree\n")


def test_cli_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "solve", str(tmp_path / "nope.mdp"))
    assert code == 2 and "no such file" in err


def test_cli_bad_file(capsys, tmp_path):
    path = tmp_path / "bad.mdp"
    path.write_text("states 2\nedge 0 5\n")
    assert run(capsys, "solve", str(path))[0] == 1


def test_cli_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "solve")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_cli_scc(capsys, m1_file):
    code, out, _ = run(capsys, "scc", m1_file, "--algo", "prior", "--audit-bounds")
    part, audit = (json.loads(line) for line in out.splitlines())
    assert code == 0
    assert sorted(part["sccs"]) == [[0, 1], [2], [3]]
    assert audit["ok"] and audit["N"] == 3


def test_audit_uses_improved_bound():
    part = SccPartition([frozenset({0})], [True], diameters=[0])
    g = Digraph.from_edges(1, [(0, 0)])
    assert audit_scc_bounds(g, part, 5, "improved")["bound"] == min(3 + 1, 0 + 1) + 3 + 3


def test_cli_gen_layered(capsys, tmp_path):
    out = tmp_path / "g.mdp"
    assert run(capsys, "gen", "layered", "n=30", "layers=5", "seed=2", "-o", str(out))[0] == 0
    truth = json.loads((tmp_path / "g.mdp.truth.json").read_text())
    code, text, _ = run(capsys, "scc", str(out), "--algo", "improved")
    assert code == 0 and sorted(json.loads(text.splitlines()[0])["sccs"]) == truth


def test_cli_gen_mdp_and_perturb(capsys, tmp_path):
    a, b = tmp_path / "a.mdp", tmp_path / "b.mdp"
    assert run(capsys, "gen", "mdp", "n=20", "m=50", "seed=1", "-o", str(a))[0] == 0
    assert run(capsys, "gen", "perturb", f"src={a}", "epsilon=0.5", "seed=3", "-o", str(b))[0] == 0
    assert run(capsys, "verify", str(b))[0] == 0
    assert run(capsys, "gen", "mdp", "n=2", "m=9", "-o", str(a))[0] == 1
    assert run(capsys, "gen", "mdp", "bogus=1", "-o", str(a))[0] == 2


def test_cli_bench(capsys, tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text(SMALL)
    code, out, _ = run(capsys, "bench", str(cfg), "-o", str(tmp_path / "out"))
    assert code == 0 and out.startswith("| Number of states |")
    for name in ("results.csv", "table.md", "run.json"):
        assert (tmp_path / "out" / name).is_file()
    cfg.write_text("algorithms =\n")
    assert run(capsys, "bench", str(cfg), "-o", str(tmp_path / "x"))[0] == 2
