import json
import random
import sys

import pytest

from conftest import WORKED
from pathcount import cli
from pathcount.gen import GenSpec, generate_instance
from pathcount.harness import (
    RunRecord,
    Status,
    build_report,
    load_solvers,
    par2,
    param_time_correlation,
    read_records,
    run_benchmarks,
    score,
    similarity_matrix,
    vbs_metrics,
    vbs_times,
    write_records,
)
from pathcount.instance import serialize_instance


def ok(solver, bench, answer, t):
    return RunRecord(solver, bench, Status.SOLVED, answer, t)


def timeout(solver, bench, t=600.0):
    return RunRecord(solver, bench, Status.TIMEOUT, None, t)


def py(code):
    return [sys.executable, "-c", code]


@pytest.fixture
def bench_dir(tmp_path):
    d = tmp_path / "bench"
    d.mkdir()
    (d / "a.txt").write_text(WORKED)
    (d / "b.txt").write_text(WORKED.replace("t 1 3\n", ""))
    return d


# ---------------------------------------------------------------- running


def test_run_solved(bench_dir):
    records = run_benchmarks(bench_dir, {"echo": py("print(' 17 ')")}, budget=30)
    assert [(r.benchmark, r.status, r.answer) for r in records] == [
        ("a.txt", Status.SOLVED, 17),
        ("b.txt", Status.SOLVED, 17),
    ]
    assert all(0 <= r.wall_time <= 30 for r in records)


def test_run_timeout(bench_dir):
    (rec, _) = run_benchmarks(bench_dir, {"sleepy": py("import time; time.sleep(30)")}, budget=0.5)
    assert rec.status is Status.TIMEOUT and rec.answer is None
    assert rec.wall_time < 10


def test_run_timeout_kills_children(bench_dir):
    code = "import subprocess, sys, time; subprocess.Popen([sys.executable, '-c', 'import time; time.sleep(30)']); time.sleep(30)"
    (rec, _) = run_benchmarks(bench_dir, {"forky": py(code)}, budget=0.5)
    assert rec.status is Status.TIMEOUT and rec.wall_time < 10


def test_run_errors(bench_dir):
    records = run_benchmarks(
        bench_dir,
        {"abc": py("print('abc')"), "crash": py("import sys; print(5); sys.exit(1)"), "missing": ["/nonexistent/solver"]},
        budget=10,
    )
    assert [r.status for r in records] == [Status.ERROR] * 6
    assert all(r.answer is None for r in records)


def test_run_real_solver_parallel(bench_dir):
    records = run_benchmarks(bench_dir, {"pc": [sys.executable, "-m", "pathcount", "count"]}, budget=60, parallelism=2)
    assert [(r.benchmark, r.answer) for r in records] == [("a.txt", 2), ("b.txt", 13)]


def test_load_solvers(tmp_path):
    path = tmp_path / "solvers.toml"
    path.write_text('[solvers.fbs]\ncommand = ["pathcount", "count", "--algo", "fbs"]\n'
                    '[solvers.bt]\ncommand = "pathcount count --algo bt"\n')
    assert load_solvers(path) == {
        "fbs": ["pathcount", "count", "--algo", "fbs"],
        "bt": ["pathcount", "count", "--algo", "bt"],
    }
    path.write_text("x = 1\n")
    with pytest.raises(ValueError):
        load_solvers(path)


def test_csv_round_trip(tmp_path):
    records = [ok("a", "b1", 10**30, 1.234), timeout("a", "b2", 600.0), RunRecord("b", "b1", Status.ERROR, None, 0.5)]
    path = tmp_path / "runs.csv"
    write_records(records, path)
    assert path.read_text().splitlines()[0] == "solver,benchmark,status,answer,wall_time_ms"
    assert read_records(path) == records


# ---------------------------------------------------------------- scoring


def test_score_agreement():
    records = [ok(s, "b", 42, 1.0) for s in "xyz"]
    assert score(records) == {"x": (1, 1), "y": (1, 1), "z": (1, 1)}


def test_score_singleton():
    records = [ok("x", "b", 7, 1.0), timeout("y", "b"), timeout("z", "b")]
    assert score(records) == {"x": (0, 1), "y": (0, 0), "z": (0, 0)}


def test_score_conflict_is_tentative():
    records = [ok("x", "b", 7, 1.0), ok("y", "b", 7, 1.0), ok("z", "b", 8, 1.0)]
    assert score(records) == {"x": (1, 1), "y": (1, 1), "z": (0, 1)}


def ranged_fixture(k=135):
    """k benchmarks all three solvers agree on, plus one only solver "x" answers."""
    records = []
    for i in range(k):
        records += [ok(s, f"b{i}", i, 1.0) for s in "xyz"]
    records += [ok("x", "lone", 99, 3.0), timeout("y", "lone"), timeout("z", "lone")]
    return records


def test_score_ranged():
    assert score(ranged_fixture()) == {"x": (135, 136), "y": (135, 135), "z": (135, 135)}


def test_score_invariants():
    rng = random.Random(3)
    for _ in range(50):
        records = random_records(rng)
        for low, high in score(records).values():
            assert low <= high
        for b in {r.benchmark for r in records}:
            sub = [r for r in records if r.benchmark == b]
            assert sum(low for low, _ in score(sub).values()) != 1


def test_par2():
    assert par2([ok("x", "a", 1, 10.0)], 600) == {"x": 10.0}
    assert par2([timeout("x", "a")], 600) == {"x": 1200.0}
    assert par2([ok("x", "a", 1, 5.0), timeout("x", "b")], 600) == {"x": 1205.0}
    assert par2([RunRecord("x", "a", Status.ERROR, None, 1.0)], 600) == {"x": 1200.0}


def test_vbs_examples():
    v = vbs_metrics([ok("x", "a", 1, 8.0), timeout("y", "a")])
    assert (v["x"].vbs1, v["x"].vbs2, v["x"].vbs3) == (1, 1.0, 1.0)
    assert (v["y"].vbs1, v["y"].vbs2, v["y"].vbs3) == (0, 0, 0)
    v = vbs_metrics([ok("x", "a", 1, 10.0), ok("y", "a", 1, 20.0)])
    assert (v["x"].vbs2, v["y"].vbs2) == (1.0, 0.5)
    assert (v["x"].vbs3, v["y"].vbs3) == (0.5, 0.5)
    v = vbs_metrics([ok(s, "a", 1, 3.0) for s in "xyz"])
    assert all(v[s].vbs3 == pytest.approx(1 / 3) and v[s].vbs1 == pytest.approx(1 / 3) for s in "xyz")


def test_vbs_skips_unsolved():
    v = vbs_metrics([timeout("x", "a"), timeout("y", "a")])
    assert all(s.vbs1 == s.vbs2 == s.vbs3 == 0 for s in v.values())


def random_records(rng, budget=600.0):
    solvers = [f"s{i}" for i in range(rng.randint(1, 5))]
    records = []
    for b in range(rng.randint(1, 15)):
        for s in solvers:
            if rng.random() < 0.6:
                # coarse times make ties likely
                records.append(ok(s, f"b{b}", rng.randint(0, 2), rng.choice([0.5, 1.0, 2.0, rng.uniform(0, budget)])))
            else:
                records.append(timeout(s, f"b{b}", budget))
    return records


def test_vbs_sum_invariants():
    rng = random.Random(11)
    for _ in range(200):
        records = random_records(rng)
        solved = len({r.benchmark for r in records if r.solved})
        v = vbs_metrics(records)
        assert sum(s.vbs1 for s in v.values()) == pytest.approx(solved)
        assert sum(s.vbs3 for s in v.values()) == pytest.approx(solved)
        for name, s in v.items():
            own = sum(r.solved for r in records if r.solver == name)
            assert s.vbs1 <= s.vbs2 + 1e-9 <= own + 1e-9


def test_similarity_examples():
    records = [ok("x", "a", 1, 3.0), ok("x", "b", 1, 4.0)]
    twin = [RunRecord("y", r.benchmark, r.status, r.answer, r.wall_time) for r in records]
    assert similarity_matrix(records + twin, 600)["x"]["y"] == 1.0

    fast = [ok("x", b, 1, 0.0) for b in "ab"]
    slow = [timeout("y", b) for b in "ab"]
    assert similarity_matrix(fast + slow, 600)["x"]["y"] == 0.0

    two = [ok("x", "a", 1, 100.0), ok("x", "b", 1, 50.0), ok("y", "a", 1, 700.0), ok("y", "b", 1, 50.0)]
    # per-benchmark differences 600 and 0 -> 1 - 600 / (2 * 1200)
    assert similarity_matrix(two, 600)["x"]["y"] == pytest.approx(0.75)


def test_similarity_drops_unsolved_benchmarks():
    records = [ok("x", "a", 1, 0.0), timeout("y", "a"), timeout("x", "dead"), timeout("y", "dead")]
    assert similarity_matrix(records, 600)["x"]["y"] == 0.0


def test_similarity_properties():
    rng = random.Random(5)
    for _ in range(50):
        records = random_records(rng)
        m = similarity_matrix(records, 600)
        shuffled = list(records)
        rng.shuffle(shuffled)
        m2 = similarity_matrix(shuffled, 600)
        for a in m:
            assert m[a][a] == 1.0
            for b in m:
                assert m[a][b] == m[b][a]
                assert 0.0 <= m[a][b] <= 1.0
                assert m2[a][b] == pytest.approx(m[a][b])


def test_correlations():
    params = {f"b{i}": {"n": 20 - i, "m": 5, "est_width": i % 3, "max_len": i} for i in range(1, 8)}
    times = {b: 2.5 * p["max_len"] for b, p in params.items()}
    corr = param_time_correlation(params, times)
    assert corr["max_len"] == pytest.approx(1.0)
    assert corr["n"] == pytest.approx(-1.0)
    assert corr["m"] == "n/a"
    assert param_time_correlation(params, {b: 3.0 for b in params})["max_len"] == "n/a"


def test_vbs_times():
    records = [ok("x", "a", 1, 5.0), ok("y", "a", 1, 2.0), timeout("x", "b"), timeout("y", "b")]
    assert vbs_times(records, 600) == {"a": 2.0, "b": 1200.0}


def test_report_keys():
    report = build_report(ranged_fixture(3), 600)
    assert set(report) == {"scores", "par2", "vbs", "similarity", "correlations"}
    assert report["scores"]["x"] == [3, 4]
    json.dumps(report)


# ---------------------------------------------------------------- CLI


def test_cli_bench(tmp_path):
    inst_dir = tmp_path / "inst"
    inst_dir.mkdir()
    for seed in range(3):
        spec = GenSpec("grid", rows=3, cols=3 + seed, seed=seed)
        (inst_dir / f"g{seed}.txt").write_text(serialize_instance(generate_instance(spec)))
    solvers = tmp_path / "solvers.toml"
    exe = json.dumps(sys.executable)
    solvers.write_text(
        f'[solvers.fbs]\ncommand = [{exe}, "-m", "pathcount", "count", "--algo", "fbs"]\n'
        f'[solvers.bt]\ncommand = [{exe}, "-m", "pathcount", "count", "--algo", "bt"]\n'
        f'[solvers.bad]\ncommand = [{exe}, "-c", "print(1)"]\n'
    )
    runs = tmp_path / "runs.csv"
    assert cli.main(["bench", "run", str(inst_dir), "--solvers", str(solvers), "--budget", "60", "--out", str(runs)]) == 0
    records = read_records(runs)
    assert len(records) == 9
    out = tmp_path / "report.json"
    assert cli.main(["bench", "report", str(runs), "--budget", "60", "--instances", str(inst_dir), "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["scores"]["fbs"] == [3, 3] == report["scores"]["bt"]
    assert report["scores"]["bad"][0] == 0
    assert set(report["correlations"]) == {"n", "m", "est_width", "max_len"}
