"""Benchmark runs of external solver commands and result analysis.

``run_benchmarks`` executes every solver command on every instance file under
a wallclock budget.  The analysis functions work on the resulting
:class:`RunRecord` list:

* ``score``: ranged score ``[correct, correct + tentatively correct]``; an
  answer is *correct* when at least one other solver printed the same number,
* ``par2``: solve time for solved runs, twice the budget otherwise,
* ``vbs_metrics``: three ways of crediting solvers for the virtual best solver,
* ``similarity_matrix``: 1 minus the normalized L1 distance of PAR-2 vectors,
* ``param_time_correlation``: Pearson coefficient of instance parameters
  against the virtual best solver's time.
"""

from __future__ import annotations

import csv
import enum
import json
import logging
import os
import re
import shlex
import signal
import statistics
import subprocess
import time
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .dispatch import extract_features
from .instance import Instance

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 600.0
CSV_COLUMNS = ("solver", "benchmark", "status", "answer", "wall_time_ms")
PARAMETERS = ("n", "m", "est_width", "max_len")
_NUMBER = re.compile(r"\d+")


class Status(str, enum.Enum):
    SOLVED = "solved"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass(frozen=True)
class RunRecord:
    solver: str
    benchmark: str
    status: Status
    answer: int | None
    wall_time: float  # seconds

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED


@dataclass(frozen=True)
class VbsScore:
    vbs1: float
    vbs2: float
    vbs3: float


# --------------------------------------------------------------------------
# running


def load_solvers(path: str | os.PathLike) -> dict[str, list[str]]:
    """Read solver commands from TOML.

    Each ``[solvers.<name>]`` table needs a ``command``, either an argument
    list or a shell-style string.  The instance path is appended.
    """
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    solvers = {}
    for name, entry in data.get("solvers", {}).items():
        cmd = entry["command"]
        solvers[name] = shlex.split(cmd) if isinstance(cmd, str) else [str(c) for c in cmd]
    if not solvers:
        raise ValueError(f"{path}: no [solvers.<name>] tables")
    return solvers


def list_benchmarks(directory: str | os.PathLike) -> list[Path]:
    root = Path(directory)
    return sorted(p for p in root.iterdir() if p.is_file() and not p.name.startswith("."))


def run_one(solver: str, command: Sequence[str], instance: Path, budget: float) -> RunRecord:
    """Run one solver process on one instance; never raises for solver failures."""
    bench = instance.name
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(
            [*command, str(instance)],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
            start_new_session=True,
        )
    except OSError as exc:
        log.warning("%s: cannot spawn %s: %s", solver, command, exc)
        return RunRecord(solver, bench, Status.ERROR, None, 0.0)
    try:
        out, _ = proc.communicate(timeout=budget)
    except subprocess.TimeoutExpired:
        _kill_group(proc)
        proc.communicate()
        return RunRecord(solver, bench, Status.TIMEOUT, None, round(time.perf_counter() - start, 3))
    elapsed = round(time.perf_counter() - start, 3)
    if elapsed > budget:
        return RunRecord(solver, bench, Status.TIMEOUT, None, elapsed)
    text = out.strip()
    if proc.returncode != 0 or not _NUMBER.fullmatch(text):
        return RunRecord(solver, bench, Status.ERROR, None, elapsed)
    return RunRecord(solver, bench, Status.SOLVED, int(text), elapsed)


def _kill_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()


def run_benchmarks(
    directory: str | os.PathLike,
    solvers: Mapping[str, Sequence[str] | str],
    budget: float = DEFAULT_BUDGET,
    parallelism: int = 1,
) -> list[RunRecord]:
    """One record per (solver, benchmark file), ordered solver-major."""
    commands = {name: shlex.split(c) if isinstance(c, str) else list(c) for name, c in solvers.items()}
    jobs = [(name, cmd, path) for name, cmd in commands.items() for path in list_benchmarks(directory)]
    if parallelism <= 1:
        return [run_one(name, cmd, path, budget) for name, cmd, path in jobs]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(lambda job: run_one(*job, budget), jobs))


def write_records(records: Iterable[RunRecord], path: str | os.PathLike) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            answer = "" if r.answer is None else str(r.answer)
            writer.writerow([r.solver, r.benchmark, r.status.value, answer, round(r.wall_time * 1000)])


def read_records(path: str | os.PathLike) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        return [
            RunRecord(
                row["solver"],
                row["benchmark"],
                Status(row["status"]),
                int(row["answer"]) if row["answer"] else None,
                int(row["wall_time_ms"]) / 1000,
            )
            for row in csv.DictReader(fh)
        ]


# --------------------------------------------------------------------------
# analysis


def _solvers(records: Sequence[RunRecord]) -> list[str]:
    return list(dict.fromkeys(r.solver for r in records))


def _by_benchmark(records: Sequence[RunRecord]) -> dict[str, list[RunRecord]]:
    out: dict[str, list[RunRecord]] = defaultdict(list)
    for r in records:
        out[r.benchmark].append(r)
    return out


def score(records: Sequence[RunRecord]) -> dict[str, tuple[int, int]]:
    """``[low, high]`` per solver.

    Per benchmark, an answer printed by two or more solvers is correct for each
    of them.  Any other solved run is tentatively correct.  Nobody is penalized
    for a wrong answer.
    """
    low = dict.fromkeys(_solvers(records), 0)
    high = dict(low)
    for runs in _by_benchmark(records).values():
        votes = Counter(r.answer for r in runs if r.solved)
        for r in runs:
            if r.solved:
                high[r.solver] += 1
                if votes[r.answer] >= 2:
                    low[r.solver] += 1
    return {s: (low[s], high[s]) for s in low}


def par2_scores(records: Sequence[RunRecord], budget: float = DEFAULT_BUDGET) -> dict[tuple[str, str], float]:
    """PAR-2 score of every (solver, benchmark) pair."""
    return {(r.solver, r.benchmark): r.wall_time if r.solved else 2 * budget for r in records}


def par2(records: Sequence[RunRecord], budget: float = DEFAULT_BUDGET) -> dict[str, float]:
    totals = dict.fromkeys(_solvers(records), 0.0)
    for (solver, _), value in par2_scores(records, budget).items():
        totals[solver] += value
    return totals


def solved_benchmarks(records: Sequence[RunRecord]) -> list[str]:
    return [b for b, runs in _by_benchmark(records).items() if any(r.solved for r in runs)]


def vbs_metrics(records: Sequence[RunRecord]) -> dict[str, VbsScore]:
    """VBS-1/2/3 credit per solver over benchmarks solved by anyone.

    VBS-1 splits a tie for the fastest time equally among the tied solvers.
    """
    v1 = dict.fromkeys(_solvers(records), 0.0)
    v2 = dict(v1)
    v3 = dict(v1)
    for runs in _by_benchmark(records).values():
        solved = [r for r in runs if r.solved]
        if not solved:
            continue
        best = min(r.wall_time for r in solved)
        fastest = [r for r in solved if r.wall_time == best]
        for r in fastest:
            v1[r.solver] += 1 / len(fastest)
        for r in solved:
            v2[r.solver] += 1.0 if r.wall_time == best else best / r.wall_time
            v3[r.solver] += 1 / len(solved)
    return {s: VbsScore(v1[s], v2[s], v3[s]) for s in v1}


def vbs_times(records: Sequence[RunRecord], budget: float = DEFAULT_BUDGET) -> dict[str, float]:
    """Fastest solve time per benchmark; unsolved benchmarks count ``2 * budget``."""
    out = {}
    for bench, runs in _by_benchmark(records).items():
        times = [r.wall_time for r in runs if r.solved]
        out[bench] = min(times) if times else 2 * budget
    return out


def similarity_matrix(records: Sequence[RunRecord], budget: float = DEFAULT_BUDGET) -> dict[str, dict[str, float]]:
    """``1 - sum|S_i - S'_i| / (N * 2 * budget)`` over the N benchmarks solved by anyone."""
    solvers = _solvers(records)
    keep = set(solved_benchmarks(records))
    scores = par2_scores([r for r in records if r.benchmark in keep], budget)
    benches = sorted(keep)
    denom = len(benches) * 2 * budget
    vectors = {s: [scores.get((s, b), 2 * budget) for b in benches] for s in solvers}
    matrix: dict[str, dict[str, float]] = {s: {} for s in solvers}
    for a in solvers:
        for b in solvers:
            if a == b or denom == 0:
                matrix[a][b] = 1.0
            else:
                diff = sum(abs(x - y) for x, y in zip(vectors[a], vectors[b]))
                matrix[a][b] = 1.0 - diff / denom
    return matrix


def instance_parameters(inst: Instance) -> dict[str, int]:
    f = extract_features(inst)
    return {"n": f.n, "m": f.m, "est_width": f.est_width, "max_len": f.max_len}


def param_time_correlation(
    instances: Mapping[str, Instance | Mapping[str, float]],
    times: Mapping[str, float],
) -> dict[str, float | str]:
    """Pearson coefficient of each parameter against time; ``"n/a"`` if undefined.

    ``instances`` maps benchmark ids to an :class:`Instance` or to a ready
    parameter mapping with keys ``n``, ``m``, ``est_width``, ``max_len``.
    """
    benches = [b for b in times if b in instances]
    params = {
        b: instance_parameters(instances[b]) if isinstance(instances[b], Instance) else instances[b]
        for b in benches
    }
    y = [float(times[b]) for b in benches]
    out: dict[str, float | str] = {}
    for name in PARAMETERS:
        x = [float(params[b][name]) for b in benches]
        try:
            out[name] = statistics.correlation(x, y)
        except statistics.StatisticsError:
            out[name] = "n/a"
    return out


def build_report(
    records: Sequence[RunRecord],
    budget: float = DEFAULT_BUDGET,
    instances: Mapping[str, Instance] | None = None,
) -> dict:
    """JSON-ready report with keys scores, par2, vbs, similarity, correlations."""
    keep = set(solved_benchmarks(records))
    return {
        "scores": {s: list(r) for s, r in score(records).items()},
        "par2": par2([r for r in records if r.benchmark in keep], budget),
        "vbs": {s: asdict(v) for s, v in vbs_metrics(records).items()},
        "similarity": similarity_matrix(records, budget),
        "correlations": param_time_correlation(instances, vbs_times(records, budget)) if instances else {},
    }


def write_report(report: dict, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
