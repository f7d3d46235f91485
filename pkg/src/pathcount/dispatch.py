"""Feature extraction, algorithm selection and the racing portfolio.

The backtracking counter pays per path, so it suffers from long length
bounds; the frontier DP pays per state, so it suffers from wide frontiers.
``select_algorithm`` turns those two drivers into a fixed rule:

* frontier width <= ``width_dp``                    -> FBS only
* width above that and ``max_len`` <= ``len_bt``    -> BT only
* otherwise                                         -> race both
"""

from __future__ import annotations

import enum
import logging
import multiprocessing as mp
import queue
import time
from dataclasses import dataclass
from fractions import Fraction

from . import btcount, fbs
from .control import CancelToken
from .errors import MemoryBudgetExceeded, PathCountError, ResultMismatch, Timeout
from .instance import Instance

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 600.0
WIDTH_DP = 14
LEN_BT = 12


class Strategy(str, enum.Enum):
    BT = "bt"
    FBS = "fbs"
    RACE = "race"


@dataclass(frozen=True)
class Features:
    n: int
    m: int
    max_len: int
    mean_degree: Fraction
    est_width: int


@dataclass(frozen=True)
class SolvePlan:
    strategy: Strategy
    rationale: str


@dataclass
class SolveConfig:
    algo: str = "auto"  # auto | bt | fbs
    timeout: float | None = DEFAULT_TIMEOUT
    order_effort: int = fbs.DEFAULT_EFFORT
    state_cap: int | None = fbs.DEFAULT_STATE_CAP
    width_dp: int = WIDTH_DP
    len_bt: int = LEN_BT
    workers: int = 1  # per-root processes for all-pairs backtracking
    debug: bool = False  # run both strategies to completion and compare


@dataclass(frozen=True)
class SolveResult:
    value: int
    strategy: Strategy  # the strategy that produced the value
    plan: SolvePlan
    elapsed: float


def _features(inst: Instance, order: fbs.EdgeOrder) -> Features:
    # a lone edge has an empty frontier after processing; report it as width 1
    width = max(order.width, 1) if inst.m else 0
    return Features(inst.n, inst.m, inst.max_len, Fraction(2 * inst.m, inst.n), width)


def extract_features(inst: Instance, effort: int = fbs.DEFAULT_EFFORT) -> Features:
    return _features(inst, fbs.compute_edge_order(inst.graph, effort))


def select_algorithm(f: Features, width_dp: int = WIDTH_DP, len_bt: int = LEN_BT) -> SolvePlan:
    if f.est_width <= width_dp:
        return SolvePlan(Strategy.FBS, f"width {f.est_width} <= {width_dp}")
    if f.max_len <= len_bt:
        return SolvePlan(Strategy.BT, f"width {f.est_width} > {width_dp}, length {f.max_len} <= {len_bt}")
    return SolvePlan(Strategy.RACE, f"width {f.est_width} > {width_dp}, length {f.max_len} > {len_bt}")


def _run_bt(inst: Instance, cancel: CancelToken | None, workers: int = 1) -> int:
    if inst.terminals is not None:
        return btcount.count_paths_bt(inst, cancel=cancel)
    return btcount.count_paths_bt_all(inst, cancel=cancel, workers=workers)


def _run_fbs(inst: Instance, order, cancel: CancelToken | None, state_cap: int | None) -> int:
    return fbs.count_paths_fbs(inst, order, cancel=cancel, state_cap=state_cap)


def _race_worker(strategy, inst, order, state_cap, results):
    try:
        if strategy is Strategy.BT:
            value = _run_bt(inst, None)
        else:
            value = _run_fbs(inst, order, None, state_cap)
        results.put(("ok", strategy, value))
    except PathCountError as exc:
        results.put(("err", strategy, type(exc).__name__, str(exc)))
    except BaseException as exc:  # pragma: no cover - surfaced to the parent
        results.put(("err", strategy, "crash", repr(exc)))


def _race(inst: Instance, order, config: SolveConfig, deadline: float | None) -> tuple[int, Strategy]:
    """First successful worker wins; the loser is terminated."""
    ctx = mp.get_context()
    results = ctx.Queue()
    procs = {
        s: ctx.Process(target=_race_worker, args=(s, inst, order, config.state_cap, results), daemon=True)
        for s in (Strategy.BT, Strategy.FBS)
    }
    for p in procs.values():
        p.start()
    failures = []
    try:
        while len(failures) < len(procs):
            wait = None if deadline is None else max(0.0, deadline - time.monotonic())
            try:
                msg = results.get(timeout=wait)
            except queue.Empty:
                raise Timeout("wallclock budget exceeded") from None
            if msg[0] == "ok":
                return msg[2], msg[1]
            log.info("%s failed: %s %s", msg[1].value, msg[2], msg[3])
            failures.append(msg)
    finally:
        for p in procs.values():
            if p.is_alive():
                p.terminate()
            p.join()
    raise MemoryBudgetExceeded("both strategies failed: " + "; ".join(f"{f[1].value}: {f[2]}" for f in failures))


def solve_with_report(inst: Instance, config: SolveConfig | None = None) -> SolveResult:
    config = config or SolveConfig()
    start = time.monotonic()
    deadline = None if config.timeout is None else start + config.timeout
    order = fbs.compute_edge_order(inst.graph, config.order_effort)

    if config.algo == "bt":
        plan = SolvePlan(Strategy.BT, "forced")
    elif config.algo == "fbs":
        plan = SolvePlan(Strategy.FBS, "forced")
    elif config.algo == "auto":
        plan = select_algorithm(_features(inst, order), config.width_dp, config.len_bt)
    else:
        raise ValueError(f"unknown algorithm {config.algo!r}")
    log.info("plan: %s (%s)", plan.strategy.value, plan.rationale)

    def token() -> CancelToken:
        return CancelToken(None if deadline is None else max(0.0, deadline - time.monotonic()))

    if config.debug:
        a = _run_bt(inst, token(), config.workers)
        b = _run_fbs(inst, order, token(), config.state_cap)
        if a != b:
            raise ResultMismatch(f"backtracking gave {a}, frontier search gave {b}")
        return SolveResult(a, plan.strategy, plan, time.monotonic() - start)

    if plan.strategy is Strategy.RACE:
        value, used = _race(inst, order, config, deadline)
    elif plan.strategy is Strategy.FBS:
        try:
            value, used = _run_fbs(inst, order, token(), config.state_cap), Strategy.FBS
        except MemoryBudgetExceeded as exc:
            if config.algo == "fbs":
                raise
            log.info("frontier search gave up (%s); falling back to backtracking", exc)
            value, used = _run_bt(inst, token(), config.workers), Strategy.BT
    else:
        value, used = _run_bt(inst, token(), config.workers), Strategy.BT
    return SolveResult(value, used, plan, time.monotonic() - start)


def solve(inst: Instance, config: SolveConfig | None = None) -> int:
    """Exact path count for ``inst``; raises :class:`Timeout` past the budget."""
    return solve_with_report(inst, config).value

