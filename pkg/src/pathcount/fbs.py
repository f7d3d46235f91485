"""Frontier-based search (FBS) for length-bounded path counting.

Edges are processed one at a time in a fixed order.  After each edge only the
*frontier* matters: vertices touching both processed and unprocessed edges.
A state records, per frontier vertex, one code:

* ``0``  the vertex has no chosen edge yet,
* ``1``  the vertex has two chosen edges (interior of a path fragment),
* ``>=2`` the vertex is an end of a fragment; both ends of a fragment carry
  the same label.  A label that occurs once means the fragment's other end
  already left the frontier with degree 1 (a *fixed* endpoint).

Labels are renumbered by first occurrence so equivalent states share a key.

The number of chosen edges is not part of the key.  Every state carries a
count vector ``counts[k]`` = number of partial configurations with ``k``
edges, packed into one Python int with ``slot_bits`` bits per entry.
Merging two states is an integer addition and taking an edge is a shift.
Before any slot can overflow, all vectors are repacked with wider slots.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .btcount import bfs_distances
from .control import CancelToken, check
from .errors import MemoryBudgetExceeded, OrderMismatch
from .instance import Graph, Instance, Kind

DEFAULT_EFFORT = 8
DEFAULT_STATE_CAP = 2_000_000
INITIAL_SLOT_BITS = 64
_ORDER_SEED = 0x5EED


@dataclass(frozen=True)
class EdgeOrder:
    """Permutation of edge indices plus the largest frontier it induces."""

    order: tuple[int, ...]
    width: int

    def __len__(self) -> int:
        return len(self.order)


@dataclass(frozen=True)
class FrontierStep:
    edge: tuple[int, int]
    entering: tuple[int, ...]
    leaving: tuple[int, ...]
    frontier: tuple[int, ...]  # after the edge, in slot order


@dataclass(frozen=True)
class FrontierSequence:
    steps: tuple[FrontierStep, ...]

    @property
    def width(self) -> int:
        return max((len(s.frontier) for s in self.steps), default=0)

    def __len__(self) -> int:
        return len(self.steps)

    def __getitem__(self, i: int) -> FrontierStep:
        return self.steps[i]


@dataclass
class FbsStats:
    """Diagnostics of one FBS run."""

    level_states: list[int] = field(default_factory=list)
    slot_bits: int = INITIAL_SLOT_BITS
    repacks: int = 0

    @property
    def max_states(self) -> int:
        return max(self.level_states, default=0)


# --------------------------------------------------------------------------
# edge ordering


def order_width(g: Graph, order) -> int:
    """Maximum frontier size reached when processing ``g``'s edges in ``order``."""
    remaining = [len(a) for a in g.adjacency]
    touched = bytearray(g.n + 1)
    size = width = 0
    for i in order:
        for x in g.edges[i]:
            if not touched[x]:
                touched[x] = 1
                size += 1
            remaining[x] -= 1
            if remaining[x] == 0:
                size -= 1
        width = max(width, size)
    return width


def _greedy_order(g: Graph, incident: list[list[int]], first: int | None) -> list[int]:
    """Repeatedly take the edge whose processing leaves the smallest frontier.

    Candidates are the unprocessed edges touching the current frontier; ties go
    to the smallest edge index.  A new component starts at ``first`` (if
    given and unprocessed) or at the globally best edge.
    """
    edges = g.edges
    remaining = [len(a) for a in g.adjacency]
    touched = bytearray(g.n + 1)
    done = bytearray(len(edges))
    frontier: set[int] = set()
    order: list[int] = []

    def delta(i: int) -> int:
        u, v = edges[i]
        d = 0
        for x in (u, v):
            if not touched[x]:
                d += 1
            if remaining[x] == 1:
                d -= 1
        return d

    while len(order) < len(edges):
        best = None
        for x in frontier:
            for i in incident[x]:
                if not done[i]:
                    key = (delta(i), i)
                    if best is None or key < best:
                        best = key
        if best is None:
            if first is not None and not done[first]:
                pick = first
            else:
                pick = min((i for i in range(len(edges)) if not done[i]), key=lambda i: (delta(i), i))
        else:
            pick = best[1]
        done[pick] = 1
        order.append(pick)
        for x in edges[pick]:
            touched[x] = 1
            remaining[x] -= 1
            if remaining[x] == 0:
                frontier.discard(x)
            else:
                frontier.add(x)
    return order


def _bfs_order(g: Graph) -> list[int]:
    """Edges sorted by the BFS rank of their endpoints, from a peripheral start."""
    adj = g.adjacency
    rank = [0] * (g.n + 1)
    seen = bytearray(g.n + 1)
    counter = 0
    for start in range(1, g.n + 1):
        if seen[start] or not adj[start]:
            continue
        # two sweeps to land on a far-away vertex of this component
        far = start
        for _ in range(2):
            dist = bfs_distances(g, far)
            far = max((v for v in range(1, g.n + 1) if dist[v] is not None), key=lambda v: (dist[v], -v))
        dist = bfs_distances(g, far)
        comp = sorted((v for v in range(1, g.n + 1) if dist[v] is not None), key=lambda v: (dist[v], v))
        for v in comp:
            seen[v] = 1
            rank[v] = counter
            counter += 1
    return sorted(range(g.m), key=lambda i: (max(rank[x] for x in g.edges[i]), min(rank[x] for x in g.edges[i]), i))


def compute_edge_order(g: Graph, effort: int = DEFAULT_EFFORT) -> EdgeOrder:
    """Heuristic low-width edge order, deterministic for fixed ``(g, effort)``.

    Tries the input order, a BFS sweep, the greedy order and ``effort``
    greedy restarts from seeded random start edges; keeps the narrowest.
    """
    if g.m == 0:
        return EdgeOrder((), 0)
    incident: list[list[int]] = [[] for _ in range(g.n + 1)]
    for i, (u, v) in enumerate(g.edges):
        incident[u].append(i)
        incident[v].append(i)

    candidates = [list(range(g.m)), _bfs_order(g), _greedy_order(g, incident, None)]
    rng = random.Random(_ORDER_SEED)
    for _ in range(max(0, effort)):
        candidates.append(_greedy_order(g, incident, rng.randrange(g.m)))
    best = min(candidates, key=lambda o: order_width(g, o))
    return EdgeOrder(tuple(best), order_width(g, best))


def as_edge_order(g: Graph, order) -> EdgeOrder:
    """Wrap a plain permutation of edge indices."""
    if isinstance(order, EdgeOrder):
        return order
    order = tuple(order)
    return EdgeOrder(order, order_width(g, order))


def frontier_sequence(g: Graph, order: EdgeOrder) -> FrontierSequence:
    order = as_edge_order(g, order)
    if len(order.order) != g.m or sorted(order.order) != list(range(g.m)):
        raise OrderMismatch(f"order of length {len(order.order)} is not a permutation of {g.m} edges")
    remaining = [len(a) for a in g.adjacency]
    touched = bytearray(g.n + 1)
    frontier: list[int] = []
    steps = []
    for i in order.order:
        u, v = g.edges[i]
        entering = []
        for x in (u, v):
            if not touched[x]:
                touched[x] = 1
                entering.append(x)
        frontier.extend(entering)
        leaving = []
        for x in (u, v):
            remaining[x] -= 1
            if remaining[x] == 0:
                leaving.append(x)
        frontier = [x for x in frontier if x not in leaving]
        steps.append(FrontierStep((u, v), tuple(entering), tuple(leaving), tuple(frontier)))
    return FrontierSequence(tuple(steps))


# --------------------------------------------------------------------------
# the dynamic program


def _canon(codes) -> tuple[int, ...]:
    relabel: dict[int, int] = {}
    out = []
    for x in codes:
        if x >= 2:
            y = relabel.get(x)
            if y is None:
                y = relabel[x] = len(relabel) + 2
            out.append(y)
        else:
            out.append(x)
    return tuple(out)


def _unpack(vec: int, slots: int, bits: int) -> list[int]:
    mask = (1 << bits) - 1
    return [(vec >> (k * bits)) & mask for k in range(slots)]


def _pack(values, bits: int) -> int:
    vec = 0
    for k, c in enumerate(values):
        vec |= c << (k * bits)
    return vec


def _high_mask(slots: int, bits: int) -> int:
    return _pack([3 << (bits - 2)] * slots, bits)


class _Step:
    """Per-edge lookup tables."""

    __slots__ = ("pu", "pv", "n_enter", "leave", "keep", "is_term", "frontier")

    def __init__(self, prev: tuple[int, ...], step: FrontierStep, terminals: frozenset[int]):
        work = prev + step.entering
        pos = {x: p for p, x in enumerate(work)}
        u, v = step.edge
        self.pu, self.pv = pos[u], pos[v]
        self.n_enter = len(step.entering)
        self.leave = tuple(pos[x] for x in step.leaving)
        self.keep = tuple(pos[x] for x in step.frontier)
        self.is_term = tuple(x in terminals for x in work)
        self.frontier = step.frontier


class _PcsBound:
    """Lower bound on the edges still needed to finish an ``s``-``t`` path."""

    def __init__(self, g: Graph, s: int, t: int, seq: FrontierSequence):
        self.g = g
        self.s, self.t = s, t
        self.far = g.n + 1
        self._dist: dict[int, list[int]] = {}
        # status after each step: 0 not entered, 1 in frontier, 2 left
        self.status = []
        state = {s: 0, t: 0}
        for st in seq.steps:
            for x in st.entering:
                if x in state:
                    state[x] = 1
            for x in st.leaving:
                if x in state:
                    state[x] = 2
            self.status.append((state[s], state[t]))

    def dist(self, a: int, b: int) -> int:
        row = self._dist.get(a)
        if row is None:
            raw = bfs_distances(self.g, a)
            row = self._dist[a] = [self.far if d is None else d for d in raw]
        return row[b]

    def __call__(self, level: int, frontier: tuple[int, ...], codes: tuple[int, ...]) -> int:
        where: dict[int, list[int]] = {}
        for p, x in enumerate(codes):
            if x >= 2:
                where.setdefault(x, []).append(p)
        ends = []  # live end of each terminal's fragment
        used = set()
        for term, stat in zip((self.s, self.t), self.status[level]):
            if stat == 0:
                ends.append(term)
            elif stat == 1:
                p = frontier.index(term)
                x = codes[p]
                if x == 0:
                    ends.append(term)
                else:
                    used.add(x)
                    q = [r for r in where[x] if r != p]
                    ends.append(frontier[q[0]] if q else term)
        for x, ps in where.items():
            if len(ps) == 1 and x not in used:
                used.add(x)
                ends.append(frontier[ps[0]])
        a, b = ends[0], ends[1]
        others = [ps for x, ps in where.items() if x not in used]
        if not others:
            return self.dist(a, b)
        pts = [frontier[p] for ps in others for p in ps]
        return (
            min(self.dist(a, e) for e in pts)
            + min(self.dist(e, b) for e in pts)
            + len(others)
            - 1
        )


def _run(
    inst: Instance,
    order: EdgeOrder | None,
    *,
    cancel: CancelToken | None = None,
    state_cap: int | None = DEFAULT_STATE_CAP,
    merge: bool = True,
    prune: bool = True,
    stats: FbsStats | None = None,
    slot_bits: int = INITIAL_SLOT_BITS,
) -> list[int]:
    g = inst.graph
    hist = [0] * (inst.max_len + 1)
    limit = min(inst.max_len, g.n - 1)
    pcs = inst.kind is Kind.PCS
    if limit <= 0 or g.m == 0:
        return hist
    if pcs:
        s, t = inst.terminals
        if not g.adjacency[s] or not g.adjacency[t]:
            return hist
    if order is None:
        order = compute_edge_order(g)
    seq = frontier_sequence(g, order)
    terminals = frozenset(inst.terminals) if pcs else frozenset()
    bound = _PcsBound(g, s, t, seq) if pcs and prune and limit < g.n - 1 else None
    stats = stats if stats is not None else FbsStats()

    slots = limit + 1
    bits = max(3, slot_bits)
    full = (1 << (slots * bits)) - 1
    high = _high_mask(slots, bits)

    # merge=False keeps every branch apart (diagnostic enumeration mode)
    states: dict = {(): 1} if merge else {((), 0): 1}
    accepted = 0
    prev: tuple[int, ...] = ()
    serial = 0

    for level, step in enumerate(seq.steps):
        check(cancel)
        info = _Step(prev, step, terminals)
        pu, pv, leave, keep, is_term = info.pu, info.pv, info.leave, info.keep, info.is_term
        pad = (0,) * info.n_enter
        out: dict = {}

        for key, vec in states.items():
            base = key if merge else key[0]
            taken = (vec << bits) & full
            for take in (False, True):
                if take:
                    if not taken:
                        continue
                    c = list(base + pad)
                    cu, cv = c[pu], c[pv]
                    if cu == 1 or cv == 1:
                        continue
                    if pcs and ((cu and is_term[pu]) or (cv and is_term[pv])):
                        continue
                    if cu == 0 and cv == 0:
                        c[pu] = c[pv] = 1 << 30
                        done = pcs and is_term[pu] and is_term[pv]
                        closed = (1 << 30,)
                    elif cu == 0 or cv == 0:
                        # extend a fragment: the untouched vertex becomes its new end
                        if cu == 0:
                            new, old, label = pu, pv, cv
                        else:
                            new, old, label = pv, pu, cu
                        c[new], c[old] = label, 1
                        done = False
                        if pcs and is_term[new]:
                            other = [q for q, x in enumerate(c) if x == label and q != new]
                            done = not other or is_term[other[0]]
                        closed = (label,)
                    else:
                        if cu == cv:
                            continue  # would close a cycle
                        c[pu] = c[pv] = 1
                        qu = [q for q, x in enumerate(c) if x == cu]
                        qv = [q for q, x in enumerate(c) if x == cv]
                        if pcs:
                            done = all(is_term[q[0]] if q else True for q in (qu, qv))
                        else:
                            done = not qu and not qv
                        for q in qv:
                            c[q] = cu
                        closed = (cu, cv)
                    if done:
                        if all(x < 2 or x in closed for x in c):
                            accepted += taken
                        continue
                    cur = taken
                else:
                    c = list(base + pad)
                    cur = vec

                ok = True
                for p in leave:
                    x = c[p]
                    if x == 0:
                        if pcs and is_term[p]:
                            ok = False
                            break
                    elif x >= 2:
                        if pcs and not is_term[p]:
                            ok = False
                            break
                        c[p] = 0
                        if x in c:
                            if not pcs:
                                single = sum(1 for y in set(c) if y >= 2 and c.count(y) == 1)
                                if single > 2:
                                    ok = False
                                    break
                        else:
                            # both ends fixed: the path is finished
                            ok = False
                            if all(y < 2 for y in c):
                                accepted += cur
                            break
                if not ok:
                    continue
                nkey = _canon([c[p] for p in keep])
                if bound is not None:
                    room = limit - bound(level, step.frontier, nkey)
                    if room < 0:
                        continue
                    cur &= (1 << ((room + 1) * bits)) - 1
                    if not cur:
                        continue
                if merge:
                    out[nkey] = out.get(nkey, 0) + cur
                else:
                    serial += 1
                    out[(nkey, serial)] = cur

        states = out
        prev = step.frontier
        stats.level_states.append(len(states))
        if state_cap is not None and len(states) > state_cap:
            raise MemoryBudgetExceeded(f"{len(states)} states at edge {level} exceed the cap of {state_cap}")

        if (sum(states.values()) + accepted) & high:
            # widen every slot before anything can carry into its neighbour
            nbits = bits * 2
            states = {k: _pack(_unpack(v, slots, bits), nbits) for k, v in states.items()}
            accepted = _pack(_unpack(accepted, slots, bits), nbits)
            bits = nbits
            full = (1 << (slots * bits)) - 1
            high = _high_mask(slots, bits)
            stats.repacks += 1

    stats.slot_bits = bits
    for k, c in enumerate(_unpack(accepted, slots, bits)):
        hist[k] = c
    return hist


def count_by_length(inst: Instance, order: EdgeOrder | None = None, **kwargs) -> list[int]:
    """Qualifying paths per exact edge count, indexed ``0..max_len``."""
    return _run(inst, order, **kwargs)


def count_paths_fbs(inst: Instance, order: EdgeOrder | None = None, **kwargs) -> int:
    """Exact path count (PCS or PCA by instance kind) via frontier-based search.

    ``order`` defaults to :func:`compute_edge_order` with the default effort.
    Keyword options: ``cancel``, ``state_cap`` (raise
    :class:`MemoryBudgetExceeded` above this many states), ``merge`` and
    ``prune`` (diagnostic switches), ``stats`` (an :class:`FbsStats` to fill)
    and ``slot_bits`` (initial bits per count entry; widened on demand).
    """
    return sum(_run(inst, order, **kwargs))
