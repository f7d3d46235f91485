"""Depth-first backtracking path counter.

Paths are enumerated one by one, so the running time is proportional to the
number of (partial) paths explored.  For single-pair counts every branch is
cut as soon as the current depth plus the BFS distance to the target exceeds
the length bound.  All-pairs counts run one search per root vertex and only
count paths ending at a larger vertex id, so every path is seen once.

The search keeps an explicit stack; instance graphs can be thousands of
vertices deep.
"""

from __future__ import annotations

from collections import deque
from concurrent.futures import ProcessPoolExecutor

from .control import CancelToken, check
from .errors import BudgetExceeded, VertexOutOfRange
from .instance import Graph, Instance, Kind

# Number of DFS pushes between two cancellation polls.
CHECK_INTERVAL = 1 << 14

DistanceMap = list  # index = vertex id, value = hops to target or None


def bfs_distances(g: Graph, target: int) -> DistanceMap:
    """Hop distance from every vertex to ``target`` (``None`` when unreachable).

    The returned list is indexed by vertex id; slot 0 is unused and ``None``.
    """
    if not 1 <= target <= g.n:
        raise VertexOutOfRange(f"vertex {target} outside 1..{g.n}")
    adj = g.adjacency
    dist: list[int | None] = [None] * (g.n + 1)
    dist[target] = 0
    queue = deque([target])
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for w in adj[v]:
            if dist[w] is None:
                dist[w] = dv
                queue.append(w)
    return dist


def _clamp(inst: Instance) -> int:
    return min(inst.max_len, inst.graph.n - 1)


def histogram_bt(
    inst: Instance,
    *,
    cancel: CancelToken | None = None,
    max_paths: int | None = None,
    prune: bool = True,
) -> list[int]:
    """Number of qualifying ``s``-``t`` paths per edge count ``0..max_len``.

    Entries above ``n - 1`` are always zero.
    """
    if inst.kind is not Kind.PCS:
        raise ValueError("histogram_bt needs a terminal pair; use histogram_bt_all")
    g = inst.graph
    s, t = inst.terminals
    limit = _clamp(inst)
    hist = [0] * (inst.max_len + 1)
    dist_map = bfs_distances(g, t)
    if dist_map[s] is None or dist_map[s] > limit:
        return hist

    # Unreachable vertices get a distance no depth can afford.
    far = limit + 1
    if prune:
        dist = [far if d is None else d for d in dist_map]
    else:
        dist = [0] * (g.n + 1)
    adj = g.adjacency
    visited = bytearray(g.n + 1)
    visited[s] = 1
    path = [s]
    stack = [iter(adj[s])]
    found = 0
    pushes = 0
    while stack:
        for w in stack[-1]:
            if visited[w]:
                continue
            depth = len(path)
            if depth + dist[w] > limit:
                continue
            if w == t:
                hist[depth] += 1
                found += 1
                if max_paths is not None and found > max_paths:
                    raise BudgetExceeded(f"more than {max_paths} paths")
                continue
            visited[w] = 1
            path.append(w)
            stack.append(iter(adj[w]))
            pushes += 1
            if pushes % CHECK_INTERVAL == 0:
                check(cancel)
            break
        else:
            stack.pop()
            visited[path.pop()] = 0
    return hist


def _root_histogram(
    adj: tuple[tuple[int, ...], ...],
    root: int,
    limit: int,
    cancel: CancelToken | None = None,
) -> list[int]:
    """Paths starting at ``root`` and ending at a larger vertex, by edge count."""
    hist = [0] * (limit + 1)
    if limit == 0:
        return hist
    visited = bytearray(len(adj))
    visited[root] = 1
    path = [root]
    stack = [iter(adj[root])]
    pushes = 0
    while stack:
        for w in stack[-1]:
            if visited[w]:
                continue
            depth = len(path)
            if w > root:
                hist[depth] += 1
            if depth == limit:
                continue
            visited[w] = 1
            path.append(w)
            stack.append(iter(adj[w]))
            pushes += 1
            if pushes % CHECK_INTERVAL == 0:
                check(cancel)
            break
        else:
            stack.pop()
            visited[path.pop()] = 0
    return hist


def _root_worker(args):
    adj, root, limit = args
    return _root_histogram(adj, root, limit)


def histogram_bt_all(
    inst: Instance,
    *,
    cancel: CancelToken | None = None,
    max_paths: int | None = None,
    workers: int = 1,
) -> list[int]:
    """All-pairs path counts per edge count ``0..max_len``.

    With ``workers > 1`` the per-root searches run in a process pool;
    cancellation and the path budget are then only checked between roots.
    """
    g = inst.graph
    limit = _clamp(inst)
    hist = [0] * (inst.max_len + 1)
    adj = g.adjacency
    roots = [v for v in range(1, g.n + 1) if adj[v]]

    def absorb(part: list[int]) -> None:
        for k, c in enumerate(part):
            hist[k] += c
        if max_paths is not None and sum(hist) > max_paths:
            raise BudgetExceeded(f"more than {max_paths} paths")

    if workers <= 1:
        for root in roots:
            check(cancel)
            absorb(_root_histogram(adj, root, limit, cancel))
        return hist

    with ProcessPoolExecutor(max_workers=workers) as pool:
        jobs = ((adj, root, limit) for root in roots)
        try:
            for part in pool.map(_root_worker, jobs, chunksize=max(1, len(roots) // (4 * workers))):
                check(cancel)
                absorb(part)
        except BaseException:
            pool.shutdown(wait=False, cancel_futures=True)
            raise
    return hist


def count_paths_bt(inst: Instance, **kwargs) -> int:
    """Exact number of simple ``s``-``t`` paths with at most ``max_len`` edges."""
    return sum(histogram_bt(inst, **kwargs))


def count_paths_bt_all(inst: Instance, **kwargs) -> int:
    """Exact number of simple paths with 1..``max_len`` edges over all vertex pairs."""
    if inst.kind is not Kind.PCA:
        raise ValueError("count_paths_bt_all expects an instance without terminals")
    return sum(histogram_bt_all(inst, **kwargs))


def count(inst: Instance, **kwargs) -> int:
    """Dispatch on the instance kind."""
    if inst.kind is Kind.PCS:
        return count_paths_bt(inst, **kwargs)
    return count_paths_bt_all(inst, **kwargs)
