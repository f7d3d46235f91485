"""Synthetic benchmark instances.

Families: complete graphs, ``rows x cols`` grids (row-major numbering) and
clique chains/trees, where small cliques are joined by a few bridge edges
along a path (``path-like``) or a random tree (``tree-like``).  A generated
graph can be perturbed by removing up to 3 edges and rewiring up to 25.
PCS instances use the lexicographically smallest diameter-realizing pair as
terminals; the length bound is drawn from ``[diameter, n]`` with weights
decaying geometrically, so short bounds are more likely.

Everything is a pure function of its arguments and seed.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass, field
from itertools import combinations

from .btcount import bfs_distances
from .errors import DegenerateGraph, InfeasibleRewire, InvalidSpec
from .instance import Edge, Graph, Instance, Kind

FAMILIES = ("complete", "grid", "path-like", "tree-like")

MAX_REMOVALS = 3
MAX_REWIRES = 25
_RETRIES = 200


@dataclass(frozen=True)
class LengthPolicy:
    """Truncated geometric weights ``ratio**i`` over ``[diameter, n]``."""

    ratio: float = 0.7


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int = 0  # complete
    rows: int = 0  # grid
    cols: int = 0
    cliques: int = 0  # path-like / tree-like
    clique_size: int = 0
    bridges: int = 1
    seed: int = 0
    kind: Kind = Kind.PCS
    length: LengthPolicy = field(default_factory=LengthPolicy)
    perturb: bool = False

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise InvalidSpec(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "complete" and self.n < 2:
            raise InvalidSpec("complete graphs need n >= 2")
        if self.family == "grid" and (self.rows < 1 or self.cols < 1 or self.rows * self.cols < 2):
            raise InvalidSpec("grids need positive dimensions and at least 2 vertices")
        if self.family in ("path-like", "tree-like"):
            if self.cliques < 1 or self.clique_size < 1 or self.cliques * self.clique_size < 2:
                raise InvalidSpec("clique chains need positive sizes and at least 2 vertices")
            if self.cliques > 1 and not 1 <= self.bridges <= self.clique_size**2:
                raise InvalidSpec(f"bridges must lie in 1..{self.clique_size ** 2}")
        if not 0 < self.length.ratio <= 1:
            raise InvalidSpec("length ratio must lie in (0, 1]")


def _complete(n: int) -> list[Edge]:
    return list(combinations(range(1, n + 1), 2))


def _grid(rows: int, cols: int) -> list[Edge]:
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c + 1
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return edges


def _clique_chain(k: int, q: int, bridges: int, tree: bool, rng: random.Random) -> list[Edge]:
    edges = []
    for i in range(k):
        first = i * q + 1
        edges.extend(combinations(range(first, first + q), 2))
    for i in range(1, k):
        j = rng.randrange(i) if tree else i - 1
        a0, b0 = j * q + 1, i * q + 1
        pairs = [(a0 + x, b0 + y) for x in range(q) for y in range(q)]
        edges.extend(sorted(rng.sample(pairs, bridges)))
    return edges


def generate_graph(spec: GenSpec) -> Graph:
    spec.validate()
    rng = random.Random(spec.seed)
    if spec.family == "complete":
        n, edges = spec.n, _complete(spec.n)
    elif spec.family == "grid":
        n, edges = spec.rows * spec.cols, _grid(spec.rows, spec.cols)
    else:
        n = spec.cliques * spec.clique_size
        edges = _clique_chain(spec.cliques, spec.clique_size, spec.bridges, spec.family == "tree-like", rng)
    g = Graph.from_edges(n, edges)
    if spec.perturb:
        g = perturb(g, rng.getrandbits(64))
    return g


def _pick_removable(edges: list[Edge], degree: list[int], rng: random.Random) -> int | None:
    """Index of a random edge whose deletion leaves both endpoints non-isolated."""
    for _ in range(_RETRIES):
        i = rng.randrange(len(edges))
        u, v = edges[i]
        if degree[u] > 1 and degree[v] > 1:
            return i
    safe = [i for i, (u, v) in enumerate(edges) if degree[u] > 1 and degree[v] > 1]
    return rng.choice(safe) if safe else None


def _pick_non_edge(n: int, present: set[Edge], rng: random.Random) -> Edge | None:
    if len(present) >= n * (n - 1) // 2:
        return None
    for _ in range(_RETRIES):
        u, v = rng.sample(range(1, n + 1), 2)
        e = (min(u, v), max(u, v))
        if e not in present:
            return e
    return rng.choice([e for e in combinations(range(1, n + 1), 2) if e not in present])


def perturb(g: Graph, seed: int, removals: int | None = None, rewires: int | None = None) -> Graph:
    """Randomly delete up to 3 edges and rewire up to 25.

    ``removals``/``rewires`` override the random counts.  Deletions never
    isolate a vertex; when that is impossible the removal is skipped.  If a
    rewire finds no free vertex pair, an :class:`InfeasibleRewire` warning is
    issued and ``g`` is returned unchanged.
    """
    rng = random.Random(seed)
    d = rng.randint(0, MAX_REMOVALS) if removals is None else removals
    r = rng.randint(0, MAX_REWIRES) if rewires is None else rewires
    edges = [(min(u, v), max(u, v)) for u, v in g.edges]
    present = set(edges)
    degree = [len(a) for a in g.adjacency]

    def delete(i: int) -> Edge:
        u, v = edges.pop(i)
        present.discard((u, v))
        degree[u] -= 1
        degree[v] -= 1
        return u, v

    for _ in range(d):
        if not edges:
            break
        i = _pick_removable(edges, degree, rng)
        if i is not None:
            delete(i)
    for _ in range(r):
        new = _pick_non_edge(g.n, present, rng)
        i = _pick_removable(edges, degree, rng) if edges else None
        if new is None or i is None:
            warnings.warn(InfeasibleRewire(f"cannot rewire a graph with n={g.n}, m={g.m}"), stacklevel=2)
            return g
        delete(i)
        edges.append(new)
        present.add(new)
        degree[new[0]] += 1
        degree[new[1]] += 1
    return Graph(g.n, tuple(edges))


def _eccentricities(g: Graph) -> dict[int, list]:
    return {v: bfs_distances(g, v) for v in range(1, g.n + 1) if g.adjacency[v]}


def diameter_pair(g: Graph) -> tuple[int, tuple[int, int]]:
    """Largest finite distance and the lexicographically smallest pair realizing it."""
    if g.m == 0:
        raise DegenerateGraph("graph has no edges")
    best = (-1, (0, 0))
    for s, dist in _eccentricities(g).items():
        for t in range(s + 1, g.n + 1):
            d = dist[t]
            if d is not None and d > best[0]:
                best = (d, (s, t))
    return best


def largest_component_diameter(g: Graph) -> int:
    if g.m == 0:
        raise DegenerateGraph("graph has no edges")
    ecc = _eccentricities(g)
    seen: set[int] = set()
    best_size, best_diam = 0, 0
    for v, dist in ecc.items():
        if v in seen:
            continue
        comp = [w for w in range(1, g.n + 1) if dist[w] is not None]
        seen.update(comp)
        diam = max(max(d for d in ecc[w] if d is not None) for w in comp)
        if len(comp) > best_size:
            best_size, best_diam = len(comp), diam
    return best_diam


def draw_length(lo: int, hi: int, policy: LengthPolicy, rng: random.Random) -> int:
    values = list(range(lo, hi + 1))
    weights = [policy.ratio**i for i in range(len(values))]
    return rng.choices(values, weights)[0]


def make_instance(
    g: Graph,
    kind: Kind = Kind.PCS,
    seed: int = 0,
    policy: LengthPolicy | None = None,
) -> Instance:
    policy = policy or LengthPolicy()
    rng = random.Random(seed)
    if kind is Kind.PCS:
        diam, pair = diameter_pair(g)
        return Instance(g, draw_length(diam, g.n, policy, rng), pair)
    diam = largest_component_diameter(g)
    return Instance(g, draw_length(diam, g.n, policy, rng))


def generate_instance(spec: GenSpec) -> Instance:
    g = generate_graph(spec)
    return make_instance(g, spec.kind, spec.seed ^ 0x9E3779B97F4A7C15, spec.length)
