"""Graph/instance data model and the extended-DIMACS text format.

An instance file looks like::

    p edge 4 5
    e 1 2
    e 2 3
    e 3 4
    e 1 4
    e 2 4
    l 2
    t 1 3

``p edge n m`` declares the vertex and edge counts, ``e`` lines list edges,
``l`` gives the maximum path length (in edges) and the optional ``t`` line
names the terminal pair.  Without a ``t`` line the instance asks for the
all-pairs count.  Comment lines (``c ...``) and blank lines are ignored.
"""

from __future__ import annotations

import enum
import io
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, TextIO

from .errors import (
    DuplicateDirective,
    DuplicateEdge,
    HeaderMismatch,
    IdenticalTerminals,
    InvalidLength,
    MalformedLine,
    MissingHeader,
    MissingLength,
    SelfLoop,
    VertexOutOfRange,
)

Edge = tuple[int, int]


class Kind(str, enum.Enum):
    PCS = "PCS"
    PCA = "PCA"


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``1..n``."""

    n: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(u), int(v)) for u, v in self.edges))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge]) -> "Graph":
        """Build a graph with every edge normalized to ``u < v``."""
        return cls(n, tuple((min(u, v), max(u, v)) for u, v in edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbour tuples indexed by vertex id; index 0 is unused."""
        adj: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return tuple(tuple(sorted(a)) for a in adj)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_set(self) -> frozenset[Edge]:
        return frozenset((min(u, v), max(u, v)) for u, v in self.edges)

    def normalized(self) -> "Graph":
        return Graph.from_edges(self.n, self.edges)


@dataclass(frozen=True)
class Instance:
    graph: Graph
    max_len: int
    terminals: tuple[int, int] | None = None

    @property
    def kind(self) -> Kind:
        return Kind.PCA if self.terminals is None else Kind.PCS

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def m(self) -> int:
        return self.graph.m

    def with_max_len(self, max_len: int) -> "Instance":
        return Instance(self.graph, max_len, self.terminals)

    def with_terminals(self, terminals: tuple[int, int] | None) -> "Instance":
        return Instance(self.graph, self.max_len, terminals)

    def equivalent(self, other: "Instance") -> bool:
        """Equality up to edge order and edge orientation."""
        return (
            self.graph.n == other.graph.n
            and self.graph.m == other.graph.m
            and self.graph.edge_set() == other.graph.edge_set()
            and self.max_len == other.max_len
            and self.terminals == other.terminals
        )


def _check_vertex(v: int, n: int, lineno: int | None = None) -> None:
    if not 1 <= v <= n:
        raise VertexOutOfRange(f"vertex {v} outside 1..{n}", lineno)


def validate(inst: Instance) -> None:
    """Raise the first violated graph/instance invariant, or return None."""
    g = inst.graph
    if g.n < 1:
        raise MalformedLine(f"vertex count must be positive, got {g.n}")
    seen: set[Edge] = set()
    for u, v in g.edges:
        _check_vertex(u, g.n)
        _check_vertex(v, g.n)
        if u == v:
            raise SelfLoop(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise DuplicateEdge(f"duplicate edge {key}")
        seen.add(key)
    if inst.max_len < 0:
        raise InvalidLength(f"maximum length must be non-negative, got {inst.max_len}")
    if inst.terminals is not None:
        s, t = inst.terminals
        _check_vertex(s, g.n)
        _check_vertex(t, g.n)
        if s == t:
            raise IdenticalTerminals(f"terminals coincide ({s})")


def _ints(tokens: list[str], lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in tokens]
    except ValueError:
        raise MalformedLine(f"expected integers, got {' '.join(tokens)!r}", lineno) from None


def parse_instance(text: str | TextIO) -> Instance:
    """Parse an extended-DIMACS instance from a string or text stream."""
    stream = io.StringIO(text) if isinstance(text, str) else text
    header: tuple[int, int] | None = None
    max_len: int | None = None
    terminals: tuple[int, int] | None = None
    terminals_line = 0
    edges: list[Edge] = []
    seen: set[Edge] = set()

    for lineno, raw in enumerate(stream, 1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        head, args = tokens[0], tokens[1:]
        if head == "p":
            if header is not None:
                raise DuplicateDirective("second 'p' line", lineno)
            if len(args) != 3 or args[0] != "edge":
                raise MalformedLine("expected 'p edge n m'", lineno)
            n, m = _ints(args[1:], lineno)
            if n < 1 or m < 0:
                raise MalformedLine(f"bad header counts n={n} m={m}", lineno)
            header = (n, m)
        elif head == "e":
            if header is None:
                raise MissingHeader("edge line before 'p' line", lineno)
            if len(args) != 2:
                raise MalformedLine("expected 'e v1 v2'", lineno)
            u, v = _ints(args, lineno)
            n, m = header
            _check_vertex(u, n, lineno)
            _check_vertex(v, n, lineno)
            if u == v:
                raise SelfLoop(f"self-loop at vertex {u}", lineno)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise DuplicateEdge(f"duplicate edge {key}", lineno)
            if len(edges) == m:
                raise HeaderMismatch(f"more than the declared {m} edges", lineno)
            seen.add(key)
            edges.append(key)
        elif head == "l":
            if max_len is not None:
                raise DuplicateDirective("second 'l' line", lineno)
            if len(args) != 1:
                raise MalformedLine("expected 'l len'", lineno)
            (max_len,) = _ints(args, lineno)
            if max_len < 0:
                raise InvalidLength(f"negative maximum length {max_len}", lineno)
        elif head == "t":
            if terminals is not None:
                raise DuplicateDirective("second 't' line", lineno)
            if len(args) != 2:
                raise MalformedLine("expected 't v1 v2'", lineno)
            s, t = _ints(args, lineno)
            if s == t:
                raise IdenticalTerminals(f"terminals coincide ({s})", lineno)
            terminals, terminals_line = (s, t), lineno
        else:
            raise MalformedLine(f"unknown line type {head!r}", lineno)

    if header is None:
        raise MissingHeader("no 'p edge n m' line")
    if max_len is None:
        raise MissingLength("no 'l len' line")
    n, m = header
    if len(edges) != m:
        raise HeaderMismatch(f"header declares {m} edges, found {len(edges)}")
    if terminals is not None:
        for v in terminals:
            _check_vertex(v, n, terminals_line)
    return Instance(Graph(n, tuple(edges)), max_len, terminals)


def serialize_instance(inst: Instance) -> str:
    g = inst.graph
    lines = [f"p edge {g.n} {g.m}"]
    lines.extend(f"e {min(u, v)} {max(u, v)}" for u, v in g.edges)
    lines.append(f"l {inst.max_len}")
    if inst.terminals is not None:
        lines.append("t {} {}".format(*inst.terminals))
    return "\n".join(lines) + "\n"


def load_instance(path: str | os.PathLike) -> Instance:
    with open(path, encoding="ascii") as fh:
        return parse_instance(fh)


def dump_instance(inst: Instance, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(serialize_instance(inst))

