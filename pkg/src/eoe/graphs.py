"""Graph families and the two-walker meeting chain.

Vocabulary used throughout the package:
  N -- number of jumps until two independent walkers meet, starting from
       adjacent vertices (one walker moves per jump, chosen evenly).
  The meeting chain is the discrete-time chain of walker-pair configuration
  classes observed at jump instants, with "met" absorbing.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NoAbsorptionError

COMPLETE = "complete"
BIPARTITE = "bipartite"
RING = "ring"
GENERIC = "generic"


@dataclass(frozen=True)
class Graph:
    """Finite undirected connected graph with a family tag.

    Immutable after construction; safe to share across threads/processes.
    ``m`` is the left-side size for complete bipartite graphs, otherwise None.
    ``edge_transitive`` is guaranteed for the built-in families and
    caller-asserted for generic graphs.
    """

    n: int
    family: str
    neighbors: tuple[tuple[int, ...], ...]
    m: int | None = None
    edge_transitive: bool = True

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in self.neighbors[u] if u < v]

    def is_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors[u]

    def spec_string(self) -> str:
        if self.family == COMPLETE:
            return f"complete:{self.n}"
        if self.family == BIPARTITE:
            return f"bipartite:{self.m}:{self.n}"
        if self.family == RING:
            return f"ring:{self.n}"
        return f"generic:{self.n}"


def _validate(neighbors: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    n = len(neighbors)
    for u, nbrs in enumerate(neighbors):
        if u in nbrs:
            raise ValueError(f"self-loop at vertex {u}")
        if len(set(nbrs)) != len(nbrs):
            raise ValueError(f"duplicate edge at vertex {u}")
        for v in nbrs:
            if not 0 <= v < n:
                raise ValueError(f"vertex {v} out of range")
            if u not in neighbors[v]:
                raise ValueError(f"edge {u}-{v} not symmetric")
    # connectivity by BFS from 0
    seen = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for u in frontier:
            for v in neighbors[u]:
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    if len(seen) != n:
        raise ValueError("graph is not connected")
    return tuple(tuple(sorted(nbrs)) for nbrs in neighbors)


def build_complete(n: int) -> Graph:
    """Complete graph on n >= 2 vertices."""
    if n < 2:
        raise ValueError(f"complete graph needs n >= 2, got {n}")
    nbrs = tuple(tuple(v for v in range(n) if v != u) for u in range(n))
    return Graph(n=n, family=COMPLETE, neighbors=nbrs)


def build_bipartite(m: int, n: int) -> Graph:
    """Complete bipartite graph with sides of size m and n-m (1 <= m < n)."""
    if not 1 <= m < n:
        raise ValueError(f"bipartite partition needs 1 <= m < n, got m={m}, n={n}")
    left = tuple(range(m))
    right = tuple(range(m, n))
    nbrs = tuple(right if u < m else left for u in range(n))
    return Graph(n=n, family=BIPARTITE, neighbors=nbrs, m=m)


def build_ring(n: int) -> Graph:
    """Cycle graph on n >= 3 vertices. Closed-form transforms need even n."""
    if n < 3:
        raise ValueError(f"ring needs n >= 3, got {n}")
    nbrs = tuple(((u - 1) % n, (u + 1) % n) for u in range(n))
    return Graph(n=n, family=RING, neighbors=nbrs)


def build_generic(n: int, edges: list[tuple[int, int]], edge_transitive: bool = False) -> Graph:
    """Generic graph from an edge list; edge-transitivity is caller-asserted."""
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if v not in nbrs[u]:
            nbrs[u].append(v)
            nbrs[v].append(u)
    return Graph(n=n, family=GENERIC, neighbors=_validate(nbrs), edge_transitive=edge_transitive)


def load_edge_list(path: str | Path) -> tuple[int, list[tuple[int, int]]]:
    """Read a 0-indexed "u v" per-line edge list; n is 1 + max vertex id."""
    edges = []
    top = -1
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line: {line!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u, v))
        top = max(top, u, v)
    if top < 1:
        raise ValueError("edge list is empty")
    return top + 1, edges


def parse_graph_spec(spec: str) -> Graph:
    """Parse CLI graph strings: complete:n, bipartite:m:n, ring:n, generic:<path>."""
    kind, _, rest = spec.partition(":")
    if kind == COMPLETE:
        return build_complete(int(rest))
    if kind == BIPARTITE:
        m_str, _, n_str = rest.partition(":")
        return build_bipartite(int(m_str), int(n_str))
    if kind == RING:
        return build_ring(int(rest))
    if kind == GENERIC:
        n, edges = load_edge_list(rest)
        return build_generic(n, edges, edge_transitive=True)
    raise ValueError(f"unknown graph spec {spec!r}")


@dataclass(frozen=True)
class MeetingChain:
    """Jump chain of walker-pair configuration classes, "met" absorbing.

    Each step conditions on "some walker jumped": the two exponential jump
    clocks race evenly, so a step moves one walker (picked with probability
    1/2 each) to a uniform neighbor.  State 0 is always "met"; ``start`` is
    the distance-one class.
    """

    kernel: np.ndarray
    start: int
    labels: tuple[str, ...]
    met: int = 0

    def __post_init__(self):
        self.kernel.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.kernel.shape[0]


def _ring_distance(n: int, i: int, j: int) -> int:
    d = abs(i - j) % n
    return min(d, n - d)


def pair_class(g: Graph, i: int, j: int) -> int:
    """Meeting-chain state index of the unordered walker pair {i, j}."""
    if i == j:
        return 0
    if g.family == COMPLETE:
        return 1
    if g.family == BIPARTITE:
        return 1 if (i < g.m) != (j < g.m) else 2
    if g.family == RING:
        return _ring_distance(g.n, i, j)
    pairs = _generic_pairs(g)
    return pairs.index((min(i, j), max(i, j))) + 1


def _generic_pairs(g: Graph) -> list[tuple[int, int]]:
    return [(u, v) for u in range(g.n) for v in range(u + 1, g.n)]


def meeting_chain(g: Graph, start_pair: tuple[int, int] | None = None) -> MeetingChain:
    """Reduce the two-walker displacement dynamics to the meeting chain.

    For the built-in families the chain lives on distance classes; for
    generic graphs it is the full unordered-pair chain with all diagonal
    pairs lumped into the absorbing "met" state.  ``start_pair`` picks the
    start state (generic graphs; must be an edge for the distance-one
    contract), defaulting to the lexicographically first edge.
    """
    if g.family == COMPLETE:
        n = g.n
        k = np.zeros((2, 2))
        k[0, 0] = 1.0
        k[1, 0] = 1.0 / (n - 1)
        k[1, 1] = (n - 2) / (n - 1)
        return MeetingChain(kernel=k, start=1, labels=("met", "apart"))
    if g.family == BIPARTITE:
        m, n = g.m, g.n
        p = 0.5 * (1.0 / m + 1.0 / (n - m))
        k = np.zeros((3, 3))
        k[0, 0] = 1.0
        k[1, 0] = p
        k[1, 2] = 1.0 - p
        k[2, 1] = 1.0
        return MeetingChain(kernel=k, start=1, labels=("met", "d1", "d2"))
    if g.family == RING:
        n = g.n
        top = n // 2
        k = np.zeros((top + 1, top + 1))
        k[0, 0] = 1.0
        for d in range(1, top):
            k[d, d - 1] = 0.5
            k[d, d + 1] = 0.5
        if n % 2 == 0:
            k[top, top - 1] = 1.0
        else:
            k[top, top - 1] = 0.5
            k[top, top] = 0.5
        labels = ("met",) + tuple(f"d{d}" for d in range(1, top + 1))
        return MeetingChain(kernel=k, start=1, labels=labels)

    # generic: unordered off-diagonal pairs, diagonal lumped into met
    pairs = _generic_pairs(g)
    index = {p: i + 1 for i, p in enumerate(pairs)}
    size = len(pairs) + 1
    k = np.zeros((size, size))
    k[0, 0] = 1.0
    for (u, v), row in index.items():
        for mover, other in ((u, v), (v, u)):
            w = 0.5 / g.degree(mover)
            for t in g.neighbors[mover]:
                col = 0 if t == other else index[(min(t, other), max(t, other))]
                k[row, col] += w
    if start_pair is None:
        start_pair = g.edges()[0]
    i, j = start_pair
    if i == j:
        raise ValueError("start pair must be two distinct vertices")
    if not g.is_edge(i, j):
        raise ValueError(f"start pair {start_pair} is not an edge (distance-one contract)")
    start = index[(min(i, j), max(i, j))]
    labels = ("met",) + tuple(f"{u}|{v}" for u, v in pairs)
    return MeetingChain(kernel=k, start=start, labels=labels)


def check_absorbing(chain: MeetingChain) -> None:
    """Raise NoAbsorptionError unless absorption from the start state is a.s."""
    k = chain.kernel
    size = chain.n_states
    reach = np.zeros(size, dtype=bool)
    reach[chain.met] = True
    for _ in range(size):
        new = reach | (k[:, reach].sum(axis=1) > 0)
        if (new == reach).all():
            break
        reach = new
    if not reach.all():
        raise NoAbsorptionError("some states cannot reach the met state")
