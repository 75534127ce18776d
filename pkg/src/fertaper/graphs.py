"""High-girth bipartite graphs as parity-check matrices.

The incidence matrix of a bipartite graph has column weight two with one
endpoint on each side, so it encodes weight-N occupation vectors whenever
the girth is at least 2N+2.  This module generates such graphs (a
cycle-with-chords family and a randomized greedy search), measures girth,
and decodes syndromes by pairing syndrome vertices with shortest paths
through a minimum-weight perfect matching.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass

import networkx as nx
import numpy as np

from fertaper import gf2


@dataclass(frozen=True)
class BipartiteGraph:
    """Vertices 1..Q split into two sides; edges only across the split.

    The edge tuple fixes the column order of the incidence matrix.
    """

    left: frozenset
    right: frozenset
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        q = len(self.left) + len(self.right)
        if self.left & self.right:
            raise ValueError("left and right sides overlap")
        if set(range(1, q + 1)) != self.left | self.right:
            raise ValueError("vertices must be exactly 1..Q")
        seen = set()
        for u, v in self.edges:
            pair = frozenset((u, v))
            if len(pair) != 2:
                raise ValueError(f"self-loop at vertex {u}")
            if not ((u in self.left and v in self.right) or (v in self.left and u in self.right)):
                raise ValueError(f"edge {u}-{v} does not cross the bipartition")
            if pair in seen:
                raise ValueError(f"parallel edge {u}-{v}")
            seen.add(pair)

    @property
    def vertex_count(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[int, set]:
        adj: dict[int, set] = {v: set() for v in range(1, self.vertex_count + 1)}
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def incidence_matrix(self) -> np.ndarray:
        mat = np.zeros((self.vertex_count, self.edge_count), dtype=np.uint8)
        for col, (u, v) in enumerate(self.edges):
            mat[u - 1, col] = 1
            mat[v - 1, col] = 1
        return mat

    def edge_index(self) -> dict[frozenset, int]:
        return {frozenset(e): i for i, e in enumerate(self.edges)}


def _bfs_distances(adj: dict[int, set], source: int) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def girth(g: BipartiteGraph) -> float:
    """Length of the shortest cycle, or math.inf for a forest.

    BFS from every vertex; a non-tree edge seen at depths (d1, d2) closes a
    walk of length d1+d2+1 that contains a cycle no longer than that, and
    a shortest cycle is always found exactly from one of its vertices.
    """
    adj = g.adjacency()
    best = math.inf
    for source in adj:
        dist = {source: 0}
        parent = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            if 2 * dist[u] >= best:
                continue
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
                elif parent[u] != w:
                    best = min(best, dist[u] + dist[w] + 1)
    return best


def injectivity_from_girth(g: BipartiteGraph, n: int) -> bool:
    """Incidence-matrix injectivity at weight n follows from girth >= 2n+2."""
    return girth(g) >= 2 * n + 2


def two_coloring(adj: dict[int, set]) -> tuple[set, set] | None:
    """Color classes of a bipartition, or None when an odd cycle exists."""
    color: dict[int, int] = {}
    for start in adj:
        if start in color:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in color:
                    color[w] = color[u] ^ 1
                    queue.append(w)
                elif color[w] == color[u]:
                    return None
    return ({v for v, c in color.items() if c == 0}, {v for v, c in color.items() if c == 1})


def cycle_chord_graph(cycle_length: int, n: int) -> BipartiteGraph:
    """Even cycle with an antipodal chord of n edges at every position.

    Produces cycle_length*(2+n)/2 edges on cycle_length*(1+n)/2 vertices
    with girth exactly 2n+2.  The chords join vertex j to vertex j +
    cycle_length/2, each through n-1 fresh vertices.  Bipartiteness
    requires the half-cycle offset and the chord length to have equal
    parity, i.e. cycle_length = 2n mod 4; the 2-coloring check below
    enforces that rather than assuming it.
    """
    L = cycle_length
    if L % 2 or L < 2 * n + 2:
        raise ValueError("cycle length must be even and at least 2n+2")
    if n < 1:
        raise ValueError("need at least one particle")
    edges: list[tuple[int, int]] = [(i, i % L + 1) for i in range(1, L + 1)]
    next_vertex = L + 1
    for j in range(1, L // 2 + 1):
        a, b = j, j + L // 2
        path = [a] + list(range(next_vertex, next_vertex + n - 1)) + [b]
        next_vertex += n - 1
        edges.extend((path[i], path[i + 1]) for i in range(n))
    adj: dict[int, set] = {v: set() for v in range(1, next_vertex)}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    coloring = two_coloring(adj)
    if coloring is None:
        raise ValueError(
            f"cycle length {L} with chord length {n} creates odd cycles; "
            "the half-cycle offset and chord length must have equal parity "
            f"(use cycle_length = {2 * n} mod 4)"
        )
    left, right = coloring
    oriented = tuple((u, v) if u in left else (v, u) for u, v in edges)
    g = BipartiteGraph(frozenset(left), frozenset(right), oriented)
    got = girth(g)
    if got != 2 * n + 2:
        raise AssertionError(f"construction girth {got} != {2 * n + 2}")
    return g


def greedy_high_girth(q: int, n: int, trials: int = 1000, seed: int = 0,
                      splits=None) -> BipartiteGraph:
    """Best-of-many randomized greedy graphs with girth >= 2n+2.

    Each trial fixes a bipartition size, then repeatedly adds a uniformly
    random cross edge whose endpoints are at distance >= 2n+1 (new cycles
    stay at length >= 2n+2) until no edge can be added.  The densest graph
    over all trials wins; ties keep the earlier trial, so a fixed seed
    gives a reproducible result.
    """
    if q < 2:
        raise ValueError("need at least two vertices")
    rng = random.Random(seed)
    if splits is None:
        base = q // 2
        spread = sorted({max(1, base + d) for d in (0, -1, 1, -2, 2, -q // 6, q // 6)})
        splits = [s for s in spread if 1 <= s <= q - 1]
    min_dist = 2 * n + 1
    best: BipartiteGraph | None = None
    for trial in range(trials):
        left_size = splits[trial % len(splits)]
        left = list(range(1, left_size + 1))
        right = list(range(left_size + 1, q + 1))
        adj: dict[int, set] = {v: set() for v in range(1, q + 1)}
        edges: list[tuple[int, int]] = []
        while True:
            candidates = []
            for u in left:
                dist = _bfs_distances(adj, u)
                for v in right:
                    if v in adj[u]:
                        continue
                    if dist.get(v, math.inf) >= min_dist:
                        candidates.append((u, v))
            if not candidates:
                break
            u, v = candidates[rng.randrange(len(candidates))]
            adj[u].add(v)
            adj[v].add(u)
            edges.append((u, v))
        if best is None or len(edges) > best.edge_count:
            best = BipartiteGraph(
                frozenset(left), frozenset(right), tuple(sorted(edges))
            )
    return best


def no_edge_addable(g: BipartiteGraph, n: int) -> bool:
    """Maximality witness: every absent cross edge would close a short cycle."""
    adj = g.adjacency()
    for u in sorted(g.left):
        dist = _bfs_distances(adj, u)
        for v in sorted(g.right):
            if v in adj[u]:
                continue
            if dist.get(v, math.inf) >= 2 * n + 1:
                return False
    return True


def _bfs_path(adj: dict[int, set], source: int, target: int) -> list[int] | None:
    if source == target:
        return [source]
    parent = {source: None}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in sorted(adj[u]):
            if w in parent:
                continue
            parent[w] = u
            if w == target:
                path = [w]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(w)
    return None


def graph_decode(g: BipartiteGraph, syndrome, n: int) -> np.ndarray | None:
    """Weight-n edge set whose boundary is the given vertex subset.

    The minimum-weight solution pairs up the syndrome vertices with
    edge-disjoint shortest paths, so a minimum-weight perfect matching
    under the path metric finds it; the unique weight-n preimage exists
    exactly when that minimum equals n.  The reconstruction is verified
    against the syndrome before returning, making wrong answers
    impossible regardless of matching internals.
    """
    syndrome = gf2.asbits(syndrome)
    if syndrome.shape[0] != g.vertex_count:
        raise ValueError("syndrome length does not match vertex count")
    marked = [i + 1 for i, b in enumerate(syndrome) if b]
    m = g.edge_count
    if len(marked) % 2 or len(marked) > 2 * n:
        return None
    if not marked:
        return np.zeros(m, dtype=np.uint8) if n == 0 else None
    if n == 0:
        return None
    adj = g.adjacency()
    dists = {u: _bfs_distances(adj, u) for u in marked}
    helper = nx.Graph()
    for i, u in enumerate(marked):
        for v in marked[i + 1 :]:
            d = dists[u].get(v)
            if d is not None:
                helper.add_edge(u, v, weight=d)
    if helper.number_of_nodes() < len(marked):
        return None
    matching = nx.min_weight_matching(helper)
    if 2 * len(matching) != len(marked):
        return None
    total = sum(dists[min(u, v)][max(u, v)] for u, v in matching)
    if total != n:
        return None
    eidx = g.edge_index()
    x = np.zeros(m, dtype=np.uint8)
    for u, v in matching:
        path = _bfs_path(adj, u, v)
        for a, b in zip(path, path[1:]):
            x[eidx[frozenset((a, b))]] ^= 1
    # confirm weight and boundary; mismatches cannot happen at a true optimum
    if int(x.sum()) != n:
        return None
    if not np.array_equal(gf2.matvec(g.incidence_matrix(), x), syndrome):
        return None
    return x


def save_graph(g: BipartiteGraph, path: str) -> None:
    """Write "Q_left Q_right M" then one "u v" line per edge.

    Vertices are relabeled so the left side is 1..Q_left.
    """
    order = sorted(g.left) + sorted(g.right)
    relabel = {v: i + 1 for i, v in enumerate(order)}
    lines = [f"{len(g.left)} {len(g.right)} {g.edge_count}"]
    for u, v in g.edges:
        a, b = (u, v) if u in g.left else (v, u)
        lines.append(f"{relabel[a]} {relabel[b]}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path: str) -> BipartiteGraph:
    with open(path, encoding="utf-8") as fh:
        tokens = fh.read().split()
    ql, qr, m = (int(t) for t in tokens[:3])
    flat = [int(t) for t in tokens[3:]]
    if len(flat) != 2 * m:
        raise ValueError("edge list length does not match header")
    edges = tuple((flat[2 * i], flat[2 * i + 1]) for i in range(m))
    return BipartiteGraph(
        frozenset(range(1, ql + 1)), frozenset(range(ql + 1, ql + qr + 1)), edges
    )
