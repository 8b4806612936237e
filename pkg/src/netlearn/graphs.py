"""Directed social-network graphs, family generators, rooted balls and the
dyadic ball metric.

All operations are pure functions over immutable graph values.  Neighborhoods
are self-inclusive throughout: ``closed_nbrs(i)`` always contains ``i``.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Optional

__all__ = [
    "DirectedGraph",
    "RootedBall",
    "GraphFamilySpec",
    "generate",
    "is_strongly_connected",
    "min_l_connectivity",
    "out_degree_bound",
    "extract_ball",
    "balls_isomorphic",
    "balls_isomorphic_bruteforce",
    "rooted_distance",
    "to_edge_list_text",
    "from_edge_list_text",
    "parse_family_string",
]


@dataclass(frozen=True)
class DirectedGraph:
    """Simple directed graph on vertices 0..n-1.

    ``family`` carries the generator tag and parameters when the graph came
    from a built-in family; it does not participate in equality.
    """

    n: int
    edges: frozenset
    family: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        out = [[] for _ in range(self.n)]
        for (i, j) in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge ({i},{j}) out of range")
            if i == j:
                raise ValueError(f"self-loop at {i} not allowed")
            out[i].append(j)
        object.__setattr__(self, "_out", tuple(tuple(sorted(o)) for o in out))
        object.__setattr__(
            self,
            "_closed",
            tuple(tuple(sorted(set(o) | {i})) for i, o in enumerate(out)),
        )

    def out_neighbors(self, i):
        return self._out[i]

    def closed_nbrs(self, i):
        """Out-neighbors of i together with i itself, sorted."""
        return self._closed[i]

    def has_edge(self, i, j):
        return (i, j) in self.edges

    @property
    def family_tag(self):
        return None if self.family is None else self.family[0]

    def family_params(self):
        return {} if self.family is None else dict(self.family[1])


def _bfs_distances(g: DirectedGraph, source: int):
    dist = [-1] * g.n
    dist[source] = 0
    q = deque([source])
    while q:
        v = q.popleft()
        for w in g.out_neighbors(v):
            if dist[w] < 0:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def is_strongly_connected(g: DirectedGraph) -> bool:
    """True iff every ordered vertex pair is joined by a directed path."""
    if g.n == 1:
        return True
    if any(d < 0 for d in _bfs_distances(g, 0)):
        return False
    rev = DirectedGraph(g.n, frozenset((j, i) for (i, j) in g.edges))
    return all(d >= 0 for d in _bfs_distances(rev, 0))


def all_pairs_distances(g: DirectedGraph):
    """List of BFS distance lists, one per source; -1 marks unreachable."""
    return [_bfs_distances(g, s) for s in range(g.n)]


def min_l_connectivity(g: DirectedGraph) -> int:
    """Smallest L such that every edge (i,j) has a return path j->i of
    length at most L.  L = 1 exactly when the edge set is symmetric."""
    if not is_strongly_connected(g):
        raise ValueError("L-connectivity requires a strongly connected graph")
    if not g.edges:
        return 0
    dist = all_pairs_distances(g)
    return max(dist[j][i] for (i, j) in g.edges)


def out_degree_bound(g: DirectedGraph) -> int:
    """Max over vertices of |closed neighborhood| (self-inclusive)."""
    return max(len(g.closed_nbrs(i)) for i in range(g.n))


@dataclass(frozen=True)
class RootedBall:
    """Rooted subgraph induced by the vertices at directed distance <= radius
    from the root.  Vertex labels are those of the parent graph."""

    root: int
    radius: int
    vertices: frozenset
    edges: frozenset

    def __post_init__(self):
        if self.root not in self.vertices:
            raise ValueError("root must belong to the ball")

    @property
    def n(self):
        return len(self.vertices)

    def root_distances(self):
        """Distance from the root within the ball (equals the distance in
        the parent graph for every ball vertex)."""
        out = {v: [] for v in self.vertices}
        for (i, j) in self.edges:
            out[i].append(j)
        dist = {self.root: 0}
        q = deque([self.root])
        while q:
            v = q.popleft()
            for w in out[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    q.append(w)
        return dist


def extract_ball(g: DirectedGraph, root: int, r: int) -> RootedBall:
    if not (0 <= root < g.n):
        raise ValueError(f"invalid root {root}")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    dist = _bfs_distances(g, root)
    verts = frozenset(v for v in range(g.n) if 0 <= dist[v] <= r)
    edges = frozenset((i, j) for (i, j) in g.edges if i in verts and j in verts)
    return RootedBall(root, r, verts, edges)


def _iso_signature(ball: RootedBall):
    dist = ball.root_distances()
    outdeg = {v: 0 for v in ball.vertices}
    indeg = {v: 0 for v in ball.vertices}
    for (i, j) in ball.edges:
        outdeg[i] += 1
        indeg[j] += 1
    return {v: (dist.get(v, -1), outdeg[v], indeg[v]) for v in ball.vertices}


def balls_isomorphic(a: RootedBall, b: RootedBall):
    """Root-preserving, edge-preserving bijection test.

    Returns ``(True, mapping)`` with a witness dict a-vertex -> b-vertex, or
    ``(False, None)``.  Exhaustive backtracking pruned by distance-from-root
    and degree profiles; intended for desk-scale balls.
    """
    if a.n != b.n or len(a.edges) != len(b.edges):
        return False, None
    sig_a, sig_b = _iso_signature(a), _iso_signature(b)
    if sorted(sig_a.values()) != sorted(sig_b.values()):
        return False, None

    # order a-vertices by distance from root, then by rarity of signature
    order = sorted(a.vertices, key=lambda v: (sig_a[v][0], v))
    by_sig = {}
    for v in b.vertices:
        by_sig.setdefault(sig_b[v], []).append(v)

    a_out = {v: set() for v in a.vertices}
    a_in = {v: set() for v in a.vertices}
    for (i, j) in a.edges:
        a_out[i].add(j)
        a_in[j].add(i)
    b_edges = b.edges

    mapping = {}
    used = set()

    def consistent(v, w):
        for u in a.vertices:
            if u not in mapping:
                continue
            if ((u, v) in a.edges) != ((mapping[u], w) in b_edges):
                return False
            if ((v, u) in a.edges) != ((w, mapping[u]) in b_edges):
                return False
        return True

    def backtrack(k):
        if k == len(order):
            return True
        v = order[k]
        candidates = by_sig.get(sig_a[v], [])
        if k == 0:
            candidates = [b.root]
        for w in candidates:
            if w in used or sig_b[w] != sig_a[v]:
                continue
            if not consistent(v, w):
                continue
            mapping[v] = w
            used.add(w)
            if backtrack(k + 1):
                return True
            del mapping[v]
            used.discard(w)
        return False

    if sig_a[order[0]] != sig_b[b.root]:
        return False, None
    if backtrack(0):
        return True, dict(mapping)
    return False, None


def balls_isomorphic_bruteforce(a: RootedBall, b: RootedBall) -> bool:
    """All-permutations oracle; only sensible for balls of <= 8 vertices."""
    if a.n != b.n or len(a.edges) != len(b.edges):
        return False
    a_rest = sorted(a.vertices - {a.root})
    b_rest = sorted(b.vertices - {b.root})
    for perm in permutations(b_rest):
        h = {a.root: b.root}
        h.update(zip(a_rest, perm))
        if all(((h[i], h[j]) in b.edges) for (i, j) in a.edges):
            # edge counts equal, so injective edge preservation is enough
            return True
    return False


def rooted_distance(g1: DirectedGraph, i1: int, g2: DirectedGraph, i2: int,
                    r_max: int):
    """Dyadic distance 2^(-r*) between rooted graphs, truncated at r_max.

    r* is the largest r <= r_max with isomorphic balls.  Returns a pair
    ``(value, truncated)``; value 0.0 means the balls agree at every radius
    up to r_max and exhaust both graphs identically.
    """
    for g, i in ((g1, i1), (g2, i2)):
        if not (0 <= i < g.n):
            raise ValueError(f"invalid root {i}")
        if not is_strongly_connected(g):
            raise ValueError("rooted_distance requires strongly connected graphs")
    r_good = -1
    for r in range(r_max + 1):
        b1 = extract_ball(g1, i1, r)
        b2 = extract_ball(g2, i2, r)
        ok, _ = balls_isomorphic(b1, b2)
        if not ok:
            break
        r_good = r
        if b1.n == g1.n and b2.n == g2.n:
            return 0.0, False
    if r_good < 0:
        # radius-0 balls are always isomorphic, so this cannot happen
        raise AssertionError("radius-0 balls must match")
    if r_good == r_max:
        return 2.0 ** (-r_max), True
    return 2.0 ** (-r_good), False


# ---------------------------------------------------------------------------
# family generators

def _undirected(pairs):
    out = set()
    for (i, j) in pairs:
        out.add((i, j))
        out.add((j, i))
    return out


def chain(n: int) -> DirectedGraph:
    """Undirected path on n vertices (both edge directions)."""
    if n < 1:
        raise ValueError("n >= 1 required")
    e = _undirected((i, i + 1) for i in range(n - 1))
    return DirectedGraph(n, frozenset(e), ("chain", (("n", n),)))


def dicycle(n: int) -> DirectedGraph:
    """Directed cycle 0 -> 1 -> ... -> n-1 -> 0."""
    if n < 2:
        raise ValueError("n >= 2 required")
    e = frozenset((i, (i + 1) % n) for i in range(n))
    return DirectedGraph(n, e, ("dicycle", (("n", n),)))


def cycle(n: int) -> DirectedGraph:
    """Undirected cycle on n vertices."""
    if n < 3:
        raise ValueError("n >= 3 required")
    e = _undirected((i, (i + 1) % n) for i in range(n))
    return DirectedGraph(n, frozenset(e), ("cycle", (("n", n),)))


def grid(a: int, b: int) -> DirectedGraph:
    """Undirected a x b grid with 4-neighbor adjacency."""
    if a < 1 or b < 1:
        raise ValueError("grid dimensions must be positive")
    idx = lambda r, c: r * b + c
    pairs = []
    for r in range(a):
        for c in range(b):
            if c + 1 < b:
                pairs.append((idx(r, c), idx(r, c + 1)))
            if r + 1 < a:
                pairs.append((idx(r, c), idx(r + 1, c)))
    return DirectedGraph(a * b, frozenset(_undirected(pairs)),
                         ("grid", (("a", a), ("b", b))))


def random_regular(n: int, d: int, seed: int) -> DirectedGraph:
    """Random d-regular undirected graph, retried until connected."""
    import networkx as nx

    for attempt in range(100):
        h = nx.random_regular_graph(d, n, seed=seed + attempt)
        if nx.is_connected(h):
            e = frozenset(_undirected(h.edges()))
            return DirectedGraph(
                n, e, ("random_regular", (("n", n), ("d", d), ("seed", seed))))
    raise RuntimeError("could not generate a connected regular graph")


def royal_family(R: int, n: int) -> DirectedGraph:
    """Clique of R mutually-observing royals; an undirected public chain of n
    agents who all observe every royal; royal 0 observes public agent 0."""
    if R < 1 or n < 1:
        raise ValueError("R >= 1 and n >= 1 required")
    royals = list(range(R))
    public = list(range(R, R + n))
    e = set()
    for i in royals:
        for j in royals:
            if i != j:
                e.add((i, j))
    e |= _undirected((public[k], public[k + 1]) for k in range(n - 1))
    for p in public:
        for r in royals:
            e.add((p, r))
    e.add((royals[0], public[0]))
    return DirectedGraph(R + n, frozenset(e),
                         ("royal_family", (("R", R), ("n", n))))


def royal_family_roles(g: DirectedGraph):
    """(royals, public) vertex lists for a royal_family graph."""
    if g.family_tag != "royal_family":
        raise ValueError("not a royal_family graph")
    p = g.family_params()
    R, n = p["R"], p["n"]
    return list(range(R)), list(range(R, R + n))


def mad_king(R_C: int, R_B: int, n: int) -> DirectedGraph:
    """Undirected star-of-stars: king u -- regent, court, people;
    regent -- bureaucracy.  Vertex order: king, regent, court, bureaucracy,
    people."""
    if R_C < 1 or R_B < 1 or n < 1:
        raise ValueError("all class sizes must be >= 1")
    king = 0
    regent = 1
    court = list(range(2, 2 + R_C))
    bureau = list(range(2 + R_C, 2 + R_C + R_B))
    people = list(range(2 + R_C + R_B, 2 + R_C + R_B + n))
    pairs = [(king, regent)]
    pairs += [(king, c) for c in court]
    pairs += [(king, p) for p in people]
    pairs += [(regent, b) for b in bureau]
    return DirectedGraph(
        2 + R_C + R_B + n, frozenset(_undirected(pairs)),
        ("mad_king", (("R_C", R_C), ("R_B", R_B), ("n", n))))


_FAMILIES = {
    "chain": (chain, ("n",)),
    "dicycle": (dicycle, ("n",)),
    "cycle": (cycle, ("n",)),
    "grid": (grid, ("a", "b")),
    "random_regular": (random_regular, ("n", "d", "seed")),
    "royal_family": (royal_family, ("R", "n")),
    "mad_king": (mad_king, ("R_C", "R_B", "n")),
}


@dataclass(frozen=True)
class GraphFamilySpec:
    tag: str
    params: tuple  # sorted (name, value) pairs

    @classmethod
    def make(cls, tag, **params):
        if tag not in _FAMILIES:
            raise ValueError(f"unknown family {tag!r}")
        return cls(tag, tuple(sorted(params.items())))


def generate(spec: GraphFamilySpec, seed: int = 0) -> DirectedGraph:
    """Instantiate a graph family spec."""
    fn, argnames = _FAMILIES[spec.tag]
    params = dict(spec.params)
    if "seed" in argnames and "seed" not in params:
        params["seed"] = seed
    missing = [a for a in argnames if a not in params]
    if missing:
        raise ValueError(f"family {spec.tag} missing parameters {missing}")
    return fn(**{a: params[a] for a in argnames})


def parse_family_string(text: str) -> GraphFamilySpec:
    """Parse a compact spec like ``dicycle(6)`` or ``royal_family(3,10)``.

    Positional arguments follow the family's parameter order.
    """
    text = text.strip()
    if "(" not in text or not text.endswith(")"):
        raise ValueError(f"bad family spec {text!r}")
    tag, rest = text.split("(", 1)
    tag = tag.strip()
    if tag not in _FAMILIES:
        raise ValueError(f"unknown family {tag!r}")
    args = [a.strip() for a in rest[:-1].split(",") if a.strip()]
    names = _FAMILIES[tag][1]
    if len(args) > len(names):
        raise ValueError(f"too many parameters for {tag}")
    return GraphFamilySpec.make(tag, **{n: int(a) for n, a in zip(names, args)})


# ---------------------------------------------------------------------------
# serialization

def to_edge_list_text(g: DirectedGraph) -> str:
    lines = [f"n={g.n}"]
    lines += [f"{i} {j}" for (i, j) in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def from_edge_list_text(text: str) -> DirectedGraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValueError("edge list must start with an 'n=<count>' header")
    n = int(lines[0][2:])
    edges = set()
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad edge line {ln!r}")
        edges.add((int(parts[0]), int(parts[1])))
    return DirectedGraph(n, frozenset(edges))
