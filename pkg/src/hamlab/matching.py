"""Exact matching, cover, 1-factor, disjoint-path and connectivity kernels.

Maximum matching uses Hopcroft-Karp (layered BFS phases, O(E sqrt(V))).
Minimum covers come from the Koenig construction on the final matching.
Vertex-disjoint paths use unit-capacity max-flow on the split digraph.
All tie-breaking is by vertex order, so results are reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .digraph import BipartiteGraph, Digraph, OneFactor
from .errors import ParameterError, PreconditionError

INF = float("inf")


@dataclass(frozen=True)
class Matching:
    """A set of pairwise disjoint edges (a, b) of a bipartite graph."""

    pairs: tuple[tuple[int, int], ...]

    def size(self) -> int:
        return len(self.pairs)


@dataclass(frozen=True)
class Cover:
    """A vertex cover, split by side."""

    a_side: frozenset
    b_side: frozenset

    def size(self) -> int:
        return len(self.a_side) + len(self.b_side)


class _HopcroftKarp:
    def __init__(self, b: BipartiteGraph):
        self.adj = b.adj()
        self.na = b.a_size
        self.nb = b.b_size
        self.pair_a = [-1] * self.na
        self.pair_b = [-1] * self.nb
        self.dist = [0] * self.na
        self._run()

    def _bfs(self) -> bool:
        queue = deque()
        for a in range(self.na):
            if self.pair_a[a] == -1:
                self.dist[a] = 0
                queue.append(a)
            else:
                self.dist[a] = INF
        found = False
        while queue:
            a = queue.popleft()
            for b in self.adj[a]:
                nxt = self.pair_b[b]
                if nxt == -1:
                    found = True
                elif self.dist[nxt] is INF:
                    self.dist[nxt] = self.dist[a] + 1
                    queue.append(nxt)
        return found

    def _dfs(self, root: int) -> bool:
        # iterative DFS: stack of (a, iterator index into adj[a])
        stack = [(root, 0)]
        path: list[tuple[int, int]] = []  # (a, b) tentative augmenting edges
        while stack:
            a, idx = stack.pop()
            advanced = False
            while idx < len(self.adj[a]):
                b = self.adj[a][idx]
                idx += 1
                nxt = self.pair_b[b]
                if nxt == -1:
                    path.append((a, b))
                    for pa, pb in path:
                        self.pair_a[pa] = pb
                        self.pair_b[pb] = pa
                    return True
                if self.dist[nxt] == self.dist[a] + 1:
                    stack.append((a, idx))
                    path.append((a, b))
                    stack.append((nxt, 0))
                    advanced = True
                    break
            if not advanced:
                self.dist[a] = INF
                if path and path[-1][0] != a and stack:
                    # backtrack: drop the tentative edge leading into a
                    path.pop()
        return False

    def _run(self):
        while self._bfs():
            for a in range(self.na):
                if self.pair_a[a] == -1:
                    self._dfs(a)


def max_matching(b: BipartiteGraph) -> Matching:
    """A maximum matching (certified maximum by the companion Koenig cover)."""
    hk = _HopcroftKarp(b)
    pairs = tuple(
        (a, hk.pair_a[a]) for a in range(b.a_size) if hk.pair_a[a] != -1
    )
    return Matching(pairs)


def min_cover(b: BipartiteGraph) -> Cover:
    """A minimum vertex cover, of size equal to the maximum matching.

    Koenig construction: with Z the set of vertices reachable by alternating
    paths from unmatched A-vertices, the cover is (A \\ Z) | (B & Z).
    """
    hk = _HopcroftKarp(b)
    adj = hk.adj
    visited_a = [False] * b.a_size
    visited_b = [False] * b.b_size
    queue = deque(a for a in range(b.a_size) if hk.pair_a[a] == -1)
    for a in queue:
        visited_a[a] = True
    while queue:
        a = queue.popleft()
        for bb in adj[a]:
            if not visited_b[bb]:
                visited_b[bb] = True
                nxt = hk.pair_b[bb]
                if nxt != -1 and not visited_a[nxt]:
                    visited_a[nxt] = True
                    queue.append(nxt)
    a_side = frozenset(a for a in range(b.a_size) if not visited_a[a])
    b_side = frozenset(bb for bb in range(b.b_size) if visited_b[bb])
    return Cover(a_side, b_side)


def hall_violator(b: BipartiteGraph, defect: int = 0) -> set[int] | None:
    """A set S in A with |N(S)| < |S| - defect, or None if none exists.

    Extracted from the Koenig cover: if the maximum matching falls short of
    |A| - defect, then S = A \\ (cover & A) violates the defect-Hall bound.
    """
    matching = max_matching(b)
    if matching.size() >= b.a_size - defect:
        return None
    cover = min_cover(b)
    return set(range(b.a_size)) - set(cover.a_side)


def defect_hall_matching(b: BipartiteGraph, defect: int) -> Matching:
    """A matching of size at least |A| - defect.

    The caller asserts |N(S)| >= |S| - defect for all S in A; when that is
    checkably false the violating S is raised as the error payload.
    """
    matching = max_matching(b)
    if matching.size() >= b.a_size - defect:
        return matching
    violator = hall_violator(b, defect)
    raise PreconditionError(
        f"defect-Hall condition fails: |S|={len(violator)} has "
        f"|N(S)| < |S| - {defect} for S={sorted(violator)}"
    )


@dataclass(frozen=True)
class FactorCertificate:
    """Either a 1-factor of the digraph or an expansion violator set S."""

    factor: OneFactor | None = None
    violator: frozenset | None = None

    def __post_init__(self):
        if (self.factor is None) == (self.violator is None):
            raise ParameterError("exactly one of factor/violator must be present")


def _doubled_bipartite(j: Digraph) -> BipartiteGraph:
    return BipartiteGraph.from_edges(
        j.n, j.n, ((u, v) for u in range(j.n) for v in j.out_adj[u])
    )


def find_one_factor(j: Digraph) -> FactorCertificate:
    """A 1-factor of j, or a set S with |N+(S)| < |S| when none exists.

    A perfect matching in the doubled bipartite graph (out-copies vs
    in-copies) corresponds exactly to a 1-factor; the violator comes from
    the Koenig cover when the matching is imperfect.
    """
    gamma = _doubled_bipartite(j)
    matching = max_matching(gamma)
    if matching.size() == j.n:
        succ = [-1] * j.n
        for a, b in matching.pairs:
            succ[a] = b
        return FactorCertificate(factor=OneFactor(succ, host=j))
    violator = hall_violator(gamma, 0)
    assert violator is not None
    return FactorCertificate(violator=frozenset(violator))


# -- vertex-capacitated max flow ---------------------------------------------
#
# Vertices are split into in/out copies with unit capacity; the split is
# internal and never exposed in the API types.


class _UnitFlow:
    """Unit-capacity max flow with BFS augmentation (Ford-Fulkerson)."""

    def __init__(self, num_nodes: int):
        self.n = num_nodes
        self.head: list[list[int]] = [[] for _ in range(num_nodes)]
        self.to: list[int] = []
        self.cap: list[int] = []

    def add_edge(self, u: int, v: int, cap: int = 1):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)

    def max_flow(self, s: int, t: int, limit: float = INF) -> int:
        flow = 0
        while flow < limit:
            parent_edge = [-1] * self.n
            parent_edge[s] = -2
            queue = deque([s])
            while queue:
                u = queue.popleft()
                if u == t:
                    break
                for eid in self.head[u]:
                    v = self.to[eid]
                    if self.cap[eid] > 0 and parent_edge[v] == -1:
                        parent_edge[v] = eid
                        queue.append(v)
            if parent_edge[t] == -1:
                break
            v = t
            while v != s:
                eid = parent_edge[v]
                self.cap[eid] -= 1
                self.cap[eid ^ 1] += 1
                v = self.to[eid ^ 1]
            flow += 1
        return flow

    def source_side(self, s: int) -> set[int]:
        """Nodes reachable from s in the residual network."""
        seen = {s}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for eid in self.head[u]:
                v = self.to[eid]
                if self.cap[eid] > 0 and v not in seen:
                    seen.add(v)
                    queue.append(v)
        return seen


def _split_network(g: Digraph, x: int, y: int) -> _UnitFlow:
    # node 2v = in-copy, 2v+1 = out-copy; x,y get infinite vertex capacity
    net = _UnitFlow(2 * g.n)
    for v in range(g.n):
        net.add_edge(2 * v, 2 * v + 1, g.n if v in (x, y) else 1)
    for u in range(g.n):
        for v in g.out_adj[u]:
            # effectively infinite, so cuts land on internal edges only;
            # a direct x->y edge keeps cap 1 (it admits a single path)
            cap = 1 if (u, v) == (x, y) else g.n
            net.add_edge(2 * u + 1, 2 * v, cap)
    return net


def vertex_menger_value(g: Digraph, x: int, y: int, limit: float = INF) -> int:
    """Max number of internally disjoint x->y paths (infinite if edge xy)."""
    if x == y:
        raise ParameterError("endpoints must differ")
    net = _split_network(g, x, y)
    return net.max_flow(2 * x + 1, 2 * y, limit)


def internally_disjoint_paths(
    g: Digraph, x: int, y: int, count: int
) -> list[list[int]]:
    """Up to ``count`` directed x->y paths sharing only x and y.

    Returns as many as exist if fewer than ``count`` are available.
    """
    if x == y:
        raise ParameterError("endpoints must differ")
    net = _split_network(g, x, y)
    flow = net.max_flow(2 * x + 1, 2 * y, count)
    # decompose the flow into paths by walking saturated forward edges
    used_edge = [False] * len(net.to)
    succ_of: list[list[int]] = [[] for _ in range(2 * g.n)]
    for u in range(2 * g.n):
        for eid in net.head[u]:
            if eid % 2 == 0 and net.cap[eid ^ 1] > 0:
                succ_of[u].append(eid)
    paths = []
    for _ in range(flow):
        path = [x]
        node = 2 * x + 1
        while node != 2 * y:
            eid = next(e for e in succ_of[node] if not used_edge[e])
            used_edge[eid] = True
            node = net.to[eid]
            if node % 2 == 0 and node != 2 * y:
                path.append(node // 2)
                # traverse the internal split edge
                eid = next(
                    e for e in succ_of[node] if not used_edge[e]
                )
                used_edge[eid] = True
                node = net.to[eid]
        path.append(y)
        paths.append(path)
    return paths


def is_strongly_connected(g: Digraph) -> bool:
    if g.n <= 1:
        return True

    def reach(adj) -> int:
        seen = [False] * g.n
        seen[0] = True
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    queue.append(v)
        return count

    return reach(g.out_adj) == g.n and reach(g.in_adj) == g.n


def _nonadjacent_pairs(g: Digraph):
    for x in range(g.n):
        for y in range(g.n):
            if x != y and not g.has_edge(x, y):
                yield x, y


def is_strongly_k_connected(g: Digraph, k: int) -> bool:
    """True iff g has no separator of size < k (and |G| > k)."""
    return g.n > k and find_separator(g, k) is None


def strong_connectivity(g: Digraph) -> int:
    """The largest k such that g is strongly k-connected.

    For a complete digraph the value is defined as n - 1.
    """
    if not is_strongly_connected(g):
        return 0
    best = g.n - 1
    for x, y in _nonadjacent_pairs(g):
        best = min(best, vertex_menger_value(g, x, y, best))
        if best == 0:
            break
    return best


def find_separator(g: Digraph, k: int) -> set[int] | None:
    """A separator of size < k if one exists, else None.

    The separator comes from the min vertex cut of the first nonadjacent
    pair whose Menger value falls below k.
    """
    if not is_strongly_connected(g):
        # a disconnected digraph is separated by the empty set
        if g.n > 1:
            return set()
    for x, y in _nonadjacent_pairs(g):
        net = _split_network(g, x, y)
        flow = net.max_flow(2 * x + 1, 2 * y, k)
        if flow < k:
            side = net.source_side(2 * x + 1)
            cut = {
                v
                for v in range(g.n)
                if 2 * v in side and 2 * v + 1 not in side
            }
            assert len(cut) == flow
            return cut
    return None
