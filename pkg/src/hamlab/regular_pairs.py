"""Density, regularity certification, and regular-pair algorithms.

Densities are exact rationals. Regularity certification has two modes:
exhaustive (exact, small sides only) and sampled (one-sided: refutations
carry genuine witnesses, acceptance is only statistical confidence).
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, isqrt

import numpy as np

from .digraph import BipartiteGraph, Digraph, HamiltonCertificate, verify_hamilton_cycle
from .errors import (
    ContractError,
    GenerationError,
    ParameterError,
    PreconditionError,
    ScaleError,
    SearchFailureError,
)
from .matching import hall_violator, max_matching

_EXHAUSTIVE_CAP = 12
_SAMPLES = 10_000
_RETRY_CAP = 100


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _ceil_times_sqrt(coeff: int, eps: Fraction, m: int) -> int:
    """Smallest integer t with t >= coeff * sqrt(eps) * m, computed exactly.

    t >= coeff*sqrt(eps)*m  <=>  t^2 >= coeff^2 * eps * m^2 (for t >= 0).
    """
    target = coeff * coeff * eps * m * m
    # integer ceil of sqrt(target)
    num, den = target.numerator, target.denominator
    lo = isqrt(num // den)
    while Fraction(lo * lo) < target:
        lo += 1
    return lo


@dataclass(frozen=True)
class Pair:
    """An ordered bipartite pair (A, B) inside a host digraph, direction A->B."""

    host: Digraph
    a: tuple[int, ...]
    b: tuple[int, ...]

    def __post_init__(self):
        if set(self.a) & set(self.b):
            raise ParameterError("pair sides must be disjoint")
        if len(set(self.a)) != len(self.a) or len(set(self.b)) != len(self.b):
            raise ParameterError("pair sides must not repeat vertices")
        for v in self.a + self.b:
            if not (0 <= v < self.host.n):
                raise ParameterError(f"vertex {v} out of range")

    def edge_count(self) -> int:
        b_set = set(self.b)
        return sum(1 for u in self.a for v in self.host.out_adj[u] if v in b_set)

    def degree_into_b(self, u: int) -> int:
        return len(self.host.out_sets[u] & set(self.b))

    def degree_from_a(self, v: int) -> int:
        return len(self.host.in_sets[v] & set(self.a))

    def adjacency_matrix(self) -> np.ndarray:
        mat = np.zeros((len(self.a), len(self.b)), dtype=np.int64)
        b_index = {v: j for j, v in enumerate(self.b)}
        for i, u in enumerate(self.a):
            for v in self.host.out_adj[u]:
                j = b_index.get(v)
                if j is not None:
                    mat[i, j] = 1
        return mat

    def to_bipartite(self) -> BipartiteGraph:
        b_index = {v: j for j, v in enumerate(self.b)}
        edges = [
            (i, b_index[v])
            for i, u in enumerate(self.a)
            for v in self.host.out_adj[u]
            if v in b_index
        ]
        return BipartiteGraph.from_edges(len(self.a), len(self.b), edges)


@dataclass(frozen=True)
class ClusterPartition:
    """Exceptional set V0 plus equal-size clusters V1..Vk."""

    v0: tuple[int, ...]
    clusters: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        sizes = {len(c) for c in self.clusters}
        if len(sizes) > 1:
            raise ParameterError(f"clusters have unequal sizes {sorted(sizes)}")
        all_v = list(self.v0)
        for c in self.clusters:
            all_v.extend(c)
        if len(all_v) != len(set(all_v)):
            raise ParameterError("v0 and clusters must be pairwise disjoint")

    @property
    def k(self) -> int:
        return len(self.clusters)

    @property
    def m(self) -> int:
        return len(self.clusters[0]) if self.clusters else 0

    @property
    def n(self) -> int:
        return len(self.v0) + self.k * self.m

    def cluster_of(self) -> dict[int, int]:
        """vertex -> cluster index; v0 vertices absent."""
        return {v: i for i, c in enumerate(self.clusters) for v in c}

    def to_json(self) -> str:
        return json.dumps(
            {"v0": list(self.v0), "clusters": [list(c) for c in self.clusters]}
        )

    @classmethod
    def from_json(cls, text: str) -> "ClusterPartition":
        data = json.loads(text)
        return cls(
            tuple(int(v) for v in data["v0"]),
            tuple(tuple(int(v) for v in c) for c in data["clusters"]),
        )


@dataclass(frozen=True)
class ReducedDigraph:
    """Digraph on cluster indices with exact pair densities attached."""

    base: Digraph
    densities: tuple[tuple[Fraction, ...], ...]
    eps: Fraction
    d: Fraction

    @property
    def k(self) -> int:
        return self.base.n

    def density_of(self, i: int, j: int) -> Fraction:
        return self.densities[i][j]


@dataclass(frozen=True)
class RegularityVerdict:
    mode: str  # "exhaustive" | "sampled"
    regular: bool
    worst_deviation: Fraction
    witness: dict | None = None


def density(p: Pair) -> Fraction:
    if not p.a or not p.b:
        raise ParameterError("density undefined for an empty pair side")
    return Fraction(p.edge_count(), len(p.a) * len(p.b))


def _exhaustive_regularity(p: Pair, eps: Fraction) -> RegularityVerdict:
    na, nb = len(p.a), len(p.b)
    dens = density(p)
    mat = p.adjacency_matrix()
    min_x = max(1, _ceil_frac(eps * na))
    min_y = max(1, _ceil_frac(eps * nb))
    worst = Fraction(0)
    witness = None
    cols = np.arange(nb)
    for x_mask in range(1, 1 << na):
        rows = [i for i in range(na) if x_mask & (1 << i)]
        sx = len(rows)
        if sx < min_x:
            continue
        col_counts = mat[rows].sum(axis=0)
        order = np.argsort(-col_counts, kind="stable")
        sorted_counts = col_counts[order]
        prefix = np.concatenate(([0], np.cumsum(sorted_counts)))
        total = int(prefix[-1])
        for sy in range(min_y, nb + 1):
            hi = Fraction(int(prefix[sy]), sx * sy)  # densest Y of size sy
            lo = Fraction(total - int(prefix[nb - sy]), sx * sy)  # sparsest
            dev = max(hi - dens, dens - lo)
            if dev > worst:
                worst = dev
                if hi - dens >= dens - lo:
                    y_cols = [int(c) for c in order[:sy]]
                else:
                    y_cols = [int(c) for c in order[nb - sy:]]
                witness = {
                    "x": [p.a[i] for i in rows],
                    "y": [p.b[j] for j in sorted(y_cols)],
                    "deviation": str(dev),
                }
    regular = worst < eps
    return RegularityVerdict("exhaustive", regular, worst, None if regular else witness)


def _sampled_regularity(
    p: Pair, eps: Fraction, samples: int, seed: int
) -> RegularityVerdict:
    na, nb = len(p.a), len(p.b)
    dens = density(p)
    mat = p.adjacency_matrix()
    min_x = max(1, _ceil_frac(eps * na))
    min_y = max(1, _ceil_frac(eps * nb))
    rng = np.random.default_rng(seed)
    worst = Fraction(0)
    witness = None
    sizes_x = rng.integers(min_x, na + 1, size=samples)
    sizes_y = rng.integers(min_y, nb + 1, size=samples)
    for t in range(samples):
        sx, sy = int(sizes_x[t]), int(sizes_y[t])
        ix = rng.choice(na, size=sx, replace=False)
        iy = rng.choice(nb, size=sy, replace=False)
        count = int(mat[np.ix_(ix, iy)].sum())
        dev = abs(Fraction(count, sx * sy) - dens)
        if dev > worst:
            worst = dev
            witness = {
                "x": sorted(p.a[i] for i in ix),
                "y": sorted(p.b[j] for j in iy),
                "deviation": str(dev),
            }
    regular = worst < eps
    return RegularityVerdict("sampled", regular, worst, None if regular else witness)


def certify_regular(
    p: Pair, eps, mode: str = "auto", samples: int = _SAMPLES, seed: int = 0
) -> RegularityVerdict:
    """Certify |d(X,Y) - d(A,B)| < eps over all qualifying sub-pairs.

    Exhaustive mode is exact and requires both sides <= 12; sampled mode
    draws uniformly random qualifying (X, Y) pairs.
    """
    eps = Fraction(eps)
    if not 0 < eps <= 1:
        raise ParameterError(f"eps must be in (0, 1], got {eps}")
    if mode == "auto":
        mode = (
            "exhaustive"
            if len(p.a) <= _EXHAUSTIVE_CAP and len(p.b) <= _EXHAUSTIVE_CAP
            else "sampled"
        )
    if mode == "exhaustive":
        if len(p.a) > _EXHAUSTIVE_CAP or len(p.b) > _EXHAUSTIVE_CAP:
            raise ScaleError(
                f"exhaustive certification capped at side {_EXHAUSTIVE_CAP}"
            )
        return _exhaustive_regularity(p, eps)
    if mode == "sampled":
        return _sampled_regularity(p, eps, samples, seed)
    raise ParameterError(f"unknown mode {mode!r}")


def certify_super_regular(
    p: Pair, eps, d, mode: str = "auto", samples: int = _SAMPLES, seed: int = 0
) -> RegularityVerdict:
    """Regularity plus per-vertex degree floors d|B| and d|A| both directions."""
    d = Fraction(d)
    b_set = set(p.b)
    a_set = set(p.a)
    floor_b = d * len(p.b)
    floor_a = d * len(p.a)
    for u in p.a:
        deg = len(p.host.out_sets[u] & b_set)
        if deg < floor_b:
            return RegularityVerdict(
                "exhaustive",
                False,
                Fraction(0),
                {"vertex": u, "side": "a", "degree": deg, "floor": str(floor_b)},
            )
    for v in p.b:
        deg = len(p.host.in_sets[v] & a_set)
        if deg < floor_a:
            return RegularityVerdict(
                "exhaustive",
                False,
                Fraction(0),
                {"vertex": v, "side": "b", "degree": deg, "floor": str(floor_a)},
            )
    return certify_regular(p, eps, mode=mode, samples=samples, seed=seed)


def regular_pair_matching(p: Pair, eps, super_regular: bool = False):
    """A matching of size >= (1-eps)n in an asserted (eps,2eps)-regular pair.

    With super-regularity asserted the matching must be perfect. A
    shortfall means the assertion was false; the defect-Hall violating
    set is attached to the raised error.
    """
    eps = Fraction(eps)
    n = len(p.a)
    if len(p.b) != n:
        raise ParameterError("regular_pair_matching needs |A| = |B|")
    b = p.to_bipartite()
    matching = max_matching(b)
    required = n if super_regular else _ceil_frac((1 - eps) * n)
    if matching.size() < required:
        violator = hall_violator(b, n - required)
        raise ContractError(
            f"matching size {matching.size()} below required {required}: "
            "the regularity assertion on this pair is false",
            witness=sorted(p.a[i] for i in violator) if violator else None,
        )
    return matching


def make_super_regular(
    g: Digraph, part: ClusterPartition, r: ReducedDigraph, h: Digraph, eps, d
) -> ClusterPartition:
    """Move exactly ceil(Delta*eps*m) vertices per cluster into V0.

    Delta is the maximum total h-degree of a cluster. The moved set must
    contain every vertex with fewer than (d-eps)m neighbors toward some
    h-neighbor cluster; afterwards h-edges are super-regular at the
    degraded parameters (certified in tests at desk scale).
    """
    eps, d = Fraction(eps), Fraction(d)
    m = part.m
    k = part.k
    if h.n != k or r.k != k:
        raise ParameterError("h and r must live on the partition's clusters")
    delta = max(
        (h.out_degree(i) + h.in_degree(i) for i in range(k)), default=0
    )
    if delta * eps > Fraction(1, 2):
        raise ParameterError(f"need Delta*eps <= 1/2, got {delta * eps}")
    quota = _ceil_frac(Fraction(delta) * eps * m)
    threshold = (d - eps) * m
    new_clusters = []
    moved: list[int] = []
    for i, cluster in enumerate(part.clusters):
        low: list[int] = []
        for v in cluster:
            bad = False
            for j in h.out_adj[i]:
                if len(g.out_sets[v] & set(part.clusters[j])) < threshold:
                    bad = True
                    break
            if not bad:
                for j in h.in_adj[i]:
                    if len(g.in_sets[v] & set(part.clusters[j])) < threshold:
                        bad = True
                        break
            if bad:
                low.append(v)
        if len(low) > quota:
            raise ContractError(
                f"cluster {i} has {len(low)} low-degree vertices, quota {quota}: "
                "regularity assertion false",
                witness=low,
            )
        drop = set(low)
        for v in cluster:
            if len(drop) >= quota:
                break
            drop.add(v)
        moved.extend(sorted(drop))
        new_clusters.append(tuple(v for v in cluster if v not in drop))
    return ClusterPartition(part.v0 + tuple(moved), tuple(new_clusters))


def excise_preserving(p: Pair, x_set, eps, d, seed: int = 0) -> set[int]:
    """Find Y in B with |Y| = |X| so removing (X, Y) keeps the pair dense.

    Y must contain every B-vertex with fewer than d|A\\X|/2 in-neighbors in
    A\\X; the rest of Y is drawn at random and redrawn until both residual
    degree floors (d/2 toward the shrunken opposite side) hold.
    """
    eps, d = Fraction(eps), Fraction(d)
    x_set = set(x_set)
    if not x_set <= set(p.a):
        raise ParameterError("X must be a subset of the pair's A side")
    if len(x_set) > Fraction(len(p.a), 3):
        raise PreconditionError(f"|X| = {len(x_set)} exceeds |A|/3")
    a_rest = [u for u in p.a if u not in x_set]
    a_rest_set = set(a_rest)
    floor_into_rest = d * len(a_rest) / 2
    b1 = [
        v for v in p.b if len(p.host.in_sets[v] & a_rest_set) < floor_into_rest
    ]
    if len(b1) > len(x_set):
        raise ContractError(
            f"{len(b1)} low-degree B-vertices exceed |X| = {len(x_set)}: "
            "super-regularity assertion false",
            witness=b1,
        )
    pool = [v for v in p.b if v not in set(b1)]
    rng = np.random.default_rng(seed)
    need = len(x_set) - len(b1)
    for _ in range(_RETRY_CAP):
        b2 = [pool[i] for i in rng.choice(len(pool), size=need, replace=False)] if need else []
        y_set = set(b1) | set(b2)
        b_rest = [v for v in p.b if v not in y_set]
        b_rest_set = set(b_rest)
        ok = all(
            len(p.host.out_sets[u] & b_rest_set) >= d * len(b_rest) / 2
            for u in a_rest
        ) and all(
            len(p.host.in_sets[v] & a_rest_set) >= d * len(a_rest) / 2
            for v in b_rest
        )
        if ok:
            return y_set
    raise GenerationError(
        f"excision redraw budget ({_RETRY_CAP}) exhausted; pair too sparse"
    )


def select_ideal(
    p: Pair, theta, eps, d, seed: int = 0
) -> tuple[set[int], set[int]]:
    """Random (A*, B*) of size ceil(theta*n) meeting the theta*d*n/4 floor.

    Every A-vertex must keep at least theta*d*n/4 out-neighbors in B* and
    every B-vertex that many in-neighbors in A*; redraw until both hold.
    """
    theta, d = Fraction(theta), Fraction(d)
    if not 0 < theta <= 1:
        raise ParameterError(f"theta must be in (0, 1], got {theta}")
    n = max(len(p.a), len(p.b))
    size = _ceil_frac(theta * n)
    if size > min(len(p.a), len(p.b)):
        raise ParameterError("ideal size exceeds a pair side")
    floor = theta * d * n / 4
    rng = np.random.default_rng(seed)
    for _ in range(_RETRY_CAP):
        a_star = {p.a[i] for i in rng.choice(len(p.a), size=size, replace=False)}
        b_star = {p.b[i] for i in rng.choice(len(p.b), size=size, replace=False)}
        ok = all(
            len(p.host.out_sets[u] & b_star) >= floor for u in p.a
        ) and all(len(p.host.in_sets[v] & a_star) >= floor for v in p.b)
        if ok:
            return a_star, b_star
    raise GenerationError(
        f"ideal redraw budget ({_RETRY_CAP}) exhausted at theta={theta}"
    )


def _cycle_insertion(g: Digraph, rng, deadline: float) -> list[int] | None:
    """Grow a directed cycle by inserting outside vertices between
    consecutive cycle vertices; restart on dead ends. Effective on dense
    digraphs, where a random consecutive pair admits an insertion w.h.p."""
    n = g.n
    while time.monotonic() < deadline:
        seed_cycle = None
        perm = rng.permutation(n)
        for u in perm:
            u = int(u)
            two = [v for v in g.out_adj[u] if g.has_edge(v, u)]
            if two:
                seed_cycle = [u, two[int(rng.integers(len(two)))]]
                break
            for v in g.out_adj[u]:
                tri = [w for w in g.out_adj[v] if w != u and g.has_edge(w, u)]
                if tri:
                    seed_cycle = [u, v, tri[int(rng.integers(len(tri)))]]
                    break
            if seed_cycle:
                break
        if seed_cycle is None:
            return None
        cycle = seed_cycle
        on_cycle = [False] * n
        for v in cycle:
            on_cycle[v] = True
        outside = [v for v in range(n) if not on_cycle[v]]
        rng.shuffle(outside)
        progress = True
        while outside and progress and time.monotonic() < deadline:
            progress = False
            remaining = []
            for v in outside:
                placed = False
                length = len(cycle)
                offset = int(rng.integers(length))
                for t in range(length):
                    i = (offset + t) % length
                    x, y = cycle[i], cycle[(i + 1) % length]
                    if g.has_edge(x, v) and g.has_edge(v, y):
                        cycle.insert(i + 1, v)
                        on_cycle[v] = True
                        placed = progress = True
                        break
                if not placed:
                    remaining.append(v)
            outside = remaining
        if not outside:
            return cycle
    return None


def hamilton_in_super_regular(
    g: Digraph, eps, d, deadline: float = 10.0, seed: int = 0
) -> HamiltonCertificate:
    """Hamilton cycle in an asserted super-regular digraph.

    Exact subset DP up to n=18; randomized cycle-insertion with restarts
    above, bounded by the wall-clock deadline.
    """
    from .oracle import brute_force_hamiltonian

    if g.n <= 18:
        cert = brute_force_hamiltonian(g)
        if cert is None:
            raise ContractError(
                "digraph is not Hamiltonian: super-regularity assertion false"
            )
        return cert
    rng = np.random.default_rng(seed)
    order = _cycle_insertion(g, rng, time.monotonic() + deadline)
    if order is None:
        raise SearchFailureError(
            f"no Hamilton cycle found within {deadline}s (n={g.n}); "
            "this does not prove nonexistence"
        )
    cert = HamiltonCertificate(tuple(order))
    assert verify_hamilton_cycle(g, cert)
    return cert


def cluster_pair(g: Digraph, part: ClusterPartition, i: int, j: int) -> Pair:
    return Pair(g, part.clusters[i], part.clusters[j])


def build_reduced(
    g: Digraph, part: ClusterPartition, eps, d, seed: int = 0
) -> ReducedDigraph:
    """Cluster digraph with an edge wherever the pair is dense and regular."""
    eps, d = Fraction(eps), Fraction(d)
    k = part.k
    densities = [[Fraction(0)] * k for _ in range(k)]
    edges = []
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            p = cluster_pair(g, part, i, j)
            dens = density(p)
            densities[i][j] = dens
            if dens >= d:
                verdict = certify_regular(p, eps, mode="auto", seed=seed)
                if verdict.regular:
                    edges.append((i, j))
    return ReducedDigraph(
        Digraph(k, edges), tuple(tuple(row) for row in densities), eps, d
    )


def prune_atypical(
    g: Digraph, part: ClusterPartition, r: ReducedDigraph, eps, dprime
) -> ClusterPartition:
    """Move exactly ceil(16*sqrt(eps)*m) vertices per cluster into V0.

    After conceptually deleting pairs of density < d', a remaining vertex
    must see between (1/2)d_XY*m and (3/2)d_XY*m neighbors in all but at
    most sqrt(eps)*k clusters, in both directions. Atypical vertices are
    moved first; the quota is topped up with the lowest-id vertices.
    """
    eps, dprime = Fraction(eps), Fraction(dprime)
    m, k = part.m, part.k
    quota = _ceil_times_sqrt(16, eps, m)
    if quota > m:
        raise ParameterError(f"quota {quota} exceeds cluster size {m}")
    slack = _ceil_times_sqrt(1, eps, k)  # clusters allowed outside the window
    dense_out = [
        [j for j in range(k) if j != i and r.density_of(i, j) >= dprime]
        for i in range(k)
    ]
    dense_in = [
        [j for j in range(k) if j != i and r.density_of(j, i) >= dprime]
        for i in range(k)
    ]
    cluster_sets = [set(c) for c in part.clusters]
    new_clusters = []
    moved: list[int] = []
    for i, cluster in enumerate(part.clusters):
        atypical: list[int] = []
        for v in cluster:
            bad_out = 0
            for j in dense_out[i]:
                deg = len(g.out_sets[v] & cluster_sets[j])
                dxy = r.density_of(i, j)
                if not dxy * m / 2 <= deg <= 3 * dxy * m / 2:
                    bad_out += 1
            bad_in = 0
            for j in dense_in[i]:
                deg = len(g.in_sets[v] & cluster_sets[j])
                dxy = r.density_of(j, i)
                if not dxy * m / 2 <= deg <= 3 * dxy * m / 2:
                    bad_in += 1
            if bad_out > slack or bad_in > slack:
                atypical.append(v)
        if len(atypical) > quota:
            raise ContractError(
                f"cluster {i} has {len(atypical)} atypical vertices, "
                f"quota {quota}: regularity inputs invalid",
                witness=atypical,
            )
        drop = set(atypical)
        for v in cluster:
            if len(drop) >= quota:
                break
            drop.add(v)
        moved.extend(sorted(drop))
        new_clusters.append(tuple(v for v in cluster if v not in drop))
    return ClusterPartition(part.v0 + tuple(moved), tuple(new_clusters))


def sample_hypergeometric(n: int, m: int, k: int, seed: int = 0) -> int:
    """One draw: marked balls among k drawn from n with m marked, no replacement."""
    if not (0 <= m <= n and 0 <= k <= n):
        raise ParameterError(f"need 0 <= m,k <= n, got n={n}, m={m}, k={k}")
    rng = np.random.default_rng(seed)
    return int(rng.hypergeometric(m, n - m, k))


def chernoff_audit(
    n: int, m: int, k: int, trials: int, a, seed: int = 0
) -> tuple[float, float]:
    """Empirical two-sided tail P(|X - EX| >= a*EX) vs the 2e^{-a^2 EX/3} bound."""
    a = Fraction(a)
    if not 0 < a < Fraction(3, 2):
        raise ParameterError(f"need 0 < a < 3/2, got {a}")
    if not (0 <= m <= n and 0 <= k <= n):
        raise ParameterError(f"need 0 <= m,k <= n, got n={n}, m={m}, k={k}")
    if trials < 1:
        raise ParameterError("need at least one trial")
    ex = Fraction(k * m, n) if n else Fraction(0)
    rng = np.random.default_rng(seed)
    draws = rng.hypergeometric(m, n - m, k, size=trials)
    dev = np.abs(draws - float(ex))
    empirical = float(np.count_nonzero(dev >= float(a * ex))) / trials
    bound = float(2 * np.exp(-float(a * a * ex) / 3))
    return empirical, bound
