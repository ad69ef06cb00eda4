"""Synthetic instance generators.

Blow-up instances realize the clustered pipeline preconditions directly;
the conditioned random generator produces digraphs passing the semi-exact
degree condition via a deterministic repair loop.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .conditions import check_semi_exact
from .digraph import Digraph, OneFactor
from .errors import GenerationError, ParameterError
from .regular_pairs import ClusterPartition, Pair, certify_super_regular

_AUDIT_RETRIES = 100
_AUDIT_EPS = Fraction(2, 5)


def _random_pair_edges(rng, a, b, density: Fraction) -> list[tuple[int, int]]:
    mask = rng.random((len(a), len(b))) < float(density)
    return [(a[i], b[j]) for i, j in zip(*np.nonzero(mask))]


def gen_blowup(
    r0: Digraph,
    f0: OneFactor,
    m: int,
    pair_density,
    v0_count: int = 0,
    seed: int = 0,
) -> tuple[Digraph, ClusterPartition, OneFactor]:
    """Blow every cluster of r0 up to m vertices, each r0 edge to a random
    bipartite pair at pair_density.

    Factor-edge pairs are audited with certify_super_regular (eps = 2/5,
    d = pair_density/2) and redrawn on failure, so the emitted instance
    always satisfies its declared super-regularity precondition.
    Exceptional vertices get independent density-`pair_density` in- and
    out-neighborhoods across all cluster vertices.
    """
    pair_density = Fraction(pair_density)
    if not 0 < pair_density <= 1:
        raise ParameterError(f"pair density must be in (0,1], got {pair_density}")
    if m % 2 != 0 or m < 2:
        raise ParameterError(f"cluster size must be a positive even number, got {m}")
    if f0.n != r0.n:
        raise ParameterError("factor does not match the template digraph")
    for cycle in f0.cycles:
        if len(cycle) < 4:
            raise ParameterError("every factor cycle must have length >= 4")
    for x in range(r0.n):
        if not r0.has_edge(x, f0.successor(x)):
            raise ParameterError(f"factor edge ({x},{f0.successor(x)}) not in template")

    rng = np.random.default_rng(seed)
    k = r0.n
    clusters = [tuple(range(i * m, (i + 1) * m)) for i in range(k)]
    v0 = tuple(range(k * m, k * m + v0_count))
    n = k * m + v0_count
    audit_d = pair_density / 2

    edges: list[tuple[int, int]] = []
    plan: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for i, j in r0.edges():
        plan[(i, j)] = _random_pair_edges(rng, clusters[i], clusters[j], pair_density)

    host_stub = Digraph(n, [])
    for i in range(k):
        j = f0.successor(i)
        for attempt in range(_AUDIT_RETRIES + 1):
            probe = Digraph(n, plan[(i, j)])
            pair = Pair(probe, clusters[i], clusters[j])
            verdict = certify_super_regular(pair, _AUDIT_EPS, audit_d, mode="exhaustive")
            if verdict.regular:
                break
            if attempt == _AUDIT_RETRIES:
                raise GenerationError(
                    f"super-regularity audit failed {_AUDIT_RETRIES} times "
                    f"on factor edge ({i},{j}) at density {pair_density}"
                )
            plan[(i, j)] = _random_pair_edges(
                rng, clusters[i], clusters[j], pair_density
            )
    del host_stub
    for pair_edges in plan.values():
        edges.extend(pair_edges)

    cluster_vertices = range(k * m)
    for x in v0:
        for v in cluster_vertices:
            if rng.random() < float(pair_density):
                edges.append((x, v))
            if rng.random() < float(pair_density):
                edges.append((v, x))

    g = Digraph(n, edges)
    part = ClusterPartition(v0, tuple(clusters))
    return g, part, f0


_REPAIR_CAP_FACTOR = 10


def gen_random_condition(n: int, beta, seed: int = 0) -> Digraph:
    """Random digraph repaired until it passes the semi-exact condition.

    Repair targets the most deficient clause at the first violated index:
    the vertex currently realizing that order statistic gains an edge to
    (or from) its lowest-id non-neighbor. The output distribution is NOT
    uniform over condition-satisfying digraphs.
    """
    beta = Fraction(beta)
    if not 0 < beta < Fraction(1, 2):
        raise ParameterError(f"beta must be in (0, 1/2), got {beta}")
    if n < 4:
        raise ParameterError(f"need n >= 4, got {n}")
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < 0.5
    np.fill_diagonal(mask, False)
    out_sets = [set(np.nonzero(mask[u])[0].tolist()) for u in range(n)]

    def current() -> Digraph:
        return Digraph(n, [(u, v) for u in range(n) for v in sorted(out_sets[u])])

    cap = _REPAIR_CAP_FACTOR * n * n
    for _ in range(cap):
        g = current()
        report = check_semi_exact(g, beta)
        if report.holds:
            return g
        i = report.first_violation
        out_deg = sorted(range(n), key=lambda u: (len(out_sets[u]), u))
        in_counts = [0] * n
        for u in range(n):
            for v in out_sets[u]:
                in_counts[v] += 1
        in_deg = sorted(range(n), key=lambda v: (in_counts[v], v))

        # shortfalls of the two clauses at the violated index
        from math import ceil as _ceil

        cap_i = min(i + beta * n, Fraction(n, 2))
        u = out_deg[i - 1]
        out_short = _ceil(cap_i) - len(out_sets[u])
        j = _ceil(n - i - beta * n)
        in_short = -1
        w = None
        if 1 <= j <= n:
            w = in_deg[j - 1]
            in_short = (n - i) - in_counts[w]

        def add_any_missing():
            for a in range(n):
                for b in range(n):
                    if a != b and b not in out_sets[a]:
                        out_sets[a].add(b)
                        return True
            return False

        if out_short >= in_short:
            target = next(
                (v for v in range(n) if v != u and v not in out_sets[u]), None
            )
            if target is not None:
                out_sets[u].add(target)
            elif not add_any_missing():
                break  # complete digraph; checker must hold next pass
        else:
            source = next(
                (v for v in range(n) if v != w and w not in out_sets[v]), None
            )
            if source is not None:
                out_sets[source].add(w)
            elif not add_any_missing():
                break
    g = current()
    if check_semi_exact(g, beta).holds:
        return g
    raise GenerationError(f"repair loop cap ({cap}) exhausted at n={n}, beta={beta}")
