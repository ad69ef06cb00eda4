"""Degree-sequence Hamiltonicity condition checkers and extremal generators.

All threshold comparisons use exact rational arithmetic (Fraction). Where a
condition consults a degree index that is not an integer, the index is
rounded up; a statement about d_j with j outside [1, n] is treated as
vacuously true.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil

from .digraph import Digraph, DegreeSequences, degree_sequences
from .errors import ParameterError, PreconditionError
from .matching import is_strongly_connected

CONDITION_NAMES = ("gh", "posa", "nwc", "semi-exact", "posa-min", "kot")


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a condition check, with a reproducible violation witness."""

    condition_name: str
    holds: bool
    first_violation: int | None = None
    witness: dict | None = None
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.holds != (self.first_violation is None and self.witness is None):
            raise ParameterError("holds must match the absence of a violation")

    def to_json(self) -> str:
        return json.dumps(
            {
                "condition_name": self.condition_name,
                "holds": self.holds,
                "first_violation": self.first_violation,
                "witness": self.witness,
                "parameters": self.parameters,
            }
        )


def _deg_at_least(seq: tuple[int, ...], index, threshold) -> bool:
    """Is d_j >= threshold, with j rounded up and out-of-range j vacuous?"""
    j = ceil(index) if not isinstance(index, int) else index
    n = len(seq)
    if j < 1 or j > n:
        return True
    return seq[j - 1] >= threshold


def check_ghouila_houri(g: Digraph) -> ConditionReport:
    """Minimum in- and outdegree at least n/2."""
    if g.n < 2:
        raise ParameterError("need n >= 2")
    seqs = degree_sequences(g)
    half = Fraction(g.n, 2)
    if seqs.d_out(1) >= half and seqs.d_in(1) >= half:
        return ConditionReport("gh", True, parameters={"n": g.n})
    return ConditionReport(
        "gh",
        False,
        first_violation=1,
        witness={
            "i": 1,
            "d_out": seqs.d_out(1),
            "d_in": seqs.d_in(1),
            "threshold": str(half),
        },
        parameters={"n": g.n},
    )


def check_posa_digraph(g: Digraph) -> ConditionReport:
    """Nash-Williams' Posa-type condition.

    d_i^+, d_i^- >= i+1 for all i < (n-1)/2, and both degree sequences reach
    ceil(n/2) at position ceil(n/2).
    """
    if g.n < 3:
        raise ParameterError("need n >= 3")
    n = g.n
    seqs = degree_sequences(g)
    for i in range(1, n):
        if not Fraction(i) < Fraction(n - 1, 2):
            break
        if seqs.d_out(i) < i + 1 or seqs.d_in(i) < i + 1:
            return ConditionReport(
                "posa",
                False,
                first_violation=i,
                witness={
                    "i": i,
                    "d_out": seqs.d_out(i),
                    "d_in": seqs.d_in(i),
                    "threshold": i + 1,
                },
                parameters={"n": n},
            )
    half = ceil(Fraction(n, 2))
    if seqs.d_out(half) < half or seqs.d_in(half) < half:
        return ConditionReport(
            "posa",
            False,
            first_violation=half,
            witness={
                "i": half,
                "d_out": seqs.d_out(half),
                "d_in": seqs.d_in(half),
                "threshold": half,
            },
            parameters={"n": n},
        )
    return ConditionReport("posa", True, parameters={"n": n})


def check_nash_williams_chvatal(g: Digraph) -> ConditionReport:
    """Nash-Williams' Chvatal-type condition (with strong connectivity)."""
    if g.n < 3:
        raise ParameterError("need n >= 3")
    n = g.n
    if not is_strongly_connected(g):
        return ConditionReport(
            "nwc",
            False,
            witness={"strongly_connected": False},
            parameters={"n": n},
        )
    seqs = degree_sequences(g)
    for i in range(1, n):
        if not Fraction(i) < Fraction(n, 2):
            break
        clause_i = seqs.d_out(i) >= i + 1 or _deg_at_least(
            seqs.in_sorted, n - i, n - i
        )
        clause_ii = seqs.d_in(i) >= i + 1 or _deg_at_least(
            seqs.out_sorted, n - i, n - i
        )
        if not (clause_i and clause_ii):
            return ConditionReport(
                "nwc",
                False,
                first_violation=i,
                witness={
                    "i": i,
                    "d_out": seqs.d_out(i),
                    "d_in": seqs.d_in(i),
                    "clause_i": clause_i,
                    "clause_ii": clause_ii,
                    "threshold": i + 1,
                },
                parameters={"n": n},
            )
    return ConditionReport("nwc", True, parameters={"n": n})


def _semi_exact_clauses(
    seqs: DegreeSequences, n: int, beta: Fraction, i: int, cap: bool
) -> tuple[bool, bool]:
    """Out-degree and in-degree clauses of the condition at index i.

    With ``cap`` the first disjunct threshold is min(i + beta*n, n/2),
    without it just i + beta*n.
    """
    first = i + beta * n
    if cap:
        first = min(first, Fraction(n, 2))
    back_index = n - i - beta * n
    clause_i = seqs.out_sorted[i - 1] >= first or _deg_at_least(
        seqs.in_sorted, back_index, n - i
    )
    clause_ii = seqs.in_sorted[i - 1] >= first or _deg_at_least(
        seqs.out_sorted, back_index, n - i
    )
    return clause_i, clause_ii


def _check_beta(beta) -> Fraction:
    beta = Fraction(beta)
    if not 0 < beta <= 1:
        raise ParameterError(f"beta must be in (0, 1], got {beta}")
    return beta


def _range_below_half(n: int):
    i = 1
    while Fraction(i) < Fraction(n, 2):
        yield i
        i += 1


def check_semi_exact(g: Digraph, beta) -> ConditionReport:
    """The semi-exact Chvatal-type condition with error term beta*n."""
    beta = _check_beta(beta)
    n = g.n
    seqs = degree_sequences(g)
    params = {"n": n, "beta": str(beta)}
    for i in _range_below_half(n):
        clause_i, clause_ii = _semi_exact_clauses(seqs, n, beta, i, cap=True)
        if not (clause_i and clause_ii):
            return ConditionReport(
                "semi-exact",
                False,
                first_violation=i,
                witness={
                    "i": i,
                    "d_out": seqs.d_out(i),
                    "d_in": seqs.d_in(i),
                    "clause_i": clause_i,
                    "clause_ii": clause_ii,
                    "threshold": str(min(i + beta * n, Fraction(n, 2))),
                },
                parameters=params,
            )
    return ConditionReport("semi-exact", True, parameters=params)


def check_posa_min(g: Digraph, beta) -> ConditionReport:
    """The semi-exact Posa-type condition: d_i^+/- >= min(i+beta*n, n/2)."""
    beta = _check_beta(beta)
    n = g.n
    seqs = degree_sequences(g)
    params = {"n": n, "beta": str(beta)}
    for i in _range_below_half(n):
        threshold = min(i + beta * n, Fraction(n, 2))
        if seqs.d_out(i) < threshold or seqs.d_in(i) < threshold:
            return ConditionReport(
                "posa-min",
                False,
                first_violation=i,
                witness={
                    "i": i,
                    "d_out": seqs.d_out(i),
                    "d_in": seqs.d_in(i),
                    "threshold": str(threshold),
                },
                parameters=params,
            )
    return ConditionReport("posa-min", True, parameters=params)


def check_kot(g: Digraph, beta) -> ConditionReport:
    """The uncapped Chvatal-type condition: d_i^+ >= i + beta*n or the back clause."""
    beta = _check_beta(beta)
    n = g.n
    seqs = degree_sequences(g)
    params = {"n": n, "beta": str(beta)}
    for i in _range_below_half(n):
        clause_i, clause_ii = _semi_exact_clauses(seqs, n, beta, i, cap=False)
        if not (clause_i and clause_ii):
            return ConditionReport(
                "kot",
                False,
                first_violation=i,
                witness={
                    "i": i,
                    "d_out": seqs.d_out(i),
                    "d_in": seqs.d_in(i),
                    "clause_i": clause_i,
                    "clause_ii": clause_ii,
                    "threshold": str(i + beta * n),
                },
                parameters=params,
            )
    return ConditionReport("kot", True, parameters=params)


CHECKERS = {
    "gh": lambda g, beta=None: check_ghouila_houri(g),
    "posa": lambda g, beta=None: check_posa_digraph(g),
    "nwc": lambda g, beta=None: check_nash_williams_chvatal(g),
    "semi-exact": check_semi_exact,
    "posa-min": check_posa_min,
    "kot": check_kot,
}


def derive_min_semidegree(g: Digraph, beta) -> bool:
    """Verify the minimum-semidegree consequence of the semi-exact condition.

    Requires check_semi_exact(g, beta) to hold; then delta^+(g) and
    delta^-(g) must both be at least beta*n. Returning False would falsify
    the implementation, not the mathematical fact.
    """
    beta = _check_beta(beta)
    if not check_semi_exact(g, beta).holds:
        raise PreconditionError("semi-exact condition does not hold on g")
    bound = beta * g.n
    return g.min_out_degree() >= bound and g.min_in_degree() >= bound


def full_range_equivalence(g: Digraph, beta) -> bool:
    """Dropping i < n/2 in favor of i < n - beta*n does not change the condition."""
    beta = _check_beta(beta)
    n = g.n
    seqs = degree_sequences(g)

    def all_hold(limit: Fraction) -> bool:
        i = 1
        while Fraction(i) < limit:
            clause_i, clause_ii = _semi_exact_clauses(seqs, n, beta, i, cap=True)
            if not (clause_i and clause_ii):
                return False
            i += 1
        return True

    return all_hold(Fraction(n, 2)) == all_hold(n - beta * n)


def gen_extremal_chvatal(n: int, k: int) -> Digraph:
    """The independent-set-plus-clique extremal digraph.

    Vertices [0, k) form the independent set I; [k, n) form a complete
    digraph K; the first k vertices of K are joined to I in both
    directions. Strongly connected, non-Hamiltonian, with both degree
    sequences equal to (k x k, n-1-k x (n-2k), n-1 x k).
    """
    if not (1 <= k and 2 * k < n):
        raise ParameterError(f"need 1 <= k < n/2, got n={n}, k={k}")
    edges = []
    for u in range(k, n):
        for v in range(k, n):
            if u != v:
                edges.append((u, v))
    for u in range(k):
        for x in range(k, 2 * k):
            edges.append((u, x))
            edges.append((x, u))
    return Digraph(n, edges)


def gen_concluding_example(n: int, a) -> Digraph:
    """Transitive tournament plus two complete end blocks of size a*n + 1.

    All forward edges i -> j for i < j are present; back edges exist inside
    the first a*n + 1 vertices and inside the last a*n + 1 vertices. The
    minimum semidegree is exactly a*n.
    """
    a = Fraction(a)
    if not 0 < a < Fraction(1, 2):
        raise ParameterError(f"need 0 < a < 1/2, got {a}")
    an = a * n
    if an.denominator != 1:
        raise ParameterError(f"a*n must be integral, got {an}")
    an = int(an)
    edges = [(u, v) for u in range(n) for v in range(u + 1, n)]
    # back edges inside vertices {0..an} and {n-1-an..n-1} (0-indexed blocks)
    for block in (range(0, an + 1), range(n - an - 1, n)):
        for u in block:
            for v in block:
                if v < u:
                    edges.append((u, v))
    return Digraph(n, edges)
