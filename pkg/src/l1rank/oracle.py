"""Brute-force ground truth for every problem form at desk scale.

All oracles are deterministic.  The constrained k-center oracles run a
depth-first enumeration over one relation tuple per position, carrying
running mismatch counts and cutting any branch that already costs as much
as the best complete assignment found so far.
"""

from __future__ import annotations

import itertools
import time
from collections.abc import Sequence
from fractions import Fraction

from . import report as _report
from .errors import BudgetError
from .gf2core import BitMatrix, BitVec
from .model import (
    CenterTuple,
    KCenterInstance,
    PartitionInstance,
    PartitionStarInstance,
    cost_kcenter,
    cost_partition,
    cost_partition_star,
)
from .report import DEFAULT_ORACLE_BUDGET, SolveReport


def _check_budget(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise BudgetError(f"{what}: {count} combinations exceed budget {budget}", stage="oracle")


def _dfs(m: int, choices, counts: list[int], objective) -> tuple[list[int], int]:
    """Minimize ``objective(counts)`` over one choice per position.

    ``choices[j]`` lists ``(word, increments)`` pairs; ``increments`` are
    the count slots bumped by picking that word.  ``objective`` must be
    monotone in every count.
    """
    best_cost = [None]
    best_words: list[int] = []
    path = [0] * m

    def visit(j: int) -> None:
        if j == m:
            val = objective(counts)
            if best_cost[0] is None or val < best_cost[0]:
                best_cost[0] = val
                best_words[:] = path
            return
        children = []
        for word, inc in choices[j]:
            for s in inc:
                counts[s] += 1
            children.append((objective(counts), word, inc))
            for s in inc:
                counts[s] -= 1
        children.sort(key=lambda ch: ch[0])
        for val, word, inc in children:
            if best_cost[0] is not None and val >= best_cost[0]:
                break
            for s in inc:
                counts[s] += 1
            path[j] = word
            visit(j + 1)
            for s in inc:
                counts[s] -= 1

    visit(0)
    return best_words, best_cost[0]


def _centers(inst: KCenterInstance, words: Sequence[int]) -> CenterTuple:
    if inst.m == 0:
        return CenterTuple(tuple(BitVec(0) for _ in range(inst.k)))
    return CenterTuple.from_position_words(inst.k, words)


def _oracle_report(problem, inst, centers, cost, budget, t0) -> SolveReport:
    rep = SolveReport(
        problem=problem,
        cost=cost,
        centers=centers,
        instance=inst,
        lower_bound=Fraction(cost),
        lower_bound_kind="exact",
        path="oracle",
        budgets={"oracle": budget},
        timing_ms=(time.perf_counter() - t0) * 1e3,
    )
    return _report.emit(rep)


def oracle_kcenter(inst: KCenterInstance, budget: int = DEFAULT_ORACLE_BUDGET) -> SolveReport:
    """Exact optimum of constrained k-center (no partition)."""
    _check_budget(inst.relation_product(), budget, "oracle_kcenter")
    t0 = time.perf_counter()
    n, k = inst.n, inst.k
    vwords = [v.word for v in inst.vectors]
    choices = []
    for j, rel in enumerate(inst.relations):
        opts = []
        for w in rel.words:
            inc = []
            for x in range(n):
                xb = (vwords[x] >> j) & 1
                for i in range(k):
                    if xb != (w >> i) & 1:
                        inc.append(x * k + i)
            opts.append((w, tuple(inc)))
        choices.append(opts)

    def objective(counts):
        return max((min(counts[x * k:(x + 1) * k]) for x in range(n)), default=0)

    words, _ = _dfs(inst.m, choices, [0] * (n * k), objective)
    centers = _centers(inst, words)
    cost = cost_kcenter(inst.vectors, centers)
    return _oracle_report("kcenter", inst, centers, cost, budget, t0)


def oracle_partition(inst: PartitionInstance, budget: int = DEFAULT_ORACLE_BUDGET) -> SolveReport:
    """Exact optimum of the partitioned problem; honours offsets if present."""
    _check_budget(inst.relation_product(), budget, "oracle_partition")
    t0 = time.perf_counter()
    n = inst.n
    vwords = [v.word for v in inst.vectors]
    offsets = list(getattr(inst, "offsets", [0] * n))
    choices = []
    for j, rel in enumerate(inst.relations):
        opts = []
        for w in rel.words:
            inc = tuple(
                x for x in range(n) if ((vwords[x] >> j) & 1) != ((w >> inst.partition[x]) & 1)
            )
            opts.append((w, inc))
        choices.append(opts)

    def objective(counts):
        return max(counts, default=0)

    words, _ = _dfs(inst.m, choices, offsets, objective)
    centers = _centers(inst, words)
    if isinstance(inst, PartitionStarInstance):
        cost, problem = cost_partition_star(inst, centers), "partition-star"
    else:
        cost, problem = cost_partition(inst, centers), "partition"
    return _oracle_report(problem, inst, centers, cost, budget, t0)


def _span(basis: Sequence[int]) -> list[int]:
    out = [0]
    for s in basis:
        out = out + [w ^ s for w in out]
    return out


def oracle_rank(a: BitMatrix, r: int, budget: int = DEFAULT_ORACLE_BUDGET) -> tuple[BitMatrix, int]:
    """Best rank-<=r approximation in column-sum norm, by basis enumeration."""
    m = a.nrows
    _check_budget(1 << (m * r), budget, "oracle_rank")
    cols = [c.word for c in a.columns()]
    best_cost, best_span = None, None
    for basis in itertools.combinations_with_replacement(range(1 << m), r):
        span = _span(basis)
        cost = max(min((c ^ s).bit_count() for s in span) for c in cols)
        if best_cost is None or cost < best_cost:
            best_cost, best_span = cost, span
            if cost == 0:
                break
    out = []
    for c in cols:
        out.append(min(best_span, key=lambda s: ((c ^ s).bit_count(), s)))
    b = BitMatrix.from_columns([BitVec(m, w) for w in out], nrows=m)
    return b, best_cost


def oracle_closest_string(strings: Sequence[BitVec], budget: int = DEFAULT_ORACLE_BUDGET) -> tuple[BitVec, int]:
    """Exhaustive search over all ``2**m`` candidate centers."""
    m = strings[0].length
    _check_budget(1 << m, budget, "oracle_closest_string")
    words = [s.word for s in strings]
    best_cost, best = None, 0
    for c in range(1 << m):
        cost = max((c ^ w).bit_count() for w in words)
        if best_cost is None or cost < best_cost:
            best_cost, best = cost, c
    return BitVec(m, best), best_cost


def boolean_rank_at_most(b: BitMatrix, r: int, budget: int = 1 << 16) -> bool:
    """Decide ``boolean_rank(b) <= r`` by trying every ``m x r`` left factor."""
    m = b.nrows
    _check_budget(1 << (m * r), budget, "boolean_rank_at_most")
    cols = {c.word for c in b.columns()}
    for basis in itertools.combinations_with_replacement(range(1 << m), r):
        reach = {0}
        for s in basis:
            reach |= {w | s for w in reach}
        if cols <= reach:
            return True
    return False


def oracle_projective(
    vectors: Sequence[BitVec], r: int, k: int, budget: int = DEFAULT_ORACLE_BUDGET
) -> tuple[list[tuple[BitVec, ...]], int]:
    """Best ``k`` subspaces of dimension <= r; returns bases and cost."""
    m = vectors[0].length
    _check_budget(1 << (m * r * k), budget, "oracle_projective")
    spans: dict[frozenset[int], tuple[int, ...]] = {}
    for basis in itertools.combinations_with_replacement(range(1 << m), r):
        spans.setdefault(frozenset(_span(basis)), basis)
    keys = list(spans)
    words = [v.word for v in vectors]
    best_cost, best = None, None
    for combo in itertools.combinations_with_replacement(range(len(keys)), k):
        union = set().union(*(keys[i] for i in combo))
        cost = max(min((w ^ s).bit_count() for s in union) for w in words)
        if best_cost is None or cost < best_cost:
            best_cost, best = cost, combo
    bases = [tuple(BitVec(m, s) for s in spans[keys[i]]) for i in best]
    return bases, best_cost

