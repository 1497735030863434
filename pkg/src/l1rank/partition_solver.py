"""Partition center via representative subsets and an agreement split.

For every cluster a guess picks ``r`` representatives, the first of which
is distinguished.  Positions where each cluster's representatives all
agree, and where the distinguished representatives' bits form an allowed
tuple, are fixed to those bits.  The remaining positions form a starred
instance (distances already spent on the fixed positions become offsets)
that is handed to :func:`l1rank.lp_round.solve_star`.  The best stitched
solution over all guesses wins.
"""

from __future__ import annotations

import itertools
import math
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from . import report as _report
from ._rng import substream
from .errors import ContractViolation, ParameterError
from .gf2core import BitVec, PositionSet
from .lp_round import build_lp, solve_lp, solve_star
from .model import (
    CenterTuple,
    PartitionInstance,
    PartitionStarInstance,
    cost_partition,
    restrict_instance,
    satisfies,
)
from .report import SolveReport

EMPTY = -1


@dataclass(frozen=True)
class SubsetGuess:
    """Per cluster, ``r`` member indices (repeats allowed); first is distinguished.

    An empty cluster has an empty tuple.
    """

    members: tuple[tuple[int, ...], ...]

    @property
    def firsts(self) -> tuple[int, ...]:
        return tuple(ms[0] if ms else EMPTY for ms in self.members)


@dataclass(frozen=True)
class AgreementSplit:
    q: PositionSet
    qbar: PositionSet
    fixed_words: tuple[int, ...]  # one tuple word per position of q, in order
    firsts: tuple[int, ...]


def subset_size(eps: float) -> int:
    return math.ceil(1 + 4 / eps)


def rounding_params(eps: float, k: int) -> tuple[int, int, float]:
    """``(r, c, delta)`` used for the starred subproblem."""
    r = subset_size(eps)
    return r, r * k, eps / ((2 * eps + 8) * k)


def _cluster_options(members: Sequence[int], r: int) -> list[tuple[int, ...]]:
    if not members:
        return [()]
    out = []
    for f in members:
        rest = [x for x in members if x != f]
        if len(members) < r:
            combo = (f, *rest)
            out.append(combo + (combo[-1],) * (r - len(combo)))
        else:
            out.extend((f, *c) for c in itertools.combinations(rest, r - 1))
    return out


def _cluster_option_count(size: int, r: int) -> int:
    if size == 0:
        return 1
    if size < r:
        return size
    return size * math.comb(size - 1, r - 1)


def guess_count(inst: PartitionInstance, r: int) -> int:
    return math.prod(_cluster_option_count(len(c), r) for c in inst.clusters())


def _sample_cluster(members: Sequence[int], r: int, rng) -> tuple[int, ...]:
    if not members:
        return ()
    if len(members) < r:
        f = members[int(rng.integers(len(members)))]
        rest = [x for x in members if x != f]
        combo = (f, *rest)
        return combo + (combo[-1],) * (r - len(combo))
    picks = rng.choice(len(members), size=r, replace=False)
    first = members[int(picks[0])]
    others = tuple(sorted(members[int(p)] for p in picks[1:]))
    return (first, *others)


def enumerate_guesses(
    inst: PartitionInstance, r: int, budget: int, seed: int = 0
) -> tuple[Iterator[SubsetGuess], bool]:
    """Guesses in lexicographic order, or ``budget`` sampled ones.

    Returns the iterator and whether enumeration is exhaustive.  Sampled
    guess ``g`` depends only on ``(seed, g)``, so a larger budget yields a
    superset.
    """
    if budget < 1:
        raise ParameterError("guess budget must be positive")
    clusters = inst.clusters()
    if guess_count(inst, r) <= budget:
        options = [_cluster_options(c, r) for c in clusters]
        return (SubsetGuess(combo) for combo in itertools.product(*options)), True

    def sampled() -> Iterator[SubsetGuess]:
        seen = set()
        for g in range(budget):
            rng = substream(seed, "guess", g)
            guess = SubsetGuess(tuple(_sample_cluster(c, r, rng) for c in clusters))
            if guess not in seen:
                seen.add(guess)
                yield guess

    return sampled(), False


def agreement_positions(guess: SubsetGuess, inst: PartitionInstance) -> AgreementSplit:
    m = inst.m
    full = (1 << m) - 1
    words = [v.word for v in inst.vectors]
    agree = full
    first_words = []
    for ms in guess.members:
        if not ms:
            first_words.append(0)
            continue
        f = words[ms[0]]
        diff = 0
        for idx in ms[1:]:
            diff |= words[idx] ^ f
        agree &= full & ~diff
        first_words.append(f)
    q_positions = []
    fixed = []
    for j in range(m):
        if not (agree >> j) & 1:
            continue
        t = 0
        for i, f in enumerate(first_words):
            if (f >> j) & 1:
                t |= 1 << i
        if t in inst.relations[j]:
            q_positions.append(j)
            fixed.append(t)
    q = PositionSet(m, q_positions)
    return AgreementSplit(q, q.complement(), tuple(fixed), guess.firsts)


def star_offsets(split: AgreementSplit, inst: PartitionInstance) -> list[int]:
    """Distance from each vector to its cluster's distinguished member on ``q``."""
    words = [v.word for v in inst.vectors]
    out = []
    for x, c in enumerate(inst.partition):
        f = words[split.firsts[c]]
        out.append(((words[x] ^ f) & split.q.mask).bit_count())
    return out


def restrict_to_split(inst: PartitionInstance, split: AgreementSplit) -> PartitionStarInstance:
    return restrict_instance(inst, split.qbar, star_offsets(split, inst))


def stitch(split: AgreementSplit, inner: CenterTuple, inst: PartitionInstance | None = None) -> CenterTuple:
    """Fixed bits on ``q``, ``inner`` on ``qbar``."""
    m = split.q.universe
    if inner.m != len(split.qbar):
        raise ContractViolation(f"inner centers have length {inner.m}, expected {len(split.qbar)}")
    if inst is not None:
        sub_rel = [inst.relations[j] for j in split.qbar]
        if not satisfies(inner, sub_rel):
            raise ContractViolation("inner centers violate the restricted relations")
    out = [0] * inner.k
    for j, t in zip(split.q, split.fixed_words):
        for i in range(inner.k):
            if (t >> i) & 1:
                out[i] |= 1 << j
    for pos, j in enumerate(split.qbar):
        for i, c in enumerate(inner):
            if (c.word >> pos) & 1:
                out[i] |= 1 << j
    return CenterTuple(tuple(BitVec(m, w) for w in out))


def solve_partition(
    inst: PartitionInstance,
    eps: float,
    seed: int = 0,
    budget: int = 256,
    *,
    exhaustive_budget: int = 1 << 16,
    lp_repeats: int | None = None,
    max_lp_repeats: int = 2000,
    certify: bool = True,
) -> SolveReport:
    """Approximate the partitioned problem to within ``1 + eps`` (w.h.p.).

    ``eps`` may go up to 1; the guarantee is only claimed below 1/2 and a
    caveat is recorded otherwise.
    """
    if not 0 < eps <= 1:
        raise ParameterError("eps must lie in (0, 1]")
    t0 = time.perf_counter()
    r, c, delta = rounding_params(eps, inst.k)
    caveats: list[str] = []
    if eps >= 0.5:
        caveats.append("eps >= 1/2: approximation guarantee not claimed")
    guesses, exhaustive = enumerate_guesses(inst, r, budget, seed)
    cache: dict[tuple, SolveReport] = {}
    best = None
    evaluated = 0
    for guess in guesses:
        evaluated += 1
        split = agreement_positions(guess, inst)
        key = (split.firsts, split.q.mask)
        star_rep = cache.get(key)
        if star_rep is None:
            star = restrict_to_split(inst, split)
            rng = substream(seed, "star", split.q.mask, *(f + 1 for f in split.firsts))
            star_rep = solve_star(
                star, delta, c, rng, lp_repeats,
                exhaustive_budget=exhaustive_budget, max_repeats=max_lp_repeats, certify=False,
            )
            cache[key] = star_rep
            for cav in star_rep.caveats:
                if cav not in caveats:
                    caveats.append(cav)
        centers = stitch(split, star_rep.centers, inst)
        cost = cost_partition(inst, centers)
        if cost != star_rep.cost:
            raise ContractViolation("stitched cost differs from the starred cost")
        if best is None or cost < best[0]:
            best = (cost, centers, guess, split, star_rep)
            if cost == 0:
                break
    cost, centers, guess, split, star_rep = best
    if not satisfies(centers, inst.relations):
        raise ContractViolation("stitched centers violate a relation")

    lower, kind = None, "none"
    if certify:
        frac = solve_lp(build_lp(PartitionStarInstance.from_partition(inst)))
        lower, kind = frac.lower_bound, "lp"
        if lower > cost:
            raise ContractViolation(f"cost {cost} below certified lower bound {lower}")
    rep = SolveReport(
        problem="partition",
        cost=cost,
        centers=centers,
        instance=inst,
        lower_bound=lower,
        lower_bound_kind=kind,
        path=star_rep.path,
        seed=seed,
        budgets={"guess": budget, "exhaustive": exhaustive_budget, "lp_repeats": lp_repeats},
        provenance={
            "r": r,
            "c": c,
            "delta": delta,
            "guess": [list(ms) for ms in guess.members],
            "q_size": len(split.q),
            "qbar_size": len(split.qbar),
            "guesses_evaluated": evaluated,
            "distinct_splits": len(cache),
            "guess_enumeration": "exhaustive" if exhaustive else "sampled",
        },
        caveats=caveats,
        timing_ms=(time.perf_counter() - t0) * 1e3,
    )
    return _report.emit(rep)
