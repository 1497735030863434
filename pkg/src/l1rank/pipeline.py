"""End-to-end solvers: family of partitions, per-partition solve, best pick, decode."""

from __future__ import annotations

import dataclasses
import itertools
import math
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import report as _report
from .encode import (
    BooleanFactorization,
    Subspace,
    closest_string_cost,
    decode_boolean_rank,
    decode_closest_string,
    decode_gf2_rank,
    decode_projective,
    encode_boolean_rank,
    encode_closest_string,
    encode_gf2_rank,
    encode_projective,
    projective_cost,
)
from .errors import ContractViolation, ParameterError
from .gf2core import BitMatrix, BitVec, boolean_matmul, gf2_rank, l1_distance
from .lp_round import build_lp, solve_lp
from .oracle import boolean_rank_at_most
from .model import KCenterInstance, PartitionStarInstance, cost_kcenter, satisfies
from .partition_solver import solve_partition
from .report import Budgets, SolveReport
from .sketch import generate_family

_TINY_BOOLEAN_CHECK = 16


def kcenter_lower_bound(inst: KCenterInstance) -> tuple[Fraction, str]:
    """A proven lower bound on the optimum of ``inst``.

    With one center the relaxation of the single-cluster instance applies.
    Otherwise ``k + 1`` vectors picked farthest-first must share a center
    pairwise somewhere, so half their smallest pairwise distance bounds
    the optimum from below.
    """
    if inst.n == 0 or inst.m == 0:
        return Fraction(0), "trivial"
    if inst.k == 1:
        star = PartitionStarInstance.from_partition(inst.with_partition([0] * inst.n))
        return solve_lp(build_lp(star)).lower_bound, "lp"
    words = sorted({v.word for v in inst.vectors})
    if len(words) <= inst.k:
        return Fraction(0), "pigeonhole"
    picked = [words[0]]
    near = [(w ^ words[0]).bit_count() for w in words]
    while len(picked) < inst.k + 1:
        i = max(range(len(words)), key=lambda t: (near[t], -t))
        picked.append(words[i])
        near = [min(d, (w ^ words[i]).bit_count()) for d, w in zip(near, words)]
    closest = min((a ^ b).bit_count() for a, b in itertools.combinations(picked, 2))
    return Fraction(math.ceil(closest / 2)), "pigeonhole"


def _check_eps(eps: float) -> list[str]:
    if not 0 < eps <= 1:
        raise ParameterError("eps must lie in (0, 1]")
    return ["eps = 1: approximation guarantee not claimed"] if eps >= 1 else []


def solve_kcenter(
    inst: KCenterInstance,
    eps: float,
    seed: int = 0,
    budgets: Budgets | None = None,
    *,
    certify: bool = True,
) -> SolveReport:
    """Best solution over all partitions in the sketch family.

    Members are solved in family order; the first member reaching the
    lowest cost wins, which keeps the result independent of ``threads``.
    """
    budgets = budgets or Budgets()
    caveats = _check_eps(eps)
    t0 = time.perf_counter()
    beta = eps / 8
    family = generate_family(
        inst, beta, budgets.gamma, budgets.family,
        mode=budgets.mode, lambda_const=budgets.lambda_const, max_dim=budgets.max_sketch_dim, seed=seed,
    )
    caveats += family.caveats
    lower, kind = kcenter_lower_bound(inst) if certify else (None, "none")
    stop_at = math.ceil(lower) if lower is not None else 0

    def run(member):
        rep = solve_partition(
            member.instance, beta, seed, budgets.guess,
            exhaustive_budget=budgets.exhaustive, lp_repeats=budgets.lp_repeats,
            max_lp_repeats=budgets.max_lp_repeats, certify=False,
        )
        return cost_kcenter(inst.vectors, rep.centers), rep

    members = family.members
    best = None
    block = max(1, budgets.threads) * 4 if budgets.threads > 1 else 1
    pool = ThreadPoolExecutor(budgets.threads) if budgets.threads > 1 else None
    try:
        for start in range(0, len(members), block):
            chunk = members[start:start + block]
            results = list(pool.map(run, chunk)) if pool else [run(chunk[0])]
            for offset, (cost, rep) in enumerate(results):
                if best is None or cost < best[0]:
                    best = (cost, rep, start + offset)
            if best[0] <= stop_at:
                break
    finally:
        if pool:
            pool.shutdown()

    cost, prep, index = best
    # counted as a sequential run would, so provenance does not depend on threads
    solved = index + 1 if cost <= stop_at else len(members)
    centers = prep.centers
    if not satisfies(centers, inst.relations):
        raise ContractViolation("pipeline centers violate a relation")
    if lower is not None and lower > cost:
        raise ContractViolation(f"cost {cost} below certified lower bound {lower}")
    for cav in prep.caveats:
        if cav not in caveats:
            caveats.append(cav)
    win = members[index]
    rep = SolveReport(
        problem="kcenter",
        cost=cost,
        centers=centers,
        instance=inst,
        lower_bound=lower,
        lower_bound_kind=kind,
        path=prep.path,
        seed=seed,
        budgets=budgets.to_dict(),
        provenance={
            "beta": beta,
            "family": family.params,
            "family_size": len(members),
            "members_solved": solved,
            "winner": {
                "index": index,
                "ell": win.ell,
                "guess": list(win.guess),
                "guess_index": win.guess_index,
                "partition": list(win.instance.partition),
            },
            "partition_solver": prep.provenance,
        },
        caveats=caveats,
        timing_ms=(time.perf_counter() - t0) * 1e3,
    )
    return _report.emit(rep)


def _relabel(rep: SolveReport, problem: str, **extra) -> SolveReport:
    prov = dict(rep.provenance)
    prov.update(extra)
    return _report.emit(dataclasses.replace(rep, problem=problem, provenance=prov))


def solve_rank(
    a: BitMatrix, r: int, eps: float, seed: int = 0, budgets: Budgets | None = None
) -> tuple[BitMatrix, int, SolveReport]:
    """``B`` of GF(2)-rank at most ``r`` approximately minimizing ``|A - B|_1``."""
    rep = solve_kcenter(encode_gf2_rank(a, r), eps, seed, budgets)
    b = decode_gf2_rank(a, r, rep.centers)
    cost = l1_distance(a, b)
    rank = gf2_rank(b)
    if rank > r or cost != rep.cost:
        raise ContractViolation("decoded matrix disagrees with the solver report")
    return b, cost, _relabel(rep, "rank", rank_check=True, rank=rank)


def solve_boolean_rank(
    a: BitMatrix, r: int, eps: float, seed: int = 0, budgets: Budgets | None = None
) -> tuple[BooleanFactorization, int, SolveReport]:
    rep = solve_kcenter(encode_boolean_rank(a, r), eps, seed, budgets)
    fac = decode_boolean_rank(a, r, rep.centers)
    if fac.u.ncols != r or boolean_matmul(fac.u, fac.v) != fac.b:
        raise ContractViolation("Boolean factors do not reproduce the output")
    cost = l1_distance(a, fac.b)
    if cost != rep.cost:
        raise ContractViolation("decoded matrix disagrees with the solver report")
    extra = {"rank_check": True}
    if a.nrows * r <= _TINY_BOOLEAN_CHECK:
        extra["boolean_rank_verified"] = boolean_rank_at_most(fac.b, r)
        if not extra["boolean_rank_verified"]:
            raise ContractViolation("output exceeds the Boolean rank bound")
    return fac, cost, _relabel(rep, "boolean-rank", **extra)


def solve_projective(
    vectors: Sequence[BitVec], r: int, k: int, eps: float, seed: int = 0,
    budgets: Budgets | None = None, max_tuples: int = 64,
) -> tuple[list[Subspace], int, SolveReport]:
    """``k`` subspaces of dimension at most ``r`` covering ``vectors`` closely."""
    rep = solve_kcenter(encode_projective(vectors, r, k, max_tuples), eps, seed, budgets)
    subspaces = decode_projective(r, k, rep.centers)
    if any(s.dimension > r for s in subspaces):
        raise ContractViolation("decoded subspace exceeds the dimension bound")
    cost = projective_cost(vectors, subspaces)
    if cost != rep.cost:
        raise ContractViolation("subspace cost disagrees with the solver report")
    return subspaces, cost, _relabel(rep, "projective", dimensions=[s.dimension for s in subspaces])


def solve_closest_string(
    strings: Sequence[BitVec], eps: float, seed: int = 0, budgets: Budgets | None = None
) -> tuple[BitVec, int, SolveReport]:
    """A string minimizing the maximum Hamming distance to ``strings``."""
    rep = solve_kcenter(encode_closest_string(strings), eps, seed, budgets)
    m = strings[0].length
    center = decode_closest_string(rep.centers, m)
    cost = closest_string_cost(strings, center)
    if cost > rep.cost:
        raise ContractViolation("closest string cost exceeds the encoded cost")
    return center, cost, _relabel(rep, "closest-string", string=center.to_str(), string_cost=cost)
