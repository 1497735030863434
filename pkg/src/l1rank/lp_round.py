"""Partition center with offsets: exact search or LP relaxation + rounding.

Variables ``y[j, t]`` pick tuple ``t`` of relation ``R_j`` at position
``j``.  The relaxation is

    minimize d
    sum_t y[j, t] = 1                                   for every j
    sum_j sum_t mismatch(x, j, t) * y[j, t] <= d - d_x  for every x
    y >= 0

Rounding picks, independently per position, tuple ``t`` with probability
``y*[j, t]``.  The optimum of the relaxation is bounded from below by an
exactly evaluated dual certificate, so lower bounds are rationals that
do not inherit floating-point error.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import report as _report
from .errors import ContractViolation, ParameterError
from .gf2core import BitVec
from .model import CenterTuple, PartitionStarInstance, cost_partition_star, satisfies
from .report import SolveReport
from .simplex import simplex

DUAL_SCALE = 1 << 32


@dataclass(frozen=True)
class StarTables:
    """Per-position mismatch tables of a starred instance.

    ``mismatch[j]`` has shape ``(len(R_j), n)``: entry ``[t, x]`` is 1 when
    vector ``x`` disagrees at ``j`` with its own cluster's bit of tuple
    ``t``.
    """

    words: list[np.ndarray]
    mismatch: list[np.ndarray]
    offsets: np.ndarray


def star_tables(inst: PartitionStarInstance) -> StarTables:
    n, m = inst.n, inst.m
    bits = np.zeros((n, m), dtype=np.int8)
    for x, v in enumerate(inst.vectors):
        w = v.word
        for j in range(m):
            bits[x, j] = (w >> j) & 1
    cluster = np.asarray(inst.partition, dtype=np.int64)
    tuple_bits: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    words, mismatch = [], []
    for j, rel in enumerate(inst.relations):
        key = id(rel)
        if key not in tuple_bits:
            ws = np.asarray(rel.words, dtype=object)
            tb = np.array(
                [[(w >> i) & 1 for i in range(inst.k)] for w in rel.words], dtype=np.int8
            ).reshape(len(rel), inst.k)
            tuple_bits[key] = (ws, tb)
        ws, tb = tuple_bits[key]
        target = tb[:, cluster] if n else np.zeros((len(rel), 0), dtype=np.int8)
        mismatch.append((target != bits[:, j][None, :]).astype(np.int8))
        words.append(ws)
    return StarTables(words, mismatch, np.asarray(inst.offsets, dtype=np.int64))


@dataclass(frozen=True)
class LpFormulation:
    instance: PartitionStarInstance
    tables: StarTables
    starts: np.ndarray  # first variable index of each position
    chi: np.ndarray  # (n, num_vars) mismatch indicators

    @property
    def num_vars(self) -> int:
        return int(self.chi.shape[1])

    @property
    def num_simplex_rows(self) -> int:
        return self.instance.m

    @property
    def num_distance_rows(self) -> int:
        return self.instance.n

    def variables(self) -> list[tuple[int, int]]:
        """``(position, tuple word)`` for each variable, in column order."""
        out = []
        for j, ws in enumerate(self.tables.words):
            out.extend((j, int(w)) for w in ws)
        return out

    def to_lp_text(self) -> str:
        """CPLEX-LP rendering, for cross-checking with external solvers."""
        names = [f"y_{j}_{w}" for j, w in self.variables()]
        lines = ["\\ partition center relaxation", "Minimize", " obj: d", "Subject To"]
        for j in range(self.instance.m):
            lo, hi = self.starts[j], self.starts[j + 1]
            terms = " + ".join(names[lo:hi])
            lines.append(f" pos_{j}: {terms} = 1")
        for x in range(self.instance.n):
            terms = [f" + {names[v]}" for v in np.flatnonzero(self.chi[x])]
            lhs = "".join(terms) if terms else " 0 y_dummy"
            lines.append(f" dist_{x}:{lhs} - d <= {-int(self.tables.offsets[x])}")
        lines.append("Bounds")
        lines.append(" d >= 0")
        lines.append("End")
        return "\n".join(lines) + "\n"


def build_lp(inst: PartitionStarInstance) -> LpFormulation:
    tables = star_tables(inst)
    sizes = [len(ws) for ws in tables.words]
    starts = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
    if tables.mismatch:
        chi = np.concatenate(tables.mismatch, axis=0).T.astype(np.int64)
    else:
        chi = np.zeros((inst.n, 0), dtype=np.int64)
    return LpFormulation(inst, tables, starts, chi)


@dataclass(frozen=True)
class FractionalSolution:
    formulation: LpFormulation
    values: list[np.ndarray]  # per position, probabilities over its tuples
    objective: float
    lower_bound: Fraction

    @property
    def instance(self) -> PartitionStarInstance:
        return self.formulation.instance

    def is_integral(self, tol: float = 1e-9) -> bool:
        return all(np.all((v < tol) | (v > 1 - tol)) for v in self.values)


def _greedy_words(tables: StarTables) -> list[int]:
    """Per position, the tuple index with fewest total mismatches."""
    return [int(np.argmin(mis.sum(axis=1))) if mis.shape[1] else 0 for mis in tables.mismatch]


def solve_lp(form: LpFormulation) -> FractionalSolution:
    inst = form.instance
    m, n, nv = inst.m, inst.n, form.num_vars
    tables = form.tables
    offsets = tables.offsets
    if n == 0:
        values = [np.eye(len(ws))[0] for ws in tables.words]
        return FractionalSolution(form, values, 0.0, Fraction(0))

    # columns: y (nv) | d | slack per vector
    d_col = nv
    cols = nv + 1 + n
    a = np.zeros((m + n, cols))
    for j in range(m):
        a[j, form.starts[j]:form.starts[j + 1]] = 1.0
    a[m:, :nv] = -form.chi
    a[m:, d_col] = 1.0
    a[m:, d_col + 1:] = -np.eye(n)
    b = np.concatenate([np.ones(m), offsets.astype(float)])
    c = np.zeros(cols)
    c[d_col] = 1.0

    pick = _greedy_words(tables)
    ycols = [int(form.starts[j]) + pick[j] for j in range(m)]
    load = form.chi[:, ycols].sum(axis=1) + offsets if m else offsets.copy()
    top = int(np.argmax(load))
    basis = ycols + [d_col] + [d_col + 1 + x for x in range(n) if x != top]
    res = simplex(a, b, c, basis)

    y = np.clip(res.x[:nv], 0.0, None)
    values = []
    for j in range(m):
        v = y[form.starts[j]:form.starts[j + 1]]
        s = v.sum()
        values.append(v / s if s > 0 else np.eye(len(v))[0])
    flat = np.concatenate(values) if values else np.zeros(0)
    objective = float((form.chi @ flat + offsets).max())
    bound = _dual_bound(form, res.duals[m:])
    if objective < float(bound) - 1e-7:
        raise ContractViolation("primal objective below its certified lower bound")
    return FractionalSolution(form, values, objective, bound)


def _dual_bound(form: LpFormulation, w_float: np.ndarray) -> Fraction:
    """Exact weak-duality bound from non-negative distance-row weights.

    Any ``w >= 0`` with ``sum(w) <= 1`` certifies
    ``sum_j min_t sum_x w_x chi[x, j, t] + sum_x w_x d_x <= d``.
    """
    offsets = form.tables.offsets
    w = np.rint(np.clip(w_float, 0.0, None) * DUAL_SCALE).astype(np.int64)
    denom = max(int(w.sum()), DUAL_SCALE)
    num = int((w * offsets).sum())
    per_var = w @ form.chi if form.num_vars else np.zeros(0, dtype=np.int64)
    for j in range(form.instance.m):
        num += int(per_var[form.starts[j]:form.starts[j + 1]].min())
    bound = Fraction(num, denom)
    return max(bound, Fraction(int(offsets.max())))


def certified_lower_bound(frac: FractionalSolution) -> Fraction:
    """Rational lower bound on the integer optimum of the starred instance."""
    return frac.lower_bound


def _cumulative(values: list[np.ndarray]) -> np.ndarray:
    width = max((len(v) for v in values), default=1)
    cum = np.ones((len(values), width))
    for j, v in enumerate(values):
        cum[j, :len(v)] = np.cumsum(v)
        cum[j, len(v) - 1:] = 1.0
    return cum


def round_indices(frac: FractionalSolution, rng: np.random.Generator, count: int) -> np.ndarray:
    """``count`` independent roundings as tuple indices, shape ``(count, m)``."""
    m = len(frac.values)
    if m == 0:
        return np.zeros((count, 0), dtype=np.int64)
    cum = _cumulative(frac.values)
    u = rng.random((count, m))
    idx = (u[:, :, None] >= cum[None, :, :]).sum(axis=2)
    sizes = np.array([len(v) for v in frac.values])
    return np.minimum(idx, sizes[None, :] - 1)


def centers_from_indices(inst: PartitionStarInstance, tables: StarTables, idx) -> CenterTuple:
    words = [int(tables.words[j][int(t)]) for j, t in enumerate(idx)]
    if inst.m == 0:
        return CenterTuple(tuple(BitVec(0) for _ in range(inst.k)))
    return CenterTuple.from_position_words(inst.k, words)


def round_once(frac: FractionalSolution, inst: PartitionStarInstance, rng: np.random.Generator) -> CenterTuple:
    idx = round_indices(frac, rng, 1)[0]
    return centers_from_indices(inst, frac.formulation.tables, idx)


def _batch_costs(tables: StarTables, idx: np.ndarray) -> np.ndarray:
    count, m = idx.shape
    n = tables.offsets.shape[0]
    total = np.zeros((count, n), dtype=np.int64)
    for j in range(m):
        total += tables.mismatch[j][idx[:, j]]
    return (total + tables.offsets[None, :]).max(axis=1) if n else np.zeros(count, dtype=np.int64)


def exhaustive_star(inst: PartitionStarInstance, tables: StarTables | None = None) -> tuple[list[int], int]:
    """Exact optimum by layered search over tuple choices.

    Partial choices that leave every vector with the same running
    mismatch count are merged, and any partial choice already as costly
    as the incumbent is dropped.  Returns per-position tuple indices and
    the optimal cost.
    """
    tables = tables or star_tables(inst)
    m, n = inst.m, inst.n
    if n == 0:
        return [0] * m, 0
    offsets = tables.offsets
    # greedy incumbent: keep the running maximum as small as possible
    cur = offsets.copy()
    best_idx = []
    for j in range(m):
        cand = cur[None, :] + tables.mismatch[j]
        key = cand.max(axis=1) * (n * m + 1) + cand.sum(axis=1)
        t = int(np.argmin(key))
        best_idx.append(t)
        cur = cand[t]
    best = int(cur.max())

    states = offsets[None, :].astype(np.int32)
    parents: list[tuple[np.ndarray, np.ndarray]] = []
    for j in range(m):
        mis = tables.mismatch[j].astype(np.int32)
        width = mis.shape[0]
        grown = (states[:, None, :] + mis[None, :, :]).reshape(-1, n)
        keep = np.flatnonzero(grown.max(axis=1) < best)
        if keep.size == 0:
            return best_idx, best
        grown = grown[keep]
        states, first = np.unique(grown, axis=0, return_index=True)
        src = keep[first]
        parents.append((src // width, src % width))
    finals = states.max(axis=1)
    s = int(np.argmin(finals))
    if int(finals[s]) >= best:
        return best_idx, best
    cost = int(finals[s])
    idx = [0] * m
    for j in range(m - 1, -1, -1):
        parent, tup = parents[j]
        idx[j] = int(tup[s])
        s = int(parent[s])
    return idx, cost


def lp_threshold(n: int, delta: float, c: int) -> float:
    """Below this many positions the exact search is prescribed."""
    if n <= 1:
        return 0.0
    return 9.0 * c * c * math.log(n) / (delta * delta)


def default_repeats(n: int, delta: float, c: int) -> int:
    return math.ceil(3.0 * math.log(n + 2) * (c / delta) ** 2)


def solve_star(
    inst: PartitionStarInstance,
    delta: float,
    c: int,
    seed: int | np.random.Generator = 0,
    repeats: int | None = None,
    *,
    exhaustive_budget: int = 1 << 16,
    max_repeats: int = 2000,
    certify: bool = True,
) -> SolveReport:
    """Approximately solve the starred partition problem.

    With few positions (relative to ``9 c^2 ln n / delta^2``) the exact
    search runs when the number of tuple combinations fits
    ``exhaustive_budget``; otherwise the relaxation is solved and the best
    of ``repeats`` independent roundings is returned.
    """
    if c < 1:
        raise ParameterError("c must be a positive integer")
    if not 0 < delta < 1.0 / c:
        raise ParameterError(f"delta must lie in (0, 1/c) = (0, {1.0 / c})")
    t0 = time.perf_counter()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    tables = star_tables(inst)
    caveats: list[str] = []
    frac = None
    lower = None
    lower_kind = "none"
    prov: dict = {}

    below = inst.m < lp_threshold(inst.n, delta, c)
    fits = inst.relation_product() <= exhaustive_budget
    if inst.m == 0 or inst.n == 0:
        path = "trivial"
        idx = [0] * inst.m
    elif below and fits:
        path = "exhaustive"
        idx, _ = exhaustive_star(inst, tables)
    else:
        if below:
            caveats.append(
                "exact search prescribed but tuple combinations exceed the exhaustive budget; used LP rounding"
            )
        path = "lp-rounding"
        frac = solve_lp(build_lp(inst))
        lower, lower_kind = frac.lower_bound, "lp"
        prov["lp_objective"] = frac.objective
        if frac.is_integral():
            path = "lp-integral"
            idx = [int(np.argmax(v)) for v in frac.values]
        else:
            if repeats is None:
                repeats = min(default_repeats(inst.n, delta, c), max_repeats)
            if repeats < 1:
                raise ParameterError("repeats must be positive")
            best_cost, best_idx = None, None
            chunk = max(1, 200_000 // max(1, inst.m * max(inst.n, 1)))
            done = 0
            while done < repeats:
                size = min(chunk, repeats - done)
                batch = round_indices(frac, rng, size)
                costs = _batch_costs(tables, batch)
                a = int(np.argmin(costs))
                if best_cost is None or costs[a] < best_cost:
                    best_cost, best_idx = int(costs[a]), batch[a]
                done += size
            idx = list(best_idx)
            prov["repeats"] = repeats

    centers = centers_from_indices(inst, tables, idx)
    if not satisfies(centers, inst.relations):
        raise ContractViolation("rounded centers violate a relation")
    cost = cost_partition_star(inst, centers)
    if certify and frac is None and inst.n and inst.m:
        frac = solve_lp(build_lp(inst))
        lower, lower_kind = frac.lower_bound, "lp"
    if lower is None:
        lower = Fraction(max(inst.offsets, default=0))
        lower_kind = "offsets" if path != "trivial" else "exact"
        if path == "trivial":
            lower = Fraction(cost)
    if lower > cost:
        raise ContractViolation(f"cost {cost} below certified lower bound {lower}")
    prov["exhaustive_threshold"] = lp_threshold(inst.n, delta, c)
    rep = SolveReport(
        problem="partition-star",
        cost=cost,
        centers=centers,
        instance=inst,
        lower_bound=lower,
        lower_bound_kind=lower_kind,
        path=path,
        seed=None if isinstance(seed, np.random.Generator) else int(seed),
        budgets={"exhaustive": exhaustive_budget, "repeats": repeats},
        provenance=prov,
        caveats=caveats,
        timing_ms=(time.perf_counter() - t0) * 1e3,
    )
    return _report.emit(rep)
