"""Sparse random GF(2) sketches and the family of candidate partitions.

A sketch is an ``m' x m`` matrix with i.i.d. Bernoulli(``eps**2 / l``)
entries; ``x -> S x`` roughly preserves Hamming distances of order ``l``
up to a common scale.  For every scale ``l`` a set of ``k`` centers in
sketch space is guessed, and each guess splits the input by nearest
sketched center.  The resulting partitions, deduplicated, form the family
that the partition solver works through.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from ._rng import substream
from .errors import BudgetError, DimensionError, ParameterError
from .gf2core import BitMatrix, BitVec
from .model import KCenterInstance, PartitionInstance, instance_to_dict

MODES = ("exact", "sampled")
_EXACT_CHUNK = 1 << 15


@dataclass(frozen=True)
class SketchParams:
    epsilon: float
    gamma: float = 2.0
    lambda_const: float = 2.0
    max_dim: int | None = 64

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.25:
            raise ParameterError("sketch epsilon must lie in (0, 1/4]")
        if self.gamma <= 0 or self.lambda_const <= 0:
            raise ParameterError("gamma and lambda_const must be positive")
        if self.max_dim is not None and self.max_dim < 1:
            raise ParameterError("max_dim must be positive")

    def raw_dim(self, n: int, k: int) -> int:
        return max(1, math.ceil(self.lambda_const * math.log(n + k) / self.epsilon**4))

    def dim(self, n: int, k: int) -> int:
        d = self.raw_dim(n, k)
        return d if self.max_dim is None else min(d, self.max_dim)

    def density(self, ell: int) -> float:
        """``eps**2 / ell``, capped at 1/2 (only reachable when ``ell < 2 eps**2``)."""
        return min(self.epsilon**2 / ell, 0.5)


@dataclass(frozen=True)
class SketchMatrix:
    matrix: BitMatrix
    ell: int
    seed: int
    density: float

    @property
    def dim(self) -> int:
        return self.matrix.nrows

    @property
    def m(self) -> int:
        return self.matrix.ncols


def draw_sketch(m: int, m_prime: int, ell: int, eps: float, seed: int, cap: float = 1.0) -> SketchMatrix:
    """Bernoulli(``min(eps**2 / ell, cap)``) matrix of shape ``m_prime x m``."""
    if m_prime < 1:
        raise ParameterError("sketch dimension must be positive")
    if ell < 1:
        raise ParameterError("ell must be at least 1")
    if m < 0:
        raise ParameterError("m must be non-negative")
    p = min(eps * eps / ell, cap, 1.0)
    if p <= 0:
        raise ParameterError("sketch density must be positive")
    rng = substream(seed, "sketch", ell, m_prime, m)
    bits = (rng.random((m_prime, m)) < p).astype(np.uint8)
    return SketchMatrix(BitMatrix.from_array(bits), ell, seed, p)


def apply_sketch(s: SketchMatrix, x: BitVec) -> BitVec:
    if x.length != s.m:
        raise DimensionError(f"vector of length {x.length} for a sketch over {s.m} positions")
    w = x.word
    out = 0
    for i, row in enumerate(s.matrix.rows):
        out |= ((row & w).bit_count() & 1) << i
    return BitVec(s.dim, out)


# --- distortion check ------------------------------------------------------


@dataclass(frozen=True)
class DistortionReport:
    passed: bool
    alpha: Fraction | None = None
    violated_index: int | None = None
    violated_pair: tuple[BitVec, BitVec] | None = None
    condition: int | None = None


class _Interval:
    """Feasible set of scales ``alpha > 0`` as an interval with open/closed ends."""

    def __init__(self):
        self.lo, self.lo_open = Fraction(0), True
        self.hi, self.hi_open = None, True

    def above(self, v: Fraction, strict: bool) -> None:
        if v > self.lo or (v == self.lo and strict):
            self.lo, self.lo_open = v, strict or (v == self.lo and self.lo_open)

    def below(self, v: Fraction, strict: bool) -> None:
        if self.hi is None or v < self.hi or (v == self.hi and strict):
            same = self.hi is not None and v == self.hi
            self.hi, self.hi_open = v, strict or (same and self.hi_open)

    def empty(self) -> bool:
        if self.hi is None:
            return False
        if self.lo < self.hi:
            return False
        return self.lo > self.hi or self.lo_open or self.hi_open

    def witness(self) -> Fraction:
        if self.hi is None:
            return self.lo + 1
        if self.lo == self.hi:
            return self.lo
        return (self.lo + self.hi) / 2


def _constrain(iv: _Interval, coef: Fraction, value: int, op: str) -> bool:
    """Apply ``value op coef * alpha``; return False when unsatisfiable for every alpha > 0.

    ``op`` is one of ``"<"`` (value < coef*alpha), ``">"``, ``"<="``, ``">="``.
    """
    strict = op in ("<", ">")
    if coef > 0:
        bound = Fraction(value) / coef
        if op in ("<", "<="):
            iv.above(bound, strict)
        else:
            iv.below(bound, strict)
        return True
    # coef <= 0: coef*alpha <= 0 for every alpha > 0
    if op in ("<", "<="):
        return value < 0 or (value == 0 and not strict and coef == 0)
    if coef == 0:
        return value > 0 or (value == 0 and not strict)
    return True


def _exact(v: float | int | Fraction) -> Fraction:
    # decimal literal for floats, so 0.1 becomes 1/10
    return Fraction(repr(v)) if isinstance(v, float) else Fraction(v)


def check_distortion(
    s: SketchMatrix | Any,
    pairs: Sequence[tuple[BitVec, BitVec]],
    delta: float,
    ell: float,
    h: float,
) -> DistortionReport:
    """Search for a scale under which the map is ``(delta, ell, h)``-distorted on ``pairs``.

    ``s`` may be a :class:`SketchMatrix` or any callable ``BitVec -> BitVec``.
    """
    fmap = (lambda v: apply_sketch(s, v)) if isinstance(s, SketchMatrix) else s
    d_, l_, h_ = (_exact(v) for v in (delta, ell, h))
    iv = _Interval()
    for idx, (x, y) in enumerate(pairs):
        d = (x ^ y).weight()
        dp = (fmap(x) ^ fmap(y)).weight()
        if d < l_:
            cond, ok = 1, _constrain(iv, (1 + d_) * l_, dp, "<")
        elif d > h_:
            cond, ok = 2, _constrain(iv, (1 - d_) * h_, dp, ">")
        else:
            cond = 3
            ok = _constrain(iv, (1 - d_) * d, dp, ">=") and _constrain(iv, (1 + d_) * d, dp, "<=")
        if not ok or iv.empty():
            return DistortionReport(False, None, idx, (x, y), cond)
    return DistortionReport(True, iv.witness())


def all_pairs(vectors: Sequence[BitVec]) -> list[tuple[BitVec, BitVec]]:
    return [(x, y) for x, y in itertools.combinations(vectors, 2)]


# --- family generation -----------------------------------------------------


@dataclass(frozen=True)
class FamilyMember:
    instance: PartitionInstance
    ell: int | None
    guess: tuple[str, ...]
    guess_index: int | None


@dataclass
class PartitionFamily:
    members: list[FamilyMember]
    seed: int
    mode: str
    params: dict[str, Any] = field(default_factory=dict)
    caveats: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def partitions(self) -> list[tuple[int, ...]]:
        return [m.instance.partition for m in self.members]

    def to_dicts(self) -> list[dict[str, Any]]:
        out = []
        for mem in self.members:
            prov = {"ell": mem.ell, "seed": self.seed, "guess": list(mem.guess), "guess_index": mem.guess_index}
            out.append(instance_to_dict(mem.instance, provenance=prov))
        return out


def ell_grid(m: int, mode: str) -> list[int]:
    if m < 1:
        return [1]
    if mode == "exact":
        return list(range(1, m + 1))
    out, ell = [], 1
    while ell <= m:
        out.append(ell)
        ell *= 2
    return out


def zero_cost_partition(inst: KCenterInstance, limit: int = 1 << 16) -> tuple[int, ...] | None:
    """A partition admitting cost 0, or ``None`` if none is found.

    Places the distinct vectors into distinct center slots by backtracking,
    checking each position's relation against the slots filled so far.
    Gives up (returns ``None``) after ``limit`` placements.
    """
    distinct = sorted({v.word for v in inst.vectors})
    d, k = len(distinct), inst.k
    if d > k:
        return None
    rels = [rel.words for rel in inst.relations]
    slots: list[int] = []
    visits = 0

    def fits(mask: int) -> bool:
        for j, words in enumerate(rels):
            want = 0
            for w, s in zip(distinct, slots):
                if (w >> j) & 1:
                    want |= 1 << s
            if not any((t & mask) == want for t in words):
                return False
        return True

    def place(mask: int) -> bool:
        nonlocal visits
        if len(slots) == d:
            return True
        for s in range(k):
            if (mask >> s) & 1:
                continue
            visits += 1
            if visits > limit:
                return False
            slots.append(s)
            if fits(mask | 1 << s) and place(mask | 1 << s):
                return True
            slots.pop()
        return False

    if not place(0):
        return None
    where = dict(zip(distinct, slots))
    return tuple(where[v.word] for v in inst.vectors)


def _labels_from_dist(dist: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum, giving ties to the lowest index
    return np.argmin(dist, axis=1)


def _exact_partitions(sk_words: np.ndarray, m_prime: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """All ``2**(m' k)`` guesses; returns unique label rows and first guess index."""
    codes = np.arange(1 << m_prime, dtype=np.uint64)
    table = np.bitwise_count(codes[:, None] ^ sk_words[None, :]).astype(np.int16)  # (2^m', n)
    total = 1 << (m_prime * k)
    seen: dict[bytes, int] = {}
    rows, firsts = [], []
    base = np.uint64((1 << m_prime) - 1)
    for start in range(0, total, _EXACT_CHUNK):
        g = np.arange(start, min(total, start + _EXACT_CHUNK), dtype=np.uint64)
        slots = np.stack([(g >> np.uint64(i * m_prime)) & base for i in range(k)], axis=1)
        dist = table[slots.astype(np.int64)]  # (B, k, n)
        labels = _labels_from_dist(dist).astype(np.int16)
        uniq, first = np.unique(labels, axis=0, return_index=True)
        for row, f in sorted(zip(uniq, first), key=lambda t: t[1]):
            key = row.tobytes()
            if key not in seen:
                seen[key] = start + int(f)
                rows.append(row)
                firsts.append(start + int(f))
    return np.array(rows, dtype=np.int64).reshape(len(rows), -1), np.array(firsts, dtype=np.int64)


def _random_word(rng: np.random.Generator, bits: int) -> int:
    raw = int.from_bytes(rng.bytes((bits + 7) // 8), "little")
    return raw & ((1 << bits) - 1)


def _sampled_guess(rng, sk: Sequence[int], m_prime: int, k: int) -> list[int]:
    centers = [_random_word(rng, m_prime) for _ in range(k)]
    n = len(sk)
    seeds = int(rng.integers(0, min(k, n) + 1))
    if seeds:
        slots = rng.choice(k, size=seeds, replace=False)
        picks = rng.choice(n, size=seeds, replace=False)
        for s, p in zip(slots, picks):
            centers[int(s)] = sk[int(p)]
    return centers


def _guess_strings(words: Sequence[int], m_prime: int) -> tuple[str, ...]:
    return tuple(BitVec(m_prime, int(w)).to_str() for w in words)


def generate_family(
    inst: KCenterInstance,
    eps: float,
    gamma: float = 2.0,
    budget: int = 4096,
    *,
    mode: str = "sampled",
    lambda_const: float = 2.0,
    max_dim: int | None = 64,
    seed: int = 0,
) -> PartitionFamily:
    """Candidate partitions of ``inst`` from sketch-space center guesses.

    ``exact`` mode enumerates every guess for each ``l`` in ``1..m`` and
    needs ``2**(m' k) <= budget``.  ``sampled`` mode walks a doubling grid
    of ``l`` and draws ``budget // len(grid)`` guesses per scale.
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}")
    if budget < 1:
        raise ParameterError("family budget must be positive")
    params = SketchParams(eps, gamma, lambda_const, max_dim)
    n, k, m = inst.n, inst.k, inst.m
    info: dict[str, Any] = {"epsilon": eps, "gamma": gamma, "lambda_const": lambda_const}

    shortcut = zero_cost_partition(inst, limit=budget)
    if shortcut is not None:
        member = FamilyMember(inst.with_partition(shortcut), None, (), None)
        info["shortcut"] = "zero-cost"
        return PartitionFamily([member], seed, mode, info)

    raw = params.raw_dim(n, k)
    m_prime = params.dim(n, k)
    info.update(sketch_dim=m_prime, raw_sketch_dim=raw, dim_clamped=m_prime < raw)
    caveats = []
    if m_prime < raw:
        caveats.append(f"sketch dimension clamped from {raw} to {m_prime}")
    if mode == "exact" and m_prime * k > 62:
        raise BudgetError(f"2^{m_prime * k} guesses per scale exceed budget {budget}; use sampled mode", stage="family")
    if mode == "exact" and (1 << (m_prime * k)) > budget:
        raise BudgetError(
            f"2^{m_prime * k} guesses per scale exceed budget {budget}; use sampled mode", stage="family"
        )
    grid = ell_grid(m, mode)
    per_ell = max(1, budget // len(grid)) if mode == "sampled" else 1 << (m_prime * k)
    info.update(ells=grid, guesses_per_ell=per_ell)
    if mode == "sampled":
        caveats.append("sampled center guesses (heuristic; full enumeration not performed)")

    seen: set[tuple[int, ...]] = set()
    members: list[FamilyMember] = []
    clamped_density = []
    for ell in grid:
        sk = draw_sketch(m, m_prime, ell, eps, seed, cap=0.5)
        if sk.density < eps * eps / ell:
            clamped_density.append(ell)
        sk_words = [apply_sketch(sk, v).word for v in inst.vectors]
        if mode == "exact":
            rows, firsts = _exact_partitions(np.array(sk_words, dtype=np.uint64), m_prime, k)
            base = (1 << m_prime) - 1
            for row, g in zip(rows, firsts):
                part = tuple(int(v) for v in row)
                if part in seen:
                    continue
                seen.add(part)
                words = [(int(g) >> (i * m_prime)) & base for i in range(k)]
                members.append(
                    FamilyMember(inst.with_partition(part), ell, _guess_strings(words, m_prime), int(g))
                )
        else:
            for g in range(per_ell):
                rng = substream(seed, "guess-sketch", ell, g)
                words = _sampled_guess(rng, sk_words, m_prime, k)
                part = tuple(
                    min(range(k), key=lambda i: ((words[i] ^ x).bit_count(), i)) for x in sk_words
                )
                if part in seen:
                    continue
                seen.add(part)
                members.append(FamilyMember(inst.with_partition(part), ell, _guess_strings(words, m_prime), g))
    if clamped_density:
        info["density_clamped_ells"] = clamped_density
    return PartitionFamily(members, seed, mode, info, caveats)
