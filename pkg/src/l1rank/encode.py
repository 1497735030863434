"""Reductions from matrix problems to constrained k-center, and back.

A rank-``r`` matrix has at most ``2**r`` distinct columns, all of them
combinations of ``r`` basis vectors.  Encoding fixes the enumeration
``lambda_0 < lambda_1 < ...`` of ``{0,1}^r`` (integer order, first
coordinate most significant) and constrains the ``k = 2**r`` centers so
that at every row ``j`` the center bits read ``(x . lambda_0, ...,
x . lambda_{k-1})`` for some ``x``.  Decoding reads ``x`` back from the
centers sitting at the unit vectors of ``{0,1}^r``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache

from .errors import BudgetError, ContractViolation, DimensionError, EncodingError, ParameterError
from .gf2core import BitMatrix, BitVec, boolean_matmul, gf2_rank, hamming, l1_distance
from .model import CenterTuple, KCenterInstance, Relation, induced_partition, satisfies

DEFAULT_MAX_RANK = 6
DEFAULT_MAX_TUPLES = 64


@dataclass(frozen=True)
class RankEncoding:
    r: int

    def __post_init__(self):
        if self.r < 1:
            raise ParameterError("rank must be at least 1")

    @property
    def k(self) -> int:
        return 1 << self.r

    @property
    def lambda_order(self) -> list[tuple[int, ...]]:
        """All r-bit vectors in increasing integer order."""
        return [tuple((i >> (self.r - 1 - t)) & 1 for t in range(self.r)) for i in range(self.k)]

    def unit_index(self, t: int) -> int:
        """Index of the unit vector with a one at coordinate ``t``."""
        return 1 << (self.r - 1 - t)

    def gf2_word(self, x: int) -> int:
        w = 0
        for i in range(self.k):
            if (x & i).bit_count() & 1:
                w |= 1 << i
        return w

    def boolean_word(self, x: int) -> int:
        w = 0
        for i in range(self.k):
            if x & i:
                w |= 1 << i
        return w

    def recover(self, word: int) -> int:
        """The selector ``x`` (as an r-bit int) behind a relation word."""
        x = 0
        for t in range(self.r):
            if (word >> self.unit_index(t)) & 1:
                x |= 1 << (self.r - 1 - t)
        return x


@lru_cache(maxsize=None)
def gf2_relation(r: int) -> Relation:
    enc = RankEncoding(r)
    return Relation(enc.k, (enc.gf2_word(x) for x in range(enc.k)))


@lru_cache(maxsize=None)
def boolean_relation(r: int) -> Relation:
    enc = RankEncoding(r)
    return Relation(enc.k, (enc.boolean_word(x) for x in range(enc.k)))


def _check_rank(r: int, max_rank: int) -> None:
    if r < 1:
        raise ParameterError("rank must be at least 1")
    if r > max_rank:
        raise BudgetError(f"r={r} needs k=2^{r} centers; cap is r <= {max_rank}", stage="encode")


def _check_matrix(a: BitMatrix) -> None:
    if a.nrows < 1 or a.ncols < 1:
        raise DimensionError("matrix must have at least one row and one column")


def encode_gf2_rank(a: BitMatrix, r: int, max_rank: int = DEFAULT_MAX_RANK) -> KCenterInstance:
    """k-center instance over the columns of ``a`` with ``k = 2**r``."""
    _check_matrix(a)
    _check_rank(r, max_rank)
    rel = gf2_relation(r)
    return KCenterInstance(tuple(a.columns()), 1 << r, (rel,) * a.nrows)


def encode_boolean_rank(a: BitMatrix, r: int, max_rank: int = DEFAULT_MAX_RANK) -> KCenterInstance:
    _check_matrix(a)
    _check_rank(r, max_rank)
    rel = boolean_relation(r)
    return KCenterInstance(tuple(a.columns()), 1 << r, (rel,) * a.nrows)


def rank_basis(centers: CenterTuple, r: int) -> list[BitVec]:
    """Basis vectors ``s_1..s_r`` read off the unit-vector centers."""
    enc = RankEncoding(r)
    if centers.k != enc.k:
        raise DimensionError(f"{centers.k} centers for r={r}")
    return [centers[enc.unit_index(t)] for t in range(r)]


def _assign_columns(a: BitMatrix, centers: CenterTuple) -> tuple[int, ...]:
    return induced_partition(a.columns(), centers)


def decode_gf2_rank(a: BitMatrix, r: int, centers: CenterTuple) -> BitMatrix:
    """Matrix of GF(2)-rank <= r whose columns are the nearest centers."""
    if centers.m != a.nrows:
        raise DimensionError("center length differs from the row count")
    if not satisfies(centers, (gf2_relation(r),) * a.nrows):
        raise EncodingError("centers violate the rank relation")
    assign = _assign_columns(a, centers)
    b = BitMatrix.from_columns([centers[i] for i in assign], nrows=a.nrows)
    if gf2_rank(b) > r:
        raise ContractViolation("decoded matrix exceeds the target rank")
    return b


@dataclass(frozen=True)
class BooleanFactorization:
    b: BitMatrix
    u: BitMatrix  # m x r
    v: BitMatrix  # r x n


def decode_boolean_rank(a: BitMatrix, r: int, centers: CenterTuple) -> BooleanFactorization:
    """Boolean factors ``u``, ``v`` with ``b = u o v`` built from the centers."""
    if centers.m != a.nrows:
        raise DimensionError("center length differs from the row count")
    if not satisfies(centers, (boolean_relation(r),) * a.nrows):
        raise EncodingError("centers violate the Boolean rank relation")
    enc = RankEncoding(r)
    basis = rank_basis(centers, r)
    u = BitMatrix.from_columns(basis, nrows=a.nrows)
    assign = _assign_columns(a, centers)
    lam = enc.lambda_order
    v_cols = [BitVec.from_bits(lam[i]) for i in assign]
    v = BitMatrix.from_columns(v_cols, nrows=r)
    b = boolean_matmul(u, v)
    expected = BitMatrix.from_columns([centers[i] for i in assign], nrows=a.nrows)
    if b != expected:
        raise ContractViolation("Boolean factors do not reproduce the decoded centers")
    return BooleanFactorization(b, u, v)


# --- projective k-center ---------------------------------------------------


def projective_arity(r: int, k: int) -> int:
    return k << r


def encode_projective(
    vectors: Sequence[BitVec], r: int, k: int, max_tuples: int = DEFAULT_MAX_TUPLES
) -> KCenterInstance:
    """Instance whose centers form ``k`` blocks of ``2**r`` span members.

    The relation is the ``k``-fold product of the rank-``r`` relation, so
    it holds ``2**(k*r)`` tuples over ``k * 2**r`` centers.
    """
    if not vectors:
        raise DimensionError("need at least one vector")
    if r < 1 or k < 1:
        raise ParameterError("r and k must be positive")
    if 1 << (k * r) > max_tuples:
        raise BudgetError(f"2^(k*r) = {1 << (k * r)} tuples exceed the cap {max_tuples}", stage="encode")
    base = gf2_relation(r)
    block = 1 << r
    words = [0]
    for b in range(k):
        words = [w | (t << (b * block)) for w in words for t in base.words]
    rel = Relation(k * block, words)
    m = vectors[0].length
    return KCenterInstance(tuple(vectors), k * block, (rel,) * m)


@dataclass(frozen=True)
class Subspace:
    """Span of ``basis`` over GF(2)."""

    basis: tuple[BitVec, ...]

    @property
    def dimension(self) -> int:
        if not self.basis:
            return 0
        return gf2_rank(BitMatrix.from_rows(self.basis))

    def members(self) -> list[BitVec]:
        m = self.basis[0].length if self.basis else 0
        out = [0]
        for s in self.basis:
            out = out + [w ^ s.word for w in out]
        return [BitVec(m, w) for w in sorted(set(out))]


def decode_projective(r: int, k: int, centers: CenterTuple) -> list[Subspace]:
    block = 1 << r
    if centers.k != k * block:
        raise DimensionError(f"{centers.k} centers for k={k}, r={r}")
    rel = encode_projective([centers[0]], r, k, max_tuples=1 << (k * r)).relations[0]
    if not satisfies(centers, (rel,) * centers.m):
        raise EncodingError("centers violate the projective relation")
    out = []
    for b in range(k):
        blk = CenterTuple(centers.centers[b * block:(b + 1) * block])
        out.append(Subspace(tuple(rank_basis(blk, r))))
    return out


def projective_cost(vectors: Sequence[BitVec], subspaces: Sequence[Subspace]) -> int:
    """Max over vectors of the distance to the union of the subspaces."""
    members = [s for sub in subspaces for s in sub.members()]
    return max((min(hamming(x, s) for s in members) for x in vectors), default=0)


# --- closest string --------------------------------------------------------


def augment_strings(strings: Sequence[BitVec]) -> BitMatrix:
    """Columns ``s + 1^(m+1)``; no zero column can then be a good fit."""
    if not strings:
        raise DimensionError("closest string needs at least one string")
    m = strings[0].length
    if any(s.length != m for s in strings):
        raise DimensionError("strings have unequal lengths")
    pad = BitVec.ones(m + 1)
    return BitMatrix.from_columns([s.concat(pad) for s in strings], nrows=2 * m + 1)


def encode_closest_string(strings: Sequence[BitVec]) -> KCenterInstance:
    return encode_gf2_rank(augment_strings(strings), 1)


def decode_closest_string(centers: CenterTuple, m: int) -> BitVec:
    """The non-zero center of an r=1 solution, cut back to length ``m``."""
    c = centers[1]
    return BitVec(m, c.word & ((1 << m) - 1))


def closest_string_cost(strings: Sequence[BitVec], center: BitVec) -> int:
    return max(hamming(s, center) for s in strings)


def rank_cost(a: BitMatrix, b: BitMatrix) -> int:
    return l1_distance(a, b)
