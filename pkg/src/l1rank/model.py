"""Problem instances, center tuples and exact cost evaluation.

Three problem forms share one shape: ``n`` binary vectors of length
``m``, a center count ``k`` and one ``k``-ary relation per position.
The partitioned form fixes which center serves each vector; the starred
form adds a non-negative offset per vector that is charged on top of its
distance.

Clusters are numbered ``0..k-1`` everywhere, including the JSON format.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import DimensionError, InfeasibleInstanceError, ParseError
from .gf2core import BitVec, PositionSet, hamming


class Relation:
    """A non-empty set of binary ``k``-tuples.

    Tuples are stored as ``k``-bit words with bit ``i`` holding the entry
    for center ``i``.
    """

    __slots__ = ("arity", "words", "_set")

    def __init__(self, arity: int, words: Iterable[int]):
        if arity < 1:
            raise DimensionError("relation arity must be positive")
        ws = sorted(set(int(w) for w in words))
        if not ws:
            raise InfeasibleInstanceError("empty relation: no center tuple can satisfy it")
        for w in ws:
            if w < 0 or w >> arity:
                raise DimensionError(f"tuple word {w} does not fit arity {arity}")
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "words", tuple(ws))
        object.__setattr__(self, "_set", frozenset(ws))

    def __setattr__(self, name, value):
        raise AttributeError("Relation is immutable")

    @classmethod
    def from_strings(cls, tuples: Sequence[str]) -> Relation:
        if not tuples:
            raise InfeasibleInstanceError("empty relation: no center tuple can satisfy it")
        arity = len(tuples[0])
        words = []
        for t in tuples:
            if len(t) != arity:
                raise ParseError(f"relation tuple {t!r} has length {len(t)}, expected {arity}")
            words.append(BitVec.from_str(t).word)
        return cls(arity, words)

    @classmethod
    def full(cls, arity: int) -> Relation:
        return cls(arity, range(1 << arity))

    def to_strings(self) -> list[str]:
        return [BitVec(self.arity, w).to_str() for w in self.words]

    def __contains__(self, word: int) -> bool:
        return word in self._set

    def __iter__(self) -> Iterator[int]:
        return iter(self.words)

    def __len__(self) -> int:
        return len(self.words)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Relation):
            return NotImplemented
        return self.arity == other.arity and self.words == other.words

    def __hash__(self) -> int:
        return hash((self.arity, self.words))

    def __repr__(self) -> str:
        return f"Relation({self.to_strings()})"


@dataclass(frozen=True)
class CenterTuple:
    """Ordered tuple of ``k`` centers of equal length."""

    centers: tuple[BitVec, ...]

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(self.centers))
        if not self.centers:
            raise DimensionError("a center tuple needs at least one center")
        m = self.centers[0].length
        if any(c.length != m for c in self.centers):
            raise DimensionError("centers have unequal lengths")

    @classmethod
    def from_strings(cls, strings: Sequence[str]) -> CenterTuple:
        return cls(tuple(BitVec.from_str(s) for s in strings))

    @classmethod
    def from_position_words(cls, k: int, words: Sequence[int]) -> CenterTuple:
        """Build centers from one relation word per position."""
        out = [0] * k
        for j, w in enumerate(words):
            for i in range(k):
                if (w >> i) & 1:
                    out[i] |= 1 << j
        return cls(tuple(BitVec(len(words), c) for c in out))

    @property
    def k(self) -> int:
        return len(self.centers)

    @property
    def m(self) -> int:
        return self.centers[0].length

    def position_word(self, j: int) -> int:
        """The ``k``-tuple ``(c_0[j], ..., c_{k-1}[j])`` as a word."""
        w = 0
        for i, c in enumerate(self.centers):
            if (c.word >> j) & 1:
                w |= 1 << i
        return w

    def restrict(self, positions: PositionSet) -> CenterTuple:
        return CenterTuple(tuple(c.restrict(positions) for c in self.centers))

    def to_strings(self) -> list[str]:
        return [c.to_str() for c in self.centers]

    def __iter__(self) -> Iterator[BitVec]:
        return iter(self.centers)

    def __getitem__(self, i: int) -> BitVec:
        return self.centers[i]

    def __len__(self) -> int:
        return len(self.centers)


@dataclass(frozen=True)
class KCenterInstance:
    vectors: tuple[BitVec, ...]
    k: int
    relations: tuple[Relation, ...]

    def __post_init__(self):
        object.__setattr__(self, "vectors", tuple(self.vectors))
        object.__setattr__(self, "relations", tuple(self.relations))
        if self.k < 1:
            raise DimensionError("k must be positive")
        m = len(self.relations)
        for v in self.vectors:
            if v.length != m:
                raise DimensionError(f"vector of length {v.length} but {m} relations")
        for rel in self.relations:
            if rel.arity != self.k:
                raise DimensionError(f"relation of arity {rel.arity} in a k={self.k} instance")

    @property
    def m(self) -> int:
        return len(self.relations)

    @property
    def n(self) -> int:
        return len(self.vectors)

    def relation_product(self) -> int:
        """Number of feasible center tuples, the product of relation sizes."""
        p = 1
        for rel in self.relations:
            p *= len(rel)
        return p

    def with_partition(self, partition: Sequence[int]) -> PartitionInstance:
        return PartitionInstance(self.vectors, self.k, self.relations, tuple(partition))


@dataclass(frozen=True)
class PartitionInstance(KCenterInstance):
    partition: tuple[int, ...]

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "partition", tuple(int(p) for p in self.partition))
        if len(self.partition) != self.n:
            raise DimensionError(f"partition has {len(self.partition)} entries for {self.n} vectors")
        for p in self.partition:
            if not 0 <= p < self.k:
                raise DimensionError(f"cluster index {p} outside range({self.k})")

    def clusters(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for idx, c in enumerate(self.partition):
            out[c].append(idx)
        return out

    def as_kcenter(self) -> KCenterInstance:
        return KCenterInstance(self.vectors, self.k, self.relations)


@dataclass(frozen=True)
class PartitionStarInstance(PartitionInstance):
    offsets: tuple[int, ...]

    def __post_init__(self):
        super().__post_init__()
        object.__setattr__(self, "offsets", tuple(int(d) for d in self.offsets))
        if len(self.offsets) != self.n:
            raise DimensionError(f"{len(self.offsets)} offsets for {self.n} vectors")
        if any(d < 0 for d in self.offsets):
            raise DimensionError("offsets must be non-negative")

    @classmethod
    def from_partition(cls, inst: PartitionInstance, offsets: Sequence[int] | None = None):
        if offsets is None:
            offsets = [0] * inst.n
        return cls(inst.vectors, inst.k, inst.relations, inst.partition, tuple(offsets))


def _check_centers(m: int, k: int | None, centers: CenterTuple) -> None:
    if centers.m != m:
        raise DimensionError(f"centers of length {centers.m} for vectors of length {m}")
    if k is not None and centers.k != k:
        raise DimensionError(f"{centers.k} centers for k={k}")


def satisfies(centers: CenterTuple, relations: Sequence[Relation]) -> bool:
    """True iff every position's tuple of center bits lies in its relation."""
    if centers.m != len(relations):
        raise DimensionError(f"centers of length {centers.m} vs {len(relations)} relations")
    for j, rel in enumerate(relations):
        if rel.arity != centers.k:
            raise DimensionError("relation arity differs from the number of centers")
        if centers.position_word(j) not in rel:
            return False
    return True


def distance_to_set(x: BitVec, centers: CenterTuple) -> int:
    return min(hamming(x, c) for c in centers)


def cost_kcenter(vectors: Sequence[BitVec], centers: CenterTuple) -> int:
    """Max over vectors of the distance to the nearest center (0 if no vectors)."""
    if not vectors:
        return 0
    return max(distance_to_set(x, centers) for x in vectors)


def cost_partition(inst: PartitionInstance, centers: CenterTuple) -> int:
    _check_centers(inst.m, inst.k, centers)
    if inst.n == 0:
        return 0
    return max(hamming(x, centers[c]) for x, c in zip(inst.vectors, inst.partition))


def cost_partition_star(inst: PartitionStarInstance, centers: CenterTuple) -> int:
    _check_centers(inst.m, inst.k, centers)
    if inst.n == 0:
        return 0
    return max(
        hamming(x, centers[c]) + d
        for x, c, d in zip(inst.vectors, inst.partition, inst.offsets)
    )


def induced_partition(vectors: Sequence[BitVec], centers: CenterTuple) -> tuple[int, ...]:
    """Assign each vector to a nearest center; ties go to the lowest index."""
    out = []
    for x in vectors:
        best, best_i = None, 0
        for i, c in enumerate(centers):
            d = hamming(x, c)
            if best is None or d < best:
                best, best_i = d, i
        out.append(best_i)
    return tuple(out)


def restrict_instance(
    inst: PartitionInstance, positions: PositionSet, offsets: Sequence[int]
) -> PartitionStarInstance:
    """Project vectors and relations onto ``positions`` and attach offsets."""
    if positions.universe != inst.m:
        raise DimensionError(f"position set over {positions.universe} for m={inst.m}")
    vectors = tuple(x.restrict(positions) for x in inst.vectors)
    relations = tuple(inst.relations[j] for j in positions)
    return PartitionStarInstance(vectors, inst.k, relations, inst.partition, tuple(offsets))


# --- instance JSON ---------------------------------------------------------

INSTANCE_FIELDS = ("m", "n", "k", "vectors", "relations", "partition", "offsets", "provenance")


def instance_to_dict(inst: KCenterInstance, provenance: dict[str, Any] | None = None) -> dict[str, Any]:
    """Canonical field order: m, n, k, vectors, relations, partition, offsets, provenance."""
    out: dict[str, Any] = {
        "m": inst.m,
        "n": inst.n,
        "k": inst.k,
        "vectors": [v.to_str() for v in inst.vectors],
        "relations": [rel.to_strings() for rel in inst.relations],
    }
    if isinstance(inst, PartitionInstance):
        out["partition"] = list(inst.partition)
    if isinstance(inst, PartitionStarInstance):
        out["offsets"] = list(inst.offsets)
    if provenance is not None:
        out["provenance"] = provenance
    return out


def instance_from_dict(data: dict[str, Any]) -> KCenterInstance:
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object")
    unknown = set(data) - set(INSTANCE_FIELDS)
    if unknown:
        raise ParseError(f"unknown instance fields: {sorted(unknown)}")
    for key in ("m", "n", "k", "vectors", "relations"):
        if key not in data:
            raise ParseError(f"missing instance field {key!r}")
    m, n, k = data["m"], data["n"], data["k"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (m, n, k)):
        raise ParseError("m, n and k must be integers")
    vec_strs = data["vectors"]
    if not isinstance(vec_strs, list) or len(vec_strs) != n:
        raise ParseError(f"expected {n} vectors")
    vectors = []
    for idx, s in enumerate(vec_strs):
        if not isinstance(s, str) or len(s) != m:
            raise ParseError(f"vector {idx}: expected a 0/1 string of length {m}")
        try:
            vectors.append(BitVec.from_str(s))
        except ParseError as exc:
            raise ParseError(f"vector {idx}: {exc}") from None
    rel_lists = data["relations"]
    if not isinstance(rel_lists, list) or len(rel_lists) != m:
        raise ParseError(f"expected {m} relations")
    relations = []
    cache: dict[tuple[str, ...], Relation] = {}
    for j, tuples in enumerate(rel_lists):
        if not isinstance(tuples, list) or not all(isinstance(t, str) for t in tuples):
            raise ParseError(f"relation {j}: expected a list of 0/1 strings")
        if any(len(t) != k for t in tuples):
            raise ParseError(f"relation {j}: every tuple must have {k} characters")
        key = tuple(tuples)
        if key not in cache:
            try:
                cache[key] = Relation.from_strings(tuples)
            except ParseError as exc:
                raise ParseError(f"relation {j}: {exc}") from None
        relations.append(cache[key])
    base = KCenterInstance(tuple(vectors), k, tuple(relations))
    if "offsets" in data and "partition" not in data:
        raise ParseError("offsets require a partition")
    if "partition" in data:
        part = data["partition"]
        if not isinstance(part, list) or not all(isinstance(p, int) for p in part):
            raise ParseError("partition must be a list of integers")
        try:
            pinst = base.with_partition(part)
        except DimensionError as exc:
            raise ParseError(f"partition: {exc}") from None
        if "offsets" in data:
            offs = data["offsets"]
            if not isinstance(offs, list) or not all(isinstance(d, int) for d in offs):
                raise ParseError("offsets must be a list of integers")
            try:
                return PartitionStarInstance.from_partition(pinst, offs)
            except DimensionError as exc:
                raise ParseError(f"offsets: {exc}") from None
        return pinst
    return base


def dump_instance(inst: KCenterInstance, provenance: dict[str, Any] | None = None) -> str:
    return json.dumps(instance_to_dict(inst, provenance), indent=1) + "\n"


def load_instance(text: str) -> KCenterInstance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(data)


def read_instance(path: str | Path) -> KCenterInstance:
    try:
        return load_instance(Path(path).read_text(encoding="utf-8"))
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from None
