"""Bit-packed binary vectors and matrices.

Hamming geometry plus the handful of GF(2) / Boolean-semiring routines
the solvers need.  Packing is an implementation detail: a vector of
length ``m`` is held in a single Python ``int`` whose bit ``i`` is
position ``i``.  Everything that crosses the module boundary (strings,
lists, files) is indexed by position.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path

import numpy as np

from .errors import DimensionError, ParseError


def _mask(length: int) -> int:
    return (1 << length) - 1


class BitVec:
    """Immutable binary vector of fixed length."""

    __slots__ = ("length", "word")

    def __init__(self, length: int, word: int = 0):
        if length < 0:
            raise DimensionError(f"negative length {length}")
        if word < 0 or word >> length:
            raise DimensionError(f"word has bits beyond position {length - 1}")
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "word", word)

    def __setattr__(self, name, value):
        raise AttributeError("BitVec is immutable")

    @classmethod
    def from_str(cls, text: str) -> BitVec:
        word = 0
        for i, ch in enumerate(text):
            if ch == "1":
                word |= 1 << i
            elif ch != "0":
                raise ParseError(f"invalid character {ch!r} at position {i}")
        return cls(len(text), word)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVec:
        word = 0
        n = 0
        for i, b in enumerate(bits):
            if b:
                word |= 1 << i
            n = i + 1
        return cls(n, word)

    @classmethod
    def zeros(cls, length: int) -> BitVec:
        return cls(length, 0)

    @classmethod
    def ones(cls, length: int) -> BitVec:
        return cls(length, _mask(length))

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.word >> i) & 1

    def __iter__(self) -> Iterator[int]:
        w = self.word
        for i in range(self.length):
            yield (w >> i) & 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        return self.length == other.length and self.word == other.word

    def __hash__(self) -> int:
        return hash((self.length, self.word))

    def __xor__(self, other: BitVec) -> BitVec:
        _check_len(self, other)
        return BitVec(self.length, self.word ^ other.word)

    def __and__(self, other: BitVec) -> BitVec:
        _check_len(self, other)
        return BitVec(self.length, self.word & other.word)

    def __or__(self, other: BitVec) -> BitVec:
        _check_len(self, other)
        return BitVec(self.length, self.word | other.word)

    def __repr__(self) -> str:
        return f"BitVec({self.to_str()!r})"

    def weight(self) -> int:
        return self.word.bit_count()

    def to_str(self) -> str:
        return "".join("1" if (self.word >> i) & 1 else "0" for i in range(self.length))

    def to_list(self) -> list[int]:
        return list(self)

    def restrict(self, positions: PositionSet) -> BitVec:
        """Project onto ``positions``, keeping their relative order."""
        if positions.universe != self.length:
            raise DimensionError(
                f"position set over {positions.universe} applied to length {self.length}"
            )
        word = 0
        w = self.word
        for out, p in enumerate(positions):
            if (w >> p) & 1:
                word |= 1 << out
        return BitVec(len(positions), word)

    def concat(self, other: BitVec) -> BitVec:
        return BitVec(self.length + other.length, self.word | (other.word << self.length))


class PositionSet:
    """Sorted set of positions drawn from ``range(universe)``."""

    __slots__ = ("universe", "positions", "mask")

    def __init__(self, universe: int, positions: Iterable[int] = ()):
        pos = tuple(sorted(set(positions)))
        for p in pos:
            if not 0 <= p < universe:
                raise DimensionError(f"position {p} outside range({universe})")
        mask = 0
        for p in pos:
            mask |= 1 << p
        object.__setattr__(self, "universe", universe)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "mask", mask)

    def __setattr__(self, name, value):
        raise AttributeError("PositionSet is immutable")

    @classmethod
    def from_mask(cls, universe: int, mask: int) -> PositionSet:
        if mask >> universe:
            raise DimensionError("mask has bits beyond the universe")
        return cls(universe, (i for i in range(universe) if (mask >> i) & 1))

    @classmethod
    def full(cls, universe: int) -> PositionSet:
        return cls(universe, range(universe))

    def complement(self) -> PositionSet:
        return PositionSet.from_mask(self.universe, _mask(self.universe) & ~self.mask)

    def __iter__(self) -> Iterator[int]:
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)

    def __contains__(self, p: int) -> bool:
        return 0 <= p < self.universe and bool((self.mask >> p) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PositionSet):
            return NotImplemented
        return self.universe == other.universe and self.mask == other.mask

    def __hash__(self) -> int:
        return hash((self.universe, self.mask))

    def __repr__(self) -> str:
        return f"PositionSet({self.universe}, {list(self.positions)})"


def _check_len(x: BitVec, y: BitVec) -> None:
    if x.length != y.length:
        raise DimensionError(f"length mismatch: {x.length} vs {y.length}")


def hamming(x: BitVec, y: BitVec) -> int:
    """Number of positions where ``x`` and ``y`` differ."""
    _check_len(x, y)
    return (x.word ^ y.word).bit_count()


def hamming_restricted(x: BitVec, y: BitVec, positions: PositionSet) -> int:
    """Hamming distance counted only over ``positions``."""
    _check_len(x, y)
    if positions.universe != x.length:
        raise DimensionError(
            f"position set over {positions.universe} used with length {x.length}"
        )
    return ((x.word ^ y.word) & positions.mask).bit_count()


class BitMatrix:
    """Immutable dense binary matrix stored as packed rows."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[int]):
        rows = tuple(int(r) for r in rows)
        if len(rows) != nrows:
            raise DimensionError(f"expected {nrows} rows, got {len(rows)}")
        for r in rows:
            if r < 0 or r >> ncols:
                raise DimensionError("row has bits beyond the last column")
        object.__setattr__(self, "nrows", nrows)
        object.__setattr__(self, "ncols", ncols)
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("BitMatrix is immutable")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @classmethod
    def from_rows(cls, rows: Sequence[BitVec | str], ncols: int | None = None) -> BitMatrix:
        vecs = [BitVec.from_str(r) if isinstance(r, str) else r for r in rows]
        if ncols is None:
            if not vecs:
                raise DimensionError("cannot infer column count from zero rows")
            ncols = vecs[0].length
        for v in vecs:
            if v.length != ncols:
                raise DimensionError("rows have unequal lengths")
        return cls(len(vecs), ncols, [v.word for v in vecs])

    @classmethod
    def from_columns(cls, columns: Sequence[BitVec], nrows: int | None = None) -> BitMatrix:
        if nrows is None:
            if not columns:
                raise DimensionError("cannot infer row count from zero columns")
            nrows = columns[0].length
        rows = [0] * nrows
        for j, c in enumerate(columns):
            if c.length != nrows:
                raise DimensionError("columns have unequal lengths")
            w = c.word
            while w:
                low = w & -w
                rows[low.bit_length() - 1] |= 1 << j
                w ^= low
        return cls(nrows, len(columns), rows)

    @classmethod
    def from_array(cls, array) -> BitMatrix:
        a = np.asarray(array)
        if a.ndim != 2:
            raise DimensionError("expected a 2-d array")
        if not np.isin(a, (0, 1)).all():
            raise ParseError("array entries must be 0 or 1")
        nrows, ncols = a.shape
        weights = 1 << np.arange(ncols, dtype=object) if ncols else np.zeros(0, dtype=object)
        rows = [int((a[i].astype(object) * weights).sum()) if ncols else 0 for i in range(nrows)]
        return cls(nrows, ncols, rows)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> BitMatrix:
        return cls(nrows, ncols, [0] * nrows)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(ij)
        return (self.rows[i] >> j) & 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nrows, self.ncols, self.rows))

    def __repr__(self) -> str:
        body = ", ".join(self.row(i).to_str() for i in range(self.nrows))
        return f"BitMatrix({self.nrows}x{self.ncols}: [{body}])"

    def __xor__(self, other: BitMatrix) -> BitMatrix:
        if self.shape != other.shape:
            raise DimensionError(f"shape mismatch: {self.shape} vs {other.shape}")
        return BitMatrix(self.nrows, self.ncols, [a ^ b for a, b in zip(self.rows, other.rows)])

    def row(self, i: int) -> BitVec:
        return BitVec(self.ncols, self.rows[i])

    def column(self, j: int) -> BitVec:
        if not 0 <= j < self.ncols:
            raise IndexError(j)
        word = 0
        for i, r in enumerate(self.rows):
            if (r >> j) & 1:
                word |= 1 << i
        return BitVec(self.nrows, word)

    def columns(self) -> list[BitVec]:
        return [self.column(j) for j in range(self.ncols)]

    def transpose(self) -> BitMatrix:
        return BitMatrix(self.ncols, self.nrows, [c.word for c in self.columns()])


def gf2_rank(matrix: BitMatrix) -> int:
    """Rank over GF(2) by XOR row elimination."""
    pivots: dict[int, int] = {}  # leading bit -> reduced row
    for r in matrix.rows:
        while r:
            lead = r.bit_length() - 1
            p = pivots.get(lead)
            if p is None:
                pivots[lead] = r
                break
            r ^= p
    return len(pivots)


def column_sum_norm(matrix: BitMatrix) -> int:
    """Maximum number of ones in any column (0 for an empty matrix)."""
    if matrix.ncols == 0:
        return 0
    counts = [0] * matrix.ncols
    for r in matrix.rows:
        while r:
            low = r & -r
            counts[low.bit_length() - 1] += 1
            r ^= low
    return max(counts)


def l1_distance(a: BitMatrix, b: BitMatrix) -> int:
    """Column-sum norm of ``a - b`` over GF(2), i.e. of ``a XOR b``."""
    return column_sum_norm(a ^ b)


def gf2_matmul(u: BitMatrix, v: BitMatrix) -> BitMatrix:
    """Matrix product over GF(2)."""
    if u.ncols != v.nrows:
        raise DimensionError(f"cannot multiply {u.shape} by {v.shape}")
    out = []
    for ur in u.rows:
        acc = 0
        w = ur
        while w:
            low = w & -w
            acc ^= v.rows[low.bit_length() - 1]
            w ^= low
        out.append(acc)
    return BitMatrix(u.nrows, v.ncols, out)


def boolean_matmul(u: BitMatrix, v: BitMatrix) -> BitMatrix:
    """Matrix product over the Boolean semiring (AND for product, OR for sum)."""
    if u.ncols != v.nrows:
        raise DimensionError(f"cannot multiply {u.shape} by {v.shape}")
    out = []
    for ur in u.rows:
        acc = 0
        w = ur
        while w:
            low = w & -w
            acc |= v.rows[low.bit_length() - 1]
            w ^= low
        out.append(acc)
    return BitMatrix(u.nrows, v.ncols, out)


def parse_matrix(text: str, source: str = "<string>") -> BitMatrix:
    """Parse the ``m n`` header + ``m`` lines of ``n`` 0/1 characters format.

    Diagnostics cite ``source:line:column`` (1-based).
    """
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(f"{source}:1:1: empty input, expected header 'm n'")
    header = lines[0].split()
    if len(header) != 2 or not all(h.isdigit() for h in header):
        raise ParseError(f"{source}:1:1: header must be two non-negative integers 'm n'")
    m, n = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"{source}:{len(lines) + 1}:1: expected {m} matrix rows, found {len(body)}")
    rows = []
    for i, line in enumerate(body):
        lineno = i + 2
        if len(line) != n:
            raise ParseError(f"{source}:{lineno}:{min(len(line), n) + 1}: expected {n} characters, found {len(line)}")
        word = 0
        for j, ch in enumerate(line):
            if ch == "1":
                word |= 1 << j
            elif ch != "0":
                raise ParseError(f"{source}:{lineno}:{j + 1}: invalid character {ch!r}")
        rows.append(word)
    return BitMatrix(m, n, rows)


def format_matrix(matrix: BitMatrix) -> str:
    lines = [f"{matrix.nrows} {matrix.ncols}"]
    lines.extend(matrix.row(i).to_str() for i in range(matrix.nrows))
    return "\n".join(lines) + "\n"


def read_matrix(path: str | Path) -> BitMatrix:
    path = Path(path)
    return parse_matrix(path.read_text(encoding="utf-8"), source=str(path))


def write_matrix(matrix: BitMatrix, path: str | Path) -> None:
    Path(path).write_text(format_matrix(matrix), encoding="utf-8")
