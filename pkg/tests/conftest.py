"""Shared fixtures and the report audit applied to every solver call."""

from __future__ import annotations

import numpy as np
import pytest

from l1rank.gf2core import BitMatrix, BitVec
from l1rank.model import KCenterInstance, PartitionInstance, PartitionStarInstance, Relation
from l1rank.report import add_report_hook, remove_report_hook

AUDIT_LOG: list[tuple[str, str | None]] = []


def _bits(word: int, j: int) -> int:
    return (word >> j) & 1


def independent_cost(rep) -> int:
    """Cost recomputed bit by bit, without the package's cost helpers."""
    inst, centers = rep.instance, [c.word for c in rep.centers]
    m = inst.m

    def dist(x: int, c: int) -> int:
        return sum(_bits(x, j) != _bits(c, j) for j in range(m))

    words = [v.word for v in inst.vectors]
    if isinstance(inst, PartitionInstance):
        offs = getattr(inst, "offsets", [0] * inst.n)
        return max((dist(w, centers[p]) + d for w, p, d in zip(words, inst.partition, offs)), default=0)
    return max((min(dist(w, c) for c in centers) for w in words), default=0)


def independent_satisfies(rep) -> bool:
    inst, centers = rep.instance, [c.word for c in rep.centers]
    for j, rel in enumerate(inst.relations):
        t = sum(_bits(c, j) << i for i, c in enumerate(centers))
        if t not in set(rel.words):
            return False
    return True


def audit_report(rep) -> str | None:
    if not independent_satisfies(rep):
        return f"{rep.problem}: centers violate a relation"
    cost = independent_cost(rep)
    if cost != rep.cost:
        return f"{rep.problem}: reported cost {rep.cost} != recomputed {cost}"
    if rep.lower_bound is not None and rep.lower_bound > rep.cost:
        return f"{rep.problem}: cost {rep.cost} below lower bound {rep.lower_bound}"
    return None


@pytest.fixture(autouse=True)
def report_audit():
    """Fail any test in which a solver emits an inconsistent report."""
    seen: list[str] = []

    def hook(rep):
        problem = audit_report(rep)
        AUDIT_LOG.append((rep.problem, problem))
        if problem:
            seen.append(problem)

    add_report_hook(hook)
    yield seen
    remove_report_hook(hook)
    assert not seen, seen


def random_matrix(rng: np.random.Generator, m: int, n: int) -> BitMatrix:
    return BitMatrix.from_array(rng.integers(0, 2, size=(m, n)))


def random_vectors(rng: np.random.Generator, n: int, m: int) -> list[BitVec]:
    return [BitVec(m, int(w)) for w in rng.integers(0, 1 << m, size=n)]


def random_instance(rng: np.random.Generator, n: int, m: int, k: int, full: bool = False) -> KCenterInstance:
    """Random vectors with random non-empty relations (or full ones)."""
    rels = []
    for _ in range(m):
        if full:
            rels.append(Relation.full(k))
        else:
            size = int(rng.integers(1, (1 << k) + 1))
            rels.append(Relation(k, rng.choice(1 << k, size=size, replace=False).tolist()))
    return KCenterInstance(tuple(random_vectors(rng, n, m)), k, tuple(rels))


def random_partition_instance(rng, n, m, k, full=False) -> PartitionInstance:
    inst = random_instance(rng, n, m, k, full)
    return inst.with_partition(rng.integers(0, k, size=n).tolist())


def random_star_instance(rng, n, m, k, max_offset=3) -> PartitionStarInstance:
    inst = random_partition_instance(rng, n, m, k)
    return PartitionStarInstance.from_partition(inst, rng.integers(0, max_offset + 1, size=n).tolist())


ACCEPTANCE: dict[int, str] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
