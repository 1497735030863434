import json
from pathlib import Path

import numpy as np
import pytest

from conftest import random_instance, random_matrix, random_partition_instance
from l1rank.encode import encode_closest_string, encode_gf2_rank
from l1rank.errors import BudgetError
from l1rank.gf2core import BitMatrix, BitVec, gf2_rank, l1_distance
from l1rank.lp_round import build_lp, solve_lp
from l1rank.model import (
    CenterTuple,
    KCenterInstance,
    PartitionStarInstance,
    Relation,
    cost_kcenter,
    cost_partition,
    induced_partition,
    instance_from_dict,
)
from l1rank.oracle import (
    boolean_rank_at_most,
    oracle_closest_string,
    oracle_kcenter,
    oracle_partition,
    oracle_projective,
    oracle_rank,
)

FROZEN = json.loads((Path(__file__).parent / "fixtures" / "oracle_values.json").read_text())


@pytest.mark.parametrize("case", FROZEN["rank"], ids=lambda c: "x".join(map(str, (len(c["rows"]), len(c["rows"][0])))))
def test_oracle_rank_frozen(case):
    a = BitMatrix.from_rows(case["rows"])
    b, cost = oracle_rank(a, case["r"])
    assert cost == case["cost"]
    assert l1_distance(a, b) == cost
    assert gf2_rank(b) <= case["r"]


@pytest.mark.parametrize("case", FROZEN["kcenter"])
def test_oracle_kcenter_and_partition_frozen(case):
    part = instance_from_dict(case["instance"])
    assert oracle_kcenter(part.as_kcenter()).cost == case["kcenter_cost"]
    assert oracle_partition(part).cost == case["partition_cost"]


@pytest.mark.parametrize("case", FROZEN["closest_string"])
def test_oracle_closest_string_frozen(case):
    strings = [BitVec.from_str(s) for s in case["strings"]]
    center, cost = oracle_closest_string(strings)
    assert cost == case["cost"]
    assert max((center ^ s).weight() for s in strings) == cost


def test_single_vector_costs_zero():
    x = BitVec.from_str("10110")
    rel = [Relation(1, [(x.word >> j) & 1]) for j in range(5)]
    assert oracle_kcenter(KCenterInstance((x,), 1, tuple(rel))).cost == 0


def test_closest_string_via_encoding():
    strings = [BitVec.from_str("0000"), BitVec.from_str("1111")]
    assert oracle_closest_string(strings)[1] == 2
    # augmented with 1^5 the non-zero center sits on the pad, so the encoded cost matches
    assert oracle_kcenter(encode_closest_string(strings)).cost == 2


def test_identity_rank_one():
    b, cost = oracle_rank(BitMatrix.identity(4), 1)
    assert cost == 1
    assert gf2_rank(b) <= 1


@pytest.mark.parametrize("seed", range(6))
def test_low_rank_matrix_is_exact(seed):
    rng = np.random.default_rng(seed)
    u = rng.integers(0, 2, size=(4, 1))
    v = rng.integers(0, 2, size=(1, 5))
    a = BitMatrix.from_array((u @ v) % 2)
    b, cost = oracle_rank(a, 1)
    assert cost == 0 and b == a


@pytest.mark.parametrize("seed", range(25))
def test_rank_oracles_agree(seed):
    rng = np.random.default_rng(100 + seed)
    a = random_matrix(rng, int(rng.integers(1, 6)), int(rng.integers(1, 5)))
    r = int(rng.integers(1, 3))
    assert oracle_kcenter(encode_gf2_rank(a, r)).cost == oracle_rank(a, r)[1]


@pytest.mark.parametrize("seed", range(10))
def test_kcenter_beats_random_feasible_tuples(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 5, 6, 2)
    opt = oracle_kcenter(inst).cost
    for _ in range(1000):
        words = [int(rng.choice(rel.words)) for rel in inst.relations]
        assert opt <= cost_kcenter(inst.vectors, CenterTuple.from_position_words(inst.k, words))


@pytest.mark.parametrize("seed", range(10))
def test_partition_relations(seed):
    rng = np.random.default_rng(seed)
    inst = random_partition_instance(rng, 5, 6, 2)
    kc = oracle_kcenter(inst.as_kcenter())
    induced = inst.as_kcenter().with_partition(induced_partition(inst.vectors, kc.centers))
    assert oracle_partition(induced).cost == kc.cost
    assert oracle_partition(inst).cost >= kc.cost
    assert cost_partition(inst, kc.centers) >= kc.cost


@pytest.mark.parametrize("seed", range(10))
def test_oracle_never_below_lp_bound(seed):
    rng = np.random.default_rng(seed)
    inst = random_partition_instance(rng, 5, 7, 2)
    star = PartitionStarInstance.from_partition(inst)
    assert oracle_partition(inst).cost >= solve_lp(build_lp(star)).lower_bound


def test_oracle_is_deterministic():
    rng = np.random.default_rng(3)
    inst = random_instance(rng, 6, 7, 2)
    a, b = oracle_kcenter(inst), oracle_kcenter(inst)
    assert a.centers == b.centers and a.cost == b.cost


def test_budget_errors_name_the_stage():
    inst = random_instance(np.random.default_rng(0), 3, 12, 2, full=True)
    with pytest.raises(BudgetError, match=r"\[oracle\]"):
        oracle_kcenter(inst, budget=1000)
    with pytest.raises(BudgetError):
        oracle_rank(BitMatrix.identity(8), 2, budget=1 << 10)
    with pytest.raises(BudgetError):
        oracle_closest_string([BitVec(12)], budget=100)


def test_boolean_rank_decision():
    a = BitMatrix.from_rows(["110", "011", "111"])
    assert not boolean_rank_at_most(a, 1)
    assert boolean_rank_at_most(a, 2)
    assert boolean_rank_at_most(BitMatrix.zeros(3, 3), 0)


def test_projective_oracle_two_lines():
    # two 1-dim subspaces cover {0, a, b} exactly
    vecs = [BitVec.from_str(s) for s in ("00000", "11000", "00111")]
    bases, cost = oracle_projective(vecs, 1, 2)
    assert cost == 0
    assert len(bases) == 2
    spans = set()
    for (s,) in bases:
        spans |= {0, s.word}
    assert {v.word for v in vecs} <= spans


def test_projective_k1_matches_rank():
    rng = np.random.default_rng(5)
    a = random_matrix(rng, 4, 4)
    _, pc = oracle_projective(a.columns(), 1, 1)
    assert pc == oracle_rank(a, 1)[1]
