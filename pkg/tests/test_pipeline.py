
import numpy as np
import pytest

from conftest import random_instance, random_matrix, random_vectors
from l1rank.cli import planted_matrix
from l1rank.encode import encode_gf2_rank, projective_cost
from l1rank.errors import BudgetError, ParameterError
from l1rank.gf2core import BitMatrix, BitVec, boolean_matmul, gf2_rank, l1_distance
from l1rank.model import KCenterInstance, Relation
from l1rank.oracle import (
    boolean_rank_at_most,
    oracle_closest_string,
    oracle_kcenter,
    oracle_projective,
    oracle_rank,
)
from l1rank.pipeline import (
    kcenter_lower_bound,
    solve_boolean_rank,
    solve_closest_string,
    solve_kcenter,
    solve_projective,
    solve_rank,
)
from l1rank.report import Budgets

EXACT = Budgets(mode="exact", max_sketch_dim=8, family=1 << 16, exhaustive=1 << 20)
SMALL = Budgets(family=64, guess=32)


def identity(n):
    return BitMatrix.from_rows([BitVec(n, 1 << i) for i in range(n)])


def test_opt_zero_via_shortcut():
    vecs = tuple(BitVec.from_str(s) for s in ["0101", "1100", "0101"])
    inst = KCenterInstance(vecs, 2, (Relation.full(2),) * 4)
    rep = solve_kcenter(inst, 0.5, seed=1)
    assert rep.cost == 0
    assert rep.provenance["family"]["shortcut"]


def test_shortcut_respects_relations():
    # two distinct vectors but center 0 is forced to zero: optimum is not 0
    vecs = tuple(BitVec.from_str(s) for s in ["11", "01"])
    rel = Relation.from_strings(["00", "01"])
    inst = KCenterInstance(vecs, 2, (rel, rel))
    rep = solve_kcenter(inst, 1.0, seed=0, budgets=SMALL)
    assert rep.cost == oracle_kcenter(inst).cost == 1


@pytest.mark.parametrize("seed", range(8))
def test_low_rank_input_costs_zero(seed):
    a, _ = planted_matrix(6, 7, 2, 0, seed)
    b, cost, rep = solve_rank(a, 2, 0.5, seed=seed, budgets=SMALL)
    assert cost == 0 and b == a
    assert rep.provenance["rank_check"]


def test_identity_r1():
    a = identity(4)
    assert oracle_rank(a, 1)[1] == 1
    hits = 0
    for seed in range(10):
        b, cost, rep = solve_rank(a, 1, 1.0, seed=seed, budgets=EXACT)
        assert cost in (1, 2) and gf2_rank(b) <= 1
        assert cost == l1_distance(a, b)
        hits += cost == 1
    assert hits >= 8


def test_k1_full_relations_within_two_opt():
    good = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        inst = random_instance(rng, int(rng.integers(1, 9)), int(rng.integers(1, 11)), 1, full=True)
        rep = solve_kcenter(inst, 1.0, seed=seed, budgets=SMALL)
        opt = oracle_kcenter(inst).cost
        assert rep.cost >= opt
        good += rep.cost <= 2 * opt
    assert good >= 90


@pytest.mark.parametrize("seed", range(25))
def test_never_better_than_oracle(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, int(rng.integers(1, 7)), int(rng.integers(1, 7)), int(rng.integers(1, 4)))
    rep = solve_kcenter(inst, 1.0, seed=seed, budgets=SMALL)
    assert rep.cost >= oracle_kcenter(inst).cost
    assert rep.lower_bound <= oracle_kcenter(inst).cost


@pytest.mark.parametrize("seed", range(20))
def test_lower_bound_is_sound(seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, 7, 6, int(rng.integers(1, 4)))
    lower, kind = kcenter_lower_bound(inst)
    assert lower <= oracle_kcenter(inst).cost
    assert kind in ("lp", "pigeonhole", "trivial")


def test_planted_rank_mostly_within_bound():
    # Monte Carlo: the sketch family is a heuristic at this size, so a few misses are expected
    s, eps = 1, 0.5
    costs = [
        solve_rank(planted_matrix(8, 10, 1, s, seed)[0], 1, eps, seed=seed, budgets=Budgets(family=256, guess=64))[1]
        for seed in range(20)
    ]
    assert sum(c <= (1 + eps) * s for c in costs) >= 14
    assert max(costs) <= 2 * s


def test_rank_zero_and_full_rank():
    rng = np.random.default_rng(2)
    a = random_matrix(rng, 3, 5)
    b, cost, _ = solve_rank(a, 3, 0.5, seed=0, budgets=SMALL)
    assert cost == 0 and b == a


@pytest.mark.parametrize("seed", range(6))
def test_boolean_rank(seed):
    rng = np.random.default_rng(seed)
    a = random_matrix(rng, 4, 5)
    fac, cost, rep = solve_boolean_rank(a, 2, 1.0, seed=seed, budgets=SMALL)
    assert boolean_matmul(fac.u, fac.v) == fac.b
    assert boolean_rank_at_most(fac.b, 2)
    assert cost == l1_distance(a, fac.b)
    assert rep.provenance["boolean_rank_verified"]


def test_boolean_rank_exact_input():
    u = BitMatrix.from_rows([BitVec.from_str(s) for s in ["10", "01", "11"]])
    v = BitMatrix.from_rows([BitVec.from_str(s) for s in ["1100", "0110"]])
    a = boolean_matmul(u, v)
    _, cost, _ = solve_boolean_rank(a, 2, 0.5, seed=0, budgets=SMALL)
    assert cost == 0


def test_projective_single_subspace_cost_zero():
    basis = [BitVec.from_str("10110"), BitVec.from_str("01011")]
    vecs = [BitVec(5, 0), basis[0], basis[1], BitVec(5, basis[0].word ^ basis[1].word)]
    subs, cost, rep = solve_projective(vecs, 2, 1, 0.5, seed=0, budgets=SMALL)
    assert cost == 0
    assert all(s.dimension <= 2 for s in subs)


def test_projective_k1_matches_rank():
    rng = np.random.default_rng(4)
    a = random_matrix(rng, 5, 6)
    cols = list(a.columns())
    _, pcost, _ = solve_projective(cols, 1, 1, 1.0, seed=3, budgets=EXACT)
    _, rcost, _ = solve_rank(a, 1, 1.0, seed=3, budgets=EXACT)
    assert pcost == rcost


@pytest.mark.parametrize("seed", range(4))
def test_projective_two_subspaces_vs_oracle(seed):
    rng = np.random.default_rng(seed)
    u, w = random_vectors(rng, 2, 5)
    vecs = [BitVec(5, 0), u, w, BitVec(5, u.word ^ 1), BitVec(5, w.word ^ 2)]
    subs, cost, _ = solve_projective(vecs, 1, 2, 1.0, seed=seed, budgets=Budgets(family=128, guess=64))
    _, opt = oracle_projective(vecs, 1, 2)
    assert opt <= cost <= 2 * opt
    assert cost == projective_cost(vecs, subs)


def test_projective_cap():
    with pytest.raises(BudgetError):
        solve_projective([BitVec(3, 1)], 3, 3, 0.5, max_tuples=64)


@pytest.mark.parametrize("seed", range(10))
def test_closest_string(seed):
    rng = np.random.default_rng(seed)
    strings = random_vectors(rng, int(rng.integers(1, 7)), int(rng.integers(1, 11)))
    center, cost, rep = solve_closest_string(strings, 0.5, seed=seed)
    opt = oracle_closest_string(strings)[1]
    assert opt <= cost <= 1.5 * opt
    assert max((center.word ^ s.word).bit_count() for s in strings) == cost
    assert rep.provenance["string_cost"] == cost


def test_threads_do_not_change_result():
    rng = np.random.default_rng(5)
    inst = random_instance(rng, 8, 8, 2)
    one = solve_kcenter(inst, 1.0, seed=4, budgets=Budgets(family=96, guess=16))
    many = solve_kcenter(inst, 1.0, seed=4, budgets=Budgets(family=96, guess=16, threads=4))
    a, b = one.to_dict(), many.to_dict()
    for d in (a, b):
        d.pop("timing_ms", None)
        d.pop("budgets", None)
    assert a == b


def test_deterministic():
    rng = np.random.default_rng(6)
    a = random_matrix(rng, 6, 6)
    r1 = solve_rank(a, 1, 0.5, seed=9, budgets=SMALL)
    r2 = solve_rank(a, 1, 0.5, seed=9, budgets=SMALL)
    assert r1[0] == r2[0] and r1[1] == r2[1]
    assert r1[2].provenance == r2[2].provenance


def test_eps_range():
    inst = encode_gf2_rank(identity(3), 1)
    with pytest.raises(ParameterError):
        solve_kcenter(inst, 0.0)
    with pytest.raises(ParameterError):
        solve_kcenter(inst, 1.2)
    rep = solve_kcenter(inst, 1.0, budgets=SMALL)
    assert any("eps = 1" in c for c in rep.caveats)


def test_exact_mode_overflow_raises():
    inst = encode_gf2_rank(identity(4), 2)
    with pytest.raises(BudgetError):
        solve_kcenter(inst, 0.5, budgets=Budgets(mode="exact", family=16))
