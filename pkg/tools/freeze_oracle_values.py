"""Regenerate tests/fixtures/oracle_values.json from the brute-force oracles.

Run once; the committed values are the reference the oracle tests compare
against, so a regression in any oracle shows up as a changed number.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from l1rank.gf2core import BitMatrix, BitVec
from l1rank.model import KCenterInstance, Relation, instance_to_dict
from l1rank.oracle import oracle_closest_string, oracle_kcenter, oracle_partition, oracle_rank

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "oracle_values.json"


def main() -> int:
    rng = np.random.default_rng(20240611)
    rank_cases = []
    for _ in range(12):
        m, n, r = int(rng.integers(2, 6)), int(rng.integers(2, 6)), int(rng.integers(1, 3))
        a = BitMatrix.from_array(rng.integers(0, 2, size=(m, n)))
        _, cost = oracle_rank(a, r)
        rank_cases.append({"rows": [a.row(i).to_str() for i in range(m)], "r": r, "cost": cost})

    kcenter_cases = []
    for _ in range(10):
        n, m, k = int(rng.integers(2, 7)), int(rng.integers(2, 8)), int(rng.integers(1, 3))
        vecs = tuple(BitVec(m, int(w)) for w in rng.integers(0, 1 << m, size=n))
        rels = []
        for _ in range(m):
            size = int(rng.integers(1, (1 << k) + 1))
            rels.append(Relation(k, rng.choice(1 << k, size=size, replace=False).tolist()))
        inst = KCenterInstance(vecs, k, tuple(rels))
        part = inst.with_partition(rng.integers(0, k, size=n).tolist())
        kcenter_cases.append({
            "instance": instance_to_dict(part),
            "kcenter_cost": oracle_kcenter(inst).cost,
            "partition_cost": oracle_partition(part).cost,
        })

    cs_cases = []
    for _ in range(10):
        n, m = int(rng.integers(2, 7)), int(rng.integers(2, 11))
        strings = [BitVec(m, int(w)) for w in rng.integers(0, 1 << m, size=n)]
        _, cost = oracle_closest_string(strings)
        cs_cases.append({"strings": [s.to_str() for s in strings], "cost": cost})

    data = {"rank": rank_cases, "kcenter": kcenter_cases, "closest_string": cs_cases}
    OUT.write_text(json.dumps(data, indent=1) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
