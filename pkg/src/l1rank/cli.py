"""Command-line front end.

Exit codes: 0 on success, 1 on bad input (parse or parameter errors), 2
when a stage budget is exceeded.

Matrix files hold an ``m n`` header followed by ``m`` rows of 0/1
characters.  ``rank`` and ``boolean-rank`` approximate the whole matrix
(its columns are the vectors); ``projective`` and ``closest-string``
treat each row as one vector.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import tempfile
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from ._rng import fresh_seed, substream
from .encode import (
    BooleanFactorization,
    decode_boolean_rank,
    decode_closest_string,
    decode_gf2_rank,
    decode_projective,
    encode_boolean_rank,
    encode_closest_string,
    encode_gf2_rank,
    encode_projective,
)
from .errors import BudgetError, L1RankError, ParseError
from .gf2core import BitMatrix, BitVec, format_matrix, gf2_rank, l1_distance, read_matrix
from .model import (
    CenterTuple,
    PartitionInstance,
    dump_instance,
    read_instance,
)
from .oracle import oracle_closest_string, oracle_kcenter, oracle_partition, oracle_projective, oracle_rank
from .partition_solver import solve_partition
from .pipeline import solve_boolean_rank, solve_closest_string, solve_kcenter, solve_projective, solve_rank
from .report import Budgets

PROBLEMS = ("rank", "boolean-rank", "kcenter", "projective", "closest-string")
BENCH_SCHEMA = "# l1rank-bench schema=1"
BENCH_COLUMNS = (
    "instance", "problem", "eps", "seed", "rep", "cost", "oracle_cost", "lp_lower_bound",
    "ratio", "wall_ms", "budget_family", "budget_guess", "budget_exhaustive", "lp_repeats", "mode",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_budget_flags(p: argparse.ArgumentParser) -> None:
    d = Budgets()
    p.add_argument("--seed", type=int, default=None, help="master seed (drawn and printed if omitted)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget-family", type=int, default=d.family)
    p.add_argument("--budget-guess", type=int, default=d.guess)
    p.add_argument("--budget-exhaustive", type=int, default=d.exhaustive)
    p.add_argument("--lp-repeats", type=int, default=None)
    p.add_argument("--mode", choices=("exact", "sampled"), default=d.mode)
    p.add_argument("--max-sketch-dim", type=int, default=d.max_sketch_dim)
    p.add_argument("--timing", action="store_true", help="include wall-clock fields")


def _budgets(args) -> Budgets:
    return Budgets(
        family=args.budget_family,
        guess=args.budget_guess,
        exhaustive=args.budget_exhaustive,
        lp_repeats=args.lp_repeats,
        mode=args.mode,
        max_sketch_dim=args.max_sketch_dim,
        threads=args.threads,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="l1rank", description="Column-sum low-rank approximation over GF(2).")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ps = sub.add_parser("solve", help="run the approximation pipeline")
    ps.add_argument("problem", choices=PROBLEMS)
    ps.add_argument("--in", dest="input", required=True)
    ps.add_argument("--out", default=None)
    ps.add_argument("--r", type=int, default=1)
    ps.add_argument("--k", type=int, default=1)
    ps.add_argument("--eps", type=float, default=0.5)
    ps.add_argument("--oracle-check", action="store_true")
    _add_budget_flags(ps)

    pg = sub.add_parser("generate", help="planted low-rank matrix with bounded flips")
    pg.add_argument("--m", type=int, required=True)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--r", type=int, required=True)
    pg.add_argument("--s", type=int, required=True, help="bit flips per column")
    pg.add_argument("--seed", type=int, default=None)
    pg.add_argument("--out", required=True)

    pb = sub.add_parser("bench", help="run a benchmark grid from a JSON config")
    pb.add_argument("--config", required=True)
    pb.add_argument("--out", required=True, help="CSV path")
    pb.add_argument("--summary", default=None, help="summary JSON path")
    pb.add_argument("--timing", action="store_true")

    pe = sub.add_parser("encode", help="matrix or vectors to an instance JSON")
    pe.add_argument("problem", choices=("rank", "boolean-rank", "projective", "closest-string"))
    pe.add_argument("--in", dest="input", required=True)
    pe.add_argument("--out", default=None)
    pe.add_argument("--r", type=int, default=1)
    pe.add_argument("--k", type=int, default=1)

    pd = sub.add_parser("decode", help="centers from a solve report back to the problem's output")
    pd.add_argument("problem", choices=("rank", "boolean-rank", "projective", "closest-string"))
    pd.add_argument("--in", dest="input", required=True, help="matrix file")
    pd.add_argument("--report", required=True, help="report JSON with a 'centers' field")
    pd.add_argument("--out", default=None)
    pd.add_argument("--r", type=int, default=1)
    pd.add_argument("--k", type=int, default=1)
    return parser


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def _rows(a: BitMatrix) -> list[BitVec]:
    return [a.row(i) for i in range(a.nrows)]


def _ratio(cost: int, opt: int) -> float | None:
    if opt == 0:
        return 1.0 if cost == 0 else None
    return cost / opt


def run_solve(problem: str, args, budgets: Budgets, seed: int) -> dict[str, Any]:
    """Solve one problem and return the JSON payload (shared by solve and bench)."""
    out: dict[str, Any]
    if problem == "kcenter":
        inst = read_instance(args.input)
        if isinstance(inst, PartitionInstance):
            rep = solve_partition(
                inst, args.eps, seed, budgets.guess, exhaustive_budget=budgets.exhaustive,
                lp_repeats=budgets.lp_repeats, max_lp_repeats=budgets.max_lp_repeats,
            )
        else:
            rep = solve_kcenter(inst, args.eps, seed, budgets)
        out = rep.to_dict(args.timing)
        if args.oracle_check:
            orc = oracle_partition(inst) if isinstance(inst, PartitionInstance) else oracle_kcenter(inst)
            out["oracle_cost"] = orc.cost
        return out
    a = read_matrix(args.input)
    if problem == "rank":
        b, cost, rep = solve_rank(a, args.r, args.eps, seed, budgets)
        out = rep.to_dict(args.timing)
        out["matrix"] = [row.to_str() for row in _rows(b)]
        out["rank_check"] = gf2_rank(b) <= args.r
        if args.oracle_check:
            out["oracle_cost"] = oracle_rank(a, args.r)[1]
    elif problem == "boolean-rank":
        fac, cost, rep = solve_boolean_rank(a, args.r, args.eps, seed, budgets)
        out = rep.to_dict(args.timing)
        out["matrix"] = [row.to_str() for row in _rows(fac.b)]
        out["u"] = [row.to_str() for row in _rows(fac.u)]
        out["v"] = [row.to_str() for row in _rows(fac.v)]
        out["rank_check"] = fac.u.ncols <= args.r
    elif problem == "projective":
        subs, cost, rep = solve_projective(_rows(a), args.r, args.k, args.eps, seed, budgets)
        out = rep.to_dict(args.timing)
        out["subspaces"] = [[v.to_str() for v in s.basis] for s in subs]
        if args.oracle_check:
            out["oracle_cost"] = oracle_projective(_rows(a), args.r, args.k)[1]
    else:
        center, cost, rep = solve_closest_string(_rows(a), args.eps, seed, budgets)
        out = rep.to_dict(args.timing)
        out["string"] = center.to_str()
        if args.oracle_check:
            out["oracle_cost"] = oracle_closest_string(_rows(a))[1]
    out["cost"] = cost
    return out


def cmd_solve(args) -> int:
    seed = _seed(args)
    out = run_solve(args.problem, args, _budgets(args), seed)
    if "oracle_cost" in out:
        out["ratio"] = _ratio(out["cost"], out["oracle_cost"])
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


def planted_matrix(m: int, n: int, r: int, s: int, seed: int) -> tuple[BitMatrix, BitMatrix]:
    """``(A, B)`` with ``gf2_rank(B) <= r`` and exactly ``min(s, m)`` flips per column."""
    rng = substream(seed, "generate")
    u = rng.integers(0, 2, size=(m, r), dtype=np.uint8)
    v = rng.integers(0, 2, size=(r, n), dtype=np.uint8)
    b = (u.astype(np.int64) @ v.astype(np.int64)) % 2
    a = b.copy()
    for j in range(n):
        flips = rng.choice(m, size=min(s, m), replace=False)
        a[flips, j] ^= 1
    return BitMatrix.from_array(a), BitMatrix.from_array(b)


def cmd_generate(args) -> int:
    if min(args.m, args.n) < 1 or args.r < 0 or args.s < 0:
        raise L1RankError("m and n must be positive; r and s non-negative")
    seed = _seed(args)
    a, b = planted_matrix(args.m, args.n, args.r, args.s, seed)
    Path(args.out).write_text(format_matrix(a), encoding="utf-8")
    side = {
        "m": args.m, "n": args.n, "r": args.r, "s": args.s, "seed": seed,
        "planted_bound": min(args.s, args.m),
        "planted": [row.to_str() for row in _rows(b)],
    }
    Path(args.out + ".json").write_text(json.dumps(side, indent=1) + "\n", encoding="utf-8")
    return 0


def _bench_instance(entry: dict[str, Any], base: Path, tmp: Path) -> str:
    if "path" in entry:
        return str((base / entry["path"]).resolve())
    if "generate" in entry:
        g = entry["generate"]
        a, _ = planted_matrix(g["m"], g["n"], g["r"], g["s"], g.get("seed", 0))
        path = tmp / f"{entry['name']}.mat"
        path.write_text(format_matrix(a), encoding="utf-8")
        return str(path)
    raise ParseError(f"instance {entry.get('name')!r}: needs 'path' or 'generate'")


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def cmd_bench(args) -> int:
    """Config keys: instances (name, problem, path | generate, r, k), eps, seeds,
    repetitions, oracle, budgets."""
    cfg_path = Path(args.config)
    try:
        cfg = json.loads(cfg_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"{cfg_path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(cfg, dict):
        raise ParseError(f"{cfg_path}: config must be a JSON object")
    allowed = {"instances", "eps", "seeds", "repetitions", "oracle", "budgets"}
    unknown = set(cfg) - allowed
    if unknown:
        raise ParseError(f"{cfg_path}: unknown config keys {sorted(unknown)}")
    instances = cfg.get("instances", [])
    eps_list = cfg.get("eps", [0.5])
    seeds = cfg.get("seeds", [0])
    reps = int(cfg.get("repetitions", 1))
    with_oracle = bool(cfg.get("oracle", False))
    try:
        budgets = Budgets(**cfg.get("budgets", {}))
    except TypeError as exc:
        raise ParseError(f"{cfg_path}: bad budgets ({exc})") from None
    if reps < 1 or not isinstance(instances, list):
        raise ParseError(f"{cfg_path}: repetitions must be >= 1 and instances a list")

    buf = io.StringIO()
    buf.write(BENCH_SCHEMA + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    ratios, eps_ok, violations = [], 0, 0
    with tempfile.TemporaryDirectory() as tmpdir:
        for entry in instances:
            problem = entry.get("problem", "rank")
            if problem not in PROBLEMS:
                raise ParseError(f"instance {entry.get('name')!r}: unknown problem {problem!r}")
            path = _bench_instance(entry, cfg_path.parent, Path(tmpdir))
            for eps in eps_list:
                for seed in seeds:
                    for rep_i in range(reps):
                        run_seed = int(seed) + 1_000_003 * rep_i
                        ns = argparse.Namespace(
                            input=path, r=entry.get("r", 1), k=entry.get("k", 1), eps=eps,
                            oracle_check=with_oracle, timing=True,
                        )
                        out = run_solve(problem, ns, budgets, run_seed)
                        opt = out.get("oracle_cost")
                        ratio = _ratio(out["cost"], opt) if opt is not None else None
                        if ratio is not None:
                            ratios.append(ratio)
                            eps_ok += ratio <= 1 + eps
                            violations += ratio < 1
                        lb = out["lower_bound"]["float"] if out["lower_bound"] else None
                        writer.writerow([
                            entry.get("name", Path(path).stem), problem, eps, run_seed, rep_i, out["cost"],
                            "" if opt is None else opt, _fmt(lb), _fmt(ratio),
                            _fmt(out.get("timing_ms")) if args.timing else "",
                            budgets.family, budgets.guess, budgets.exhaustive,
                            "" if budgets.lp_repeats is None else budgets.lp_repeats, budgets.mode,
                        ])
    Path(args.out).write_text(buf.getvalue(), encoding="utf-8")
    summary = {
        "rows": buf.getvalue().count("\n") - 2,
        "rows_with_oracle": len(ratios),
        "mean_ratio": sum(ratios) / len(ratios) if ratios else None,
        "max_ratio": max(ratios) if ratios else None,
        "fraction_within_1_plus_eps": eps_ok / len(ratios) if ratios else None,
        "ratio_below_one": violations,
    }
    text = json.dumps(summary, indent=1) + "\n"
    if args.summary:
        Path(args.summary).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _encode(problem: str, a: BitMatrix, r: int, k: int):
    if problem == "rank":
        return encode_gf2_rank(a, r)
    if problem == "boolean-rank":
        return encode_boolean_rank(a, r)
    if problem == "projective":
        return encode_projective(_rows(a), r, k)
    return encode_closest_string(_rows(a))


def cmd_encode(args) -> int:
    a = read_matrix(args.input)
    inst = _encode(args.problem, a, args.r, args.k)
    _write(dump_instance(inst, provenance={"problem": args.problem, "r": args.r, "k": args.k}), args.out)
    return 0


def cmd_decode(args) -> int:
    a = read_matrix(args.input)
    try:
        data = json.loads(Path(args.report).read_text(encoding="utf-8"))
        centers = CenterTuple.from_strings(data["centers"])
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"{args.report}: cannot read centers ({exc})") from None
    if args.problem == "rank":
        b = decode_gf2_rank(a, args.r, centers)
        out = {"matrix": [row.to_str() for row in _rows(b)], "cost": l1_distance(a, b), "rank": gf2_rank(b)}
    elif args.problem == "boolean-rank":
        fac: BooleanFactorization = decode_boolean_rank(a, args.r, centers)
        out = {
            "matrix": [row.to_str() for row in _rows(fac.b)],
            "u": [row.to_str() for row in _rows(fac.u)],
            "v": [row.to_str() for row in _rows(fac.v)],
            "cost": l1_distance(a, fac.b),
        }
    elif args.problem == "projective":
        subs = decode_projective(args.r, args.k, centers)
        out = {"subspaces": [[v.to_str() for v in s.basis] for s in subs]}
    else:
        out = {"string": decode_closest_string(centers, a.ncols).to_str()}
    _write(json.dumps(out, indent=1) + "\n", args.out)
    return 0


COMMANDS = {
    "solve": cmd_solve,
    "generate": cmd_generate,
    "bench": cmd_bench,
    "encode": cmd_encode,
    "decode": cmd_decode,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 2
    except (L1RankError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
