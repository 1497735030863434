"""Dense revised simplex for small standard-form LPs.

    minimize  c @ x   subject to  A @ x == b,  x >= 0

The caller supplies a primal-feasible starting basis, so there is no
phase one.  Pricing is Dantzig's rule; after a run of degenerate pivots
it switches to Bland's rule, which cannot cycle.  The basis is
refactorized at every iteration (the LPs here have a few dozen rows), so
there is no drift to manage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9


class SimplexError(RuntimeError):
    pass


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    basis: list[int]
    duals: np.ndarray
    iterations: int


def simplex(
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    basis: list[int],
    *,
    tol: float = TOL,
    max_iter: int = 50_000,
    degenerate_switch: int = 20,
) -> SimplexResult:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    rows, cols = a.shape
    basis = list(basis)
    if len(basis) != rows:
        raise SimplexError("basis size differs from the number of rows")

    bland = False
    degenerate_run = 0
    for it in range(max_iter):
        bmat = a[:, basis]
        try:
            xb = np.linalg.solve(bmat, b)
            duals = np.linalg.solve(bmat.T, c[basis])
        except np.linalg.LinAlgError as exc:
            raise SimplexError("singular basis") from exc
        if (xb < -1e-7).any():
            raise SimplexError("basis lost primal feasibility")
        reduced = c - duals @ a
        reduced[basis] = 0.0
        candidates = np.flatnonzero(reduced < -tol)
        if candidates.size == 0:
            x = np.zeros(cols)
            x[basis] = np.clip(xb, 0.0, None)
            return SimplexResult(x, float(c @ x), basis, duals, it)
        if bland:
            entering = int(candidates[0])
        else:
            entering = int(candidates[np.argmin(reduced[candidates])])
        direction = np.linalg.solve(bmat, a[:, entering])
        pos = direction > tol
        if not pos.any():
            raise SimplexError("LP is unbounded")
        ratios = np.full(rows, np.inf)
        ratios[pos] = np.clip(xb[pos], 0.0, None) / direction[pos]
        step = ratios.min()
        ties = np.flatnonzero(ratios <= step + tol)
        # Bland: among tied rows leave the smallest variable index
        leave = int(min(ties, key=lambda i: basis[i]))
        basis[leave] = entering
        if step <= tol:
            degenerate_run += 1
            if degenerate_run >= degenerate_switch:
                bland = True
        else:
            degenerate_run = 0
    raise SimplexError(f"no convergence in {max_iter} iterations")
