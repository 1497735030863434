import numpy as np
import pytest

from l1rank.simplex import SimplexError, simplex

linprog = pytest.importorskip("scipy.optimize").linprog


def slack_form(a_ub, b_ub, c):
    m, n = a_ub.shape
    a = np.hstack([a_ub, np.eye(m)])
    return a, b_ub, np.concatenate([c, np.zeros(m)]), list(range(n, n + m))


@pytest.mark.parametrize("seed", range(30))
def test_matches_scipy_on_bounded_lps(seed):
    rng = np.random.default_rng(seed)
    m, n = int(rng.integers(2, 7)), int(rng.integers(2, 7))
    a_ub = rng.integers(0, 5, size=(m, n)).astype(float) + 0.5
    b_ub = rng.integers(1, 10, size=m).astype(float)
    c = -rng.integers(1, 6, size=n).astype(float)
    a, b, cc, basis = slack_form(a_ub, b_ub, c)
    res = simplex(a, b, cc, basis)
    ref = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=[(0, None)] * n, method="highs")
    assert res.objective == pytest.approx(ref.fun, abs=1e-9)
    assert np.all(res.x >= -1e-12)
    assert np.allclose(a @ res.x, b, atol=1e-9)


def test_duals_certify_optimum():
    a_ub = np.array([[1.0, 1.0], [1.0, 3.0]])
    b_ub = np.array([4.0, 6.0])
    c = np.array([-1.0, -2.0])
    a, b, cc, basis = slack_form(a_ub, b_ub, c)
    res = simplex(a, b, cc, basis)
    assert res.objective == pytest.approx(-5.0)
    assert res.duals @ b == pytest.approx(res.objective)


def test_degenerate_problem_terminates():
    # several constraints tight at the origin
    a_ub = np.array([[1.0, -1.0], [-1.0, 1.0], [1.0, 1.0], [1.0, 0.0]])
    b_ub = np.array([0.0, 0.0, 2.0, 1.0])
    a, b, cc, basis = slack_form(a_ub, b_ub, np.array([-1.0, -1.0]))
    res = simplex(a, b, cc, basis)
    assert res.objective == pytest.approx(-2.0)


def test_unbounded_raises():
    a = np.array([[1.0, -1.0, 1.0]])
    with pytest.raises(SimplexError):
        simplex(a, np.array([1.0]), np.array([-1.0, 0.0, 0.0]), [2])
