"""Independent reference solvers used only by the tests."""

import numpy as np
from scipy.optimize import linprog


def sdp_sup(spec, c):
    """``sup c.x`` over ``max_i ||sum_j x_j B_ij|| <= 1`` as a semidefinite program."""
    import cvxpy as cp

    m = spec.param.dim
    x = cp.Variable(m)
    cons = []
    for b in spec.terms:
        re = np.real(b)
        im = np.imag(b)
        r, k = b.shape[1:]
        mre = sum(x[j] * re[j] for j in range(m) if np.any(re[j]))
        mim = sum(x[j] * im[j] for j in range(m) if np.any(im[j]))
        mre = mre if not isinstance(mre, int) else np.zeros((r, k))
        mim = mim if not isinstance(mim, int) else np.zeros((r, k))
        emb = cp.bmat([[mre, -mim], [mim, mre]])
        big = cp.bmat([[np.eye(2 * r), emb], [emb.T, np.eye(2 * k)]])
        cons.append(0.5 * (big + big.T) >> 0)
    prob = cp.Problem(cp.Maximize(c @ x), cons)
    prob.solve(solver=cp.CLARABEL)
    return float(prob.value)


def circle_lipschitz_lp(theta0, theta1, n=720):
    """Discretized Kantorovich dual on an n-point circle: max f(theta1) - f(theta0), |f_i - f_{i+1}| <= h."""
    h = 2 * np.pi / n
    i0 = int(round(theta0 / h)) % n
    i1 = int(round(theta1 / h)) % n
    rows, rhs = [], []
    for i in range(n):
        j = (i + 1) % n
        r = np.zeros(n)
        r[i], r[j] = 1.0, -1.0
        rows.append(r)
        rows.append(-r)
        rhs += [h, h]
    c = np.zeros(n)
    c[i1] -= 1.0
    c[i0] += 1.0
    bounds = [(None, None)] * n
    bounds[i0] = (0.0, 0.0)
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    return float(-res.fun)
