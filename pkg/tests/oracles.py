"""Independent reference computations used only by tests."""

import numpy as np
from scipy.optimize import linear_sum_assignment, linprog


def scipy_optimum(W) -> int:
    a = np.array(W.w)
    r, c = linear_sum_assignment(a, maximize=W.sense.value == "maximize")
    return int(a[r, c].sum())


def accepting_dual_exists(W, pairs, optimum) -> bool:
    """Search for (u, v) with u_i + v_j <= w_ij, tight on ``pairs`` and sum = optimum."""
    n, m = W.rows, W.cols
    A_ub, b_ub = [], []
    for i in range(n):
        for j in range(m):
            row = np.zeros(n + m)
            row[i] = row[n + j] = 1
            A_ub.append(row)
            b_ub.append(W.w[i][j])
    A_eq, b_eq = [np.r_[np.ones(n), np.ones(m)]], [optimum]
    for i, j in pairs:
        row = np.zeros(n + m)
        row[i] = row[n + j] = 1
        A_eq.append(row)
        b_eq.append(W.w[i][j])
    res = linprog(np.zeros(n + m), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=(None, None), method="highs")
    return res.status == 0
