"""Gaussian elimination with partial pivoting; the independent reference the tests compare against."""

import numpy as np


def solve_by_elimination(a, b) -> np.ndarray:
    m = np.array(a, dtype=np.float64)
    rhs = np.array(b, dtype=np.float64)
    n = m.shape[0]
    for k in range(n):
        pivot = k + int(np.argmax(np.abs(m[k:, k])))
        if m[pivot, k] == 0.0:
            raise ZeroDivisionError(f"zero pivot in column {k}")
        if pivot != k:
            m[[k, pivot]] = m[[pivot, k]]
            rhs[[k, pivot]] = rhs[[pivot, k]]
        factors = m[k + 1 :, k] / m[k, k]
        m[k + 1 :, k:] -= np.outer(factors, m[k, k:])
        rhs[k + 1 :] -= factors * rhs[k]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (rhs[i] - m[i, i + 1 :] @ x[i + 1 :]) / m[i, i]
    return x
