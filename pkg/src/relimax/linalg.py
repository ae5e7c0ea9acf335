"""Dense linear solvers for the reduced failure-probability systems.

Systems here are desk-scale (order bounded by the state count), so both
solvers are straightforward eliminations: partial pivoting in float mode with
an explicit pivot tolerance, and fraction-free (Bareiss) elimination over
integers in exact mode.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from relimax.errors import SingularSystem


def gauss_solve(a: np.ndarray, rhs: np.ndarray, pivot_tol: float = 1e-12) -> np.ndarray:
    """Solve a x = rhs by Gaussian elimination with partial pivoting.

    Raises SingularSystem when the best available pivot has magnitude
    <= pivot_tol.
    """
    m = np.array(a, dtype=np.float64)
    x = np.array(rhs, dtype=np.float64)
    n = m.shape[0]
    if m.shape != (n, n) or x.shape != (n,):
        raise ValueError("shape mismatch")

    for k in range(n):
        p = k + int(np.argmax(np.abs(m[k:, k])))
        if abs(m[p, k]) <= pivot_tol:
            raise SingularSystem(
                f"pivot {m[p, k]!r} at column {k} is within tolerance {pivot_tol}",
                column=k, pivot=float(m[p, k]))
        if p != k:
            m[[k, p]] = m[[p, k]]
            x[[k, p]] = x[[p, k]]
        factors = m[k + 1:, k] / m[k, k]
        m[k + 1:, k:] -= np.outer(factors, m[k, k:])
        x[k + 1:] -= factors * x[k]

    for k in range(n - 1, -1, -1):
        x[k] = (x[k] - m[k, k + 1:] @ x[k + 1:]) / m[k, k]
    return x


def exact_solve(a: list, rhs: list) -> list:
    """Solve a x = rhs exactly over the rationals.

    Clears denominators per row, then runs one-step fraction-free (Bareiss)
    elimination on the integer augmented matrix; every division in the sweep
    is exact. Raises SingularSystem on a zero pivot column.
    """
    n = len(rhs)
    aug = []
    for i in range(n):
        row = [Fraction(v) for v in a[i]] + [Fraction(rhs[i])]
        scale = lcm(*(v.denominator for v in row)) if row else 1
        aug.append([int(v * scale) for v in row])

    prev = 1
    for k in range(n):
        pivot_row = next((r for r in range(k, n) if aug[r][k] != 0), None)
        if pivot_row is None:
            raise SingularSystem(f"exact elimination found a zero pivot column {k}",
                                 column=k)
        if pivot_row != k:
            aug[k], aug[pivot_row] = aug[pivot_row], aug[k]
        pivot = aug[k][k]
        for i in range(k + 1, n):
            head = aug[i][k]
            for j in range(k + 1, n + 1):
                aug[i][j] = (aug[i][j] * pivot - head * aug[k][j]) // prev
            aug[i][k] = 0
        prev = pivot

    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = Fraction(aug[i][n])
        for j in range(i + 1, n):
            acc -= aug[i][j] * x[j]
        x[i] = acc / aug[i][i]
    return x
