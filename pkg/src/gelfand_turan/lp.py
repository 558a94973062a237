"""Dense two-phase simplex with Bland's rule, in floating point or exact rationals.

Problems are stated as

    maximize c.x  subject to  A_eq x = b_eq,  A_le x <= b_le,  x >= lower

and solved on a full tableau.  In rational mode the tableau holds
``fractions.Fraction`` objects and every comparison is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

import numpy as np

Mode = Literal["float", "rational"]

FLOAT_PIVOT_EPS = 1e-11
FLOAT_FEAS_EPS = 1e-9
FLOAT_REL_PIVOT = 1e-7


@dataclass
class LPProblem:
    c: np.ndarray
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    A_le: np.ndarray | None = None
    b_le: np.ndarray | None = None
    lower: np.ndarray | None = None

    def __post_init__(self):
        self.c = _vec(self.c)
        n = len(self.c)
        self.A_eq, self.b_eq = _block(self.A_eq, self.b_eq, n, "equality")
        self.A_le, self.b_le = _block(self.A_le, self.b_le, n, "inequality")
        self.lower = np.zeros(n, dtype=self.c.dtype) if self.lower is None else _vec(self.lower)
        if len(self.lower) != n:
            raise ValueError("lower bounds must match the number of variables")

    @property
    def n_vars(self) -> int:
        return len(self.c)


def _vec(v) -> np.ndarray:
    v = np.asarray(v)
    if v.dtype != object:
        v = v.astype(float)
    return v.ravel()


def _block(A, b, n, what):
    if A is None or len(A) == 0:
        if b is not None and len(b):
            raise ValueError(f"{what} right-hand side given without a matrix")
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A)
    if A.dtype != object:
        A = A.astype(float)
    A = A.reshape(-1, n) if A.ndim == 1 and A.size == n else A
    b = _vec(b)
    if A.ndim != 2 or A.shape[1] != n:
        raise ValueError(f"{what} matrix has shape {A.shape}, expected (*, {n})")
    if A.shape[0] != len(b):
        raise ValueError(f"{what} matrix has {A.shape[0]} rows but {len(b)} right-hand sides")
    return A, b


@dataclass
class LPSolution:
    status: Literal["optimal", "infeasible", "unbounded"]
    x: np.ndarray | None = None
    dual_eq: np.ndarray | None = None
    dual_le: np.ndarray | None = None
    objective_value: object = None
    mode: Mode = "float"
    iterations: int = 0
    basis: tuple[int, ...] = field(default=(), repr=False)

    @property
    def dual(self) -> np.ndarray | None:
        if self.dual_eq is None:
            return None
        return np.concatenate([self.dual_eq, self.dual_le])


def _to_rational(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    flat = out.reshape(-1)
    for i, x in enumerate(a.reshape(-1)):
        flat[i] = x if isinstance(x, Fraction) else Fraction(x)
    return out


def _convert(p: LPProblem, mode: Mode):
    arrays = [p.c, p.A_eq, p.b_eq, p.A_le, p.b_le, p.lower]
    if mode == "rational":
        return [_to_rational(a) for a in arrays]
    return [np.asarray(a, dtype=float) for a in arrays]


def solve_lp(p: LPProblem, mode: Mode = "float") -> LPSolution:
    """Solve with Bland's rule; infeasibility and unboundedness are statuses, not errors."""
    if mode not in ("float", "rational"):
        raise ValueError(f"unknown mode {mode!r}")
    c, A_eq, b_eq, A_le, b_le, lower = _convert(p, mode)
    exact = mode == "rational"
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    eps = zero if exact else FLOAT_PIVOT_EPS
    n, k_eq, k_le = len(c), len(b_eq), len(b_le)
    m = k_eq + k_le

    A = np.concatenate([A_eq, A_le]) if m else np.zeros((0, n), dtype=c.dtype)
    b = np.concatenate([b_eq, b_le]) - (A @ lower if m else np.zeros(0))
    sign = np.array([-1 if x < 0 else 1 for x in b], dtype=np.int64)
    # columns: n originals, k_le slacks, then one artificial per row lacking a usable slack
    art_rows = [i for i in range(m) if i < k_eq or sign[i] < 0]
    n_slack, n_art = k_le, len(art_rows)
    width = n + n_slack + n_art
    T = np.full((m, width + 1), zero, dtype=object if exact else float)
    T[:, :n] = A * sign[:, None]
    for r in range(k_le):
        T[k_eq + r, n + r] = one * sign[k_eq + r]
    init_col = np.empty(m, dtype=np.int64)
    for r in range(k_le):
        init_col[k_eq + r] = n + r
    for j, i in enumerate(art_rows):
        T[i, n + n_slack + j] = one
        init_col[i] = n + n_slack + j
    T[:, -1] = b * sign
    # float mode refactorizes from the original tableau after each pivot so errors do not accumulate
    T0 = None if exact else T.copy()
    basis = list(init_col)
    rows = list(range(m))  # original row of each tableau row
    art_cols = set(range(n + n_slack, width))
    iterations = 0

    if n_art:
        cost1 = np.full(width, zero, dtype=T.dtype)
        for j in art_cols:
            cost1[j] = -one
        status, it = _simplex(T, basis, cost1, eps, set(range(width)), T0)
        iterations += it
        infeas = -sum((cost1[j] * T[i, -1] for i, j in enumerate(basis)), zero)
        tol = zero if exact else FLOAT_FEAS_EPS * (1 + float(np.abs(b).max(initial=0.0)))
        if infeas > tol:
            return LPSolution("infeasible", mode=mode, iterations=iterations)
        # drive remaining artificials out of the basis, dropping redundant rows
        i = 0
        while i < len(basis):
            if basis[i] in art_cols:
                cand = [j for j in range(n + n_slack) if abs(T[i, j]) > eps]
                if cand:
                    j = max(cand, key=lambda j: abs(T[i, j])) if T0 is not None else cand[0]
                    _pivot(T, basis, i, j, exact)
                    _refactor(T, T0, basis)
                else:
                    T = np.delete(T, i, axis=0)
                    if T0 is not None:
                        T0 = np.delete(T0, i, axis=0)
                    del basis[i]
                    del rows[i]
                    continue
            i += 1

    cost = np.full(width, zero, dtype=T.dtype)
    cost[:n] = c
    status, it = _simplex(T, basis, cost, eps, set(range(n + n_slack)), T0)
    iterations += it
    if status == "unbounded":
        return LPSolution("unbounded", mode=mode, iterations=iterations)

    z = np.full(width, zero, dtype=T.dtype)
    for i, j in enumerate(basis):
        z[j] = T[i, -1]
    if not exact:
        z[np.abs(z) < 1e-15] = 0.0
    x = z[:n] + lower
    # y^T = c_B B^-1; the columns of B^-1 sit where the initial identity basis was
    cb = np.array([cost[j] for j in basis], dtype=T.dtype)
    Binv = T[:, init_col] if len(basis) else np.zeros((0, m), dtype=T.dtype)
    y = (cb @ Binv) if len(basis) else np.full(m, zero, dtype=T.dtype)
    y = y * sign
    obj = (c * x).sum() if n else zero
    return LPSolution("optimal", x=x, dual_eq=y[:k_eq], dual_le=y[k_eq:], objective_value=obj,
                      mode=mode, iterations=iterations, basis=tuple(int(j) for j in basis))


def _pivot(T: np.ndarray, basis: list[int], r: int, j: int, exact: bool) -> None:
    T[r] = T[r] / T[r, j]
    col = T[:, j].copy()
    col[r] = 0
    T -= np.outer(col, T[r])
    if not exact:
        T[:, j] = 0.0
        T[r, j] = 1.0
    basis[r] = j


def _refactor(T: np.ndarray, T0: np.ndarray | None, basis: list[int]) -> None:
    if T0 is not None and len(basis):
        T[:] = np.linalg.solve(T0[:, basis], T0)


def _simplex(T: np.ndarray, basis: list[int], cost: np.ndarray, eps, allowed: set[int], T0=None):
    """Maximize cost.z from a feasible basis using Bland's rule."""
    exact = T.dtype == object
    width = T.shape[1] - 1
    mask = np.zeros(width, dtype=bool)
    mask[sorted(allowed)] = True
    iterations = 0
    limit = 50 * (width + T.shape[0]) + 1000
    while True:
        cb = np.array([cost[j] for j in basis], dtype=T.dtype)
        reduced = cost - cb @ T[:, :width] if len(basis) else cost.copy()
        candidates = [j for j in np.flatnonzero(mask) if reduced[j] > eps and j not in basis]
        if not candidates:
            return "optimal", iterations
        entering = int(candidates[0])
        col = T[:, entering]
        # tiny pivots wreck a float tableau; ignore entries small relative to the column
        floor = eps if exact else max(eps, FLOAT_REL_PIVOT * float(np.abs(col).max(initial=0.0)))
        rows = [i for i in range(T.shape[0]) if col[i] > floor] or [i for i in range(T.shape[0]) if col[i] > eps]
        if not rows:
            return "unbounded", iterations
        ratios = [T[i, -1] / col[i] for i in rows]
        best = min(ratios)
        slack = 0 if exact else 1e-12 * (1 + abs(best))
        ties = [i for i, r in zip(rows, ratios) if r - best <= slack]
        leave = min(ties, key=lambda i: basis[i])
        _pivot(T, basis, leave, entering, exact)
        _refactor(T, T0, basis)
        iterations += 1
        if iterations > limit:
            raise RuntimeError("simplex iteration limit exceeded")


def dual_objective(p: LPProblem, s: LPSolution):
    b = np.concatenate([p.b_eq, p.b_le])
    A = np.concatenate([p.A_eq, p.A_le])
    y = s.dual
    reduced = p.c - A.T @ y if len(y) else p.c
    return (y * b).sum() + (reduced * p.lower).sum()


def verify_certificate(p: LPProblem, s: LPSolution, tol: float = 1e-9) -> bool:
    """Independently recheck primal/dual feasibility, complementary slackness and the duality gap.

    Rational solutions are checked exactly.
    """
    if s.status != "optimal":
        return False
    if s.mode == "rational":
        c, A_eq, b_eq, A_le, b_le, lower = _convert(p, "rational")
        tol = Fraction(0)
        gap_tol = Fraction(0)
    else:
        c, A_eq, b_eq, A_le, b_le, lower = _convert(p, "float")
        scale = 1.0 + max(float(np.abs(np.concatenate([b_eq, b_le, c])).max(initial=0.0)), 0.0)
        tol = tol * scale
        gap_tol = 1e-8 * scale
    x, y_eq, y_le = s.x, s.dual_eq, s.dual_le
    checks = []
    if len(b_eq):
        checks.append(all(abs(v) <= tol for v in A_eq @ x - b_eq))
    slack = b_le - A_le @ x if len(b_le) else np.zeros(0)
    checks.append(all(v >= -tol for v in slack))
    checks.append(all(v >= -tol for v in x - lower))
    checks.append(all(v >= -tol for v in y_le))
    A = np.concatenate([A_eq, A_le])
    y = np.concatenate([y_eq, y_le])
    reduced = A.T @ y - c if len(y) else -c
    checks.append(all(v >= -tol for v in reduced))
    checks.append(all(abs(a * b) <= tol for a, b in zip(y_le, slack)))
    checks.append(all(abs(a * b) <= tol for a, b in zip(reduced, x - lower)))
    primal = (c * x).sum()
    dual = (y * np.concatenate([b_eq, b_le])).sum() + (-(reduced) * lower).sum() if len(y) else (c * lower).sum()
    checks.append(abs(primal - dual) <= gap_tol)
    return bool(all(checks))
