"""Floating-point probes of the transfer operator

    (Tf)(y) = [f(y/q - 1) + f(y/q + 1) + 2 f(y/q)] / (4q)

on a uniform grid over [-Q, Q].  Bounded solutions are exactly the fixed
points of T that vanish outside [-Q, Q].  Nothing here proves anything; the
exact prover is the only source of claims.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp

log = logging.getLogger(__name__)

# arguments within this relative distance of +-Q count as on the boundary
_EDGE_SLACK = 1e-12


class EmptyWindow(ValueError):
    pass


def _as_float(q) -> float:
    if isinstance(q, str):
        q = Fraction(q)
    return float(q)


@dataclass(frozen=True, eq=False)
class Grid:
    q: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "q", _as_float(self.q))
        if not 0 < self.q < 1:
            raise ValueError(f"q = {self.q} is not in (0, 1)")
        if self.n < 3:
            raise ValueError("a grid needs at least 3 points")

    @property
    def Q(self) -> float:
        return self.q / (1 - self.q)

    @property
    def h(self) -> float:
        return 2 * self.Q / (self.n - 1)

    @property
    def points(self) -> np.ndarray:
        # (2i - (n-1)) is exactly antisymmetric in i, so the grid is too
        k = 2 * np.arange(self.n) - (self.n - 1)
        return k / (self.n - 1) * self.Q


@dataclass(eq=False)
class GridFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} values, got shape {self.values.shape}")

    @classmethod
    def from_callable(cls, grid: Grid, func) -> "GridFunction":
        return cls(grid, np.array([func(x) for x in grid.points], dtype=float))

    def __call__(self, x):
        """Piecewise-linear interpolant, zero outside [-Q, Q]."""
        x = np.asarray(x, dtype=float)
        Q = self.grid.Q
        inside = np.abs(x) <= Q * (1 + _EDGE_SLACK)
        xc = np.clip(x, -Q, Q)
        return np.where(inside, np.interp(xc, self.grid.points, self.values), 0.0)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def reflect(self) -> "GridFunction":
        return GridFunction(self.grid, self.values[::-1].copy())

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return GridFunction(self.grid, self.values + other.values)

    def __mul__(self, alpha: float) -> "GridFunction":
        return GridFunction(self.grid, alpha * self.values)

    __rmul__ = __mul__

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "value"])
            for x, v in zip(self.grid.points, self.values):
                w.writerow([repr(float(x)), repr(float(v))])

    @classmethod
    def from_csv(cls, path, q=None) -> "GridFunction":
        """Read an ``x,value`` table; q is inferred from the last abscissa if omitted."""
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["x", "value"]:
            raise ValueError("expected header 'x,value'")
        xs = np.array([float(r[0]) for r in rows[1:]])
        vs = np.array([float(r[1]) for r in rows[1:]])
        if q is None:
            Q = xs[-1]
            q = Q / (1 + Q)
        grid = Grid(q, len(xs))
        if not np.allclose(xs, grid.points, rtol=0, atol=1e-12 * max(1.0, grid.Q)):
            raise ValueError("abscissae are not the uniform grid on [-Q, Q]")
        return cls(grid, vs)


def apply_at(f: GridFunction, y) -> np.ndarray:
    """``(Tf)(y)`` at arbitrary points, through the interpolant of f."""
    q = f.grid.q
    x = np.asarray(y, dtype=float) / q
    return (f(x - 1) + f(x + 1) + 2 * f(x)) / (4 * q)


def apply_operator(f: GridFunction) -> GridFunction:
    return GridFunction(f.grid, apply_at(f, f.grid.points))


@dataclass(eq=False)
class OperatorMatrix:
    grid: Grid
    A: sp.csr_matrix

    def __matmul__(self, v):
        if isinstance(v, GridFunction):
            return GridFunction(self.grid, self.A @ v.values)
        return self.A @ v

    @property
    def shape(self) -> Tuple[int, int]:
        return self.A.shape

    def toarray(self) -> np.ndarray:
        return self.A.toarray()


def assemble_matrix(grid: Grid) -> OperatorMatrix:
    """Sparse matrix of T: each row holds up to three linear-interpolation pairs."""
    n, q, Q, h = grid.n, grid.q, grid.Q, grid.h
    y = grid.points
    rows, cols, vals = [], [], []
    for shift, weight in ((-1.0, 1.0), (1.0, 1.0), (0.0, 2.0)):
        x = y / q + shift
        inside = np.abs(x) <= Q * (1 + _EDGE_SLACK)
        t = (np.clip(x, -Q, Q) + Q) / h
        i = np.clip(np.floor(t).astype(int), 0, n - 2)
        frac = t - i
        c = weight / (4 * q)
        idx = np.nonzero(inside)[0]
        rows += [idx, idx]
        cols += [i[idx], i[idx] + 1]
        vals += [c * (1 - frac[idx]), c * frac[idx]]
    A = sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    A.sum_duplicates()
    A.eliminate_zeros()
    return OperatorMatrix(grid, A)


def residual(f: GridFunction) -> float:
    """``max_j |f(y_j) - (Tf)(y_j)|``."""
    return float(np.max(np.abs(f.values - apply_operator(f).values)))


@dataclass
class PowerResult:
    eigenvalue: float
    vector: np.ndarray
    converged: bool
    iterations: int

    def __iter__(self):
        return iter((self.eigenvalue, self.vector))


def _matvec(A):
    if isinstance(A, OperatorMatrix):
        return lambda v: A.A @ v
    return lambda v: A @ v


def power_iteration(A, tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0,
                    start: Optional[np.ndarray] = None) -> PowerResult:
    """Dominant eigenvalue by power iteration with sup-norm scaling.

    The iterate is scaled so its largest entry is exactly 1 and the eigenvalue
    estimate is the image's value at that entry.  Convergence needs both
    ``|lam_k - lam_{k-1}| <= tol`` and the iterate to move by at most
    ``sqrt(tol)``; a stalled estimate alone is not trusted.  Non-convergence
    is reported through ``converged``, not raised.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    mv = _matvec(A)
    n = A.shape[0]
    v = np.random.default_rng(seed).standard_normal(n) if start is None else np.asarray(start, float)
    v = v / v[np.argmax(np.abs(v))]
    lam_prev = None
    lam = 0.0
    for it in range(1, max_iter + 1):
        w = mv(v)
        k = int(np.argmax(np.abs(w)))
        if w[k] == 0:
            return PowerResult(0.0, v, True, it)
        lam = float(w[int(np.argmax(np.abs(v)))])
        w = w / w[k]
        moved = float(np.max(np.abs(w - v)))
        v = w
        if lam_prev is not None and abs(lam - lam_prev) <= tol and moved <= np.sqrt(tol):
            return PowerResult(lam, v, True, it)
        lam_prev = lam
    log.info("power iteration stopped after %d iterations without converging", max_iter)
    return PowerResult(lam, v, False, max_iter)


@dataclass
class SearchResult:
    function: GridFunction
    residual: float
    history: List[float] = field(default_factory=list)
    seed: int = 0

    def __iter__(self):
        return iter((self.function, self.residual))


def min_residual_search(grid: Grid, iters: int, seed: int = 0, matrix=None) -> SearchResult:
    """Look for a unit-sup-norm f with small ``|f - Tf|``.

    Gradient descent on ``||(A - I) f||^2`` with step ``1/L`` where
    ``L = ||M||_1 ||M||_inf`` bounds the Lipschitz constant, rescaling to
    sup-norm 1 after each step.  ``history`` holds the best residual so far
    after every iteration, so it is non-increasing by construction.
    """
    if iters <= 0:
        raise ValueError("iters must be positive")
    A = assemble_matrix(grid).A if matrix is None else sp.csr_matrix(matrix)
    M = (A - sp.identity(grid.n, format="csr")).tocsr()
    L = max(abs(M).sum(axis=0).max() * abs(M).sum(axis=1).max(), 1e-300)
    f = np.random.default_rng(seed).standard_normal(grid.n)
    f /= np.max(np.abs(f))
    best_f, best_r = f.copy(), float(np.max(np.abs(M @ f)))
    history = []
    for _ in range(iters):
        f = f - (M.T @ (M @ f)) / L
        top = np.max(np.abs(f))
        if top == 0:
            break
        f /= top
        r = float(np.max(np.abs(M @ f)))
        if r < best_r:
            best_f, best_r = f.copy(), r
        history.append(best_r)
    return SearchResult(GridFunction(grid, best_f), best_r, history, seed)


def lemma2_check(f: GridFunction, m: int, n: int, eps: int, samples: int = 101) -> float:
    """Largest deviation from ``f(q^(m+n) x + eps*s_n) = 2^-n (2q)^-(m+n) f(x)``
    over ``samples`` points of the open window ``(Q-1, 1-Q)``; ``s_n = q + ... + q^n``.
    """
    q, Q = f.grid.q, f.grid.Q
    if q >= 0.5:
        raise EmptyWindow("the window (Q-1, 1-Q) is empty for q >= 1/2")
    if eps not in (-1, 1):
        raise ValueError("eps must be -1 or +1")
    if m < 0 or n < 0:
        raise ValueError("m and n must be non-negative")
    x = np.linspace(Q - 1, 1 - Q, samples + 2)[1:-1]
    s_n = sum(q**i for i in range(1, n + 1))
    lhs = f(q ** (m + n) * x + eps * s_n)
    rhs = 0.5**n * (1 / (2 * q)) ** (m + n) * f(x)
    return float(np.max(np.abs(lhs - rhs)))


def remark2_check(f: GridFunction) -> Tuple[float, float]:
    """``(dev0, devQ)``: how far f is from vanishing at 0 and at Q.

    For q >= 1/2, dev0 is ``|f(0) - (Tf)(0)|``; at q = 1/4, devQ is
    ``| |f(Q)| - |f(qQ)| |`` since only that equivalence holds there.
    """
    q, Q = f.grid.q, f.grid.Q
    f0 = float(f(0.0))
    dev0 = abs(f0) if q < 0.5 else abs(f0 - float(apply_at(f, 0.0)))
    fQ = float(f(Q))
    devQ = abs(fQ) if q != 0.25 else abs(abs(fQ) - abs(float(f(q * Q))))
    return dev0, devQ
