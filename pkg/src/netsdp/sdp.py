"""Max-min-eigenvalue SDPs and a dense primal-dual interior-point solver.

The program is

    maximize t  subject to  C0 + sum_k y_k B_k - t I  >= 0,  y free,

where every ``B_k`` is an indicator-type symmetric matrix (disjoint supports,
entries carrying coefficients). In standard dual form this is
``max b.w  s.t.  Z = C - sum_i w_i A_i >= 0`` with ``w = (y, t)``,
``A_k = -B_k``, ``A_t = I``, ``b = e_t`` and ``C = C0``; the matching primal is
``min <C0, X>  s.t.  <B_k, X> = 0, tr X = 1, X >= 0``.

Iterates keep the dual exactly feasible (``Z`` is recomputed from ``w``), so
``lambda_min(C0 + B(y))`` is a valid lower bound at every step.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

try:
    from netsdp._ckernels import schur_complement as _schur
    HAVE_EXTENSION = True
except ImportError:  # pragma: no cover - depends on build
    from netsdp._kernels_py import schur_complement as _schur
    HAVE_EXTENSION = False

log = logging.getLogger(__name__)

OPTIMAL = "optimal"
MAX_ITERATIONS = "max-iterations"
NUMERICAL_FAILURE = "numerical-failure"

INFEASIBILITY_EPS = 1e-6


def default_gap_tol() -> float:
    return float(os.environ.get("NETSDP_GAP_TOL", "1e-9"))


@dataclass
class SdpProblem:
    """Affine symmetric matrix family ``C0 + sum_k y_k B_k``.

    ``B_k`` is stored as upper-triangular entries ``(rows, cols, coefs)`` with
    ``var == k``; positions of different variables never overlap.
    """

    constant: np.ndarray
    var: np.ndarray
    rows: np.ndarray
    cols: np.ndarray
    coefs: np.ndarray
    m: int
    labels: list = field(default=None)

    def __post_init__(self):
        self.constant = np.asarray(self.constant, dtype=float)
        self.var = np.asarray(self.var, dtype=np.int64)
        self.rows = np.asarray(self.rows, dtype=np.int64)
        self.cols = np.asarray(self.cols, dtype=np.int64)
        self.coefs = np.asarray(self.coefs, dtype=float)
        n = self.constant.shape[0]
        if self.constant.shape != (n, n) or n < 1:
            raise ValueError("constant must be a non-empty square matrix")
        if not np.allclose(self.constant, self.constant.T, rtol=0, atol=0):
            raise ValueError("constant matrix is not symmetric")
        if np.any(self.rows > self.cols):
            raise ValueError("basis entries must be upper-triangular")
        if len(self.var) and (self.var.min() < 0 or self.var.max() >= self.m):
            raise ValueError("variable index out of range")
        flat = self.rows * n + self.cols
        if len(np.unique(flat)) != len(flat):
            raise ValueError("basis matrices overlap")
        off = self.rows != self.cols
        # both orientations; diagonal entries once
        self._fr = np.concatenate([self.rows, self.cols[off]])
        self._fc = np.concatenate([self.cols, self.rows[off]])
        self._fw = np.concatenate([self.coefs, self.coefs[off]])
        self._fv = np.concatenate([self.var, self.var[off]])

    @property
    def n(self) -> int:
        return self.constant.shape[0]

    @classmethod
    def from_instantiated(cls, inst) -> "SdpProblem":
        var, rows, cols, coefs, labels = [], [], [], [], []
        for k, (key, i, j, c) in enumerate(inst.variables):
            var.append(np.full(len(i), k))
            rows.append(i)
            cols.append(j)
            coefs.append(c)
            labels.append(key)
        cat = (lambda xs, dt: np.concatenate(xs).astype(dt) if xs else np.zeros(0, dt))
        return cls(inst.constant, cat(var, np.int64), cat(rows, np.int64), cat(cols, np.int64),
                   cat(coefs, float), len(inst.variables), labels)

    @classmethod
    def from_dense(cls, constant, basis) -> "SdpProblem":
        """Build from dense symmetric ``B_k`` (entries of distinct ``B_k`` must not overlap)."""
        constant = np.asarray(constant, dtype=float)
        var, rows, cols, coefs = [], [], [], []
        for k, B in enumerate(basis):
            B = np.asarray(B, dtype=float)
            if not np.array_equal(B, B.T):
                raise ValueError(f"basis matrix {k} is not symmetric")
            i, j = np.nonzero(np.triu(B))
            var += [k] * len(i)
            rows += list(i)
            cols += list(j)
            coefs += list(B[i, j])
        return cls(constant, np.array(var, dtype=np.int64), np.array(rows, dtype=np.int64),
                   np.array(cols, dtype=np.int64), np.array(coefs), len(basis))

    def basis(self, k: int) -> np.ndarray:
        B = np.zeros((self.n, self.n))
        sel = self._fv == k
        B[self._fr[sel], self._fc[sel]] = self._fw[sel]
        return B

    def combine(self, y) -> np.ndarray:
        """``sum_k y_k B_k`` as a dense matrix."""
        S = np.zeros((self.n, self.n))
        if self.m:
            S[self._fr, self._fc] = self._fw * np.asarray(y)[self._fv]
        return S

    def matrix(self, y) -> np.ndarray:
        return self.constant + self.combine(y)

    def inner(self, G) -> np.ndarray:
        """``<B_k, G>`` for every k."""
        return np.bincount(self._fv, weights=self._fw * G[self._fr, self._fc], minlength=self.m)

    def transformed(self, Q=None, scale=1.0) -> "SdpProblem":
        """Problem with data ``scale * Q^T D Q`` (dense basis afterwards)."""
        Q = np.eye(self.n) if Q is None else Q
        C = scale * Q.T @ self.constant @ Q
        C = (C + C.T) / 2
        basis = []
        for k in range(self.m):
            B = scale * Q.T @ self.basis(k) @ Q
            basis.append((B + B.T) / 2)
        return DenseSdpProblem(C, basis)


class DenseSdpProblem(SdpProblem):
    """Same program with arbitrary dense (possibly overlapping) ``B_k``."""

    def __init__(self, constant, basis):
        self.constant = np.asarray(constant, dtype=float)
        self._basis = [np.asarray(B, dtype=float) for B in basis]
        self.m = len(self._basis)
        self.labels = None
        self._stack = (np.stack(self._basis) if self._basis
                       else np.zeros((0,) + self.constant.shape))

    def basis(self, k):
        return self._basis[k]

    def combine(self, y):
        return np.tensordot(np.asarray(y, dtype=float), self._stack, axes=1) if self.m \
            else np.zeros_like(self.constant)

    def inner(self, G):
        return np.tensordot(self._stack, G, axes=([1, 2], [0, 1])) if self.m else np.zeros(0)

    def schur(self, X, Zinv):
        W = [X @ B @ Zinv for B in self._basis]
        return np.array([[np.sum(Bk * Wl.T) for Wl in W] for Bk in self._basis]).reshape(self.m, self.m)


@dataclass
class SolveReport:
    status: str
    t_star: float
    y: np.ndarray
    gap: float
    iterations: int
    min_eig_check: float
    primal_objective: float = float("nan")
    primal_infeasibility: float = float("nan")
    X: np.ndarray = field(default=None, repr=False)

    @property
    def incompatible(self) -> bool:
        return self.status == OPTIMAL and self.t_star < -INFEASIBILITY_EPS

    def to_dict(self) -> dict:
        return {"status": self.status, "t_star": self.t_star, "gap": self.gap,
                "iterations": self.iterations, "min_eig_check": self.min_eig_check,
                "primal_objective": self.primal_objective,
                "primal_infeasibility": self.primal_infeasibility}


def _max_step(S, dS):
    """Largest alpha with ``S + alpha dS >= 0`` (inf when unbounded)."""
    L = np.linalg.cholesky(S)
    Li = sla.solve_triangular(L, np.eye(len(S)), lower=True)
    lam = np.linalg.eigvalsh(Li @ dS @ Li.T)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _schur_matrix(problem, X, Zinv):
    m = problem.m
    M = np.empty((m + 1, m + 1))
    if m:
        if isinstance(problem, DenseSdpProblem):
            M[:m, :m] = problem.schur(X, Zinv)
        else:
            M[:m, :m] = _schur(X, Zinv, problem._fr, problem._fc, problem._fw, problem._fv, m)
        col = -problem.inner(X @ Zinv)
        M[:m, m] = col
        M[m, :m] = col
    M[m, m] = np.sum(X * Zinv.T)
    return (M + M.T) / 2


def _solve_schur(M, rhs):
    try:
        cf = sla.cho_factor(M, lower=True, check_finite=False)
        return sla.cho_solve(cf, rhs, check_finite=False)
    except (np.linalg.LinAlgError, sla.LinAlgError):
        reg = 1e-14 * max(1.0, np.abs(np.diag(M)).max())
        try:
            cf = sla.cho_factor(M + reg * np.eye(len(M)), lower=True, check_finite=False)
            return sla.cho_solve(cf, rhs, check_finite=False)
        except (np.linalg.LinAlgError, sla.LinAlgError):
            return sla.lstsq(M, rhs, check_finite=False)[0]


def solve(problem: SdpProblem, gap_tol: float = None, max_iter: int = 200,
          feas_tol: float = 1e-8, step_fraction: float = 0.98) -> SolveReport:
    """Maximize the smallest eigenvalue of ``C0 + sum_k y_k B_k`` over ``y``.

    HKM search direction with a Mehrotra predictor-corrector. ``t_star`` is
    the smallest eigenvalue at the best iterate, a certified lower bound;
    ``gap`` is ``<C0, X> - t_star`` for the final primal iterate.
    """
    gap_tol = default_gap_tol() if gap_tol is None else gap_tol
    n, m = problem.n, problem.m
    C0 = problem.constant
    I = np.eye(n)

    def rp_of(X):
        # primal residual b - A(X) with A_k = -B_k, A_t = I, b = e_t
        return np.concatenate([problem.inner(X), [1.0 - np.trace(X)]])

    def dual_direction(dw):
        # dZ = -sum_i dw_i A_i
        return problem.combine(dw[:m]) - dw[m] * I

    def A_of(G):
        return np.concatenate([-problem.inner(G), [np.trace(G)]])

    lam0 = np.linalg.eigvalsh(C0)[0]
    shift = max(1.0, np.linalg.norm(C0) / np.sqrt(n))
    y = np.zeros(m)
    t = lam0 - shift
    X = I / n
    best = (lam0, y.copy())
    status = MAX_ITERATIONS
    it = 0
    gap = np.inf
    pinf = np.inf
    for it in range(1, max_iter + 1):
        Gamma = problem.matrix(y)
        Zm = Gamma - t * I
        try:
            Lz = np.linalg.cholesky(Zm)
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            break
        Lzi = sla.solve_triangular(Lz, I, lower=True)
        Zinv = Lzi.T @ Lzi
        rp = rp_of(X)
        pinf = np.abs(rp).max()
        pobj = float(np.sum(C0 * X))
        lam = np.linalg.eigvalsh(Gamma)[0]
        if lam > best[0]:
            best = (lam, y.copy())
        gap = abs(pobj - lam)
        log.debug("it %d  t=%.12g  lam=%.12g  pobj=%.12g  pinf=%.2e  mu=%.2e",
                  it, t, lam, pobj, pinf, np.sum(X * Zm) / n)
        if gap <= gap_tol and pinf <= feas_tol:
            status = OPTIMAL
            break
        mu = np.sum(X * Zm) / n
        M = _schur_matrix(problem, X, Zinv)
        if not np.all(np.isfinite(M)):
            status = NUMERICAL_FAILURE
            break

        def direction(G):
            dw = _solve_schur(M, rp - A_of(G))
            dZ = dual_direction(dw)
            dX = G - X @ dZ @ Zinv
            return dw, dZ, (dX + dX.T) / 2

        # predictor
        dw, dZ, dX = direction(-X)
        try:
            ap = min(1.0, step_fraction * _max_step(X, dX))
            ad = min(1.0, step_fraction * _max_step(Zm, dZ))
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            break
        mu_aff = np.sum((X + ap * dX) * (Zm + ad * dZ)) / n
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3
        # corrector
        G = sigma * mu * Zinv - X - dX @ dZ @ Zinv
        dw, dZ, dX = direction(G)
        try:
            ap = min(1.0, step_fraction * _max_step(X, dX))
            ad = min(1.0, step_fraction * _max_step(Zm, dZ))
        except np.linalg.LinAlgError:
            status = NUMERICAL_FAILURE
            break
        X = X + ap * dX
        X = (X + X.T) / 2
        y = y + ad * dw[:m]
        t = t + ad * dw[m]
    else:
        it = max_iter

    lam, ybest = best
    if status == OPTIMAL:
        # the terminating iterate certifies the gap; report it
        ybest = y
        lam = np.linalg.eigvalsh(problem.matrix(y))[0]
    pobj = float(np.sum(C0 * X))
    check = float(np.linalg.eigvalsh(problem.matrix(ybest))[0])
    return SolveReport(status, float(lam), ybest, float(abs(pobj - lam)), it, check,
                       pobj, float(pinf), X)


@dataclass
class Certificate:
    min_eig: float
    gap: float
    dual_feasibility: float


def residuals(report: SolveReport, problem: SdpProblem) -> Certificate:
    """Recompute the solver's claims from the returned iterates.

    ``min_eig`` from a dense eigensolve of ``C0 + B(y)``; ``gap`` as
    ``<C0, X> - min_eig``; ``dual_feasibility`` is the primal-side residual
    ``max(|<B_k, X>|, |tr X - 1|)`` of the stored dual certificate ``X``.
    """
    min_eig = float(np.linalg.eigvalsh(problem.matrix(report.y))[0])
    if report.X is None:
        return Certificate(min_eig, float("nan"), float("nan"))
    X = report.X
    w = np.linalg.eigvalsh(X)
    feas = max(np.abs(problem.inner(X)).max(initial=0.0), abs(np.trace(X) - 1.0),
               max(0.0, -w[0]))
    return Certificate(min_eig, float(abs(np.sum(problem.constant * X) - min_eig)), float(feas))
