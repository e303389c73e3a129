"""Symmetric eigenvalues without LAPACK.

Householder reduction to tridiagonal form, then implicit-shift QL with
Wilkinson-type shifts.  Eigenvectors are never formed.  A cyclic Jacobi
solver is kept alongside as a slow, independent oracle for tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, NonConvergenceError, NumericalDegeneracyError

EPS = np.finfo(np.float64).eps
SYMMETRY_TOL = 1e-8
MAX_QL_ITER = 30
PSD_CLAMP = 1e-10
# Absolute deflation floor on the rescaled (max |entry| ~ 1) problem; only
# matters for blocks of subnormal numbers, where the relative test never fires.
UNDERFLOW_FLOOR = 1e-150


@dataclass
class TridiagonalForm:
    diag: np.ndarray
    offdiag: np.ndarray

    @property
    def n(self) -> int:
        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


def _check_symmetric(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ContractError("matrix has non-finite entries")
    norm = np.linalg.norm(M)
    if norm > 0 and np.linalg.norm(M - M.T) > SYMMETRY_TOL * norm:
        raise ContractError("matrix is not symmetric within 1e-8 relative Frobenius norm")
    return M


def tridiagonalize(M: np.ndarray) -> TridiagonalForm:
    """Orthogonally similar tridiagonal form via Householder reflections."""
    A = _check_symmetric(M).copy()
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    off = np.zeros(max(n - 1, 0))
    for k in range(n - 2):
        x = A[k + 1:, k]
        tail = np.linalg.norm(x[1:])
        if tail == 0.0:
            off[k] = x[0]
            continue
        alpha = -math.copysign(math.hypot(x[0], tail), x[0])
        v = x.copy()
        v[0] -= alpha
        v /= np.linalg.norm(v)
        # A <- H A H with H = I - 2 v v^T, restricted to the trailing block.
        S = A[k + 1:, k + 1:]
        w = S @ v
        q = w - (v @ w) * v
        S -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        off[k] = alpha
    if n >= 2:
        off[n - 2] = A[n - 1, n - 2]
    return TridiagonalForm(np.diag(A).copy(), off)


def eig_tridiagonal(t: TridiagonalForm) -> np.ndarray:
    """All eigenvalues of a symmetric tridiagonal matrix, ascending."""
    n = len(t.diag)
    if n == 0:
        return np.zeros(0)
    # Power-of-two rescaling is exact and keeps tiny or huge inputs away from
    # the subnormal/overflow ranges that stall deflation.
    amax = max(np.max(np.abs(t.diag)), np.max(np.abs(t.offdiag)) if n > 1 else 0.0)
    if amax == 0.0:
        return np.zeros(n)
    shift = -math.frexp(amax)[1]
    d = [math.ldexp(float(v), shift) for v in t.diag]
    e = [math.ldexp(float(v), shift) for v in t.offdiag] + [0.0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= EPS * (abs(d[m]) + abs(d[m + 1])) or abs(e[m]) <= UNDERFLOW_FLOOR:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > MAX_QL_ITER:
                raise NonConvergenceError(
                    f"eigenvalue {l} not deflated after {MAX_QL_ITER} QL sweeps"
                )
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            restart = False
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # Underflow: the rotation decoupled the block early.
                    d[i + 1] -= p
                    e[m] = 0.0
                    restart = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if restart:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.ldexp(np.array(d), -shift))


def eigvals_sym(M: np.ndarray, psd: bool = False) -> np.ndarray:
    """Ascending eigenvalues of a symmetric matrix.

    With ``psd=True`` values in [-tol, 0) are clamped to zero, where
    tol = 1e-10 * max(1, lambda_max); anything more negative raises.
    """
    vals = eig_tridiagonal(tridiagonalize(M))
    if psd and len(vals):
        tol = PSD_CLAMP * max(1.0, float(vals[-1]))
        if vals[0] < -tol:
            raise NumericalDegeneracyError(
                f"eigenvalue {vals[0]:.3g} of a PSD matrix is below -{tol:.3g}"
            )
        vals = np.where(vals < 0.0, 0.0, vals)
    return vals


def jacobi_eigvals(M: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations until the off-diagonal norm is below ``tol * ||M||_F``.

    Slow (O(n^3) per sweep with Python-level pivots); intended only as a
    reference for the QL path.
    """
    A = _check_symmetric(M).copy()
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    scale = np.linalg.norm(A)
    if scale == 0.0 or n == 1:
        return np.sort(np.diag(A).copy())
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off < tol * scale:
            return np.sort(np.diag(A).copy())
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                h = A[q, q] - A[p, p]
                g = 100.0 * abs(apq)
                if abs(A[p, p]) + g == abs(A[p, p]) and abs(A[q, q]) + g == abs(A[q, q]):
                    # Negligible against both diagonal entries.
                    A[p, q] = A[q, p] = 0.0
                    continue
                if abs(h) + g == abs(h):
                    t = apq / h
                else:
                    theta = 0.5 * h / apq
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J acting on rows/cols p and q.
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
    raise NonConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
