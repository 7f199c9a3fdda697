"""Sparse SPD solvers shared by the eigen and Laplace modules."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import SolverDivergence


@dataclass
class CGInfo:
    iterations: int
    residual: float


def pcg(A, b, x0=None, rtol=1e-10, maxiter=None, M_diag=None):
    """Jacobi-preconditioned conjugate gradient for SPD ``A``.

    Returns (x, CGInfo).  ``residual`` is ||b - A x|| / ||b||.  Raises
    SolverDivergence when the tolerance is not met within ``maxiter``.
    """
    n = b.shape[0]
    if maxiter is None:
        maxiter = max(10 * n, 1000)
    dinv = 1.0 / (A.diagonal() if M_diag is None else M_diag)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    r = b - A @ x
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros(n), CGInfo(0, 0.0)
    z = dinv * r
    p = z.copy()
    rz = r @ z
    for k in range(1, maxiter + 1):
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0:
            raise SolverDivergence("matrix is not positive definite along a search direction")
        step = rz / pAp
        x += step * p
        r -= step * Ap
        rn = np.linalg.norm(r) / bnorm
        if not np.isfinite(rn):
            raise SolverDivergence("non-finite residual in CG")
        if rn < rtol:
            return x, CGInfo(k, rn)
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverDivergence(f"CG did not reach rtol={rtol:g} in {maxiter} iterations (residual {rn:.3e})")


class DirectSPD:
    """Sparse LU of an SPD M-matrix with symmetric ordering and no pivoting.

    Diagonal pivots keep the factorisation sign-exact for M-matrices, so
    solutions spanning many orders of magnitude stay componentwise accurate.
    """

    def __init__(self, A):
        self.A = sp.csc_matrix(A)
        self._lu = splu(
            self.A,
            permc_spec="MMD_AT_PLUS_A",
            diag_pivot_thresh=0.0,
            options={"SymmetricMode": True},
        )

    def solve(self, b):
        return self._lu.solve(np.asarray(b, dtype=float))


def relative_residual(A, x, b):
    bn = np.linalg.norm(b)
    r = np.linalg.norm(b - A @ x)
    return r / bn if bn > 0 else r
