"""Quasi-static signal equation on the 1-D grid.

Discretizes 0 = d3 * w'' + k*u + l*v - lam*w with zero-flux boundaries as
(lam*I - d3*D2) w = k*u + l*v, where D2 is the standard second difference
with mirrored ghost cells.  The matrix is symmetric positive definite and
tridiagonal; it is factorized once per (params, grid) and solved directly,
so there is no iteration tolerance anywhere in the signal solve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .model import Grid1D, ModelParams


@dataclass(frozen=True)
class EllipticOperator:
    """Assembled operator lam*I - d3*D2 with its Cholesky factor.

    diag holds the per-row diagonal (boundary rows lam + d3/dx^2, interior
    rows lam + 2*d3/dx^2); off the constant off-diagonal -d3/dx^2.  Row
    sums all equal lam, so constants map to lam * constant.
    """

    grid: Grid1D
    d3: float
    lam: float
    diag: np.ndarray
    off: float
    cho_factor: np.ndarray

    def apply(self, f: np.ndarray) -> np.ndarray:
        """Matrix-vector product (lam*I - d3*D2) f."""
        out = self.diag * f
        out[:-1] += self.off * f[1:]
        out[1:] += self.off * f[:-1]
        return out


def assemble(p: ModelParams, grid: Grid1D) -> EllipticOperator:
    n = grid.n_cells
    r = p.d3 / (grid.dx * grid.dx)
    diag = np.full(n, p.lam + 2.0 * r)
    diag[0] = p.lam + r
    diag[-1] = p.lam + r
    off = -r
    ab = np.zeros((2, n))
    ab[0, 1:] = off
    ab[1, :] = diag
    cho = cholesky_banded(ab, lower=False)
    return EllipticOperator(
        grid=grid, d3=p.d3, lam=p.lam, diag=diag, off=off, cho_factor=cho
    )


def solve_w(op: EllipticOperator, u: np.ndarray, v: np.ndarray, p: ModelParams) -> np.ndarray:
    """Solve (lam*I - d3*D2) w = k*u + l*v by the prefactored direct solve.

    For nonnegative u, v the result is nonnegative and squeezed between
    min(k*u + l*v)/lam and max(k*u + l*v)/lam (discrete comparison), up to
    solver roundoff.
    """
    rhs = p.k * np.asarray(u, dtype=float) + p.l * np.asarray(v, dtype=float)
    return cho_solve_banded((op.cho_factor, False), rhs)
