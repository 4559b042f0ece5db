"""Kerzman-Stein integral equation and Cauchy integrals of boundary data.

Boundary functions are plain complex arrays of length ``grid.size`` (one
sample per grid node, curves concatenated in domain order).
"""

from __future__ import annotations

import warnings

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import NumericalError, OutsideDomainError

_C = 1.0 / (2j * np.pi)


class AccuracyWarning(UserWarning):
    """Evaluation point closer to the boundary than the quadrature floor."""


class KerzmanSteinOperator:
    """LU-factored Nystrom system ``(I - A W) s = c`` on a boundary grid.

    ``matrix`` holds ``A(z_j, z_k) w_k``; the factorization is computed once
    and shared by every right-hand side.
    """

    def __init__(self, grid):
        self.grid = grid
        self.matrix = kernels.ks_matrix(grid.z, grid.T, grid.w)
        self.matrix.setflags(write=False)
        system = np.eye(grid.size) - self.matrix
        self._lu = sla.lu_factor(system, check_finite=False)
        rcond, _ = sla.lapack.zgecon(self._lu[0], np.linalg.norm(system, 1), norm="1")
        self.condition = float(1.0 / rcond) if rcond > 0 else np.inf
        if not np.isfinite(self.condition) or self.condition > 1e12:
            raise NumericalError(f"Kerzman-Stein system is singular (cond ~ {self.condition:.3g})")

    @property
    def kernel(self):
        """The unweighted kernel matrix ``A(z_j, z_k)``."""
        return self.matrix / self.grid.w[None, :]

    def solve(self, rhs):
        """Solve for one right-hand side (1-D) or several (stacked along axis 0)."""
        rhs = np.asarray(rhs, dtype=complex)
        out = sla.lu_solve(self._lu, rhs.T, check_finite=False).T
        return np.ascontiguousarray(out)

    def residual(self, s, rhs):
        s = np.asarray(s)
        return float(np.max(np.abs(s - s @ self.matrix.T - rhs)))


def kerzman_stein_matrix(grid):
    return KerzmanSteinOperator(grid)


def check_interior(grid, z):
    """Raise unless every point of ``z`` lies strictly inside the domain."""
    inside = np.atleast_1d(grid.domain.contains(z))
    if not np.all(inside):
        bad = np.atleast_1d(z)[~inside][0]
        raise OutsideDomainError(f"point {complex(bad)} is outside the domain")


def near_boundary(grid, z):
    """Mask of points within twice the largest node spacing of the boundary."""
    return grid.domain.boundary_distance(z) < 2.0 * grid.spacing


def cauchy_rhs(grid, a):
    """Samples of the Cauchy kernel ``C_a`` on the boundary."""
    check_interior(grid, a)
    return _C * np.conj(grid.T) / (np.conj(a) - np.conj(grid.z))


def solve_szego_boundary(op, grid, a):
    """Boundary values of ``S(., a)`` from the Kerzman-Stein equation."""
    return op.solve(cauchy_rhs(grid, a))


def cauchy_sum(bv, grid, z, order=0):
    """Unchecked trapezoid Cauchy integral; ``bv`` may be 1-D or stacked 2-D."""
    bv = np.asarray(bv, dtype=complex)
    x = np.atleast_1d(np.asarray(z, dtype=complex))
    out = kernels.cauchy_sum(np.atleast_2d(bv), grid.z, grid.zeta_weights, x, order)
    return out[0] if bv.ndim == 1 else out


def cauchy_eval(bv, grid, z, order=0):
    """Holomorphic extension (``order=0``) or its derivative (``order=1``).

    ``bv`` must be boundary values of a function holomorphic in the domain.
    Points outside raise :class:`OutsideDomainError`; points within twice the
    node spacing of the boundary trigger an :class:`AccuracyWarning`.
    """
    if order not in (0, 1):
        raise ValueError("order must be 0 or 1")
    scalar = np.ndim(z) == 0
    check_interior(grid, z)
    if np.any(near_boundary(grid, z)):
        warnings.warn("evaluation point within the quadrature accuracy floor", AccuracyWarning,
                      stacklevel=2)
    out = cauchy_sum(bv, grid, z, order)
    return out[..., 0] if scalar else out


def barycentric_cauchy(bv, grid, z):
    """Cauchy integral in the ratio form ``sum bv_k r_k / sum r_k``.

    Stays accurate close to the boundary, where the plain trapezoid rule does
    not; used for path integrals that have to start on the boundary.
    """
    x = np.atleast_1d(np.asarray(z, dtype=complex))
    r = grid.zeta_weights[None, :] / (grid.z[None, :] - x[:, None])
    num = np.atleast_2d(bv) @ r.T
    den = r.sum(axis=1)
    hit = np.isclose(np.abs(grid.z[None, :] - x[:, None]), 0.0, atol=1e-15).any(axis=1)
    out = num / den
    if hit.any():
        idx = np.argmin(np.abs(grid.z[None, :] - x[hit, None]), axis=1)
        out[:, hit] = np.atleast_2d(bv)[:, idx]
    return out[0] if np.ndim(bv) == 1 else out
