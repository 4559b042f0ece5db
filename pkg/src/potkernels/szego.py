"""Szego kernel, Garabedian kernel and Ahlfors map of an n-connected domain.

The kernel at an arbitrary pair of points is assembled from the boundary
values of ``S(., a)``, ``S(., a_1) ... S(., a_{n-1})`` (``a_i`` the zeros of
``S(., a)``) and of ``L(., a)``:

    S(z, w) = [c0 S(z,a) conj S(w,a) + sum c_ij S(z,a_i) conj S(w,a_j)]
              / (1 - f(z) conj f(w))

with ``f = S(., a) / L(., a)`` the Ahlfors map, ``c0 = 1 / S(a, a)`` and
``[c_ij]`` the inverse of ``[S(a_j, a_k)]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, NumericalError
from .geometry import build_grid, spectral_derivative
from .integral_eq import (
    KerzmanSteinOperator,
    cauchy_rhs,
    cauchy_sum,
    check_interior,
)

TWO_PI = 2.0 * np.pi


@dataclass
class Tolerances:
    zero: float = 1e-8       # |S(a_i, a)| relative to max |S| on the boundary
    separation: float = 1e-6  # zero separation relative to the domain diameter
    simple: float = 1e-8     # lower bound on |dS/dz (a_i, a)|
    nonvanishing: float = 1e-10
    polish: float = 1e-12
    retries: int = 8


@dataclass(frozen=True)
class PowerSums:
    p: np.ndarray
    e: np.ndarray

    @classmethod
    def from_power_sums(cls, p):
        p = np.asarray(p, dtype=complex)
        return cls(p, newton_identities(p))


def newton_identities(p):
    """Elementary symmetric functions ``e_1..e_m`` from power sums ``p_1..p_m``."""
    p = np.asarray(p, dtype=complex)
    e = np.zeros(len(p) + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, len(p) + 1):
        i = np.arange(1, k + 1)
        e[k] = np.sum((-1.0) ** (i - 1) * e[k - i] * p[i - 1]) / k
    return e[1:]


def garabedian_boundary(S_a, grid):
    """``L(z, a) = i conj(S(z, a)) conj(T(z))`` at the grid nodes."""
    return 1j * np.conj(S_a) * np.conj(grid.T)


def ahlfors_boundary(S_a, L_a):
    return S_a / L_a


def argument_principle(S_a, grid, k=0):
    """``(1/2 pi i) sum over the boundary of z^k S'/S dz`` by the trapezoid rule."""
    dS = spectral_derivative(S_a, grid)
    return np.sum(grid.z ** k * dS / S_a) / (2j * np.pi * grid.N)


def power_sums(S_a, grid, n, tol=1e-10):
    """Power sums of the ``n - 1`` zeros of ``S(., a)`` from boundary data."""
    if n < 2:
        return PowerSums(np.zeros(0, dtype=complex), np.zeros(0, dtype=complex))
    if np.min(np.abs(S_a)) <= tol:
        raise NumericalError("base point too degenerate: S(., a) nearly vanishes on the boundary")
    dS = spectral_derivative(S_a, grid)
    q = dS / S_a / (2j * np.pi * grid.N)
    p = np.array([np.sum(grid.z ** k * q) for k in range(1, n)])
    return PowerSums.from_power_sums(p)


def polynomial_roots(e, newton_steps=3):
    """Roots of ``zeta^m - e_1 zeta^(m-1) + e_2 zeta^(m-2) - ...``."""
    e = np.asarray(e, dtype=complex)
    m = len(e)
    if m == 0:
        return np.zeros(0, dtype=complex)
    coeffs = np.concatenate([[1.0], ((-1.0) ** np.arange(1, m + 1)) * e])
    roots = np.roots(coeffs)
    dcoeffs = np.polyder(coeffs)
    for _ in range(newton_steps):
        d = np.polyval(dcoeffs, roots)
        ok = d != 0
        roots = np.where(ok, roots - np.polyval(coeffs, roots) / np.where(ok, d, 1), roots)
    return np.sort_complex(roots)


class SzegoData:
    """The assembled Szego package for one domain, grid and base point.

    Attributes
    ----------
    grid : BoundaryGrid
    a : complex
    zeros : ndarray, shape (n-1,)
    S, L : ndarray, shape (n, grid.size)
        Row 0 holds ``S(., a)`` / ``L(., a)``, row ``i`` the same for ``a_i``.
    f : ndarray
        Ahlfors map boundary values.
    c0 : float
    C : ndarray, shape (n-1, n-1)
    S_aa : complex
    """

    def __init__(self, grid, a, zeros, S, L, f, c0, C, S_aa, gram, diagnostics=None):
        self.grid = grid
        self.domain = grid.domain
        self.n = grid.n
        self.a = complex(a)
        self.zeros = np.asarray(zeros, dtype=complex)
        self.S = np.asarray(S, dtype=complex)
        self.L = np.asarray(L, dtype=complex)
        self.f = np.asarray(f, dtype=complex)
        self.c0 = float(c0)
        self.C = np.asarray(C, dtype=complex).reshape(self.n - 1, self.n - 1)
        self.S_aa = complex(S_aa)
        self.gram = np.asarray(gram, dtype=complex).reshape(self.n - 1, self.n - 1)
        self.centers = np.concatenate([[self.a], self.zeros])
        self.diagnostics = dict(diagnostics or {})

    # --- point classification ---------------------------------------------
    def _locate(self, x):
        """Node index for points that coincide with grid nodes, -1 otherwise."""
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        d = np.abs(x[:, None] - self.grid.z[None, :])
        k = np.argmin(d, axis=1)
        hit = d[np.arange(len(x)), k] <= 1e-13 * np.maximum(1.0, np.abs(x))
        idx = np.where(hit, k, -1)
        if np.any(~hit):
            check_interior(self.grid, x[~hit])
        return x, idx

    def _boundary_or_cauchy(self, rows, x, idx, order=0):
        out = np.empty((rows.shape[0], len(x)), dtype=complex)
        on = idx >= 0
        if on.any():
            out[:, on] = rows[:, idx[on]]
        if (~on).any():
            out[:, ~on] = cauchy_sum(rows, self.grid, x[~on], order)
        return out

    def values(self, x):
        """``(S(x, a_i) for i = 0..n-1, f(x))`` at points (interior or grid nodes)."""
        x, idx = self._locate(x)
        rows = np.vstack([self.S, self.f[None, :]])
        v = self._boundary_or_cauchy(rows, x, idx)
        return v[:-1], v[-1]

    def szego_basis(self, x):
        return self.values(x)[0]

    def garabedian_basis(self, x):
        """``L(x, a_i)`` for i = 0..n-1, including the simple poles at ``a_i``."""
        x, idx = self._locate(x)
        out = self._boundary_or_cauchy(self.L, x, idx)
        inner = idx < 0
        if inner.any():
            out[:, inner] += 1.0 / (TWO_PI * (x[None, inner] - self.centers[:, None]))
        return out

    def ahlfors(self, x):
        x, idx = self._locate(x)
        return self._boundary_or_cauchy(self.f[None, :], x, idx)[0]

    def ahlfors_derivative(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=complex))
        check_interior(self.grid, x)
        return cauchy_sum(self.f, self.grid, x, order=1)

    # --- kernels ------------------------------------------------------------
    def _coefficients(self):
        n = self.n
        Cfull = np.zeros((n, n), dtype=complex)
        Cfull[0, 0] = self.c0
        Cfull[1:, 1:] = self.C
        return Cfull

    def szego(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        shape = z.shape
        Sz, fz = self.values(z.ravel())
        Sw, fw = self.values(w.ravel())
        num = np.einsum("ip,ij,jp->p", Sz, self._coefficients(), np.conj(Sw))
        den = 1.0 - fz * np.conj(fw)
        if np.any(np.abs(den) < 1e-13):
            raise NumericalError("near-diagonal boundary singularity: 1 - f(z) conj f(w) ~ 0")
        return (num / den).reshape(shape)

    def garabedian(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        shape = z.shape
        z, w = z.ravel(), w.ravel()
        if np.any(np.abs(z - w) <= 1e-10):
            raise NumericalError("L(z, w) has a pole at z = w")
        Sz, fz = self.values(z)
        Sw, fw = self.values(w)
        with np.errstate(divide="ignore", invalid="ignore"):
            Lw = self.garabedian_basis(w)
            # f(w) L(w, a) = S(w, a) exactly; avoids the pole of L(., a) at w = a
            fL = fw[None, :] * Lw
        fL[0] = Sw[0]
        den = fz - fw
        if np.any(np.abs(den) < 1e-13):
            raise NumericalError("f(z) = f(w): L(z, w) formula is ill-conditioned here")
        num = np.einsum("ip,ij,jp->p", Sz, self._coefficients(), fL)
        return (num / den).reshape(shape)


@dataclass
class _Attempt:
    a: complex
    S_a: np.ndarray
    zeros: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))


def _polish_zeros(S_a, grid, roots, tol):
    """Newton iteration on the holomorphic extension of ``S(., a)``."""
    z = np.array(roots, dtype=complex)
    scale = np.max(np.abs(S_a))
    for _ in range(50):
        val = cauchy_sum(S_a, grid, z, 0)
        der = cauchy_sum(S_a, grid, z, 1)
        step = val / der
        z = z - step
        if np.all(np.abs(val) <= tol * scale) and np.all(np.abs(step) <= 1e-14 * grid.domain.diameter):
            break
    return z


def locate_zeros(S_a, grid, tol=None):
    """Zeros of ``S(., a)`` in the domain, via power sums and Newton's identities."""
    tol = tol or Tolerances()
    n = grid.n
    count = argument_principle(S_a, grid).real
    if abs(count - (n - 1)) > 0.25:
        raise NumericalError(f"argument principle counts {count:.4f} zeros, expected {n - 1}")
    ps = power_sums(S_a, grid, n, tol.nonvanishing)
    roots = polynomial_roots(ps.e)
    try:
        inside = np.atleast_1d(grid.domain.contains(roots)) if n > 1 else np.zeros(0, bool)
    except GeometryError:
        inside = np.zeros(len(roots), bool)
    if not np.all(inside):
        raise NumericalError("zero localization failed; re-choose a")
    roots = _polish_zeros(S_a, grid, roots, tol.polish)
    try:
        inside = np.atleast_1d(grid.domain.contains(roots)) if n > 1 else np.zeros(0, bool)
    except GeometryError:
        inside = np.zeros(len(roots), bool)
    if not np.all(inside):
        raise NumericalError("zero localization failed; re-choose a")
    return np.sort_complex(roots), ps


def _check_zeros(S_a, grid, zeros, tol):
    scale = np.max(np.abs(S_a))
    if len(zeros) == 0:
        return
    vals = np.abs(cauchy_sum(S_a, grid, zeros, 0))
    if np.any(vals >= tol.zero * scale):
        raise NumericalError(f"zeros not verified: max |S(a_i, a)| = {vals.max():.3g}")
    if len(zeros) > 1:
        d = np.abs(zeros[:, None] - zeros[None, :])
        np.fill_diagonal(d, np.inf)
        if np.min(d) <= tol.separation * grid.domain.diameter:
            raise NumericalError("zeros of S(., a) are not distinct")
    der = np.abs(cauchy_sum(S_a, grid, zeros, 1))
    if np.any(der <= tol.simple):
        raise NumericalError("zeros of S(., a) are not simple")


def candidate_base_points(domain, count=8):
    """Base points at half the gap between the outer curve and the nearest inner curve.

    Candidates sit on the inward normal of the outer curve at parameters
    ``t = k / count``.  For a simply connected domain the inward offset is a
    quarter of the diameter.
    """
    outer = domain.curves[-1]
    t = np.arange(count) / count
    p, dp, _ = outer.evaluate(t)
    normal = 1j * dp / np.abs(dp)
    out = []
    for k in range(count):
        if domain.n > 1:
            others = np.concatenate(domain._polys[:-1])
            gap = np.min(np.abs(others - p[k]))
            step = 0.5 * gap
        else:
            step = 0.25 * domain.diameter
        # shrink if the offset point is not inside (strongly curved boundary)
        for _ in range(20):
            q = p[k] + step * normal[k]
            try:
                if domain.contains(q) and domain.boundary_distance(q)[0] > 0.2 * step:
                    out.append(complex(q))
                    break
            except GeometryError:
                pass
            step *= 0.7
    return out


def assemble(domain, N, a="auto", tol=None):
    """Solve for all Szego boundary data of ``domain`` on an ``N``-node grid."""
    tol = tol or Tolerances()
    grid = build_grid(domain, N)
    op = KerzmanSteinOperator(grid)
    return assemble_on(op, a, tol)


def assemble_on(op, a="auto", tol=None):
    tol = tol or Tolerances()
    grid = op.grid
    domain = grid.domain
    auto = isinstance(a, str)
    if auto:
        if a != "auto":
            raise ValueError(f"base point must be complex or 'auto', got {a!r}")
        candidates = candidate_base_points(domain, max(tol.retries, 1))
        if domain.n > 1:
            candidates = _rank_candidates(op, candidates)
    else:
        check_interior(grid, a)
        candidates = [complex(a)]
    errors = []
    for cand in candidates[: max(tol.retries, 1)]:
        try:
            return _assemble_at(op, cand, tol)
        except NumericalError as exc:
            errors.append(f"a={cand:.6g}: {exc}")
    raise NumericalError("assembly failed for every base point tried; " + "; ".join(errors))


def _rank_candidates(op, candidates):
    """Order candidate base points by how far their zeros stay from the boundary."""
    grid = op.grid
    scored = []
    rhs = np.array([cauchy_rhs(grid, c) for c in candidates])
    sols = op.solve(rhs)
    for c, S_a in zip(candidates, sols):
        try:
            zeros, _ = locate_zeros(S_a, grid)
            score = float(np.min(grid.domain.boundary_distance(zeros)))
        except (NumericalError, GeometryError):
            score = -np.inf
        scored.append((score, c))
    scored.sort(key=lambda sc: -sc[0])
    return [c for _, c in scored]


def _assemble_at(op, a, tol):
    grid = op.grid
    n = grid.n
    S_a = op.solve(cauchy_rhs(grid, a))
    if n > 1:
        zeros, ps = locate_zeros(S_a, grid, tol)
        _check_zeros(S_a, grid, zeros, tol)
    else:
        zeros = np.zeros(0, dtype=complex)
        ps = PowerSums(zeros, zeros)
    rhs = [cauchy_rhs(grid, c) for c in zeros]
    S_rest = op.solve(np.array(rhs)) if n > 1 else np.zeros((0, grid.size), dtype=complex)
    S = np.vstack([S_a[None, :], S_rest])
    L = garabedian_boundary(S, grid)
    f = ahlfors_boundary(S[0], L[0])
    S_aa = cauchy_sum(S_a, grid, a, 0)[0]
    c0 = 1.0 / S_aa.real
    if n > 1:
        # gram[j, k] = S(a_j, a_k): column k is the extension of S(., a_k) at the zeros
        gram = cauchy_sum(S_rest, grid, zeros, 0).T
        C = np.linalg.inv(gram)
    else:
        gram = C = np.zeros((0, 0), dtype=complex)
    diagnostics = {
        "kerzman_stein_condition": op.condition,
        "kerzman_stein_residual": op.residual(S, np.vstack([cauchy_rhs(grid, c) for c in np.concatenate([[a], zeros])])),
        "S_aa_imag": float(S_aa.imag),
        "power_sums": [complex(p) for p in ps.p],
        "gram_condition": float(np.linalg.cond(gram)) if n > 1 else 1.0,
        "inverse_residual": float(np.max(np.abs(C @ gram - np.eye(n - 1)))) if n > 1 else 0.0,
    }
    return SzegoData(grid, a, zeros, S, L, f, c0, C, S_aa, gram, diagnostics)


def szego_eval(data, z, w):
    return data.szego(z, w)


def garabedian_eval(data, z, w):
    return data.garabedian(z, w)


def ahlfors_eval(data, z):
    return data.ahlfors(z)


__all__ = [
    "PowerSums",
    "SzegoData",
    "Tolerances",
    "ahlfors_boundary",
    "ahlfors_eval",
    "argument_principle",
    "assemble",
    "assemble_on",
    "candidate_base_points",
    "garabedian_boundary",
    "garabedian_eval",
    "locate_zeros",
    "newton_identities",
    "polynomial_roots",
    "power_sums",
    "szego_eval",
]
