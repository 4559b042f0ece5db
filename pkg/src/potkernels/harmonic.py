"""Dirichlet problem, harmonic measures and the Poisson kernel through the Szego projection.

For real boundary data ``phi`` the harmonic extension is

    E phi = h + conj(H) + sum_j c_j omega_j,
    h = P(S_a psi) / S_a,   H = P(L_a conj(psi)) / L_a,   psi = phi - sum_j c_j chi_j,

where ``P`` is the Szego projection, ``chi_j`` the indicator of inner curve
``j`` and ``c`` solves ``sum_j A_jk c_j = P(S_a phi)(a_k)`` with the period
matrix ``A``.  Division by ``L_a`` is done as multiplication by ``f / S_a``.
"""

from __future__ import annotations

import numpy as np

from .bergman import hole_points
from .errors import GeometryError, NumericalError
from .integral_eq import barycentric_cauchy, check_interior


def period_matrix(data):
    """``A_jk = -i * integral over curve j of L(z, a_k) S(z, a) dz`` and its inverse."""
    n = data.n
    if n < 2:
        z = np.zeros((0, 0), dtype=complex)
        return z, z
    g = data.grid
    calL = data.L[1:] * data.S[0][None, :]
    A = np.empty((n - 1, n - 1), dtype=complex)
    for j in range(n - 1):
        s = g.curve_slice(j)
        A[j] = -1j * calL[:, s] @ g.zeta_weights[s]
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e13:
        raise NumericalError(f"period matrix is singular (cond ~ {cond:.3g})")
    return A, np.linalg.inv(A)


def szego_projection_eval(data, u, z):
    """``(P u)(z) = integral of S(z, w) u(w) ds(w)`` at interior points.

    ``u`` may be stacked (shape ``(m, grid.size)``); the result then has shape
    ``(m, len(z))``.
    """
    u = np.asarray(u, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    check_interior(data.grid, z)
    return _project(data, u, z)


def _project(data, u, z, values=None):
    g = data.grid
    Sz, fz = values if values is not None else data.values(z)
    U = np.atleast_2d(u)
    D = g.w[None, :] / (1.0 - fz[:, None] * np.conj(data.f)[None, :])   # (P, K)
    V = np.einsum("jk,mk,pk->mjp", np.conj(data.S), U, D)                 # (m, n, P)
    out = np.einsum("ip,ij,mjp->mp", Sz, data._coefficients(), V)
    return out[0] if u.ndim == 1 else out


def _indicators(data):
    g = data.grid
    return np.array([(g.curve_index == j).astype(float) for j in range(data.n - 1)])


class PoissonData:
    """Period matrix, its inverse and harmonic-measure machinery for one domain."""

    def __init__(self, szego, b=None, state=None):
        self.szego = szego
        self.n = n = szego.n
        if state is not None:
            self.A = np.asarray(state["A"], dtype=complex).reshape(n - 1, n - 1)
            self.B = np.asarray(state["B"], dtype=complex).reshape(n - 1, n - 1)
            b = state["b"]
        else:
            self.A, self.B = period_matrix(szego)
        self.chi = _indicators(szego)
        self.period_imag = float(np.max(np.abs(self.A.imag) / np.max(np.abs(self.A)))) if n > 1 else 0.0
        self.b = hole_points(szego.domain) if b is None else np.asarray(b, dtype=complex)
        self.method = "log-decomposition"
        self._omega_matrix = None
        self._beta = None
        if self.n > 1:
            try:
                self._setup_log_decomposition()
            except NumericalError:
                self.method = "antiderivative"
                self._setup_antiderivative()
        if state is not None and state.get("method", self.method) != self.method:
            raise NumericalError(f"stored omega method {state['method']!r} is not reproducible here")

    # --- Dirichlet coefficient pieces ----------------------------------------
    def period_coefficients(self, phi):
        """``c`` solving ``sum_j A_jk c_j = P(S_a phi)(a_k)``; ``phi`` may be stacked."""
        d = self.szego
        phi = np.atleast_2d(phi)
        r = _project(d, phi * d.S[0][None, :], d.zeros)
        return np.linalg.solve(self.A.T, r.T).T

    def _single_valued_part(self, phi, z, values=None):
        """``h + conj(H)`` for stacked real data ``phi`` (``psi`` already corrected)."""
        d = self.szego
        Sz, fz = values if values is not None else d.values(z)
        Pa = _project(d, phi * d.S[0][None, :], z, (Sz, fz))
        PL = _project(d, np.conj(phi) * d.L[0][None, :], z, (Sz, fz))
        h = Pa / Sz[0][None, :]
        H = PL * (fz / Sz[0])[None, :]
        return h + np.conj(H)

    def _setup_log_decomposition(self):
        # ln|z - b_k| is harmonic in the domain, so its own decomposition gives
        # ln|z - b_k| - h_k - conj(H_k) = sum_j c_jk omega_j
        g = self.szego.grid
        logs = np.log(np.abs(g.z[None, :] - self.b[:, None]))
        c = self.period_coefficients(logs)
        cond = np.linalg.cond(c)
        if not np.isfinite(cond) or cond > 1e12:
            raise NumericalError(f"log-decomposition system singular (cond ~ {cond:.3g})")
        self._log_psi = logs - c @ self.chi
        self._omega_matrix = c

    def _setup_antiderivative(self):
        d = self.szego
        g = d.grid
        calL = d.L[1:] * d.S[0][None, :]
        logs = np.log(np.abs(g.z[None, :] - self.b[:, None]))
        # value of Re(int G) on curve k for G = calL_i
        E = -(calL * g.zeta_weights) @ logs.T / (2j * np.pi)
        self._beta = np.linalg.inv(E)
        self._Fprime = self._beta @ calL

    def _single_valued_terms(self, z, values):
        """Curve integrals of the ``h`` and ``conj(H)`` kernels over each inner curve."""
        d = self.szego
        Sz, fz = values
        chi = self.chi.astype(complex)
        z = np.atleast_1d(z)
        h = _project(d, chi * d.S[0][None, :], z, values)[:, 0] / Sz[0, 0]
        H = _project(d, chi * d.L[0][None, :], z, values)[:, 0] * fz[0] / Sz[0, 0]
        return np.array([h, np.conj(H)])

    # --- harmonic measures ---------------------------------------------------
    def omega(self, z, method=None):
        """``omega_j(z)`` for j = 1..n-1 as an ``(n-1, len(z))`` complex array.

        Real parts are the harmonic measures; imaginary parts are discretization
        residue.
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        if self.n < 2:
            return np.zeros((0, len(z)), dtype=complex)
        check_interior(self.szego.grid, z)
        method = method or self.method
        if method == "log-decomposition":
            if self._omega_matrix is None:
                raise NumericalError("log-decomposition unavailable for this domain")
            return self._omega_log(z)
        if method == "antiderivative":
            if self._beta is None:
                self._setup_antiderivative()
            return self._omega_path(z)
        raise ValueError(f"unknown method {method!r}")

    def _omega_log(self, z, values=None):
        u = np.log(np.abs(z[None, :] - self.b[:, None])) - self._single_valued_part(self._log_psi, z, values)
        return np.linalg.solve(self._omega_matrix.T, u)

    def _omega_path(self, z):
        g = self.szego.grid
        dom = self.szego.domain
        outer = g.curve_slice(dom.n - 1)
        starts = g.z[outer]
        x, wq = np.polynomial.legendre.leggauss(48)
        out = np.empty((self.n - 1, len(z)), dtype=complex)
        for p, zp in enumerate(z):
            path = _clear_path(dom, starts, zp)
            total = np.zeros(self.n - 1, dtype=complex)
            for z0, z1 in zip(path[:-1], path[1:]):
                mid, half = 0.5 * (z0 + z1), 0.5 * (z1 - z0)
                nodes = mid + half * x
                total += barycentric_cauchy(self._Fprime, g, nodes) @ wq * half
            out[:, p] = total.real
        return out


def _clear_path(domain, starts, z, samples=64):
    """Polyline from an outer boundary node to ``z`` that stays inside the domain.

    The first leg runs from the boundary to a point ``0.05 * diameter`` inside
    along the inward normal direction; the second leg is straight to ``z``.
    """
    order = np.argsort(np.abs(starts - z))
    s = np.linspace(0.0, 1.0, samples)[1:-1]
    clearance = 0.02 * domain.diameter
    for k in order:
        z0 = starts[k]
        prev, nxt = starts[k - 1], starts[(k + 1) % len(starts)]
        tangent = (nxt - prev) / abs(nxt - prev)
        z1 = z0 + 1j * tangent * 0.05 * domain.diameter
        legs = np.concatenate([z1 + (z - z1) * s, z0 + (z1 - z0) * s[len(s) // 2:]])
        try:
            if domain.winding_number(legs).min() != 1:
                continue
            if domain.boundary_distance(z1 + (z - z1) * s).min() < min(clearance, 0.5 * domain.boundary_distance(z)[0]):
                continue
        except GeometryError:
            continue
        return [z0, z1, z]
    raise NumericalError(f"no clear path from the outer boundary to {z}")


def harmonic_measures(pdata):
    """Callables ``omega_j`` (real-valued) for the inner curves."""
    return [HarmonicMeasure(pdata, j) for j in range(pdata.n - 1)]


class HarmonicMeasure:
    def __init__(self, pdata, index):
        self.pdata = pdata
        self.index = index

    def __call__(self, z):
        scalar = np.ndim(z) == 0
        v = self.pdata.omega(z)[self.index].real
        return float(v[0]) if scalar else v


def dirichlet_extend(pdata, phi, z):
    """Complex-valued harmonic extension of real data ``phi`` (imaginary part ~ 0)."""
    d = pdata.szego
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    check_interior(d.grid, z)
    phi = np.asarray(phi, dtype=float)
    stacked = phi.ndim == 2
    phi2 = np.atleast_2d(phi).astype(complex)
    values = d.values(z)
    if pdata.n < 2:
        out = pdata._single_valued_part(phi2, z, values)
    else:
        c = pdata.period_coefficients(phi2)                  # (m, n-1)
        psi = phi2 - c @ pdata.chi
        out = pdata._single_valued_part(psi, z, values)
        if pdata.method == "log-decomposition":
            omega = pdata._omega_log(z, values)
        else:
            omega = pdata.omega(z)
        out = out + c @ omega
    return out if stacked else out[0]


def dirichlet_solve(pdata, phi, z, return_residual=False):
    """Harmonic extension of real boundary samples ``phi`` at interior ``z``."""
    scalar = np.ndim(z) == 0
    v = dirichlet_extend(pdata, phi, z)
    re, im = v.real, v.imag
    if scalar:
        re, im = re[..., 0], im[..., 0]
    return (re, im) if return_residual else re


def poisson_kernel(pdata, z, w_index, return_residual=False):
    """Poisson kernel ``p(z, w)`` for interior ``z`` and grid nodes ``w_index``.

    ``w_index`` may be an int, an index array or ``None`` (all nodes); the
    result has one entry per requested node.
    """
    d = pdata.szego
    g = d.grid
    z = complex(z)
    check_interior(g, z)
    idx = np.arange(g.size) if w_index is None else np.atleast_1d(w_index)
    w = g.z[idx]
    Sz, fz = d.values(z)
    Szw = d.szego(np.full(len(idx), z), w)
    S_wa = d.S[0, idx]
    L_wa = d.L[0, idx]
    Sza = Sz[0, 0]
    inv_Lza = fz[0] / Sza
    p = Szw * S_wa / Sza + np.conj(Szw * L_wa * inv_Lza)
    if pdata.n > 1:
        # beta_j(w) = sum_k B_kj S(a_k, w) S(w, a): c_j = integral of beta_j phi ds
        S_akw = np.conj(d.S[1:, idx])                                  # (n-1, W)
        beta = pdata.B.T @ S_akw * S_wa[None, :]
        chi_int = pdata._single_valued_terms(z, (Sz, fz))              # (2, n-1)
        omega = pdata.omega(np.array([z]))[:, 0] if pdata.method != "log-decomposition" \
            else pdata._omega_log(np.array([z]), (Sz, fz))[:, 0]
        p = p - chi_int[0] @ beta - chi_int[1] @ np.conj(beta) + omega @ beta
    if return_residual:
        return p.real, p.imag
    return p.real


