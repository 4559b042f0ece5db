"""Bergman kernel and the Lambda kernel from Szego data, using line integrals only.

With ``calL_i = L(., a_i) S(., a)``,

    K(z, w) = 4 pi S(z, w)^2 + sum_ij lam_ij calL_i(z) conj(calL_j(w)),

where ``lam`` is fixed by pairing both sides with ``1 / (z - b_k)`` (``b_k`` a
point inside hole ``k``) and moving every area integral to the boundary.
"""

from __future__ import annotations

import numpy as np

from .errors import GeometryError, NumericalError
from .integral_eq import cauchy_sum

FOUR_PI = 4.0 * np.pi


def hole_points(domain):
    """Area centroid of each inner curve, verified to lie outside the domain."""
    from .geometry import build_grid

    if domain.n < 2:
        return np.zeros(0, dtype=complex)
    grid = build_grid(domain, 256)
    out = []
    for j in range(domain.n - 1):
        s = grid.curve_slice(j)
        x, y = grid.z[s].real, grid.z[s].imag
        dx, dy = grid.dz[s].real / grid.N, grid.dz[s].imag / grid.N
        area = 0.5 * np.sum(x * dy - y * dx)
        cx = 0.5 * np.sum(x * x * dy) / area
        cy = -0.5 * np.sum(y * y * dx) / area
        b = complex(cx, cy)
        try:
            inside = domain.contains(b)
        except GeometryError:
            inside = True
        if inside or abs(domain.winding_number(b)[0]) != 0:
            raise GeometryError("hole centroid is not in the hole; supply hole points explicitly",
                                domain.source_index[j])
        out.append(b)
    return np.array(out)


def _check_holes(data, b):
    b = np.asarray(b, dtype=complex)
    if len(b) != data.n - 1:
        raise ValueError(f"need {data.n - 1} hole points, got {len(b)}")
    if len(b):
        if np.any(data.domain.boundary_distance(b) <= 1e-9 * data.domain.diameter):
            raise GeometryError("hole point lies on the boundary")
        if np.any(data.domain.winding_number(b) != 0):
            raise GeometryError("hole point is not outside the closed domain")
    return b


def script_l(data):
    """Boundary values of ``calL_i = L(., a_i) S(., a)``, i = 1..n-1."""
    return data.L[1:] * data.S[0][None, :]


def log_moment_matrix(data, b):
    """``A_ik = i * integral of ln|z - b_k| conj(calL_i(z)) dzbar`` over the boundary."""
    b = _check_holes(data, b)
    g = data.grid
    if data.n < 2:
        return np.zeros((0, 0), dtype=complex)
    logs = np.log(np.abs(g.z[None, :] - b[:, None]))
    cL = np.conj(script_l(data))
    dzbar = np.conj(g.zeta_weights)
    return 1j * (cL * dzbar) @ logs.T


def _rhs(data, b):
    """``g_mk = 1/(a_m - b_k) - 4 pi i * integral of ln|z - b_k| S(a_m, z)^2 dzbar``."""
    g = data.grid
    logs = np.log(np.abs(g.z[None, :] - b[:, None]))
    S_am_z = np.conj(data.S[1:])
    dzbar = np.conj(g.zeta_weights)
    integral = (S_am_z ** 2 * dzbar) @ logs.T
    return 1.0 / (data.zeros[:, None] - b[None, :]) - FOUR_PI * 1j * integral


def diagonal_values(data):
    """``calL_m(a_m) = (1/2 pi) dS/dz(a_m, a)``."""
    return cauchy_sum(data.S[0], data.grid, data.zeros, order=1) / (2.0 * np.pi)


def lambda_coefficients(data, b, return_raw=False):
    """Hermitian coefficient matrix ``lam`` of the correction term.

    Setting ``w = a_m`` in the paired identity leaves only ``calL_m(a_m) = d_m``
    on the right, so ``sum_i lam_mi A_ik = g_mk / d_m``.
    """
    b = _check_holes(data, b)
    if data.n < 2:
        z = np.zeros((0, 0), dtype=complex)
        return (z, z) if return_raw else z
    A = log_moment_matrix(data, b)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e13:
        raise NumericalError(f"log-moment matrix is singular (cond ~ {cond:.3g})")
    G = _rhs(data, b)
    d = diagonal_values(data)
    raw = np.linalg.solve(A.T, (G / d[:, None]).T).T
    lam = 0.5 * (raw + raw.conj().T)
    return (lam, raw) if return_raw else lam


class BergmanData:
    """Correction-term data for the Bergman and Lambda kernels.

    Attributes
    ----------
    szego : SzegoData
    b : ndarray
        One point per hole.
    A : ndarray
        Log-moment matrix.
    lam : ndarray
        Hermitian coefficients in the ``calL_i`` basis.
    lam_alt : ndarray
        Coefficients in the ``S(., a_i) L(., a)`` basis.
    hermitian_deviation : float
        ``max |lam - lam^H|`` before symmetrization.
    """

    def __init__(self, szego, b=None, state=None):
        self.szego = szego
        n = szego.n
        if state is not None:
            # restored from an artifact: keep the stored solve exactly
            self.b = np.asarray(state["b"], dtype=complex)
            self.A = np.asarray(state["A"], dtype=complex).reshape(n - 1, n - 1)
            self.lam = np.asarray(state["lam"], dtype=complex).reshape(n - 1, n - 1)
            self.hermitian_deviation = float(state["hermitian_deviation"])
        else:
            self.b = hole_points(szego.domain) if b is None else _check_holes(szego, b)
            self.A = log_moment_matrix(szego, self.b)
            self.lam, raw = lambda_coefficients(szego, self.b, return_raw=True)
            self.hermitian_deviation = float(np.max(np.abs(raw - raw.conj().T))) if n > 1 else 0.0
        self.A_condition = float(np.linalg.cond(self.A)) if n > 1 else 1.0
        self.d = diagonal_values(szego) if n > 1 else np.zeros(0, dtype=complex)
        self.script_l = script_l(szego)
        self.alt_basis = szego.S[1:] * szego.L[0][None, :]
        if n > 1:
            # alt_i = sum_p Q_ip calL_p; fitted on the boundary samples
            Qt, *_ = np.linalg.lstsq(self.script_l.T, self.alt_basis.T, rcond=None)
            self.Q = Qt.T
            self.basis_fit_residual = float(np.max(np.abs(self.script_l.T @ Qt - self.alt_basis.T)))
            self.lam_alt = np.linalg.solve(self.Q.T, np.linalg.solve(self.Q.conj().T, self.lam.T).T)
        else:
            self.Q = self.lam_alt = np.zeros((0, 0), dtype=complex)
            self.basis_fit_residual = 0.0

    def _rows(self, rows, x):
        sz = self.szego
        x, idx = sz._locate(x)
        return sz._boundary_or_cauchy(rows, x, idx)

    def script_l_at(self, x):
        return self._rows(self.script_l, x)

    def alt_basis_at(self, x):
        return self._rows(self.alt_basis, x)

    def bergman(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        shape = z.shape
        z, w = z.ravel(), w.ravel()
        K = FOUR_PI * self.szego.szego(z, w) ** 2
        if self.szego.n > 1:
            K = K + np.einsum("ip,ij,jp->p", self.script_l_at(z), self.lam, np.conj(self.script_l_at(w)))
        return K.reshape(shape)

    def bergman_alt(self, z, w):
        """Same kernel through the ``S(., a_i) L(., a)`` basis (cross-check)."""
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        shape = z.shape
        z, w = z.ravel(), w.ravel()
        K = FOUR_PI * self.szego.szego(z, w) ** 2
        if self.szego.n > 1:
            K = K + np.einsum("ip,ij,jp->p", self.alt_basis_at(z), self.lam_alt, np.conj(self.alt_basis_at(w)))
        return K.reshape(shape)

    def lambda_kernel(self, z, w):
        z, w = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(w, dtype=complex))
        shape = z.shape
        z, w = z.ravel(), w.ravel()
        Lzw = self.szego.garabedian(z, w)
        out = FOUR_PI * Lzw ** 2
        if self.szego.n > 1:
            out = out + np.einsum("ip,ij,jp->p", self.alt_basis_at(z), self.lam_alt, self.script_l_at(w))
        return out.reshape(shape)


def bergman_eval(bdata, z, w):
    return bdata.bergman(z, w)


def lambda_kernel_eval(bdata, z, w):
    return bdata.lambda_kernel(z, w)
