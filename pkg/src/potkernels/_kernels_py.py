"""Pure numpy versions of the dense kernels (fallback for ``_kernels``)."""

import numpy as np

_C = 1.0 / (2j * np.pi)


def ks_matrix(z, T, w):
    """Nystrom matrix ``A(z_j, z_k) w_k`` of the Kerzman-Stein kernel.

    The diagonal holds the smooth limit of the kernel, which is zero.
    """
    z = np.asarray(z, dtype=complex)
    T = np.asarray(T, dtype=complex)
    d = z[None, :] - z[:, None]
    np.fill_diagonal(d, 1.0)
    A = _C * (T[None, :] / d - np.conj(T)[:, None] / np.conj(d))
    np.fill_diagonal(A, 0.0)
    return A * np.asarray(w, dtype=float)[None, :]


def cauchy_sum(F, zk, zw, targets, order):
    """``(1/2 pi i) sum_k F[:, k] zw_k / (zk_k - x)**(order + 1)`` for each target."""
    F = np.asarray(F, dtype=complex)
    x = np.asarray(targets, dtype=complex)
    r = 1.0 / (zk[None, :] - x[:, None])
    if order == 1:
        r = r * r
    return _C * (F * zw) @ r.T
