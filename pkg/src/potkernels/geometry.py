"""Boundary curves, finitely connected domains and periodic quadrature grids.

Every curve is parameterized on ``t in [0, 1)``.  A :class:`Domain` keeps its
curves ordered inner-first with the outer curve last, so curve ``j`` for
``j < n - 1`` bounds the hole ``D_j`` and ``curves[-1]`` is the outer boundary.
The user's original curve indices are kept for error messages.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import GeometryError, OnBoundaryError

TWO_PI = 2.0 * np.pi
# resolution used for the grid-level geometric checks in Domain
CHECK_RESOLUTION = 256


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float
    orientation: int = 1

    def __post_init__(self):
        if not self.radius > 0:
            raise GeometryError("radius must be positive")
        if self.orientation not in (1, -1):
            raise GeometryError("orientation must be +1 or -1")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def evaluate(self, t):
        w = TWO_PI * 1j * self.orientation
        e = self.radius * np.exp(w * np.asarray(t, dtype=float))
        return self.center + e, w * e, w * w * e

    def to_spec(self):
        return {
            "type": "circle",
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "orientation": self.orientation,
        }


@dataclass(frozen=True)
class TrigCurve:
    """Trigonometric polynomial ``z(t) = sum_m c_m exp(2 pi i m t)``."""

    modes: tuple
    coeffs: tuple

    def __init__(self, coeffs):
        if isinstance(coeffs, dict):
            items = sorted(coeffs.items())
        else:
            items = sorted((int(m), complex(c)) for m, c in coeffs)
        modes = tuple(int(m) for m, _ in items)
        if len(set(modes)) != len(modes):
            raise GeometryError("repeated Fourier mode")
        if not any(m != 0 and c != 0 for m, c in items):
            raise GeometryError("trigonometric curve has no non-constant mode")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coeffs", tuple(complex(c) for _, c in items))

    def evaluate(self, t):
        t = np.asarray(t, dtype=float)
        m = np.array(self.modes, dtype=float)
        c = np.array(self.coeffs)
        e = np.exp(TWO_PI * 1j * np.multiply.outer(t, m)) * c
        w = TWO_PI * 1j * m
        return e.sum(axis=-1), (e * w).sum(axis=-1), (e * w * w).sum(axis=-1)

    def to_spec(self):
        return {
            "type": "trig",
            "coeffs": [[m, c.real, c.imag] for m, c in zip(self.modes, self.coeffs)],
        }


def curve_eval(curve, t):
    """Position and first two parameter derivatives of ``curve`` at ``t``."""
    return curve.evaluate(t)


def curve_from_spec(spec, index=None):
    try:
        kind = spec["type"]
        if kind == "circle":
            cx, cy = spec["center"]
            return Circle(complex(cx, cy), float(spec["radius"]), int(spec.get("orientation", 1)))
        if kind == "trig":
            return TrigCurve([(int(m), complex(re, im)) for m, re, im in spec["coeffs"]])
    except GeometryError as exc:
        raise GeometryError(exc.reason, index) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise GeometryError(f"malformed curve spec ({exc})", index) from None
    raise GeometryError(f"unknown curve type {kind!r}", index)


def _polygon_area(z):
    zn = np.roll(z, -1)
    return 0.5 * np.sum(z.real * zn.imag - zn.real * z.imag)


def _winding(poly, p):
    """Winding number of the closed polygon ``poly`` around each point of ``p``."""
    p = np.atleast_1d(np.asarray(p, dtype=complex))
    d = poly[None, :] - p[:, None]
    ang = np.angle(np.roll(d, -1, axis=1) / d)
    return np.rint(ang.sum(axis=1) / TWO_PI).astype(int)


def _segments_cross(p, q):
    """Does any segment of polygon ``p`` properly cross one of polygon ``q``?

    With ``q is p`` adjacent segments (which share a vertex) are skipped.
    """
    a, b = p, np.roll(p, -1)
    c, d = q, np.roll(q, -1)

    def orient(u, v, w):
        return np.sign(((v - u) * np.conj(w - u)).imag)

    o1 = orient(a[:, None], b[:, None], c[None, :])
    o2 = orient(a[:, None], b[:, None], d[None, :])
    o3 = orient(c[None, :], d[None, :], a[:, None])
    o4 = orient(c[None, :], d[None, :], b[:, None])
    hit = (o1 * o2 < 0) & (o3 * o4 < 0)
    if q is p:
        m = len(p)
        i, j = np.indices((m, m))
        gap = np.abs(i - j)
        hit &= (gap > 1) & (gap < m - 1)
    return bool(hit.any())


class Domain:
    """A bounded domain whose boundary is a finite union of disjoint curves.

    Parameters
    ----------
    curves : sequence of Circle / TrigCurve
    outer : int
        Index (into ``curves``) of the outer boundary curve.
    """

    def __init__(self, curves, outer=None, check=True):
        curves = list(curves)
        if not curves:
            raise GeometryError("domain needs at least one curve")
        if outer is None:
            outer = len(curves) - 1
        if not 0 <= outer < len(curves):
            raise GeometryError(f"outer index {outer} out of range")
        order = [i for i in range(len(curves)) if i != outer] + [outer]
        self.curves = tuple(curves[i] for i in order)
        self.source_index = tuple(order)
        self.outer_source = outer
        self.n = len(self.curves)
        t = np.arange(CHECK_RESOLUTION) / CHECK_RESOLUTION
        self._polys = tuple(c.evaluate(t)[0] for c in self.curves)
        outer_poly = self._polys[-1]
        self.diameter = float(np.max(np.abs(outer_poly[:, None] - outer_poly[None, :])))
        if check:
            self._validate()

    # --- construction -----------------------------------------------------
    @classmethod
    def from_spec(cls, spec):
        if "curves" not in spec:
            raise GeometryError("domain spec lacks 'curves'")
        curves = [curve_from_spec(c, i) for i, c in enumerate(spec["curves"])]
        return cls(curves, int(spec.get("outer", len(curves) - 1)))

    def to_spec(self):
        """Spec with the outer curve last (the internal ordering)."""
        return {"curves": [c.to_spec() for c in self.curves], "outer": self.n - 1}

    def _validate(self):
        tol = 1e-9 * self.diameter
        t = np.arange(CHECK_RESOLUTION) / CHECK_RESOLUTION
        for j, (curve, poly) in enumerate(zip(self.curves, self._polys)):
            src = self.source_index[j]
            if np.min(np.abs(curve.evaluate(t)[1])) <= tol:
                raise GeometryError("degenerate parameterization (z' vanishes)", src)
            if _segments_cross(poly, poly):
                raise GeometryError("curve is not simple (self-intersection)", src)
        for i in range(self.n):
            for j in range(i + 1, self.n):
                p, q = self._polys[i], self._polys[j]
                if np.min(np.abs(p[:, None] - q[None, :])) <= tol or _segments_cross(p, q):
                    raise GeometryError("curves intersect", self.source_index[i])
        outer = self._polys[-1]
        if _polygon_area(outer) <= 0:
            raise GeometryError("outer curve must be counterclockwise", self.outer_source)
        for j in range(self.n - 1):
            src = self.source_index[j]
            poly = self._polys[j]
            if _polygon_area(poly) >= 0:
                raise GeometryError("inner curve must be clockwise", src)
            if np.any(_winding(outer, poly) != 1):
                raise GeometryError("curves intersect (inner curve not inside outer)", src)
            for k in range(self.n - 1):
                if k != j and np.any(_winding(self._polys[k], poly) != 0):
                    raise GeometryError("curves intersect (nested inner curves)", src)

    # --- queries ------------------------------------------------------------
    def boundary_distance(self, z):
        """Distance from each point of ``z`` to the boundary (Newton-refined)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        best = np.full(z.shape, np.inf)
        for curve, poly in zip(self.curves, self._polys):
            k = np.argmin(np.abs(poly[None, :] - z[:, None]), axis=1)
            t = k / CHECK_RESOLUTION
            for _ in range(8):
                p, dp, ddp = curve.evaluate(t)
                r = p - z
                g = (np.conj(r) * dp).real
                h = (np.abs(dp) ** 2 + (np.conj(r) * ddp).real)
                step = np.where(np.abs(h) > 0, g / np.where(h == 0, 1, h), 0)
                t = t - np.clip(step, -1.0 / CHECK_RESOLUTION, 1.0 / CHECK_RESOLUTION)
            d = np.minimum(np.abs(curve.evaluate(t)[0] - z), np.min(np.abs(poly[None, :] - z[:, None]), axis=1))
            best = np.minimum(best, d)
        return best

    def contains(self, z, tol=None):
        """Boolean mask of points inside the domain.

        Raises :class:`OnBoundaryError` if a point is within ``tol`` of the
        boundary (default ``1e-9 * diameter``).
        """
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        tol = 1e-9 * self.diameter if tol is None else tol
        d = self.boundary_distance(z)
        if np.any(d <= tol):
            raise OnBoundaryError(f"point {z[np.argmin(d)]} lies on the boundary")
        inside = self.winding_number(z) == 1
        return bool(inside[0]) if scalar else inside

    def winding_number(self, z):
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        total = np.zeros(z.shape, dtype=int)
        for poly in self._polys:
            total += _winding(poly, z)
        return total


def contains(domain, z):
    return domain.contains(z)


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    """Equispaced-in-``t`` nodes on every curve with trapezoid weights.

    Arrays are flat over the whole boundary; curve ``j`` occupies
    ``slice(j * N, (j + 1) * N)``.
    """

    domain: Domain
    N: int
    t: np.ndarray
    z: np.ndarray
    dz: np.ndarray
    d2z: np.ndarray
    T: np.ndarray = field(init=False)
    w: np.ndarray = field(init=False)
    curve_index: np.ndarray = field(init=False)

    def __post_init__(self):
        speed = np.abs(self.dz)
        object.__setattr__(self, "T", self.dz / speed)
        object.__setattr__(self, "w", speed / self.N)
        object.__setattr__(self, "curve_index", np.repeat(np.arange(self.domain.n), self.N))
        for a in (self.t, self.z, self.dz, self.d2z, self.T, self.w, self.curve_index):
            a.setflags(write=False)

    @property
    def n(self):
        return self.domain.n

    @property
    def size(self):
        return self.n * self.N

    @property
    def zeta_weights(self):
        """Complex weights for ``dzeta``: ``z'(t_k) / N``."""
        return self.dz / self.N

    def curve_slice(self, j):
        return slice(j * self.N, (j + 1) * self.N)

    @property
    def spacing(self):
        """Largest distance between consecutive nodes."""
        z = self.z.reshape(self.n, self.N)
        return float(np.max(np.abs(np.roll(z, -1, axis=1) - z)))

    def node_index(self, z, tol=1e-13):
        """Index of the grid node equal to ``z`` (within ``tol``), else ``None``."""
        d = np.abs(self.z - z)
        k = int(np.argmin(d))
        return k if d[k] <= tol * max(1.0, abs(z)) else None


def build_grid(domain, N):
    """Quadrature grid with ``N`` nodes per curve."""
    N = int(N)
    if N < 4 or N % 2:
        raise GeometryError(f"N must be even and >= 4, got {N}")
    t1 = np.arange(N) / N
    zs, dzs, d2zs = [], [], []
    for j, curve in enumerate(domain.curves):
        z, dz, d2z = curve.evaluate(t1)
        if np.min(np.abs(dz)) <= 1e-12 * domain.diameter:
            raise GeometryError("degenerate parameterization (z' vanishes at a node)",
                                domain.source_index[j])
        zs.append(z)
        dzs.append(dz)
        d2zs.append(d2z)
    t = np.tile(t1, domain.n)
    grid = BoundaryGrid(domain, N, t, np.concatenate(zs), np.concatenate(dzs), np.concatenate(d2zs))
    d = np.abs(grid.z[:, None] - grid.z[None, :])
    np.fill_diagonal(d, np.inf)
    if np.min(d) <= 1e-12 * domain.diameter:
        raise GeometryError("coincident grid nodes")
    return grid


def spectral_derivative(samples, grid):
    """d/dt of periodic samples, per curve, by FFT differentiation.

    ``samples`` may carry leading batch axes; the last axis runs over the grid.
    """
    samples = np.asarray(samples)
    shape = samples.shape
    f = samples.reshape(shape[:-1] + (grid.n, grid.N))
    k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
    k[grid.N // 2] = 0.0  # Nyquist mode has no consistent derivative
    df = np.fft.ifft(np.fft.fft(f, axis=-1) * (TWO_PI * 1j * k), axis=-1)
    if not np.iscomplexobj(samples):
        df = df.real
    return df.reshape(shape)


def load_domain(path):
    with open(Path(path), encoding="utf-8") as fh:
        try:
            spec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GeometryError(f"invalid JSON: {exc}") from None
    return Domain.from_spec(spec)


def save_domain(domain, path):
    Path(path).write_text(json.dumps(domain.to_spec(), indent=2) + "\n", encoding="utf-8")
