"""Closed-form and series oracles, plus the canonical test domains.

Nothing here calls the solver code: the annulus kernels are summed directly
from orthonormal Laurent monomials.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from .geometry import Circle, Domain, TrigCurve

TWO_PI = 2.0 * np.pi


def _disc_check(*pts):
    for p in pts:
        if np.any(np.abs(p) >= 1.0):
            raise ValueError("disc oracle needs points inside the unit disc")


def disc_szego(z, w):
    _disc_check(z, w)
    return 1.0 / (TWO_PI * (1.0 - z * np.conj(w)))


def disc_bergman(z, w):
    _disc_check(z, w)
    return 1.0 / (np.pi * (1.0 - z * np.conj(w)) ** 2)


def disc_garabedian(z, w):
    _disc_check(z, w)
    return 1.0 / (TWO_PI * (z - w))


def disc_lambda(z, w):
    _disc_check(z, w)
    return 1.0 / (np.pi * (z - w) ** 2)


def disc_poisson(z, w):
    """Poisson kernel of the unit disc for arc length on ``|w| = 1``."""
    _disc_check(z)
    if np.any(np.abs(np.abs(w) - 1.0) > 1e-12):
        raise ValueError("w must lie on the unit circle")
    return (1.0 - np.abs(z) ** 2) / (TWO_PI * np.abs(w - z) ** 2)


def _annulus_args(r, z, w):
    if not 0 < r < 1:
        raise ValueError("annulus needs 0 < r < 1")
    x = complex(z) * np.conj(complex(w))
    q = abs(x)
    if not r * r < q < 1.0:
        raise ValueError("annulus series diverges: need r^2 < |z conj(w)| < 1")
    return x, q


def _terms_needed(q, tol, poly=0):
    """Smallest M with sum_{m >= M} (m+1)^poly q^m below tol (crude but safe)."""
    M = 1
    while True:
        tail = q ** M * ((M + 1) ** poly / (1 - q) + poly * q / (1 - q) ** 2)
        if tail < tol:
            return M
        M += 1


def annulus_szego(r, z, w, tol=1e-16):
    """Szego kernel of ``{r < |z| < 1}``: ``(1/2pi) sum_m x^m / (1 + r^(2m+1))``."""
    x, q = _annulus_args(r, z, w)
    Mp = _terms_needed(q, tol)
    Mn = _terms_needed(r * r / q, tol * r)
    m = np.arange(-Mn, Mp + 1)
    terms = x ** m.astype(float) / (1.0 + r ** (2.0 * m + 1.0))
    return complex(np.sum(terms[np.argsort(np.abs(terms))]) / TWO_PI)


def annulus_bergman(r, z, w, tol=1e-16):
    """Bergman kernel of ``{r < |z| < 1}`` from ``||z^m||^2`` in closed form."""
    x, q = _annulus_args(r, z, w)
    Mp = _terms_needed(q, tol * (1 - r * r), poly=1)
    Mn = _terms_needed(r * r / q, tol * r * r, poly=1)
    m = np.arange(-Mn, Mp + 1).astype(float)
    safe = np.where(m == -1, 1.0, 2.0 * m + 2.0)
    norm2 = np.where(m == -1, -TWO_PI * np.log(r), TWO_PI * (1.0 - r ** (2.0 * m + 2.0)) / safe)
    terms = x ** m / norm2
    return complex(np.sum(terms[np.argsort(np.abs(terms))]))


def annulus_harmonic_measure(r, z):
    """Harmonic measure of the inner circle ``|z| = r``."""
    return np.log(np.abs(z)) / np.log(r)


@dataclass(frozen=True)
class Fixture:
    name: str
    domain: Domain
    N: int
    oracles: frozenset = field(default_factory=frozenset)
    params: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.domain.n


def _build():
    out = [
        Fixture("disc", Domain([Circle(0, 1, 1)]), 128,
                frozenset({"szego", "garabedian", "bergman", "lambda", "poisson"})),
        Fixture("offset-disc", Domain([Circle(0.4 + 0.3j, 0.7, 1)]), 128, frozenset()),
        Fixture("annulus-0.5", Domain([Circle(0, 0.5, -1), Circle(0, 1, 1)]), 256,
                frozenset({"szego", "bergman", "omega"}), {"r": 0.5}),
        Fixture("3conn", Domain([Circle(-0.45, 0.15, -1), Circle(0.45, 0.15, -1), Circle(0, 1, 1)]),
                256, frozenset()),
        Fixture("trig2", Domain([Circle(0.1, 0.3, -1), TrigCurve([(1, 1.0), (-2, 0.15)])]),
                256, frozenset()),
    ]
    return out


_FIXTURES = None


def fixtures():
    """The canonical fixture list (built once)."""
    global _FIXTURES
    if _FIXTURES is None:
        _FIXTURES = _build()
    return list(_FIXTURES)


def fixture(name):
    for f in fixtures():
        if f.name == name:
            return f
    raise KeyError(f"unknown fixture {name!r}; known: {[f.name for f in fixtures()]}")


def fixture_spec_path(name):
    """Path of the shipped domain-spec JSON for a fixture."""
    return resources.files("potkernels") / "fixtures" / f"{name}.json"
