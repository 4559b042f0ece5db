"""Versioned JSON artifacts holding assembled kernel data.

Complex arrays are stored as nested ``[re, im]`` pairs.  Python's float repr
round-trips exactly, so evaluations from a re-read artifact are bit-identical
to the ones from the in-memory objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .bergman import BergmanData
from .geometry import Domain, build_grid
from .harmonic import PoissonData
from .szego import SzegoData

SCHEMA = "potkernels.artifact/1"


def encode(x):
    """Complex scalar/array to nested ``[re, im]`` lists."""
    a = np.asarray(x, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode(v):
    a = np.asarray(v, dtype=float)
    if a.size == 0:
        return np.zeros(a.shape[:-1] if a.ndim > 1 else (0,), dtype=complex)
    return a[..., 0] + 1j * a[..., 1]


def _jsonable(v):
    if isinstance(v, complex):
        return encode(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


@dataclass
class Bundle:
    """Everything one assembly produces."""

    szego: SzegoData
    bergman: BergmanData
    poisson: PoissonData

    @property
    def domain(self):
        return self.szego.domain

    @property
    def grid(self):
        return self.szego.grid

    def summary(self):
        d = self.szego
        return {
            "n": d.n,
            "N": d.grid.N,
            "a": encode(d.a),
            "zeros": encode(d.zeros),
            "kerzman_stein_condition": d.diagnostics.get("kerzman_stein_condition"),
            "kerzman_stein_residual": d.diagnostics.get("kerzman_stein_residual"),
            "gram_condition": d.diagnostics.get("gram_condition"),
            "inverse_residual": d.diagnostics.get("inverse_residual"),
            "S_aa_imag": d.diagnostics.get("S_aa_imag"),
            "lambda_hermitian_deviation": self.bergman.hermitian_deviation,
            "log_moment_condition": self.bergman.A_condition,
            "period_matrix_imag": self.poisson.period_imag,
            "omega_method": self.poisson.method if d.n > 1 else None,
        }


def build_bundle(szego, b=None):
    return Bundle(szego, BergmanData(szego, b), PoissonData(szego, b))


def to_dict(bundle):
    d = bundle.szego
    bd = bundle.bergman
    pd = bundle.poisson
    return {
        "schema": SCHEMA,
        "domain": d.domain.to_spec(),
        "N": d.grid.N,
        "szego": {
            "a": encode(d.a),
            "zeros": encode(d.zeros),
            "S": encode(d.S),
            "L": encode(d.L),
            "f": encode(d.f),
            "c0": d.c0,
            "C": encode(d.C),
            "S_aa": encode(d.S_aa),
            "gram": encode(d.gram),
            "diagnostics": {k: _jsonable(v) for k, v in d.diagnostics.items()},
        },
        "bergman": {
            "b": encode(bd.b),
            "A": encode(bd.A),
            "lam": encode(bd.lam),
            "hermitian_deviation": bd.hermitian_deviation,
        },
        "poisson": {
            "b": encode(pd.b),
            "A": encode(pd.A),
            "B": encode(pd.B),
            "method": pd.method,
        },
    }


def from_dict(obj):
    schema = obj.get("schema")
    if schema != SCHEMA:
        raise ValueError(f"unsupported artifact schema {schema!r} (expected {SCHEMA!r})")
    domain = Domain.from_spec(obj["domain"])
    grid = build_grid(domain, int(obj["N"]))
    s = obj["szego"]
    n = domain.n
    sz = SzegoData(
        grid,
        decode(s["a"]).item(),
        decode(s["zeros"]).reshape(n - 1),
        decode(s["S"]).reshape(n, grid.size),
        decode(s["L"]).reshape(n, grid.size),
        decode(s["f"]).reshape(grid.size),
        s["c0"],
        decode(s["C"]),
        decode(s["S_aa"]).item(),
        decode(s["gram"]),
        s.get("diagnostics"),
    )
    bg = obj["bergman"]
    bd = BergmanData(sz, state={**bg, "b": decode(bg["b"]), "A": decode(bg["A"]), "lam": decode(bg["lam"])})
    pg = obj["poisson"]
    pd = PoissonData(sz, state={"b": decode(pg["b"]), "A": decode(pg["A"]), "B": decode(pg["B"]),
                                "method": pg["method"]})
    return Bundle(sz, bd, pd)


def save(bundle, path):
    with open(path, "w") as fh:
        json.dump(to_dict(bundle), fh)


def load(path):
    with open(path) as fh:
        return from_dict(json.load(fh))
