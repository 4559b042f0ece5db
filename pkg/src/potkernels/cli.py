"""Command-line driver: ``potkernels assemble | eval | convergence | fixtures``.

Exit codes: 0 ok, 1 numerical failure, 2 input error.  Errors are written to
stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import artifact, reference
from .errors import GeometryError, NumericalError, OnBoundaryError
from .geometry import Domain, load_domain
from .integral_eq import AccuracyWarning, near_boundary
from .szego import Tolerances, assemble

KERNELS = ("szego", "garabedian", "bergman", "lambda", "poisson", "ahlfors", "omega")
EVAL_COLUMNS = ["z_re", "z_im", "w_re", "w_im", "value_re", "value_im", "near_boundary", "error"]


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    domain: str | None = None
    N: list = field(default_factory=list)
    a: complex | str = "auto"
    out: str | None = None
    format: str = "csv"
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        for n in self.N:
            if n < 16 or n % 2:
                raise InputError(f"N must be even and >= 16, got {n}")

    def tol(self):
        try:
            return Tolerances(**self.tolerances)
        except TypeError as exc:
            raise InputError(str(exc)) from None


def fmt(x):
    return f"{x:.17g}"


def parse_point(text):
    if text == "auto":
        return "auto"
    try:
        re_, im_ = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--a expects 're,im' or 'auto', got {text!r}") from None
    return complex(re_, im_)


def parse_ns(text):
    try:
        return [int(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"--n expects integers, got {text!r}") from None


def resolve_domain(name):
    """A domain-spec path, or the name of a shipped fixture."""
    if name is None:
        raise InputError("--domain is required")
    p = Path(name)
    if p.exists():
        try:
            return load_domain(p)
        except (OSError, UnicodeDecodeError) as exc:
            raise InputError(f"cannot read {name}: {exc}") from None
    try:
        return reference.fixture(name).domain
    except KeyError:
        raise InputError(f"no such domain file or fixture: {name}") from None


def domain_stem(name):
    """File-name stem for artifacts: fixture names are kept whole."""
    p = Path(name)
    return p.stem if p.exists() else p.name


def matching_fixture(domain):
    spec = domain.to_spec()
    for f in reference.fixtures():
        if f.domain.to_spec() == spec:
            return f
    return None


def write_table(rows, columns, out, format):
    if format == "json":
        text = json.dumps([dict(zip(columns, r)) for r in rows], indent=1) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(columns)
        w.writerows(rows)
        text = buf.getvalue()
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --- assemble -----------------------------------------------------------------

def build(domain, N, a, tol):
    return artifact.build_bundle(assemble(domain, N, a, tol))


def cmd_assemble(cfg):
    if len(cfg.N) != 1:
        raise InputError("assemble takes a single --n")
    domain = resolve_domain(cfg.domain)
    bundle = build(domain, cfg.N[0], cfg.a, cfg.tol())
    out = cfg.out or f"{domain_stem(cfg.domain)}-N{cfg.N[0]}.artifact.json"
    artifact.save(bundle, out)
    summary = {"artifact": str(out), "schema": artifact.SCHEMA, **bundle.summary()}
    sys.stdout.write(json.dumps(summary) + "\n")
    return 0


# --- eval -----------------------------------------------------------------------

def read_points(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read points file: {exc}") from None
    pts = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or not "".join(row).strip():
            continue
        try:
            vals = [float(v) if v.strip() else 0.0 for v in row]
        except ValueError:
            if lineno == 1:
                continue            # header
            raise InputError(f"points file line {lineno}: not numeric") from None
        vals = (vals + [0.0] * 4)[:4]
        pts.append((complex(vals[0], vals[1]), complex(vals[2], vals[3])))
    return pts


def _classify(domain, x):
    try:
        if not np.atleast_1d(domain.contains(x))[0]:
            return "outside-domain"
    except OnBoundaryError:
        return "on-boundary"
    return ""


class Evaluator:
    def __init__(self, bundle, kernel, index=1):
        if kernel not in KERNELS:
            raise InputError(f"unknown kernel {kernel!r}; choose from {', '.join(KERNELS)}")
        self.b = bundle
        self.kernel = kernel
        self.index = index
        n = bundle.szego.n
        if kernel == "omega" and not 1 <= index <= n - 1:
            raise InputError(f"--index must be in 1..{n - 1} for omega on this domain")
        self.uses_w = kernel not in ("ahlfors", "omega")

    def node_of(self, w):
        g = self.b.grid
        k = int(np.argmin(np.abs(g.z - w)))
        return k if abs(g.z[k] - w) <= 1e-9 * max(1.0, abs(w)) else -1

    def check(self, z, w):
        """Row error code, or '' if the row can be evaluated."""
        dom = self.b.domain
        if self.kernel == "poisson":
            if self.node_of(w) < 0:
                return "not-grid-node"
            return _classify(dom, z)
        err = _classify(dom, z)
        if err or not self.uses_w:
            return err
        if self.kernel in ("szego", "bergman") and err == "" and self.node_of(w) >= 0:
            return ""
        err = _classify(dom, w)
        if err == "" and self.kernel in ("garabedian", "lambda") and abs(z - w) <= 1e-10:
            return "pole"
        return err

    def one(self, z, w):
        b, k = self.b, self.kernel
        if k == "szego":
            return complex(b.szego.szego(z, w))
        if k == "garabedian":
            return complex(b.szego.garabedian(z, w))
        if k == "bergman":
            return complex(b.bergman.bergman(z, w))
        if k == "lambda":
            return complex(b.bergman.lambda_kernel(z, w))
        if k == "ahlfors":
            return complex(b.szego.ahlfors(z)[0])
        if k == "omega":
            return complex(b.poisson.omega(np.array([z]))[self.index - 1, 0])
        from .harmonic import poisson_kernel
        re_, im_ = poisson_kernel(b.poisson, z, self.node_of(w), return_residual=True)
        return complex(re_[0], im_[0])

    def flag(self, z, w):
        g = self.b.grid
        pts = [z] + ([w] if self.uses_w and self.node_of(w) < 0 else [])
        return int(bool(np.any(near_boundary(g, np.array(pts)))))


def evaluate_rows(bundle, kernel, points, index=1):
    ev = Evaluator(bundle, kernel, index)
    rows = []
    for z, w in points:
        head = [fmt(z.real), fmt(z.imag), fmt(w.real), fmt(w.imag)]
        err = ev.check(z, w)
        if not err:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", AccuracyWarning)
                    v = ev.one(z, w)
                rows.append(head + [fmt(v.real), fmt(v.imag), str(ev.flag(z, w)), ""])
                continue
            except NumericalError:
                err = "pole" if kernel in ("szego", "garabedian", "lambda") else "numeric"
            except GeometryError:
                err = "outside-domain"
        rows.append(head + ["", "", "", err])
    return rows


def poisson_sums(bundle, points):
    """``sum over nodes of p(z, .) * weight`` for each distinct valid ``z``."""
    from .harmonic import poisson_kernel

    out = []
    seen = set()
    for z, _ in points:
        if z in seen or _classify(bundle.domain, z):
            continue
        seen.add(z)
        p = poisson_kernel(bundle.poisson, z, None)
        out.append({"z": [z.real, z.imag], "sum": float(p @ bundle.grid.w)})
    return out


def load_or_build(cfg, use_cache=True, artifact_path=None):
    if artifact_path:
        try:
            return artifact.load(artifact_path)
        except OSError as exc:
            raise InputError(f"cannot read artifact: {exc}") from None
        except (ValueError, KeyError) as exc:
            raise InputError(f"bad artifact: {exc}") from None
    if len(cfg.N) != 1:
        raise InputError("eval needs --artifact or --domain with a single --n")
    domain = resolve_domain(cfg.domain)
    cache = Path(f"{domain_stem(cfg.domain)}-N{cfg.N[0]}.artifact.json")
    if use_cache and cache.exists():
        try:
            bundle = artifact.load(cache)
            same_a = cfg.a == "auto" or bundle.szego.a == cfg.a
            if bundle.domain.to_spec() == domain.to_spec() and same_a:
                return bundle
        except (ValueError, KeyError, OSError):
            pass
    bundle = build(domain, cfg.N[0], cfg.a, cfg.tol())
    if use_cache:
        artifact.save(bundle, cache)
    return bundle


def cmd_eval(cfg, kernel, points_path, artifact_path=None, sum_check=False, index=1, use_cache=True):
    if points_path is None:
        raise InputError("eval needs --points")
    points = read_points(points_path)
    if kernel not in KERNELS:
        raise InputError(f"unknown kernel {kernel!r}; choose from {', '.join(KERNELS)}")
    bundle = load_or_build(cfg, use_cache, artifact_path)
    rows = evaluate_rows(bundle, kernel, points, index)
    write_table(rows, EVAL_COLUMNS, cfg.out, cfg.format)
    if sum_check:
        if kernel != "poisson":
            raise InputError("--sum-check applies to the poisson kernel")
        for s in poisson_sums(bundle, points):
            sys.stderr.write(json.dumps({"sum_check": s}) + "\n")
    return 0


# --- convergence ----------------------------------------------------------------

CONV_KERNELS = ("szego", "garabedian", "bergman", "omega", "dirichlet_residual")


def sample_points(domain, count, seed=20240611, clearance=0.05):
    """Deterministic interior points at least ``clearance * diameter`` from the boundary."""
    rng = np.random.default_rng(seed)
    poly = domain._polys[-1]
    lo = complex(poly.real.min(), poly.imag.min())
    hi = complex(poly.real.max(), poly.imag.max())
    out = []
    while len(out) < count:
        c = lo.real + (hi.real - lo.real) * rng.random(4 * count) \
            + 1j * (lo.imag + (hi.imag - lo.imag) * rng.random(4 * count))
        try:
            ok = domain.contains(c)
        except OnBoundaryError:
            continue
        c = c[ok]
        c = c[domain.boundary_distance(c) > clearance * domain.diameter]
        out.extend(c.tolist())
    return np.array(out[:count])


def _dirichlet_residual(bundle, z):
    from .harmonic import dirichlet_extend

    g = bundle.grid
    phi = np.array([(g.z ** 2).real, (g.z ** 3).imag])
    return float(np.max(np.abs(dirichlet_extend(bundle.poisson, phi, z).imag)))


def kernel_values(bundle, z, w):
    d = bundle.szego
    vals = {
        "szego": d.szego(z, w),
        "garabedian": d.garabedian(z, w),
        "bergman": bundle.bergman.bergman(z, w),
    }
    if d.n > 1:
        vals["omega"] = bundle.poisson.omega(z).real.ravel()
    return vals


def oracle_values(fix, z, w):
    r = fix.params.get("r")
    out = {}
    if fix.name == "disc":
        out["szego"] = reference.disc_szego(z, w)
        out["garabedian"] = reference.disc_garabedian(z, w)
        out["bergman"] = reference.disc_bergman(z, w)
    elif r is not None:
        out["szego"] = np.array([reference.annulus_szego(r, a, b) for a, b in zip(z, w)])
        out["bergman"] = np.array([reference.annulus_bergman(r, a, b) for a, b in zip(z, w)])
        out["omega"] = reference.annulus_harmonic_measure(r, z)
    return out


def convergence_rows(domain, Ns, a="auto", self_mode=False, tol=None, count=20):
    z = sample_points(domain, count, seed=1)
    w = sample_points(domain, count, seed=2)
    fix = None if self_mode else matching_fixture(domain)
    if not self_mode and (fix is None or not fix.oracles):
        raise InputError("no oracle for this domain; use --self")
    bundles = {N: build(domain, N, a, tol) for N in sorted(set(Ns))}
    if self_mode:
        Nref = max(bundles)
        ref = kernel_values(bundles[Nref], z, w)
        Ns = [N for N in sorted(bundles) if N != Nref]
    else:
        ref = oracle_values(fix, z, w)
        Ns = sorted(bundles)
    rows = []
    for N in Ns:
        vals = kernel_values(bundles[N], z, w)
        row = [str(N)]
        for k in CONV_KERNELS[:-1]:
            if k in ref and k in vals:
                row.append(fmt(float(np.max(np.abs(vals[k] - ref[k])))))
            else:
                row.append("")
        row.append(fmt(_dirichlet_residual(bundles[N], z)))
        rows.append(row)
    return rows


def cmd_convergence(cfg, self_mode=False):
    if not cfg.N:
        raise InputError("convergence needs --n as a comma list, e.g. 32,64,128")
    domain = resolve_domain(cfg.domain)
    rows = convergence_rows(domain, cfg.N, cfg.a, self_mode, cfg.tol())
    write_table(rows, ["N", *CONV_KERNELS], cfg.out, cfg.format)
    return 0


# --- fixtures -------------------------------------------------------------------

def cmd_fixtures(cfg):
    rows = [[f.name, str(f.n), str(f.N), " ".join(sorted(f.oracles))] for f in reference.fixtures()]
    if cfg.out:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        for f in reference.fixtures():
            (out / f"{f.name}.json").write_text(json.dumps(f.domain.to_spec(), indent=2) + "\n")
    write_table(rows, ["name", "n", "N", "oracles"], None, cfg.format)
    return 0


# --- entry point ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


def make_parser():
    p = _Parser(prog="potkernels", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=["assemble", "eval", "convergence", "fixtures"])
    p.add_argument("--domain", help="domain-spec JSON path or fixture name")
    p.add_argument("--n", default=None, help="grid size per curve (comma list for convergence)")
    p.add_argument("--a", default="auto", help="base point 're,im' or 'auto'")
    p.add_argument("--kernel", default="szego", help="/".join(KERNELS))
    p.add_argument("--points", help="CSV of re z, im z, re w, im w")
    p.add_argument("--artifact", help="assembled artifact to evaluate")
    p.add_argument("--index", type=int, default=1, help="inner curve for --kernel omega (1-based)")
    p.add_argument("--out", help="output path (directory for fixtures)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--sum-check", action="store_true", help="print sum of p(z,.) * weights per z")
    p.add_argument("--self", dest="self_mode", action="store_true", help="convergence against the largest N")
    p.add_argument("--no-cache", action="store_true", help="eval: do not reuse or write artifacts")
    p.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                   help="tolerance override (zero, separation, simple, nonvanishing, polish, retries)")
    return p


def _tolerances(items):
    out = {}
    for item in items:
        key, sep, val = item.partition("=")
        if not sep:
            raise InputError(f"--tol expects KEY=VALUE, got {item!r}")
        try:
            out[key] = int(val) if key == "retries" else float(val)
        except ValueError:
            raise InputError(f"--tol {key}: not a number") from None
    return out


def run(argv=None):
    args = make_parser().parse_args(argv)
    default_n = {"convergence": "32,64,128"}.get(args.command, "256")
    cfg = RunConfig(
        command=args.command,
        domain=args.domain,
        N=parse_ns(args.n if args.n is not None else default_n),
        a=parse_point(args.a),
        out=args.out,
        format=args.format,
        tolerances=_tolerances(args.tol),
    )
    if args.command == "assemble":
        return cmd_assemble(cfg)
    if args.command == "eval":
        return cmd_eval(cfg, args.kernel, args.points, args.artifact, args.sum_check,
                        args.index, not args.no_cache)
    if args.command == "convergence":
        return cmd_convergence(cfg, args.self_mode)
    return cmd_fixtures(cfg)


def _fail(kind, exc, code):
    payload = {"error": kind, "message": str(exc), "exit_code": code}
    if isinstance(exc, GeometryError):
        payload["reason"] = exc.reason
        payload["curve"] = exc.curve
    sys.stderr.write(json.dumps(payload) + "\n")
    return code


def main(argv=None):
    try:
        return run(argv)
    except InputError as exc:
        return _fail("input", exc, 2)
    except GeometryError as exc:
        return _fail("geometry", exc, 2)
    except NumericalError as exc:
        return _fail("numerical", exc, 1)
    except ValueError as exc:
        return _fail("input", exc, 2)


if __name__ == "__main__":
    sys.exit(main())
