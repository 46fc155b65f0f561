"""Command-line front end.

Subcommands:

* ``frames``   -- tabulate the Frenet and adapted frames along the curve.
* ``surface``  -- tessellate the surface and write a Wavefront OBJ.
* ``classify`` -- developability / special-case report (verdict is data,
  not exit status).
* ``verify``   -- closed-form vs oracle cross-checks plus any expectations
  declared in the config; exit 1 on failure.

Exit codes: 0 ok/pass, 1 verification failed, 2 usage/config error,
3 geometry error.  Errors print one machine-parsable line to stderr.
Outputs are written atomically (temp file + rename) and are byte-identical
across repeated runs of the same config.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import invariants, mesh_io, ruled
from .curve import CurveDef
from .errors import GeometryError
from .frame import ExplicitTheta, RotationMinimizing
from .ruled import DirectorField, RuledSurface, RuledSurfaceDef


class ConfigError(Exception):
    pass


@dataclass
class JobConfig:
    surface: RuledSurfaceDef
    n_s: int
    n_v: int
    tol_dev: float
    tol_inv: float
    tol_K: float
    mesh_path: str | None
    report_path: str | None
    fmt: str
    expect: dict


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"missing '{key}' in {where}")
    return doc[key]


def _parse_dsl(text, where: str) -> ex.Expr:
    if not isinstance(text, str):
        raise ConfigError(f"{where} must be a DSL string")
    try:
        return ex.parse(text)
    except ex.ExprSyntaxError as err:
        raise ConfigError(f"{where}: {err}") from err


def load_config(path: str) -> JobConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read config: {err}") from err
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err

    cdoc = _require(doc, "curve", "config")
    s_range = _require(cdoc, "s_range", "curve")
    if (not isinstance(s_range, list) or len(s_range) != 2
            or not all(isinstance(x, (int, float)) for x in s_range)
            or not s_range[0] < s_range[1]):
        raise ConfigError("curve.s_range must be [min, max] with min < max")
    curve = CurveDef(
        _parse_dsl(_require(cdoc, "x", "curve"), "curve.x"),
        _parse_dsl(_require(cdoc, "y", "curve"), "curve.y"),
        _parse_dsl(_require(cdoc, "z", "curve"), "curve.z"),
        float(s_range[0]), float(s_range[1]))

    tdoc = _require(doc, "theta", "config")
    mode = _require(tdoc, "mode", "theta")
    if mode == "rmf":
        if "theta0" not in tdoc or "expr" in tdoc:
            raise ConfigError("theta mode 'rmf' takes exactly 'theta0'")
        policy = RotationMinimizing(float(tdoc["theta0"]))
    elif mode == "explicit":
        if "expr" not in tdoc or "theta0" in tdoc:
            raise ConfigError("theta mode 'explicit' takes exactly 'expr'")
        policy = ExplicitTheta(_parse_dsl(tdoc["expr"], "theta.expr"))
    else:
        raise ConfigError(f"theta.mode must be 'rmf' or 'explicit', got {mode!r}")

    ddoc = _require(doc, "director", "config")
    director = DirectorField(
        _parse_dsl(_require(ddoc, "x1", "director"), "director.x1"),
        _parse_dsl(_require(ddoc, "x2", "director"), "director.x2"),
        _parse_dsl(_require(ddoc, "x3", "director"), "director.x3"))

    gdoc = _require(doc, "grid", "config")
    v_range = _require(gdoc, "v_range", "grid")
    if (not isinstance(v_range, list) or len(v_range) != 2
            or not v_range[0] < v_range[1]):
        raise ConfigError("grid.v_range must be [min, max] with min < max")
    n_s = int(_require(gdoc, "n_s", "grid"))
    n_v = int(_require(gdoc, "n_v", "grid"))
    if n_s < 2 or n_v < 2:
        raise ConfigError("grid.n_s and grid.n_v must be >= 2")

    tol = doc.get("tolerances", {})
    odoc = doc.get("outputs", {})
    fmt = odoc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("outputs.format must be 'csv' or 'json'")

    sdef = RuledSurfaceDef(curve, policy, director,
                           float(v_range[0]), float(v_range[1]))
    return JobConfig(
        surface=sdef,
        n_s=n_s,
        n_v=n_v,
        tol_dev=float(tol.get("tol_dev", ruled.TOL_DEV)),
        tol_inv=float(tol.get("tol_inv", invariants.TOL_CLOSED)),
        tol_K=float(tol.get("tol_K", ruled.TOL_K)),
        mesh_path=odoc.get("mesh"),
        report_path=odoc.get("report"),
        fmt=fmt,
        expect=doc.get("expect", {}),
    )


def write_atomic(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# subcommands


def _s_grid(job: JobConfig):
    c = job.surface.curve
    return np.linspace(c.t_min, c.t_max, job.n_s)


def cmd_frames(job: JobConfig, out_path: str) -> int:
    surface = RuledSurface(job.surface)
    cols = (["s", "kappa", "tau", "theta"]
            + [f"{v}_{a}" for v in ("T", "N", "B", "U", "V") for a in "xyz"])
    lines = [",".join(cols)]
    for s in _s_grid(job):
        fd, af = surface.frame(float(s))
        row = [s, fd.kappa, fd.tau, af.theta]
        for vec in (fd.T, fd.N, fd.B, af.U, af.V):
            row.extend(vec)
        lines.append(",".join(mesh_io.CSV_FMT % x for x in row))
    write_atomic(out_path, "\n".join(lines) + "\n")
    return 0


def cmd_surface(job: JobConfig, out_path: str) -> int:
    surface = RuledSurface(job.surface)
    mesh = mesh_io.tessellate(surface, job.n_s, job.n_v)
    write_atomic(out_path, mesh_io.write_obj(mesh))
    return 0


def cmd_classify(job: JobConfig, out_path: str) -> int:
    surface = RuledSurface(job.surface)
    report = ruled.classify(surface, job.n_s, job.n_v,
                            tol_dev=job.tol_dev, tol_K=job.tol_K)
    bc = invariants.base_curve_report(surface, _s_grid(job), tol=job.tol_inv)
    report = dataclasses.replace(report, base_curve=bc)
    write_atomic(out_path, mesh_io.write_report(report, bc.samples, job.fmt))
    return 0


def _check(checks: list, name: str, value: float, tol: float):
    checks.append({"check": name, "max_abs": value, "tol": tol,
                   "pass": bool(value < tol)})


def cmd_verify(job: JobConfig, out_path: str) -> int:
    surface = RuledSurface(job.surface)
    grid = _s_grid(job)
    bc = invariants.base_curve_report(surface, grid, tol=job.tol_inv)
    usable = [r for r in bc.samples if not math.isnan(r.k_g)]

    checks = []
    if usable:
        _check(checks, "k_g closed vs <NxT,T'> oracle",
               max(abs(r.k_g - invariants.geodesic_curvature_numeric(surface, r.s))
                   for r in usable), invariants.TOL_FD)
        _check(checks, "k_n closed vs <r'',N> oracle",
               max(abs(r.k_n - invariants.normal_curvature_numeric(surface, r.s))
                   for r in usable), invariants.TOL_FD)
        _check(checks, "tau_g closed vs <NxN',T'> oracle",
               max(abs(r.tau_g - invariants.geodesic_torsion_numeric(surface, r.s))
                   for r in usable), invariants.TOL_FD)
        _check(checks, "rho closed vs <N',NxT> oracle",
               max(abs(r.rho - invariants.curvature_line_residual_numeric(surface, r.s))
                   for r in usable), invariants.TOL_FD)
        _check(checks, "tau_g = -k_g*k_n identity",
               max(abs(r.tau_g + r.k_g * r.k_n) for r in usable), 1e-10)
    if surface.is_rmf:
        err = 0.0
        for r in bc.samples:
            _, world = surface.director_derivative_closed(r.s)
            err = max(err, float(np.max(np.abs(
                world - surface.director_derivative_numeric(r.s)))))
        _check(checks, "closed vs numeric director derivative", err, 1e-8)
        det_err = max(
            abs(surface.ruling_det(r.s)
                - _closed_det_numerator(surface, r.s))
            for r in bc.samples)
        _check(checks, "det(T,X,X') vs closed numerator", det_err, 1e-8)

    expect_results = []
    flag_map = {
        "geodesic": bc.is_geodesic,
        "asymptotic": bc.is_asymptotic,
        "curvature_line_frame": bc.is_curvature_line_frame,
        "curvature_line": bc.is_curvature_line_rodrigues,
    }
    cls = None
    for key, want in job.expect.items():
        if key == "developable":
            if cls is None:
                cls = ruled.classify(surface, job.n_s, job.n_v,
                                     tol_dev=job.tol_dev, tol_K=job.tol_K)
            got = cls.verdict
        elif key in flag_map:
            got = flag_map[key]
        else:
            raise ConfigError(f"unknown expectation {key!r}")
        expect_results.append({"expect": key, "want": want, "got": got,
                               "pass": bool(got == want)})

    ok = all(c["pass"] for c in checks) and all(e["pass"] for e in expect_results)
    doc = {
        "schema_version": mesh_io.SCHEMA_VERSION,
        "checks": checks,
        "expectations": expect_results,
        "flags": {k: bool(v) for k, v in flag_map.items()},
        "director_parallel_tangent": bc.director_parallel_tangent,
        "pass": ok,
    }
    write_atomic(out_path, json.dumps(mesh_io._jsonable(doc), indent=2,
                                      sort_keys=True) + "\n")
    return 0 if ok else 1


def _closed_det_numerator(surface: RuledSurface, s: float) -> float:
    fd, af = surface.frame(s)
    j1, j2, j3 = surface.coefficients(s)
    p2, p3 = j2.d1 / fd.speed, j3.d1 / fd.speed
    return ((j2.value * p3 - j3.value * p2)
            - fd.kappa * j1.value * (j2.value * math.sin(af.theta)
                                     + j3.value * math.cos(af.theta)))


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="rmfruled",
        description="Ruled surfaces from adapted frames: invariants, "
                    "developability classification, meshing.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (("frames", "tabulate curve and frame data"),
                           ("surface", "tessellate and write an OBJ mesh"),
                           ("classify", "developability and special cases"),
                           ("verify", "closed-form vs oracle cross-checks")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--config", required=True, help="JSON job config")
        sp.add_argument("--out", help="output path (overrides config outputs)")
        sp.add_argument("--samples", type=int, help="override grid.n_s")
        sp.add_argument("--format", choices=("csv", "json"),
                        help="override outputs.format")
        sp.add_argument("--tol-dev", type=float, help="override tol_dev")
    return p


def _resolve_out(args, job: JobConfig) -> str:
    if args.out:
        return args.out
    default = job.mesh_path if args.command == "surface" else job.report_path
    if not default:
        raise ConfigError(f"no output path for '{args.command}' "
                          "(set --out or the config outputs section)")
    return default


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        job = load_config(args.config)
        if args.samples is not None:
            if args.samples < 2:
                raise ConfigError("--samples must be >= 2")
            job.n_s = args.samples
        if args.format:
            job.fmt = args.format
        if getattr(args, "tol_dev", None) is not None:
            job.tol_dev = args.tol_dev
        out = _resolve_out(args, job)
        handler = {"frames": cmd_frames, "surface": cmd_surface,
                   "classify": cmd_classify, "verify": cmd_verify}[args.command]
        return handler(job, out)
    except ConfigError as err:
        print(f"E_CONFIG: {err}", file=sys.stderr)
        return 2
    except (GeometryError, ex.ExprDomainError) as err:
        print(f"E_GEOMETRY: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
