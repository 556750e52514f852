"""Command-line front end.

Subcommands ``verify``, ``iterate``, ``classify`` and ``ac`` read one JSON
experiment config and write their artifacts into ``--out``.  Exit codes:
0 pass, 1 property or expectation failure, 2 config error, 3 divergence.
"""
from __future__ import annotations

import argparse
import importlib.metadata
import platform
import sys
import time
from pathlib import Path

from . import __version__
from . import config as cfg
from .diagnostics import (asymptotic_center, default_window, delta_limit_estimate,
                          demiclosedness_probe, double_sequence_residual)
from .geometry import GeometryError
from .io import dumps, encode_point, read_points, trace_csv, write_json
from .mappings import Composition, PROPERTIES, classify
from .minimize import SolverError
from .solvers import cyclic_picard, fejer_slack, mann, picard, telescoping_excess
from .suites import cauchy_schwarz_suite, convexity_suite, identity_suite

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3
SUITES = ("cauchy_schwarz", "identities", "convexity", "classification")


def _outputs(doc, out_dir, **defaults):
    names = dict(defaults)
    names.update(doc.get("output", {}))
    return {k: Path(out_dir) / v for k, v in names.items()}


# ---------------------------------------------------------------- verify

def run_verify(exp, jobs=1):
    """Run the invariant suites; returns ``(report, exit code)``."""
    doc = exp.doc
    vspec = doc.get("verify", {})
    suites = vspec.get("suites", list(SUITES))
    n = exp.count
    report = {"command": "verify", "seed": exp.seed, "space": repr(exp.space), "suites": {}}
    ok = True
    # each suite draws from its own stream so toggling one leaves the others unchanged
    if "cauchy_schwarz" in suites:
        res = cauchy_schwarz_suite(exp.space, exp.sampler(1), n, jobs)
        report["suites"]["cauchy_schwarz"] = res.to_dict(exp.space)
        ok &= res.passed
    if "identities" in suites:
        tol = float(vspec.get("identity_tolerance", 1e-9))
        res = identity_suite(exp.space, exp.sampler(2), max(1, n // 10), jobs, tol)
        report["suites"]["identities"] = res.to_dict(exp.space)
        ok &= res.passed
    if "convexity" in suites:
        res = convexity_suite(exp.space, exp.sampler(3), n, jobs)
        report["suites"]["convexity"] = res.to_dict(exp.space)
        ok &= res.passed
    if "classification" in suites and exp.mapping is not None:
        tol = float(vspec.get("tolerance", -1e-7))
        rep = classify(exp.mapping, exp.sampler(4), n, exp.fixed_point, jobs, tol)
        required = vspec.get("properties")
        if required is None:
            expected = doc.get("expected")
            required = [p for p, v in expected.items() if v == "pass"] if expected \
                else [p for p in PROPERTIES if rep.verdicts[p] != "n/a"]
        failed = [p for p in required if rep.verdicts[p] != "pass"]
        section = rep.to_dict(exp.space)
        section["required"] = list(required)
        section["failed"] = failed
        section["passed"] = not failed
        report["suites"]["classification"] = section
        ok &= not failed
    report["passed"] = bool(ok)
    return report, EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------- classify

def run_classify(exp, jobs=1):
    if exp.mapping is None:
        raise cfg.ConfigError("classify needs a mapping")
    expected = exp.doc.get("expected")
    if not expected:
        raise cfg.ConfigError("classify needs an 'expected' section")
    tol = float(exp.doc.get("verify", {}).get("tolerance", -1e-7))
    rep = classify(exp.mapping, exp.sampler(4), exp.count, exp.fixed_point, jobs, tol)
    mismatches = {p: {"expected": v, "verdict": rep.verdicts[p]}
                  for p, v in expected.items() if rep.verdicts[p] != v}
    report = {"command": "classify", "seed": exp.seed, "space": repr(exp.space),
              "expected": dict(expected), "mismatches": mismatches,
              "matches": not mismatches, **rep.to_dict(exp.space)}
    return report, EXIT_OK if not mismatches else EXIT_FAIL


# ---------------------------------------------------------------- iterate

def run_iterate(exp):
    """Returns ``(trace, diagnostics, exit code)``."""
    doc = exp.doc
    sol = doc["solver"]
    settings = cfg.solver_settings(doc)
    space = exp.space
    x1 = exp.point(sol["start"])
    ref = exp.point(sol["reference"]) if "reference" in sol else exp.fixed_point
    common = dict(max_iter=settings["max_iter"], tol=settings["tol"], reference=ref,
                  divergence_factor=settings["divergence_factor"])
    method = settings["method"]
    if method == "picard":
        T = exp.mapping
        trace = picard(T, x1, **common)
    elif method == "mann":
        T = exp.mapping
        trace = mann(T, x1, settings["schedule"], **common)
    else:
        T = Composition(tuple(exp.family))
        trace = cyclic_picard(exp.family, x1, **common)

    final = trace.final
    diag = {
        "command": "iterate",
        "method": method,
        "termination": trace.termination,
        "n_iter": trace.n_iter,
        "start": encode_point(space, x1),
        "final": encode_point(space, final),
        "final_residual": space.dist(final, T.apply(final)),
        "final_step": trace.steps[-1] if trace.steps else None,
    }
    if trace.schedule is not None:
        diag["schedule"] = trace.schedule.to_dict()
    if trace.component_residuals is not None:
        diag["component_residuals"] = list(trace.component_residuals)
    toggles = doc.get("diagnostics", {})
    if ref is not None:
        diag["reference"] = encode_point(space, ref)
        if toggles.get("fejer", True):
            diag["fejer_slack"] = fejer_slack(trace)
            if method == "picard":
                diag["telescoping_excess"] = telescoping_excess(trace, trace.ref_dists[0])
    n_pts = len(trace.iterates)
    if toggles.get("asymptotic_center", True):
        est = asymptotic_center(space, trace)
        diag["asymptotic_center_estimate"] = {
            "center": encode_point(space, est.center), "radius": est.radius,
            "window": list(est.window), "refinement_residual": est.refinement_residual}
    if toggles.get("delta_limit", True) and n_pts >= 2:
        p, gap = delta_limit_estimate(space, trace)
        diag["delta_limit_estimate"] = {
            "estimate": encode_point(space, p), "stability": gap,
            "fixed_point_residual": space.dist(p, T.apply(p))}
    if toggles.get("double_sequence", True) and n_pts >= 3:
        ds = double_sequence_residual(trace, space)
        diag["double_sequence"] = {
            "first": ds.values[0], "last": ds.values[-1],
            "min_hypothesis_slack": ds.min_hypothesis_slack,
            "hypothesis_ok": ds.hypothesis_ok, "trend_ok": ds.trend_ok}
    if toggles.get("demiclosedness", True) and n_pts >= 2:
        dm = demiclosedness_probe(T, trace, default_window(n_pts))
        diag["demiclosedness"] = {
            "precondition_ok": dm.precondition_ok, "message": dm.message,
            "center": None if dm.center is None else encode_point(space, dm.center),
            "fixed_point_residual": dm.fixed_point_residual, "passed": dm.passed}
    code = EXIT_DIVERGED if trace.termination == "unbounded" else EXIT_OK
    return trace, diag, code


# ---------------------------------------------------------------- ac

def run_ac(exp, points):
    space = exp.space
    if not points:
        raise cfg.ConfigError("no points given")
    full = asymptotic_center(space, points, (0, len(points)))
    tail = asymptotic_center(space, points)
    enc = lambda e: {"center": encode_point(space, e.center), "radius": e.radius,  # noqa: E731
                     "window": list(e.window), "refinement_residual": e.refinement_residual}
    return {"command": "ac", "n_points": len(points), "all": enc(full), "tail": enc(tail)}, EXIT_OK


# ---------------------------------------------------------------- driver

def _versions():
    out = {"nonspreading": __version__, "python": platform.python_version()}
    for dist in ("numpy", "scipy", "jsonschema"):
        out[dist] = importlib.metadata.version(dist)
    return out


def build_parser():
    p = argparse.ArgumentParser(prog="nonspreading", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, text in (("verify", "run the invariant and classification suites"),
                       ("iterate", "run a fixed-point iteration and write its trace"),
                       ("classify", "classify one mapping against its expected verdicts"),
                       ("ac", "asymptotic center of a set of points")):
        s = sub.add_parser(name, help=text)
        s.add_argument("--config", type=Path, required=name != "verify",
                       help="experiment config (JSON)")
        s.add_argument("--out", type=Path, default=Path("out"), help="output directory")
        s.add_argument("--seed", type=int, default=None, help="override the sampler seed")
        s.add_argument("--jobs", type=int, default=1, help="worker processes")
        if name == "ac":
            s.add_argument("--points", type=Path, default=None,
                           help="points file (JSON list or CSV with native columns)")
    sub.add_parser("schema", help="print the config JSON schema")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        sys.stdout.write(dumps(cfg.SCHEMA))
        return EXIT_OK
    started = time.perf_counter()
    out = args.out
    manifest = {"command": args.command, "versions": _versions(), "seed": None,
                "config": str(args.config) if args.config else None,
                "config_sha256": None, "outputs": []}
    code = EXIT_CONFIG
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.config is None:
            doc, base = cfg.DEFAULT_VERIFY, None
        else:
            doc, base = cfg.load(args.config), args.config.parent
        manifest["config_sha256"] = cfg.canonical_hash(doc)
        if args.jobs < 1:
            raise cfg.ConfigError("--jobs must be at least 1")
        exp = cfg.build(doc, seed=args.seed, base_dir=base)
        manifest["seed"] = exp.seed
        if args.command == "verify":
            report, code = run_verify(exp, args.jobs)
            paths = _outputs(doc, out, report="verify_report.json")
            write_json(paths["report"], report)
            manifest["outputs"].append(str(paths["report"]))
        elif args.command == "classify":
            report, code = run_classify(exp, args.jobs)
            paths = _outputs(doc, out, report="classify_report.json")
            write_json(paths["report"], report)
            manifest["outputs"].append(str(paths["report"]))
        elif args.command == "iterate":
            if "solver" not in doc:
                raise cfg.ConfigError("iterate needs a solver section")
            trace, diag, code = run_iterate(exp)
            paths = _outputs(doc, out, trace="trace.csv", diagnostics="diagnostics.json")
            paths["trace"].write_text(trace_csv(exp.space, trace))
            write_json(paths["diagnostics"], diag)
            manifest["outputs"] += [str(paths["trace"]), str(paths["diagnostics"])]
            manifest["termination"] = trace.termination
        else:
            if args.points is not None:
                points = read_points(exp.space, args.points)
            elif "points_file" in doc:
                points = read_points(exp.space, Path(base or ".") / doc["points_file"])
            else:
                points = [exp.point(p) for p in doc.get("points", [])]
            report, code = run_ac(exp, points)
            paths = _outputs(doc, out, report="ac_report.json")
            write_json(paths["report"], report)
            manifest["outputs"].append(str(paths["report"]))
    except cfg.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        for line in exc.details:
            print(f"  {line}", file=sys.stderr)
        manifest["error"] = {"message": str(exc), "details": exc.details}
        code = EXIT_CONFIG
    except (GeometryError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        manifest["error"] = {"message": str(exc)}
        code = EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        manifest["error"] = {"message": str(exc)}
        code = EXIT_FAIL
    manifest["exit_code"] = code
    manifest["wall_time_s"] = round(time.perf_counter() - started, 6)
    try:
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "manifest.json", manifest)
    except OSError:
        pass
    return code


if __name__ == "__main__":
    sys.exit(main())
