"""Command-line front end.

Exit codes: 0 success, 1 bad input, 2 results written but flagged
(unstable discretization, profile invariant violations, inadmissible
construction), 3 a verification check failed (report still written).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import green as gr
from . import majorants as mj
from . import theorems as th
from .descriptions import load_set_file, set_to_json
from .markov import markov_table
from .parallel import resolve_jobs
from .sets import SetDescriptionError, build_chain_set, build_onion_set

EXIT_OK, EXIT_INPUT, EXIT_FLAGGED, EXIT_FAILED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _float_list(text: str) -> list[float]:
    try:
        out = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    return out


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def _load(args):
    doc = load_set_file(args.set, args.trunc)
    for v in doc.violations:
        print(f"warning: construction not admissible: {v}", file=sys.stderr)
    return doc


def _radii(args) -> np.ndarray:
    if args.radii is not None:
        r = np.array(sorted(set(args.radii)), dtype=float)
    else:
        if args.count < 1:
            raise UsageError("radius grid is empty")
        if not 0 < args.rmin < args.rmax:
            raise UsageError("need 0 < rmin < rmax")
        r = gr.log_radii(args.rmin, args.rmax, args.count)
    if r.size == 0:
        raise UsageError("radius grid is empty")
    if np.any(r <= 0):
        raise UsageError("radii must be positive")
    return r


# ---------------------------------------------------------------------------
# Commands


def cmd_markov(args) -> int:
    doc = _load(args)
    if args.kmax is not None and args.kmax < 1:
        raise UsageError("--kmax must be >= 1")
    table = markov_table(doc.set, args.nmax, args.kmax, args.density, args.K, set_id=doc.set_id,
                         stability_check=not args.no_check, jobs=args.jobs)
    _emit(table.to_csv(), args.out)
    if not table.stable:
        print("warning: some entries moved by more than 0.5% at doubled density", file=sys.stderr)
        return EXIT_FLAGGED
    return EXIT_FLAGGED if doc.violations else EXIT_OK


def cmd_green(args) -> int:
    doc = _load(args)
    radii = _radii(args)
    lo, hi = args.window
    if not 0 < lo < hi <= 1:
        raise UsageError("--window needs 0 < LO < HI <= 1")
    if np.sum((radii >= lo) & (radii <= hi)) < 4:
        raise UsageError(f"the fit window [{lo:g}, {hi:g}] must contain at least 4 radii")
    if not args.no_capacity:
        radii = np.union1d(radii, gr.capacity_radii())
    profile = gr.rho_profile(doc.set, radii, args.n, args.samples, args.density, args.K,
                             set_id=doc.set_id, jobs=args.jobs)
    _emit(profile.to_csv(), args.out)
    cert = gr.fit_holder(profile, tuple(args.window)).to_dict()
    cap = None
    if profile.radii[-1] >= 10:
        c = gr.capacity_estimate(profile)
        cap = {"value": c.value, "at_half": c.at_half, "residual": c.residual, "r_max": c.r_max}
    cert["capacity"] = cap
    cert_path = args.cert or (None if args.out is None else str(Path(args.out).with_suffix(".holder.json")))
    if cert_path is None:
        sys.stderr.write(_dump(cert))
    else:
        _emit(_dump(cert), cert_path)
    for v in profile.violations:
        print(f"warning: {v}", file=sys.stderr)
    return EXIT_FLAGGED if (profile.violations or doc.violations) else EXIT_OK


def cmd_verify(args) -> int:
    doc = _load(args)
    window = tuple(args.window)
    if args.radii is not None:
        radii = np.union1d(_radii(args), gr.capacity_radii())
    else:
        if args.count < 4:
            raise UsageError("--count must be >= 4 for the Holder fit")
        radii = th.suite_radii(window, args.count)
    profile = None
    if doc.synthetic is not None:
        profile = th.synthetic_profile(radii, doc.synthetic["gamma"], doc.synthetic["B"], doc.set_id)
    report = th.verify_equivalence_suite(doc.set, args.nmax, args.kmax, args.n, radii, window, doc.set_id,
                                         args.density, args.K, args.jobs, doc.claim, profile)
    data = report.to_dict()
    data["metadata"]["kind"] = doc.kind
    if doc.truncation is not None:
        data["metadata"]["truncation"] = doc.truncation
    if doc.synthetic is not None:
        data["metadata"]["synthetic_profile"] = doc.synthetic
    _emit(_dump(data), args.out)
    for c in report.checks:
        status = "pass" if c.passed else "FAIL"
        print(f"{status}  {c.name}: lhs={c.lhs:.6g} rhs={c.rhs:.6g} tol={c.tol:.3g}  {c.note}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


def _majorant_spec(args) -> mj.MajorantSpec:
    if args.family == "log-power":
        return mj.MajorantSpec.log_power(args.s)
    return mj.MajorantSpec(args.family, A=args.A, sigma=args.sigma)


def cmd_majorant(args) -> int:
    spec = _majorant_spec(args)
    conds = mj.validate_majorant(spec)
    bounds = []
    for n in range(1, args.nmax + 1):
        for k in range(1, min(n, args.kmax) + 1):
            alpha = (k,) + (0,) * (args.N - 1)
            if k / n > spec.slope_at_one:
                continue
            b = mj.derivative_bound(spec, args.N, n, alpha)
            bounds.append({"n": n, "k": k, "log_bound": b.log, "bound": b.value})
    out = {"majorant": spec.to_dict(), "N": args.N,
           "conditions": [{"name": c.name, "pass": c.passed, "witness": c.witness} for c in conds],
           "derivative_bounds": bounds}
    if args.probe:
        out["m_bounded_probe"] = [
            {"c": row.c, "r": row.r, "n": list(mj.PROBE_N), "values": list(row.values), "worst": row.worst,
             "monotone": row.monotone, "bound": row.bound} for row in mj.m_bounded_grid(spec)]
    _emit(_dump(out), args.out)
    return EXIT_OK if all(c.passed for c in conds) else EXIT_FAILED


def cmd_transfer(args) -> int:
    v = args.values
    need = {"hcp-to-vmi": 2, "vmi-to-hcp": 2, "capacity": 2, "lift": 2, "upc": 4, "convex": 1}[args.kind]
    if len(v) != need:
        raise UsageError(f"transfer {args.kind} takes {need} values, got {len(v)}")
    if args.kind == "hcp-to-vmi":
        out = th.transfer("hcp_to_vmi", v[0], v[1], args.N).to_dict()
    elif args.kind == "vmi-to-hcp":
        out = th.transfer("vmi_to_hcp", v[0], v[1], args.N).to_dict()
    elif args.kind == "capacity":
        out = {"m": v[0], "M": v[1], "N": args.N, "capacity_lower_bound": th.capacity_lower_bound(v[0], v[1], args.N)}
    elif args.kind == "lift":
        out = {"B": v[0], "gamma": v[1], "B_complex": th.real_to_complex_lift(v[0], v[1])}
    elif args.kind == "upc":
        if v[2] != int(v[2]):
            raise UsageError("d must be an integer")
        out = th.upc_bound(v[0], v[1], int(v[2]), v[3]).to_dict()
    else:
        c = th.convex_body_hcp(v[0], args.capacity)
        out = {"width": v[0], "gamma": c.gamma, "B": c.B, "B_capacity": c.B_capacity}
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_build_set(args) -> int:
    if args.kind == "onion":
        if args.radii is None or args.angles is None:
            raise UsageError("onion needs --radii and --angles")
        c = build_onion_set(args.radii, args.angles, args.trunc)
        doc = {"kind": "onion", "radii": c.parameters["radii"], "angles": c.parameters["angles"],
               "truncation": c.truncation}
    else:
        c = build_chain_set(args.mu, args.b, args.N, args.trunc)
        doc = {"kind": "chain", "mu": args.mu, "b": args.b, "N": args.N, "truncation": c.truncation}
    if args.expand:
        doc = set_to_json(c.set)
    if args.id:
        doc["id"] = args.id
    _emit(_dump(doc), args.out)
    for v in c.violations:
        print(f"warning: construction not admissible: {v}", file=sys.stderr)
    return EXIT_FLAGGED if c.violations else EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _engine_flags(p):
    p.add_argument("--set", required=True, help="set description (JSON)")
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes (EXTREMALKIT_JOBS wins)")
    p.add_argument("--density", type=_positive_int, default=4, help="nodes per basis function")
    p.add_argument("-K", type=_positive_int, default=32, dest="K", help="phases for complex moduli")
    p.add_argument("--trunc", type=_positive_int, help="override the truncation of a construction")


def _grid_flags(p, count):
    p.add_argument("--rmin", type=float, default=1e-3)
    p.add_argument("--rmax", type=float, default=10.0)
    p.add_argument("--count", type=int, default=count, help="log-spaced radii")
    p.add_argument("--radii", type=_float_list, help="explicit comma-separated radii (overrides the grid)")
    p.add_argument("--window", type=float, nargs=2, default=(1e-3, 1e-1), metavar=("LO", "HI"),
                   help="Holder fit window")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="extremalkit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("markov", help="table of sharp Markov factors (CSV)")
    _engine_flags(p)
    p.add_argument("--nmax", type=_positive_int, default=8)
    p.add_argument("--kmax", type=int)
    p.add_argument("--no-check", action="store_true", help="skip the doubled-density rerun")
    p.set_defaults(func=cmd_markov)

    p = sub.add_parser("green", help="radial Green profile (CSV) and Holder certificate (JSON)")
    _engine_flags(p)
    _grid_flags(p, 40)
    p.add_argument("--n", type=_positive_int, default=32, help="polynomial degree")
    p.add_argument("--samples", type=_positive_int, default=gr.DIRECTIONS, help="directions per radius")
    p.add_argument("--cert", help="certificate path (default: next to --out)")
    p.add_argument("--no-capacity", action="store_true", help="do not append the large capacity radii")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("verify", help="equivalence suite report (JSON)")
    _engine_flags(p)
    p.add_argument("--count", type=int, default=20, help="log-spaced radii across the fit window")
    p.add_argument("--radii", type=_float_list, help="explicit comma-separated radii (overrides the grid)")
    p.add_argument("--window", type=float, nargs=2, default=(1e-3, 1e-1), metavar=("LO", "HI"))
    p.add_argument("--nmax", type=_positive_int, default=8)
    p.add_argument("--kmax", type=_positive_int, default=3)
    p.add_argument("--n", type=_positive_int, help="Green degree (default 32 real, 16 complex)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("majorant", help="fit-majorant conditions, derivative bounds, probes (JSON)")
    p.add_argument("--family", choices=mj.FAMILIES, default="power")
    p.add_argument("--A", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--N", type=_positive_int, default=1)
    p.add_argument("--nmax", type=_positive_int, default=8)
    p.add_argument("--kmax", type=_positive_int, default=3)
    p.add_argument("--probe", action="store_true", help="include the m-boundedness probe grid")
    p.add_argument("--out")
    p.set_defaults(func=cmd_majorant)

    p = sub.add_parser("transfer", help="evaluate a constant-transfer formula (JSON)")
    p.add_argument("kind", choices=("hcp-to-vmi", "vmi-to-hcp", "capacity", "lift", "upc", "convex"))
    p.add_argument("values", type=float, nargs="+")
    p.add_argument("--N", type=_positive_int, default=1)
    p.add_argument("--capacity", type=float, help="capacity for the convex-body constant")
    p.add_argument("--out")
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("build-set", help="write a truncated construction as a set description")
    p.add_argument("kind", choices=("onion", "chain"))
    p.add_argument("--trunc", type=_positive_int, required=True)
    p.add_argument("--radii", type=_float_list)
    p.add_argument("--angles", type=_float_list)
    p.add_argument("--mu", type=float, default=2.0)
    p.add_argument("--b", type=float, default=0.4)
    p.add_argument("--N", type=_positive_int, default=1)
    p.add_argument("--id")
    p.add_argument("--expand", action="store_true", help="write the explicit union instead of parameters")
    p.add_argument("--out")
    p.set_defaults(func=cmd_build_set)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if hasattr(args, "jobs"):
            args.jobs = resolve_jobs(args.jobs)
        return args.func(args)
    except (UsageError, SetDescriptionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
