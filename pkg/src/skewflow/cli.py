"""Command-line front end: ``skewflow certify|evaluate|estimate|probe|gallery``.

Exit status: 0 on success or pass, 1 when a certification fails, 2 on usage,
input or parse errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .certify import envelope_estimate, estimate_exponent, uniformity_probe
from .certify.certificate import _json_safe
from .core import CocycleSpec, adjoint_apply, eval_cocycle
from .dsl import DslError, EvalError, load
from .dsl.compile import CompiledRequest, Context, compile_bound_text, compile_rate_text
from .errors import SkewflowError
from .gallery import IDS, describe, export_source, make_example
from .grid import DEFAULT_SEED, Grid
from .projectors import ProjectorFamily
from .quadrature import QuadParams
from .runner import KINDS, run_request
from .signal_space import translate

log = logging.getLogger("skewflow")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
BOUND_FLAGS = ("N", "N1", "N2", "N3", "N4", "M1", "M2", "Ntil", "Nbar", "Mtil", "Mbar", "gtil", "gbar")
RATE_FLAGS = ("rho", "nu1", "nu2", "nu3", "nu4", "alpha", "beta")


class UsageError(Exception):
    pass


@dataclass
class Source:
    system: CocycleSpec
    family: ProjectorFamily | None
    requests: list[CompiledRequest]
    flags: tuple[str, ...]
    context: Context
    entry: object = None


def _load_source(args) -> Source:
    if bool(args.gallery) == bool(getattr(args, "file", None)):
        raise UsageError("give exactly one of --gallery ID or --file PATH")
    if args.gallery:
        entry = make_example(args.gallery)
        pool = list(entry.stated)
        if getattr(args, "derived", False):
            pool = list(entry.derived) + pool
        requests = [entry.compile(r) for r in pool]
        return Source(entry.system, entry.family, requests, tuple(sorted(entry.flags)), entry.context(), entry)
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    compiled = load(text, args.file, QuadParams(getattr(args, "step", 0.01)))
    return Source(compiled.system, compiled.family, compiled.requests, compiled.flags, Context(compiled.doc))


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SKEWFLOW_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"SKEWFLOW_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _grid(args) -> Grid:
    translates = tuple(float(v) for v in args.translates.split(",")) if args.translates else (0.0,)
    return Grid(horizon=args.horizon, triple_count=args.triples, seed=_seed(args),
                random_probes=args.probes, translates=translates)


def _kind(text: str) -> str:
    kind = text.replace("-", "_")
    if kind not in KINDS:
        raise UsageError(f"unknown check {text!r}; expected one of {', '.join(k.replace('_', '-') for k in KINDS)}")
    return kind


def _cli_request(args, src: Source) -> CompiledRequest | None:
    """Constants given on the command line, merged over any matching declared request."""
    kind = _kind(args.check)
    given_bounds = {k: getattr(args, k) for k in BOUND_FLAGS if getattr(args, k) is not None}
    given_rates = {k: getattr(args, k) for k in RATE_FLAGS if getattr(args, k) is not None}
    if args.nu is not None:
        for k in ("nu1", "nu2"):
            given_rates.setdefault(k, args.nu)
    if "N" in given_bounds and kind.startswith("dichotomy"):
        for k in ("N1", "N2"):
            given_bounds.setdefault(k, given_bounds["N"])
    req = CompiledRequest(kind)
    declared = next((r for r in src.requests if r.kind == kind), None)
    if declared is not None:
        req.bounds.update(declared.bounds)
        req.rates.update(declared.rates)
    for k, text in given_bounds.items():
        req.bounds[k] = compile_bound_text(text, src.context)
    for k, text in given_rates.items():
        req.rates[k] = compile_rate_text(text, src.context)
    if declared is None and not given_bounds and not given_rates and kind != "axioms":
        raise UsageError(f"no constants for {kind}: pass them as flags or use a source that declares them")
    return req


def _emit(text: str, args) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(_json_safe(obj), indent=2) + "\n"


def cmd_certify(args) -> int:
    src = _load_source(args)
    grid = _grid(args)
    quad = QuadParams(args.step)
    if args.check:
        requests = [_cli_request(args, src)]
    else:
        requests = src.requests
        if not requests:
            raise UsageError("no certification requested: pass --check or declare 'certify' lines")
    certs = []
    for req in requests:
        log.info("running %s", req.kind)
        cert = run_request(src.system, src.family, req, grid, quad, args.tol, src.flags)
        certs.append(cert)
        log.info("%s: %s (worst %.3g)", req.kind, cert.verdict, cert.worst_violation)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["kind", "part", "verdict", "worst_violation", "t", "s", "t0"])
        for c in certs:
            for part, entry in c.parts.items():
                p = entry.get("worst_point") or {}
                w.writerow([c.kind, part, "pass" if entry["worst_violation"] <= c.tolerance else "fail",
                            repr(float(entry["worst_violation"])), p.get("t", ""), p.get("s", ""), p.get("t0", "")])
        _emit(buf.getvalue(), args)
    else:
        stamp = not args.no_timestamp
        docs = [c.to_dict(timestamp=stamp) for c in certs]
        _emit(json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n", args)
    return EXIT_OK if all(c.passed for c in certs) else EXIT_FAIL


def _vector(text: str, dim: int) -> np.ndarray:
    try:
        v = np.array([float(c) for c in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot read vector {text!r}") from None
    if v.size != dim:
        raise UsageError(f"vector has {v.size} components, system dimension is {dim}")
    return v


def cmd_evaluate(args) -> int:
    src = _load_source(args)
    x = translate(src.system.base, args.x_offset)
    v = _vector(args.v, src.system.dim)
    if args.adjoint:
        value = adjoint_apply(src.system, args.t, args.s, x, v)
        norm = float(np.max(np.abs(value)))
    else:
        value = eval_cocycle(src.system, args.t, args.s, x, v)
        norm = float(np.sum(np.abs(value)))
    out = {"tool_version": __version__, "t": args.t, "s": args.s, "x_offset": args.x_offset,
           "input": v.tolist(), "adjoint": bool(args.adjoint), "value": value.tolist(), "norm": norm}
    _emit(_dump(out), args)
    return EXIT_OK


def cmd_estimate(args) -> int:
    src = _load_source(args)
    grid = _grid(args)
    if args.envelope:
        gaps = [float(g) for g in args.envelope.split(",")]
        env = envelope_estimate(src.system, args.direction, gaps, grid)
        if args.format == "csv":
            _emit(env.to_csv(), args)
        else:
            _emit(_dump({"tool_version": __version__, "grid": grid.describe(), "envelope": env.to_dict()}), args)
        return EXIT_OK
    fit = estimate_exponent(src.system, grid, src.family if args.k else None, args.k, args.direction)
    if args.format == "csv":
        raise UsageError("exponent estimates are reported as JSON only")
    _emit(_dump({"tool_version": __version__, "grid": grid.describe(), "estimate": fit.to_dict()}), args)
    return EXIT_OK


def cmd_probe(args) -> int:
    if not args.gallery:
        raise UsageError("probe needs --gallery ID (witness sequences live with gallery entries)")
    entry = make_example(args.gallery)
    if not entry.witnesses:
        raise UsageError(f"{entry.id} has no witness sequences")
    picks = range(len(entry.witnesses)) if args.witness is None else [args.witness]
    reports = []
    for i in picks:
        if not 0 <= i < len(entry.witnesses):
            raise UsageError(f"witness index {i} out of range 0..{len(entry.witnesses) - 1}")
        reports.append(uniformity_probe(entry.system, entry.witnesses[i], args.n_max, args.mode))
    if args.format == "csv":
        _emit("".join(r.to_csv() for r in reports), args)
    else:
        docs = [r.to_dict() for r in reports]
        _emit(_dump({"tool_version": __version__, "id": entry.id, "probes": docs}), args)
    return EXIT_OK


def cmd_gallery(args) -> int:
    if args.action == "list":
        lines = []
        for gid in IDS:
            e = make_example(gid)
            flags = f" [{', '.join(sorted(e.flags))}]" if e.flags else ""
            lines.append(f"{gid}\tdim={e.system.dim}\t{', '.join(r.kind for r in e.stated)}{flags}")
        _emit("\n".join(lines) + "\n", args)
        return EXIT_OK
    if not args.id:
        raise UsageError(f"gallery {args.action} needs an id")
    entry = make_example(args.id)
    if args.action == "show":
        _emit(_dump(describe(entry)), args)
    else:
        _emit(export_source(entry), args)
    return EXIT_OK


def _add_source(p, file_ok=True):
    p.add_argument("--gallery", choices=IDS, help="gallery entry id")
    if file_ok:
        p.add_argument("--file", help="path to a .skw system file")


def _add_grid(p):
    p.add_argument("--horizon", type=float, default=20.0, help="largest sampled time (default 20)")
    p.add_argument("--triples", type=int, default=200, help="number of random (t, s, t0) triples")
    p.add_argument("--seed", type=int, default=None, help=f"grid seed (default $SKEWFLOW_SEED or {DEFAULT_SEED})")
    p.add_argument("--probes", type=int, default=8, help="random probe vectors besides the signed basis")
    p.add_argument("--translates", default="", help="comma list of phase-point translates (default 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewflow", description=__doc__.splitlines()[0], allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"skewflow {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", allow_abbrev=False, help="run a certification check")
    _add_source(p)
    _add_grid(p)
    p.add_argument("--check", help="forward, backward, dichotomy, trichotomy, trichotomy-plain, "
                                   "integral-dichotomy, integral-trichotomy or axioms")
    p.add_argument("--derived", action="store_true", help="prefer a gallery entry's derived constants")
    for name in BOUND_FLAGS:
        p.add_argument(f"--{name}", default=None, metavar="EXPR", help=argparse.SUPPRESS if name != "N" else
                       "bound expression in t, s, t0 or u (also --N1..--N4, --M1, --M2, --Ntil, ...)")
    p.add_argument("--nu", default=None, metavar="EXPR", help="sets nu1 and nu2 (also --nu1..--nu4)")
    for name in RATE_FLAGS:
        p.add_argument(f"--{name}", default=None, metavar="EXPR", help=argparse.SUPPRESS if name != "rho" else
                       "rate constant (also --alpha, --beta)")
    p.add_argument("--step", type=float, default=0.01, help="quadrature step (default 0.01)")
    p.add_argument("--tol", type=float, default=1e-9, help="tolerance on log margins (default 1e-9)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("evaluate", allow_abbrev=False, help="evaluate Phi(t, s, x) v at one point")
    _add_source(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--v", required=True, help="comma-separated vector")
    p.add_argument("--x-offset", type=float, default=0.0, help="evaluate at the translate x_c of the base signal")
    p.add_argument("--adjoint", action="store_true", help="apply the transpose to a dual vector instead")
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("estimate", allow_abbrev=False, help="fit an exponent or tabulate an envelope")
    _add_source(p)
    _add_grid(p)
    p.add_argument("--direction", choices=("forward", "backward"), default="forward")
    p.add_argument("--k", type=int, default=None, help="restrict to the range of projector k")
    p.add_argument("--envelope", default=None, metavar="GAPS", help="comma list of gaps u for an envelope table")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("probe", allow_abbrev=False, help="evaluate a uniformity witness sequence")
    _add_source(p, file_ok=False)
    p.add_argument("--witness", type=int, default=None, help="witness index (default: all)")
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--mode", choices=("stable", "instable"), default=None)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("gallery", allow_abbrev=False, help="list, show or export gallery entries")
    p.add_argument("action", choices=("list", "show", "export"))
    p.add_argument("id", nargs="?", choices=IDS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gallery)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"skewflow: error: {exc}", file=sys.stderr)
    except DslError as exc:
        print(exc.format(), file=sys.stderr)
    except (EvalError, SkewflowError, ValueError, FloatingPointError) as exc:
        print(f"skewflow: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
