"""Turn a parsed SystemDoc into a CocycleSpec, projector family and requests."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..certify.bounds import BoundSpec
from ..core import CocycleSpec
from ..projectors import ProjectorFamily
from ..quadrature import QuadParams
from ..signal_space import PiecewiseLinear, Signal, constant
from .ast import CertifyRequest, Node, SystemDoc
from .diagnostics import DslError
from .evaluate import Env, eval_expr, log_form
from .parser import TIME_VARS, free_names, parse_expr, parse_system
from .printer import pretty

RATE_ARGS = ("rho", "nu1", "nu2", "nu3", "nu4", "alpha", "beta")


@dataclass
class CompiledRequest:
    kind: str
    bounds: dict[str, BoundSpec] = field(default_factory=dict)
    rates: dict[str, float] = field(default_factory=dict)


@dataclass
class CompiledSystem:
    system: CocycleSpec
    family: ProjectorFamily | None
    requests: list[CompiledRequest]
    flags: tuple[str, ...]
    doc: SystemDoc


class Context:
    """Constants, tables and auxiliary signals shared by all expressions of a document."""

    def __init__(self, doc: SystemDoc | None = None, quad: QuadParams = QuadParams()):
        self.quad = quad
        self.consts: dict[str, float] = {}
        self.functions: dict = {}
        self.positive: set[str] = set()
        self.phase = None
        self.filename = "<expr>" if doc is None else doc.filename
        if doc is None:
            return
        for name, node in doc.consts:
            self.consts[name] = float(eval_expr(node, self.env()))
        for name, pairs in doc.tables:
            table = PiecewiseLinear(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))
            self.functions[name] = table
            if min(b for _, b in pairs) > 0:
                self.positive.add(name)
        for name, node in doc.signals:
            rule = self._signal_rule(node)
            if name == "x":
                self.phase = rule
            else:
                self.functions[name] = rule

    def env(self, strict: bool = True, **bindings) -> Env:
        return Env(vars=bindings, consts=self.consts, functions=self.functions, phase=self.phase,
                   quad=self.quad, strict=strict)

    def _signal_rule(self, node: Node):
        def rule(tau, node=node):
            tau = np.asarray(tau, dtype=float)
            return np.broadcast_to(np.asarray(eval_expr(node, self.env(tau=tau)), float), tau.shape)
        return rule

    def bound(self, node: Node, text: str | None = None) -> BoundSpec:
        """Bound expressions bind t, s, t0 and u to the single time argument."""
        if not (free_names(node) & set(TIME_VARS)):
            return BoundSpec.constant(float(eval_expr(node, self.env())))

        def rule(r):
            r = np.asarray(r, dtype=float)
            return np.broadcast_to(np.asarray(eval_expr(node, self.env(t=r, s=r, t0=r, u=r)), float), r.shape)

        logged = log_form(node, self.consts, self.positive)
        log_rule = None
        if logged is not None:
            def log_rule(r, logged=logged):
                r = np.asarray(r, dtype=float)
                return np.broadcast_to(np.asarray(eval_expr(logged, self.env(t=r, s=r, t0=r, u=r)), float), r.shape)
        return BoundSpec.from_rule(rule, text or pretty(node), log_rule)

    def rate(self, node: Node, name: str = "rate") -> float:
        names = free_names(node) & set(TIME_VARS)
        if names:
            raise DslError("type", f"{name} must be a constant, found variable {sorted(names)[0]!r}",
                           node.pos[0], node.pos[1], filename=self.filename)
        return float(eval_expr(node, self.env()))


def compile_request(req: CertifyRequest, ctx: Context) -> CompiledRequest:
    out = CompiledRequest(req.kind)
    for key, node in req.args:
        if key in RATE_ARGS:
            out.rates[key] = ctx.rate(node, key)
        else:
            out.bounds[key] = ctx.bound(node)
    return out


def compile_system(doc: SystemDoc, quad: QuadParams = QuadParams()) -> CompiledSystem:
    ctx = Context(doc, quad)
    n = doc.dim
    entries = [(i - 1, j - 1, node) for i, j, node in doc.entries]

    def rule(t, s, x: Signal):
        offset = np.asarray(x.offset, float)
        t, s = np.asarray(t, float), np.asarray(s, float)
        shape = np.broadcast_shapes(t.shape, s.shape, offset.shape)
        env = Env(vars={"t": t, "s": s}, consts=ctx.consts, functions=ctx.functions, phase=x.rule,
                  offset=offset, quad=quad, strict=False)
        out = np.zeros(shape + (n, n))
        for i, j, node in entries:
            out[..., i, j] = eval_expr(node, env)
        return out

    log_rule = None
    diagonal = all(i == j for i, j, _ in entries) and len(entries) == n
    if diagonal:
        logs = [log_form(node, ctx.consts, ctx.positive) for _, _, node in sorted(entries)]
        if all(lg is not None for lg in logs):
            def log_rule(t, s, x: Signal, logs=logs):
                offset = np.asarray(x.offset, float)
                t, s = np.asarray(t, float), np.asarray(s, float)
                shape = np.broadcast_shapes(t.shape, s.shape, offset.shape)
                env = Env(vars={"t": t, "s": s}, consts=ctx.consts, functions=ctx.functions, phase=x.rule,
                          offset=offset, quad=quad, strict=False)
                out = np.zeros(shape + (n,))
                for i, node in enumerate(logs):
                    out[..., i] = eval_expr(node, env)
                return out

    if ctx.phase is not None:
        x_text = pretty(dict(doc.signals)["x"])
        base = Signal(ctx.phase, x_text)
    else:
        base = constant(1.0)
    meta = {"origin": "dsl", "flags": tuple(doc.flags)}
    if "as_printed" in doc.flags:
        meta["hypotheses"] = ("as_printed: shipped verbatim, identity/composition axioms not asserted",)
    system = CocycleSpec(n, rule, base, label=doc.label, log_rule=log_rule, meta=meta)

    family = None
    if doc.projectors:
        rules = []
        for _, cells in doc.projectors:
            def prule(x: Signal, cells=cells):
                offset = np.asarray(x.offset, float)
                env = Env(consts=ctx.consts, functions=ctx.functions, phase=x.rule, offset=offset, quad=quad)
                out = np.zeros(offset.shape + (n, n))
                for i, j, node in cells:
                    out[..., i - 1, j - 1] = eval_expr(node, env)
                return out
            rules.append(prule)
        family = ProjectorFamily(tuple(rules), label=f"{doc.label} projectors")
    requests = [compile_request(r, ctx) for r in doc.requests]
    return CompiledSystem(system, family, requests, tuple(doc.flags), doc)


def load(source: str, filename: str = "<input>", quad: QuadParams = QuadParams()) -> CompiledSystem:
    return compile_system(parse_system(source, filename), quad)


def compile_bound_text(text: str, ctx: Context | None = None) -> BoundSpec:
    """A BoundSpec from a command-line expression such as 'exp(6*t0)'."""
    ctx = ctx or Context()
    node = parse_expr(text)
    _check_bound_names(node, ctx)
    return ctx.bound(node, text)


def compile_rate_text(text: str, ctx: Context | None = None) -> float:
    ctx = ctx or Context()
    node = parse_expr(text)
    _check_bound_names(node, ctx)
    return ctx.rate(node)


def _check_bound_names(node: Node, ctx: Context) -> None:
    from .parser import _Scope, check_expr

    check_expr(node, _Scope(list(ctx.consts) + list(TIME_VARS), set(ctx.functions), filename="<expr>"))
