"""Vectorised evaluation of expression trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from ..errors import DomainError
from ..quadrature import QuadParams, _combine, nodes
from .ast import Bin, Call, Neg, Node, Num, Var
from .diagnostics import EvalError

_UNARY = {"exp": np.exp, "sin": np.sin, "cos": np.cos, "abs": np.abs}


@dataclass(frozen=True)
class Env:
    """Bindings for one evaluation.

    ``vars`` holds t, s, t0, u and tau as arrays that broadcast together;
    ``phase`` is the rule of the phase point x and ``offset`` its translation.
    With ``strict=False`` overflow propagates as inf/nan instead of raising,
    so callers can report it.
    """

    vars: dict = field(default_factory=dict)
    consts: dict = field(default_factory=dict)
    functions: dict[str, Callable] = field(default_factory=dict)
    phase: Callable | None = None
    offset: np.ndarray | float = 0.0
    quad: QuadParams = QuadParams()
    strict: bool = True


def _finite(value, node: Node, env: Env):
    if env.strict and not np.all(np.isfinite(value)):
        raise EvalError("non-finite", "result is not finite", node.pos)
    return value


def eval_expr(node: Node, env: Env):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        name = node.name
        if name in env.vars:
            return env.vars[name]
        if name == "u" and "t" in env.vars and "s" in env.vars:
            return env.vars["t"] - env.vars["s"]
        if name in env.consts:
            return env.consts[name]
        if name == "pi":
            return math.pi
        if name == "e":
            return math.e
        raise EvalError("unbound", f"{name!r} has no value here", node.pos)
    if isinstance(node, Neg):
        return -eval_expr(node.operand, env)
    if isinstance(node, Bin):
        a = eval_expr(node.left, env)
        b = eval_expr(node.right, env)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            if node.op == "+":
                out = a + b
            elif node.op == "-":
                out = a - b
            elif node.op == "*":
                out = a * b
            elif node.op == "/":
                if np.any(np.asarray(b) == 0):
                    raise EvalError("division by zero", "denominator is zero", node.pos)
                out = a / b
            else:
                if np.any((np.asarray(a) == 0) & (np.asarray(b) < 0)):
                    raise EvalError("division by zero", "zero raised to a negative power", node.pos)
                out = np.power(a, b)
                if np.any(np.isnan(out) & ~np.isnan(np.asarray(a) + np.asarray(b))):
                    raise EvalError("domain", "negative base with a non-integer exponent", node.pos)
        return _finite(out, node, env)
    if isinstance(node, Call):
        return _call(node, env)
    raise TypeError(f"not an expression node: {node!r}")


def _call(node: Call, env: Env):
    name = node.name
    if name == "int":
        return _integral(node, env)
    args = [eval_expr(a, env) for a in node.args]
    with np.errstate(over="ignore", invalid="ignore"):
        if name in _UNARY:
            out = _UNARY[name](args[0])
        elif name == "log":
            if np.any(~(np.asarray(args[0]) > 0)):
                raise EvalError("log of nonpositive", "log argument must be positive", node.pos)
            out = np.log(args[0])
        elif name == "min":
            out = args[0]
            for a in args[1:]:
                out = np.minimum(out, a)
        elif name == "max":
            out = args[0]
            for a in args[1:]:
                out = np.maximum(out, a)
        elif name == "x" and env.phase is not None and name not in env.functions:
            out = env.phase(np.asarray(args[0], float) + env.offset)
        elif name in env.functions:
            try:
                out = env.functions[name](args[0])
            except DomainError as exc:
                raise EvalError("domain", str(exc), node.pos) from None
        else:
            raise EvalError("unbound", f"function {name!r} has no definition here", node.pos)
    return _finite(out, node, env)


def _integral(node: Call, env: Env):
    lower = eval_expr(node.args[0], env)
    upper = eval_expr(node.args[1], env)
    if np.any(np.asarray(upper) < np.asarray(lower)):
        raise EvalError("domain", "integral upper limit below lower limit", node.pos)
    pts, h, n = nodes(lower, upper, env.quad.step)
    inner = {k: np.asarray(v, float)[..., None] for k, v in env.vars.items()}
    if "u" not in inner and "t" in inner and "s" in inner:
        inner["u"] = inner["t"] - inner["s"]
    inner["tau"] = pts
    sub = replace(env, vars=inner, offset=np.asarray(env.offset, float)[..., None])
    samples = np.broadcast_to(np.asarray(eval_expr(node.args[2], sub), float), pts.shape)
    value, _ = _combine(samples, h, n)
    return _finite(value, node, env)


def log_form(node: Node, consts: dict, positive_functions=()) -> Node | None:
    """An expression for log(node) when node is a product of positive factors, else None.

    Handles exp(E), products, quotients, powers of positive bases, positive
    constants and calls of functions known to be positive (tables >= min > 0).
    """
    if isinstance(node, Num):
        return Num(math.log(node.value), node.pos) if node.value > 0 else None
    if isinstance(node, Var):
        value = consts.get(node.name, {"pi": math.pi, "e": math.e}.get(node.name))
        if value is not None and value > 0:
            return Num(math.log(value), node.pos)
        return None
    if isinstance(node, Call):
        if node.name == "exp":
            return node.args[0]
        if node.name in positive_functions:
            return Call("log", (node,), node.pos)
        return None
    if isinstance(node, Bin):
        if node.op in ("*", "/"):
            left = log_form(node.left, consts, positive_functions)
            right = log_form(node.right, consts, positive_functions)
            if left is None or right is None:
                return None
            return Bin("+" if node.op == "*" else "-", left, right, node.pos)
        if node.op == "^":
            base = log_form(node.left, consts, positive_functions)
            if base is None:
                return None
            return Bin("*", node.right, base, node.pos)
    return None
