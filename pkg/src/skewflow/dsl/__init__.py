"""A small text language for skew-evolution systems (.skw files)."""

from .ast import Bin, Call, CertifyRequest, Neg, Num, SystemDoc, Var
from .compile import CompiledRequest, CompiledSystem, Context, compile_bound_text, compile_rate_text, compile_system, load
from .diagnostics import DslError, EvalError
from .evaluate import Env, eval_expr, log_form
from .lexer import Token, tokenize
from .parser import MAX_DEPTH, parse_expr, parse_system
from .printer import pretty, pretty_system

__all__ = [
    "Bin", "Call", "CertifyRequest", "Neg", "Num", "SystemDoc", "Var", "CompiledRequest", "CompiledSystem",
    "Context", "compile_bound_text", "compile_rate_text", "compile_system", "load", "DslError", "EvalError",
    "Env", "eval_expr", "log_form", "Token", "tokenize", "MAX_DEPTH", "parse_expr", "parse_system", "pretty",
    "pretty_system",
]
