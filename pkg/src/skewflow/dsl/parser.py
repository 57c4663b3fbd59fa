"""LL(1) recursive-descent parser for .skw sources.

Grammar (one statement per line)::

    program   := { statement? NEWLINE } EOF
    statement := 'dim' NUMBER
               | 'semiflow' IDENT
               | 'label' STRING
               | 'signal' IDENT '=' expr
               | 'table' IDENT '=' '[' pair { ',' pair } [ ',' ] ']'
               | 'const' IDENT '=' expr
               | 'phi' index index '=' expr
               | 'proj' NUMBER ( 'diag' '(' expr { ',' expr } ')' | index index '=' expr )
               | 'certify' IDENT [ IDENT '=' expr { ',' IDENT '=' expr } ]
               | 'flag' IDENT
    index     := '[' NUMBER ']'
    pair      := '(' signed ',' signed ')'
    signed    := [ '-' ] NUMBER
    expr      := term { ( '+' | '-' ) term }
    term      := unary { ( '*' | '/' ) unary }
    unary     := '-' unary | power
    power     := atom [ '^' unary ]
    atom      := NUMBER | IDENT [ '(' expr { ',' expr } ')' ] | '(' expr ')'

So ``^`` binds tighter than unary minus (``-2^2 = -4``) and is right
associative; ``* /`` and ``+ -`` are left associative.
"""

from __future__ import annotations

import sys
from contextlib import contextmanager

from .ast import Bin, Call, CertifyRequest, Neg, Node, Num, SystemDoc, Var, walk
from .diagnostics import DslError
from .lexer import Token, tokenize

MAX_DEPTH = 200
KEYWORDS = ("dim", "semiflow", "label", "signal", "table", "const", "phi", "proj", "certify", "flag")
UNARY_FUNCS = ("exp", "sin", "cos", "log", "abs")
VARIADIC_FUNCS = ("min", "max")
BUILTIN_CONSTS = ("pi", "e")
TIME_VARS = ("t", "s", "t0", "u")
CERTIFY_KINDS = {
    "forward": ("N", "rho"),
    "backward": ("N", "rho"),
    "dichotomy": ("N1", "N2", "nu1", "nu2"),
    "trichotomy": ("N1", "N2", "N3", "N4", "nu1", "nu2", "nu3", "nu4"),
    "trichotomy_plain": ("N1", "N2", "N3"),
    "integral_dichotomy": ("alpha", "beta", "M1", "M2"),
    "integral_trichotomy": ("alpha", "beta", "Ntil", "Nbar", "Mtil", "Mbar", "gtil", "gbar"),
    "axioms": (),
}
EXPR_START = ("NUMBER", "IDENT", "(", "-")
FRAMES_PER_LEVEL = 8


@contextmanager
def _stack_room():
    """Each nesting level costs several Python frames; make room for MAX_DEPTH of them."""
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, old + FRAMES_PER_LEVEL * MAX_DEPTH))
    try:
        yield
    finally:
        sys.setrecursionlimit(old)


class Parser:
    def __init__(self, tokens: list[Token], filename: str):
        self.tokens = tokens
        self.i = 0
        self.filename = filename

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, expected=(), tok: Token | None = None, kind: str = "syntax") -> DslError:
        tok = tok or self.tok
        return DslError(kind, message, tok.line, tok.col, expected, self.filename)

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.tok.kind != kind:
            found = "end of input" if self.tok.kind == "EOF" else repr(self.tok.text)
            raise self.error(f"found {found}", (what or kind,))
        tok = self.tok
        self.i += 1
        return tok

    def keyword(self, word: str) -> Token:
        if not (self.tok.kind == "IDENT" and self.tok.text == word):
            raise self.error(f"found {self.tok.text!r}", (word,))
        return self.expect("IDENT")

    def integer(self) -> int:
        tok = self.expect("NUMBER", "integer")
        if not float(tok.value).is_integer():
            raise self.error(f"{tok.text} is not an integer", tok=tok)
        return int(tok.value)

    # expressions
    def expr(self, depth: int = 0) -> tuple[Node, int]:
        node, d = self.term(depth)
        while self.tok.kind in ("+", "-"):
            op = self.expect(self.tok.kind)
            right, rd = self.term(depth)
            node, d = Bin(op.kind, node, right, (op.line, op.col)), max(d, rd) + 1
            self._depth_check(d, op)
        return node, d

    def term(self, depth: int) -> tuple[Node, int]:
        node, d = self.unary(depth)
        while self.tok.kind in ("*", "/"):
            op = self.expect(self.tok.kind)
            right, rd = self.unary(depth)
            node, d = Bin(op.kind, node, right, (op.line, op.col)), max(d, rd) + 1
            self._depth_check(d, op)
        return node, d

    def unary(self, depth: int) -> tuple[Node, int]:
        if self.tok.kind == "-":
            op = self.expect("-")
            self._depth_check(depth + 1, op)
            operand, d = self.unary(depth + 1)
            return Neg(operand, (op.line, op.col)), d + 1
        return self.power(depth)

    def power(self, depth: int) -> tuple[Node, int]:
        base, d = self.atom(depth)
        if self.tok.kind == "^":
            op = self.expect("^")
            self._depth_check(depth + 1, op)
            expo, ed = self.unary(depth + 1)
            return Bin("^", base, expo, (op.line, op.col)), max(d, ed) + 1
        return base, d

    def atom(self, depth: int) -> tuple[Node, int]:
        tok = self.tok
        if tok.kind == "NUMBER":
            self.i += 1
            return Num(float(tok.value), (tok.line, tok.col)), 1
        if tok.kind == "IDENT":
            self.i += 1
            if self.tok.kind != "(":
                return Var(tok.text, (tok.line, tok.col)), 1
            self.expect("(")
            self._depth_check(depth + 1, tok)
            args, d = [], 0
            while True:
                arg, ad = self.expr(depth + 1)
                args.append(arg)
                d = max(d, ad)
                if self.tok.kind != ",":
                    break
                self.expect(",")
            self.expect(")", "')' or ','")
            return Call(tok.text, tuple(args), (tok.line, tok.col)), d + 1
        if tok.kind == "(":
            self.expect("(")
            self._depth_check(depth + 1, tok)
            node, d = self.expr(depth + 1)
            self.expect(")")
            return node, d
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise self.error(f"found {found} where an expression should start", EXPR_START)

    def _depth_check(self, depth: int, tok: Token) -> None:
        if depth > MAX_DEPTH:
            raise self.error(f"expression nested deeper than {MAX_DEPTH}", tok=tok, kind="limit")

    def full_expr(self) -> Node:
        return self.expr()[0]

    # statements
    def program(self) -> list:
        stmts = []
        while self.tok.kind != "EOF":
            if self.tok.kind == "NEWLINE":
                self.i += 1
                continue
            stmts.append(self.statement())
            if self.tok.kind != "EOF":
                self.expect("NEWLINE", "end of line")
        return stmts

    def index(self) -> int:
        self.expect("[")
        k = self.integer()
        self.expect("]")
        return k

    def signed(self) -> float:
        sign = 1.0
        if self.tok.kind == "-":
            self.expect("-")
            sign = -1.0
        return sign * float(self.expect("NUMBER", "number").value)

    def statement(self):
        tok = self.tok
        if tok.kind != "IDENT" or tok.text not in KEYWORDS:
            raise self.error(f"found {tok.text!r} at the start of a statement", KEYWORDS)
        word = self.expect("IDENT").text
        pos = (tok.line, tok.col)
        if word == "dim":
            return ("dim", self.integer(), pos)
        if word == "semiflow":
            return ("semiflow", self.expect("IDENT", "semiflow name").text, pos)
        if word == "label":
            return ("label", self.expect("STRING", "string").value, pos)
        if word == "flag":
            return ("flag", self.expect("IDENT", "flag name").text, pos)
        if word in ("signal", "const"):
            name = self.expect("IDENT", "name").text
            self.expect("=")
            return (word, (name, self.full_expr()), pos)
        if word == "table":
            name = self.expect("IDENT", "name").text
            self.expect("=")
            self.expect("[")
            pairs = []
            while True:
                self.expect("(")
                a = self.signed()
                self.expect(",")
                b = self.signed()
                self.expect(")")
                pairs.append((a, b))
                if self.tok.kind != ",":
                    break
                self.expect(",")
                if self.tok.kind == "]":
                    break
            self.expect("]", "']' or ','")
            return ("table", (name, tuple(pairs)), pos)
        if word == "phi":
            i, j = self.index(), self.index()
            self.expect("=")
            return ("phi", (i, j, self.full_expr()), pos)
        if word == "proj":
            k = self.integer()
            if self.tok.kind == "IDENT" and self.tok.text == "diag":
                self.keyword("diag")
                self.expect("(")
                items = [self.full_expr()]
                while self.tok.kind == ",":
                    self.expect(",")
                    items.append(self.full_expr())
                self.expect(")", "')' or ','")
                return ("proj_diag", (k, tuple(items)), pos)
            if self.tok.kind != "[":
                raise self.error(f"found {self.tok.text!r}", ("diag", "["))
            i, j = self.index(), self.index()
            self.expect("=")
            return ("proj", (k, i, j, self.full_expr()), pos)
        # certify
        kind = self.expect("IDENT", "certification kind")
        args = []
        if self.tok.kind == "IDENT":
            while True:
                key = self.expect("IDENT", "argument name")
                self.expect("=")
                args.append((key.text, self.full_expr(), (key.line, key.col)))
                if self.tok.kind != ",":
                    break
                self.expect(",")
        return ("certify", (kind.text, (kind.line, kind.col), args), pos)


def parse_expr(text: str, filename: str = "<expr>") -> Node:
    """Parse a single expression (used for command-line constants)."""
    with _stack_room():
        return _parse_expr(text, filename)


def _parse_expr(text: str, filename: str) -> Node:
    p = Parser(tokenize(text, filename), filename)
    while p.tok.kind == "NEWLINE":
        p.i += 1
    node = p.full_expr()
    while p.tok.kind == "NEWLINE":
        p.i += 1
    if p.tok.kind != "EOF":
        raise p.error(f"unexpected {p.tok.text!r} after expression", ("end of input", "+", "-", "*", "/", "^"))
    return node


class _Scope:
    def __init__(self, names=(), callables=(), allow_int=False, filename="<input>"):
        self.names = set(names)
        self.callables = set(callables)
        self.allow_int = allow_int
        self.filename = filename


def check_expr(node: Node, scope: _Scope, in_int: bool = False) -> None:
    """Reject unknown identifiers and wrong arities, with the offending position."""
    def fail(kind, message, n):
        raise DslError(kind, message, n.pos[0], n.pos[1], filename=scope.filename)

    if isinstance(node, Num):
        return
    if isinstance(node, Var):
        if node.name == "tau" and in_int:
            return
        if node.name in scope.callables:
            fail("arity", f"{node.name!r} is a function and needs one argument", node)
        if node.name not in scope.names and node.name not in BUILTIN_CONSTS:
            fail("unknown identifier", f"{node.name!r} is not defined here", node)
        return
    if isinstance(node, Neg):
        return check_expr(node.operand, scope, in_int)
    if isinstance(node, Bin):
        check_expr(node.left, scope, in_int)
        return check_expr(node.right, scope, in_int)
    if isinstance(node, Call):
        name, nargs = node.name, len(node.args)
        if name == "int":
            if not scope.allow_int:
                fail("unknown identifier", "integrals are not allowed here", node)
            if in_int:
                fail("syntax", "nested integrals are not supported", node)
            if nargs != 3:
                fail("arity", f"int takes 3 arguments (lower, upper, integrand), got {nargs}", node)
            check_expr(node.args[0], scope, False)
            check_expr(node.args[1], scope, False)
            return check_expr(node.args[2], scope, True)
        if name in UNARY_FUNCS or name in scope.callables:
            if nargs != 1:
                fail("arity", f"{name} takes 1 argument, got {nargs}", node)
        elif name in VARIADIC_FUNCS:
            if nargs < 2:
                fail("arity", f"{name} takes at least 2 arguments, got {nargs}", node)
        else:
            fail("unknown identifier", f"unknown function {name!r}", node)
        for a in node.args:
            check_expr(a, scope, in_int)
        return
    raise TypeError(f"not an expression node: {node!r}")


def parse_system(source: str, filename: str = "<input>") -> SystemDoc:
    """Parse and check a whole .skw document; raises DslError with a position."""
    with _stack_room():
        return _parse_system(source, filename)


def _parse_system(source: str, filename: str) -> SystemDoc:
    stmts = Parser(tokenize(source, filename), filename).program()

    def fail(kind, message, pos):
        raise DslError(kind, message, pos[0], pos[1], filename=filename)

    dim = None
    semiflow, label = "translation", ""
    signals, tables, consts, entries, requests, flags = [], [], [], [], [], []
    projectors: dict[int, list] = {}
    defined: set[str] = set()
    table_names: set[str] = set()
    signal_names: set[str] = set()

    def define(name, pos):
        if name in defined or name in BUILTIN_CONSTS or name in TIME_VARS or name == "tau" \
                or name in UNARY_FUNCS or name in VARIADIC_FUNCS or name == "int":
            fail("syntax", f"{name!r} is already defined or reserved", pos)
        defined.add(name)

    const_names: list[str] = []
    for kind, payload, pos in stmts:
        if kind == "dim":
            if dim is not None:
                fail("syntax", "dim declared twice", pos)
            if payload < 1:
                fail("syntax", "dim must be at least 1", pos)
            dim = payload
        elif kind == "semiflow":
            if payload != "translation":
                fail("unknown identifier", f"unknown semiflow {payload!r} (only 'translation' is built in)", pos)
            semiflow = payload
        elif kind == "label":
            label = payload
        elif kind == "flag":
            flags.append(payload)
        elif kind == "const":
            name, node = payload
            check_expr(node, _Scope(const_names, filename=filename))
            define(name, pos)
            const_names.append(name)
            consts.append((name, node))
        elif kind == "signal":
            name, node = payload
            check_expr(node, _Scope(list(const_names) + ["tau"], filename=filename))
            define(name, pos)
            signal_names.add(name)
            signals.append((name, node))
        elif kind == "table":
            name, pairs = payload
            times = [a for a, _ in pairs]
            if any(b <= a for a, b in zip(times, times[1:])):
                fail("syntax", f"table {name!r} times must be strictly increasing", pos)
            define(name, pos)
            table_names.add(name)
            tables.append((name, pairs))
        elif kind == "phi":
            i, j, node = payload
            entries.append((i, j, node, pos))
        elif kind == "proj_diag":
            k, items = payload
            block = projectors.setdefault(k, [])
            for i, node in enumerate(items, start=1):
                block.append((i, i, node, pos))
        elif kind == "proj":
            k, i, j, node = payload
            projectors.setdefault(k, []).append((i, j, node, pos))
        elif kind == "certify":
            ckind, cpos, args = payload
            if ckind not in CERTIFY_KINDS:
                fail("unknown identifier", f"unknown certification kind {ckind!r}", cpos)
            seen = set()
            for key, _, kpos in args:
                if key not in CERTIFY_KINDS[ckind]:
                    fail("unknown identifier", f"{ckind} has no argument {key!r}", kpos)
                if key in seen:
                    fail("syntax", f"argument {key!r} given twice", kpos)
                seen.add(key)
            requests.append((ckind, cpos, args))
    if dim is None:
        raise DslError("syntax", "missing 'dim' statement", 1, 1, ("dim",), filename)

    callables = table_names | signal_names
    phase_scope = _Scope(list(const_names) + ["t", "s", "u"], callables, allow_int=True, filename=filename)
    proj_scope = _Scope(const_names, signal_names, filename=filename)
    bound_scope = _Scope(list(const_names) + list(TIME_VARS), table_names, filename=filename)
    seen_entries = set()
    out_entries = []
    for i, j, node, pos in entries:
        if not (1 <= i <= dim and 1 <= j <= dim):
            fail("syntax", f"phi[{i}][{j}] is outside a {dim}x{dim} matrix", pos)
        if (i, j) in seen_entries:
            fail("syntax", f"phi[{i}][{j}] assigned twice", pos)
        seen_entries.add((i, j))
        check_expr(node, phase_scope)
        out_entries.append((i, j, node))
    if not out_entries:
        raise DslError("syntax", "no phi entries given", 1, 1, ("phi",), filename)
    out_proj = []
    if projectors:
        ks = sorted(projectors)
        if ks != list(range(1, len(ks) + 1)) or len(ks) not in (2, 3):
            p = projectors[ks[0]][0][3]
            fail("syntax", f"projectors must be numbered 1..2 or 1..3, got {ks}", p)
        for k in ks:
            cells = []
            seen = set()
            for i, j, node, pos in projectors[k]:
                if not (1 <= i <= dim and 1 <= j <= dim):
                    fail("syntax", f"proj {k} entry [{i}][{j}] is outside a {dim}x{dim} matrix", pos)
                if (i, j) in seen:
                    fail("syntax", f"proj {k} entry [{i}][{j}] assigned twice", pos)
                seen.add((i, j))
                check_expr(node, proj_scope)
                cells.append((i, j, node))
            out_proj.append((k, tuple(cells)))
    out_requests = []
    for ckind, cpos, args in requests:
        for _, node, _ in args:
            check_expr(node, bound_scope)
        out_requests.append(CertifyRequest(ckind, tuple((k, n) for k, n, _ in args), cpos))
    return SystemDoc(dim, semiflow, label, tuple(signals), tuple(tables), tuple(consts), tuple(out_entries),
                     tuple(out_proj), tuple(out_requests), tuple(flags), filename)


def free_names(node: Node) -> set[str]:
    return {n.name for n in walk(node) if isinstance(n, Var)}
