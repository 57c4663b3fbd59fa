"""Pretty-printing back to source text; output reparses to an equal tree."""

from __future__ import annotations

from .ast import Bin, Call, Neg, Node, Num, SystemDoc, Var

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG, _POW, _ATOM = 3, 4, 5


def _prec(node: Node) -> int:
    if isinstance(node, Bin):
        return _POW if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG
    if isinstance(node, Num) and node.value < 0:
        return _NEG
    return _ATOM


def fmt_number(value: float) -> str:
    v = float(value)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def pretty(node: Node, min_prec: int = 0) -> str:
    if isinstance(node, Num):
        text = fmt_number(node.value)
    elif isinstance(node, Var):
        text = node.name
    elif isinstance(node, Neg):
        text = "-" + pretty(node.operand, _NEG)
    elif isinstance(node, Call):
        text = f"{node.name}({', '.join(pretty(a) for a in node.args)})"
    elif isinstance(node, Bin):
        if node.op == "^":
            text = f"{pretty(node.left, _ATOM)}^{pretty(node.right, _NEG)}"
        else:
            p = _PREC[node.op]
            text = f"{pretty(node.left, p)} {node.op} {pretty(node.right, p + 1)}"
    else:
        raise TypeError(f"not an expression node: {node!r}")
    return f"({text})" if _prec(node) < min_prec else text


def pretty_system(doc: SystemDoc) -> str:
    lines = [f"dim {doc.dim}", f"semiflow {doc.semiflow}"]
    if doc.label:
        lines.append(f'label "{doc.label}"')
    for flag in doc.flags:
        lines.append(f"flag {flag}")
    for name, node in doc.consts:
        lines.append(f"const {name} = {pretty(node)}")
    for name, node in doc.signals:
        lines.append(f"signal {name} = {pretty(node)}")
    for name, pairs in doc.tables:
        body = ",\n  ".join(f"({fmt_number(a)}, {fmt_number(b)})" for a, b in pairs)
        lines.append(f"table {name} = [\n  {body}\n]")
    for i, j, node in doc.entries:
        lines.append(f"phi[{i}][{j}] = {pretty(node)}")
    for k, cells in doc.projectors:
        for i, j, node in cells:
            lines.append(f"proj {k} [{i}][{j}] = {pretty(node)}")
    for req in doc.requests:
        args = ", ".join(f"{key} = {pretty(node)}" for key, node in req.args)
        lines.append(f"certify {req.kind}" + (f" {args}" if args else ""))
    return "\n".join(lines) + "\n"
