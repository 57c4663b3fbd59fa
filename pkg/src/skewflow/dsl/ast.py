"""Expression and statement trees.  Positions do not take part in equality."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class Num(Node):
    value: float
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Var(Node):
    name: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Neg(Node):
    operand: Node
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Bin(Node):
    op: str  # one of + - * / ^
    left: Node
    right: Node
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Call(Node):
    """Function application; ``int(lower, upper, body)`` is a Call named 'int'."""

    name: str
    args: tuple[Node, ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class Statement:
    kind: str
    pos: tuple[int, int] = field(default=(0, 0), compare=False)


@dataclass(frozen=True)
class CertifyRequest:
    kind: str
    args: tuple[tuple[str, Node], ...]
    pos: tuple[int, int] = field(default=(0, 0), compare=False)

    def arg(self, name: str) -> Node | None:
        for key, value in self.args:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class SystemDoc:
    dim: int
    semiflow: str
    label: str
    signals: tuple[tuple[str, Node], ...]
    tables: tuple[tuple[str, tuple[tuple[float, float], ...]], ...]
    consts: tuple[tuple[str, Node], ...]
    entries: tuple[tuple[int, int, Node], ...]
    projectors: tuple[tuple[int, tuple[tuple[int, int, Node], ...]], ...]
    requests: tuple[CertifyRequest, ...]
    flags: tuple[str, ...]
    filename: str = "<input>"


def walk(node: Node):
    yield node
    if isinstance(node, Neg):
        yield from walk(node.operand)
    elif isinstance(node, Bin):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Call):
        for a in node.args:
            yield from walk(a)
