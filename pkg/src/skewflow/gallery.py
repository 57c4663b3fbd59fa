"""Reference systems with their stated characteristics and witness sequences.

Every entry is hand-coded here and can also be exported as .skw source; the
DSL-compiled version evaluates the same floating-point operations in the same
order, so the two agree to rounding.

Entries:

* ``ex_ses``: diagonal cocycle e^{alpha_i int_s^t x(tau - s) dtau} over the
  translation semiflow, generator x(tau) = e^{-tau} + l with l = 1.
* ``ex_nues1`` / ``ex_nues2``: scalar f(s)/f(t) e^{-+(t-s)} with f known at two
  node families and extended piecewise-linearly in between.
* ``ex_nued``: two-dimensional dichotomy with trigonometric exponents.
* ``ex_tri``: three-dimensional trichotomy, exponents shipped verbatim with
  int_0^t x (flag ``as_printed``; breaks the identity and composition axioms).
* ``ex_tri_anchored``: the same with int_s^t x(tau - s), a genuine cocycle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .certify.estimate import Witness
from .core import CocycleSpec
from .dsl.compile import CompiledRequest, Context, compile_request
from .dsl.parser import parse_expr
from .dsl.printer import fmt_number
from .dsl.ast import CertifyRequest
from .errors import ContractError
from .projectors import ProjectorFamily
from .quadrature import QuadParams, signal_integral
from .signal_space import PiecewiseLinear, Signal, constant

IDS = ("ex_ses", "ex_nues1", "ex_nues2", "ex_nued", "ex_tri", "ex_tri_anchored")
TABLE_LAST_NODE = 200
GENERATOR_LIMIT = 1.0


def dip_time(n: int) -> float:
    """n + e^{-n^2}; node tables and witnesses both use this, so they agree bit for bit."""
    return n + math.exp(-n * n)


def nues_nodes(kind: int, last: int = TABLE_LAST_NODE) -> tuple[tuple[float, float], ...]:
    """Node table of f: kind 1 has f(n) = e^{2n}, f(dip) = 1; kind 2 has f(n) = 1, f(dip) = e^{2n}.

    Dips that coincide with a neighbouring node in floating point are dropped,
    as is kind 1's n = 0 dip (it would sit on n = 1 with a conflicting value).
    """
    pairs = [(0.0, 1.0)]
    for n in range(1, last + 1):
        pairs.append((float(n), math.exp(2 * n) if kind == 1 else 1.0))
        dip = dip_time(n)
        if n < last and dip > n:
            pairs.append((dip, 1.0 if kind == 1 else math.exp(2 * n)))
    return tuple(pairs)


def generator(l: float = GENERATOR_LIMIT) -> Signal:
    """Decreasing generator e^{-tau} + l with limit l > 0."""
    return Signal(lambda tau: np.exp(-tau) + l, f"exp(-tau) + {fmt_number(l)}")


@dataclass(frozen=True)
class Request:
    """A certification request as expression text: (name, expression) pairs."""

    kind: str
    args: tuple[tuple[str, str], ...] = ()
    note: str = ""

    def source(self) -> str:
        body = ", ".join(f"{k} = {v}" for k, v in self.args)
        return f"certify {self.kind}" + (f" {body}" if body else "")


@dataclass(frozen=True)
class GalleryEntry:
    id: str
    system: CocycleSpec
    family: ProjectorFamily | None
    stated: tuple[Request, ...]
    witnesses: tuple[Witness, ...] = ()
    flags: frozenset = frozenset()
    metadata: dict = field(default_factory=dict)
    derived: tuple[Request, ...] = ()
    consts: tuple[tuple[str, float], ...] = ()
    tables: tuple[tuple[str, tuple[tuple[float, float], ...]], ...] = ()
    entry_source: tuple[tuple[int, int, str], ...] = ()
    projector_source: tuple[tuple[int, tuple[str, ...]], ...] = ()
    signal_source: str | None = None

    def context(self) -> Context:
        ctx = Context()
        ctx.consts.update(dict(self.consts))
        for name, pairs in self.tables:
            ctx.functions[name] = PiecewiseLinear(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))
            ctx.positive.add(name)
        return ctx

    def compile(self, req: Request) -> CompiledRequest:
        node_args = tuple((k, parse_expr(v)) for k, v in req.args)
        return compile_request(CertifyRequest(req.kind, node_args), self.context())

    def request(self, kind: str, which: str = "stated") -> Request:
        for req in (self.stated if which == "stated" else self.derived):
            if req.kind == kind:
                return req
        raise ContractError(f"{self.id} has no {which} {kind} request")


def _diag(entries: list) -> np.ndarray:
    arrays = np.broadcast_arrays(*[np.asarray(e, float) for e in entries])
    out = np.zeros(arrays[0].shape + (len(entries), len(entries)))
    for i, a in enumerate(arrays):
        out[..., i, i] = a
    return out


def _log_diag(entries: list) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*[np.asarray(e, float) for e in entries]), axis=-1)


def _ses(alpha=(1.0, -1.0), l: float = GENERATOR_LIMIT, quad: QuadParams = QuadParams()) -> GalleryEntry:
    alpha = tuple(float(a) for a in alpha)
    n = len(alpha)

    def exponents(t, s, x):
        integral = signal_integral(x, s, t, lag=s, params=quad)
        return [a * integral for a in alpha]

    system = CocycleSpec(n, lambda t, s, x: _diag([np.exp(e) for e in exponents(t, s, x)]), generator(l),
                         label="ex_ses", log_rule=lambda t, s, x: _log_diag(exponents(t, s, x)),
                         meta={"origin": "gallery", "flags": ()})
    consts = tuple((f"a{i + 1}", a) for i, a in enumerate(alpha))
    entries = tuple((i + 1, i + 1, f"exp(a{i + 1} * int(s, t, x(tau - s)))") for i in range(n))
    stated = (
        Request("forward", (("N", "1"), ("rho", "2")), "exponential growth: int_s^t x <= 2(t-s) since x <= 2"),
        Request("backward", (("N", "1"), ("rho", "2")), "exponential decay, same bound on the other side"),
        Request("axioms"),
    )
    if alpha != (1.0, -1.0):
        hi = max(alpha)
        stated = (Request("axioms"),)
        if hi < 0:
            stated = (Request("forward", (("N", "1"), ("rho", fmt_number(hi * l / 2))),
                                 "int_s^t x >= l (t-s)"), Request("axioms"))
    return GalleryEntry("ex_ses", system, None, stated, consts=consts, entry_source=entries,
                        signal_source=f"exp(-tau) + {fmt_number(l)}",
                        metadata={"alpha": list(alpha), "generator": f"exp(-t) + {fmt_number(l)}", "l": l,
                                  "integral": "composite Simpson + Richardson, step %g" % quad.step})


def _nues(kind: int) -> GalleryEntry:
    pairs = nues_nodes(kind)
    f = PiecewiseLinear(tuple(a for a, _ in pairs), tuple(b for _, b in pairs))
    sign = -1.0 if kind == 1 else 1.0

    if kind == 1:
        def rule(t, s, x):
            return (f(s) / f(t) * np.exp(-(t - s)))[..., None, None]

        def log_rule(t, s, x):
            return ((np.log(f(s)) - np.log(f(t))) + -(t - s))[..., None]
        entry = "f(s) / f(t) * exp(-(t - s))"
        stated = (Request("forward", (("N", "f(s)"), ("rho", "-1")), "exponential stability"), Request("axioms"))
        closed = lambda n: math.exp(2 * n - math.exp(-n * n))  # noqa: E731
        mode = "stable"
    else:
        def rule(t, s, x):
            return (f(s) / f(t) * np.exp(t - s))[..., None, None]

        def log_rule(t, s, x):
            return ((np.log(f(s)) - np.log(f(t))) + (t - s))[..., None]
        entry = "f(s) / f(t) * exp(t - s)"
        stated = (Request("backward", (("N", "f(t)"), ("rho", "-1")), "exponential instability"),
                     Request("axioms"))
        closed = lambda n: math.exp(2 * n - math.exp(-n * n))  # noqa: E731
        mode = "instable"
    label = f"ex_nues{kind}"
    system = CocycleSpec(1, lambda t, s, x: rule(np.asarray(t, float), np.asarray(s, float), x), constant(1.0),
                         label=label, log_rule=lambda t, s, x: log_rule(np.asarray(t, float), np.asarray(s, float), x),
                         meta={"origin": "gallery", "flags": ()})
    witness = Witness(lambda n: (dip_time(n), float(n)), (1.0,), mode, True, f"{label}: (n + e^-n^2, n)",
                      closed_form=closed)
    return GalleryEntry(label, system, None, stated, (witness,), consts=(), tables=(("f", pairs),),
                        entry_source=((1, 1, entry),),
                        metadata={"f_extension": "piecewise-linear between stated nodes, nodes up to n=%d"
                                  % TABLE_LAST_NODE, "sign": sign, "phase_space": "cocycle independent of x"})


def _nued() -> GalleryEntry:
    def exponents(t, s):
        t, s = np.asarray(t, float), np.asarray(s, float)
        return [t * np.sin(t) - s * np.sin(s) - 2 * t + 2 * s, 2 * t - 2 * s - 3 * t * np.cos(t) + 3 * s * np.cos(s)]

    system = CocycleSpec(2, lambda t, s, x: _diag([np.exp(e) for e in exponents(t, s)]), constant(1.0),
                         label="ex_nued", log_rule=lambda t, s, x: _log_diag(exponents(t, s)),
                         meta={"origin": "gallery", "flags": ()})
    family = ProjectorFamily.coordinate(2, [[1], [2]], "P1 = diag(1,0), P2 = diag(0,1)")
    stated = (
        Request("dichotomy", (("N1", "exp(6*t0)"), ("N2", "exp(6*t0)"), ("nu1", "2"), ("nu2", "2")),
                "stated characteristics N(t0) = e^{6 t0}, nu = 2"),
        Request("integral_dichotomy", (("alpha", "1"), ("beta", "5/2"), ("M1", "exp(6*t0)/1"),
                                       ("M2", "exp(6*t0)/(5/2)")),
                "integral constants built from the stated characteristics"),
        Request("axioms"),
    )
    derived = (
        Request("dichotomy", (("N1", "exp(2*s)"), ("N2", "exp(6*t)"), ("nu1", "1"), ("nu2", "5")),
                "the bounds t sin t - s sin s - 2t + 2s <= -t + 3s and 2t - 2s - 3t cos t + 3s cos s >= -t - 5s"),
        Request("integral_dichotomy", (("alpha", "1/2"), ("beta", "5/2"), ("M1", "2*exp(2*t0)"),
                                       ("M2", "exp(6*t)/(5/2)")),
                "integral constants built from the derived characteristics"),
    )
    pi = math.pi
    witnesses = (
        Witness(lambda n: (2 * n * pi, 2 * n * pi - pi / 2), (1.0, 0.0), "stable", True,
                "ex_nued stable: (2n pi, 2n pi - pi/2) on e1", closed_form=lambda n: math.exp(2 * n * pi - 3 * pi / 2)),
        Witness(lambda n: (2 * n * pi + pi / 2, 2 * n * pi), (0.0, 1.0), "instable", True,
                "ex_nued instable, stated pair read as (2n pi + pi/2, 2n pi) on e2",
                closed_form=lambda n: math.exp(-6 * n * pi - pi)),
        Witness(lambda n: (2 * n * pi, 2 * n * pi - pi / 2), (0.0, 1.0), "instable", True,
                "ex_nued instable: (2n pi, 2n pi - pi/2) on e2", closed_form=lambda n: math.exp(6 * n * pi - pi)),
    )
    return GalleryEntry("ex_nued", system, family, stated, witnesses, derived=derived,
                        entry_source=((1, 1, "exp(t*sin(t) - s*sin(s) - 2*t + 2*s)"),
                                      (2, 2, "exp(2*t - 2*s - 3*t*cos(t) + 3*s*cos(s))")),
                        projector_source=((1, ("1", "0")), (2, ("0", "1"))),
                        metadata={"phase_space": "cocycle independent of x"})


def _tri(anchored: bool, l: float = GENERATOR_LIMIT, quad: QuadParams = QuadParams()) -> GalleryEntry:
    f0 = 1.0 + l  # generator e^{-t} + l at t = 0

    if anchored:
        def integral(t, s, x):
            return signal_integral(x, s, t, lag=s, params=quad)
        int_text = "int(s, t, x(tau - s))"
    else:
        def integral(t, s, x):
            return signal_integral(x, 0.0, t, params=quad)
        int_text = "int(0, t, x(tau))"

    def exponents(t, s, x):
        t, s = np.asarray(t, float), np.asarray(s, float)
        j = integral(t, s, x)
        return [-2 * (t - s) * f0 + j, t - s + j, -(t - s) * f0 + 2 * j]

    label = "ex_tri_anchored" if anchored else "ex_tri"
    flags = frozenset() if anchored else frozenset({"as_printed", "unordered_rates"})
    meta = {"origin": "gallery", "flags": tuple(sorted(flags))}
    if not anchored:
        meta["hypotheses"] = ("as_printed: shipped verbatim, identity/composition axioms not asserted",)
    system = CocycleSpec(3, lambda t, s, x: _diag([np.exp(e) for e in exponents(t, s, x)]), generator(l),
                         label=label, log_rule=lambda t, s, x: _log_diag(exponents(t, s, x)), meta=meta)
    family = ProjectorFamily.coordinate(3, [[1], [2], [3]], "coordinate projectors e1, e2, e3")
    entries = ((1, 1, f"exp(-2*(t - s)*f0 + {int_text})"), (2, 2, f"exp(t - s + {int_text})"),
               (3, 3, f"exp(-(t - s)*f0 + 2*{int_text})"))
    if anchored:
        stated = (Request("axioms"),)
        derived = (
            Request("trichotomy", (("N1", "e"), ("N2", "1"), ("N3", "e^2"), ("N4", "1"),
                                   ("nu1", "-3"), ("nu2", "0"), ("nu3", "0"), ("nu4", "2")),
                    "uses t - s <= int(s, t, x(tau - s)) <= t - s + 1 for the shipped generator"),
            Request("integral_trichotomy", (("alpha", "3/2"), ("beta", "1"), ("Ntil", "2*e/3"), ("Nbar", "1"),
                                            ("Mtil", "e^2"), ("Mbar", "1"), ("gtil", "1"), ("gbar", "1")),
                    "integral constants built from the derived characteristics"),
        )
    else:
        stated = (
            Request("trichotomy", (("N1", "exp(t0*f0)"), ("N2", "exp(-2*l*t)"), ("N3", "exp(2*t0*f0)"),
                                   ("N4", "exp(-l*t)"), ("nu1", "-f0"), ("nu2", "-f0"), ("nu3", "f0"),
                                   ("nu4", "1")), "stated trichotomic characteristics"),
            Request("integral_trichotomy", (("alpha", "f0/2"), ("beta", "1/2"), ("Ntil", "2*exp(t0*f0)/f0"),
                                            ("Nbar", "exp(-l*t)/(1/2)"), ("Mtil", "exp(2*t0*f0)"),
                                            ("Mbar", "exp(-2*l*t)"), ("gtil", "exp(f0*u)"), ("gbar", "exp(f0*u)")),
                    "alpha = -nu1/2, Ntil = 2 N1/|nu1|, beta = nu4/2, Nbar = N4/beta, Mtil = N3, "
                    "gtil = e^{nu3 u}, Mbar = N2, gbar = e^{-nu2 u}"),
            Request("axioms"),
        )
        derived = ()
    return GalleryEntry(label, system, family, stated, flags=flags, derived=derived,
                        consts=(("f0", f0), ("l", l)), entry_source=entries,
                        projector_source=((1, ("1", "0", "0")), (2, ("0", "1", "0")), (3, ("0", "0", "1"))),
                        signal_source="exp(-tau) + l",
                        metadata={"generator": f"exp(-t) + {fmt_number(l)}", "f0": f0, "l": l,
                                  "exponent_integral": int_text})


def make_example(id: str, **params) -> GalleryEntry:
    """Build a gallery entry.  ``ex_ses`` accepts ``alpha=(...)`` and ``l``."""
    if id == "ex_ses":
        return _ses(**params)
    if params:
        raise ContractError(f"{id} takes no parameters")
    if id == "ex_nues1":
        return _nues(1)
    if id == "ex_nues2":
        return _nues(2)
    if id == "ex_nued":
        return _nued()
    if id == "ex_tri":
        return _tri(False)
    if id == "ex_tri_anchored":
        return _tri(True)
    raise ContractError(f"unknown gallery id {id!r}; expected one of {', '.join(IDS)}")


def export_source(entry: GalleryEntry) -> str:
    """The entry as .skw source text."""
    lines = [f"# {entry.id}", f"dim {entry.system.dim}", "semiflow translation", f'label "{entry.id}"']
    for flag in sorted(entry.flags):
        lines.append(f"flag {flag}")
    for name, value in entry.consts:
        lines.append(f"const {name} = {fmt_number(value)}")
    if entry.signal_source is not None:
        lines.append(f"signal x = {entry.signal_source}")
    for name, pairs in entry.tables:
        body = ",\n  ".join(f"({fmt_number(a)}, {fmt_number(b)})" for a, b in pairs)
        lines.append(f"table {name} = [\n  {body}\n]")
    for i, j, text in entry.entry_source:
        lines.append(f"phi[{i}][{j}] = {text}")
    for k, diag in entry.projector_source:
        lines.append(f"proj {k} diag({', '.join(diag)})")
    for req in entry.stated:
        lines.append(req.source())
    return "\n".join(lines) + "\n"


def describe(entry: GalleryEntry) -> dict:
    return {
        "id": entry.id,
        "label": entry.system.label,
        "dim": entry.system.dim,
        "signal": entry.system.base.description,
        "flags": sorted(entry.flags),
        "stated": [{"kind": r.kind, "constants": dict(r.args), "note": r.note} for r in entry.stated],
        "derived": [{"kind": r.kind, "constants": dict(r.args), "note": r.note} for r in entry.derived],
        "witnesses": [{"label": w.label, "mode": w.mode, "probe": list(w.probe)} for w in entry.witnesses],
        "metadata": entry.metadata,
    }
