"""Reader and writer for the line-oriented ``.imc`` model format.

Example::

    # two-state chain
    states: s0 s1
    set target: s1
    s0 -> s0 (0,1)
    s0 -> s1 (0,1)
    s1 -> s1 [1,1]

Endpoints are integers, finite decimals (``0.2``) or fractions (``3/5``) and
are kept exact.  Pairs without a transition line default to ``[0,0]``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction

from .model import Imc, Interval, ModelError


class ModelSyntaxError(ModelError):
    def __init__(self, message: str, line: int, column: int = 1) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


@dataclass
class ModelDocument:
    states: tuple[str, ...]
    transitions: dict[tuple[str, str], Interval] = field(default_factory=dict)
    sets: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def to_imc(self) -> Imc:
        return Imc.from_triples(self.states, ((s, t, iv) for (s, t), iv in self.transitions.items()))

    @classmethod
    def from_imc(cls, m: Imc, sets: dict[str, tuple[str, ...]] | None = None) -> ModelDocument:
        transitions = {
            (m.states[i], m.states[j]): iv for i, row in enumerate(m.rows) for j, iv in row.items()
        }
        return cls(m.states, transitions, dict(sets or {}))


_IDENT = r"[A-Za-z_][A-Za-z0-9_.']*"
_IDENT_RE = re.compile(_IDENT + r"$")
_NUMBER = r"[0-9]*\.?[0-9]+(?:/[0-9]+)?|[0-9]+\."
_TRANSITION_RE = re.compile(
    rf"\s*(?P<src>{_IDENT})\s*->\s*(?P<dst>{_IDENT})\s*"
    rf"(?P<lb>[\[(])\s*(?P<lo>{_NUMBER})\s*,\s*(?P<hi>{_NUMBER})\s*(?P<rb>[\])])\s*$"
)
_HEADER_RE = re.compile(r"\s*(?:(?P<kw>states)|set\s+(?P<name>" + _IDENT + r"))\s*:(?P<body>.*)$")


def parse_rational(text: str) -> Fraction:
    """Exact value of an integer, finite decimal or ``p/q`` literal."""
    if "/" in text:
        num, den = text.split("/")
        if not num.isdigit() or not den.isdigit():
            raise ValueError(f"malformed fraction {text!r}")
        if int(den) == 0:
            raise ValueError("zero denominator")
        return Fraction(int(num), int(den))
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise ValueError(f"malformed number {text!r}") from None
    if not d.is_finite():
        raise ValueError(f"malformed number {text!r}")
    return Fraction(d)


def parse_model(text: str) -> ModelDocument:
    states: tuple[str, ...] | None = None
    declared: set[str] = set()
    transitions: dict[tuple[str, str], Interval] = {}
    sets: dict[str, tuple[str, ...]] = {}

    def check_declared(name: str, lineno: int, col: int) -> None:
        if name not in declared:
            raise ModelSyntaxError(f"undeclared state {name!r}", lineno, col)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip("\r")
        if not line.strip():
            continue
        header = _HEADER_RE.match(line)
        if header:
            names = header["body"].split()
            for name in names:
                if not _IDENT_RE.match(name):
                    raise ModelSyntaxError(f"bad state identifier {name!r}", lineno, line.find(name) + 1)
            if header["kw"]:
                if states is not None:
                    raise ModelSyntaxError("duplicate states declaration", lineno)
                if len(set(names)) != len(names):
                    raise ModelSyntaxError("duplicate state identifier", lineno)
                if not names:
                    raise ModelSyntaxError("at least one state is required", lineno)
                states = tuple(names)
                declared = set(names)
            else:
                if states is None:
                    raise ModelSyntaxError("set defined before states declaration", lineno)
                name = header["name"]
                if name in sets:
                    raise ModelSyntaxError(f"duplicate set {name!r}", lineno)
                for member in names:
                    check_declared(member, lineno, line.find(member) + 1)
                sets[name] = tuple(names)
            continue

        match = _TRANSITION_RE.match(line)
        if not match:
            col = len(line) - len(line.lstrip()) + 1
            raise ModelSyntaxError(f"cannot parse {line.strip()!r}", lineno, col)
        if states is None:
            raise ModelSyntaxError("transition before states declaration", lineno)
        src, dst = match["src"], match["dst"]
        check_declared(src, lineno, match.start("src") + 1)
        check_declared(dst, lineno, match.start("dst") + 1)
        if (src, dst) in transitions:
            raise ModelSyntaxError(f"duplicate transition {src} -> {dst}", lineno, match.start("src") + 1)
        try:
            lo = parse_rational(match["lo"])
            hi = parse_rational(match["hi"])
        except ValueError as exc:
            raise ModelSyntaxError(str(exc), lineno, match.start("lo") + 1) from None
        try:
            iv = Interval(lo, hi, match["lb"] == "(", match["rb"] == ")")
        except ModelError as exc:
            raise ModelSyntaxError(str(exc), lineno, match.start("lb") + 1) from None
        transitions[(src, dst)] = iv

    if states is None:
        raise ModelSyntaxError("missing 'states:' declaration", max(1, len(text.splitlines())))
    return ModelDocument(states, transitions, sets)


def emit_model(doc: ModelDocument) -> str:
    order = {s: i for i, s in enumerate(doc.states)}
    lines = ["states: " + " ".join(doc.states)]
    for name in sorted(doc.sets):
        lines.append(f"set {name}: " + " ".join(doc.sets[name]))
    for (src, dst) in sorted(doc.transitions, key=lambda k: (order[k[0]], order[k[1]])):
        lines.append(f"{src} -> {dst} {doc.transitions[(src, dst)]}")
    return "\n".join(lines) + "\n"


def dumps(payload) -> str:
    """Byte-stable JSON used by every structured output."""
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit_report(report) -> str:
    return dumps(report.to_dict())
