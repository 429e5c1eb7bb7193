"""Exact intervals and interval Markov chains.

Endpoints are :class:`fractions.Fraction` values, so sums of endpoints can be
compared against 1 exactly.  A model stores only the intervals that differ from
the point interval ``[0,0]``; :meth:`Imc.delta` is nevertheless total and
returns ``[0,0]`` for every pair without an edge.

State sets are plain ``int`` bitmasks over the declared state order (bit ``i``
is state ``i``).  :meth:`Imc.mask_of` and :meth:`Imc.names_of` convert between
masks and state identifiers.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """Raised for structurally invalid intervals or models."""


def as_fraction(value: Fraction | int | str) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floats are not accepted as endpoints; use a string or Fraction")
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self) -> None:
        lo, hi = as_fraction(self.lo), as_fraction(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if not (ZERO <= lo <= ONE and ZERO <= hi <= ONE):
            raise ModelError(f"endpoint outside [0,1] in {self}")
        if lo > hi or (lo == hi and (self.lo_open or self.hi_open)):
            raise ModelError(f"empty interval {self}")

    @classmethod
    def closed(cls, lo, hi) -> Interval:
        return cls(as_fraction(lo), as_fraction(hi))

    @classmethod
    def open(cls, lo, hi) -> Interval:
        return cls(as_fraction(lo), as_fraction(hi), True, True)

    @classmethod
    def point(cls, value) -> Interval:
        v = as_fraction(value)
        return cls(v, v)

    @property
    def is_zero(self) -> bool:
        """True for the point interval [0,0], which encodes "no edge"."""
        return self.hi == ZERO

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        x = as_fraction(x)
        if x < self.lo or (x == self.lo and self.lo_open):
            return False
        if x > self.hi or (x == self.hi and self.hi_open):
            return False
        return True

    def __str__(self) -> str:
        return "{}{},{}{}".format(
            "(" if self.lo_open else "[",
            format_rational(self.lo),
            format_rational(self.hi),
            ")" if self.hi_open else "]",
        )


NO_EDGE = Interval(ZERO, ZERO)


def format_rational(q: Fraction) -> str:
    """Canonical text for a rational: ``p`` when integral, otherwise ``p/q``."""
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Bracket(enum.Enum):
    CLOSED = "[·,·]"
    LEFT_OPEN = "(·,·]"
    RIGHT_OPEN = "[·,·)"
    OPEN = "(·,·)"


class LeftEnd(enum.Enum):
    POSITIVE = "L+"
    ZERO_CLOSED = "L0C"
    ZERO_OPEN = "L0O"


class IntervalClass(NamedTuple):
    bracket: Bracket
    left: LeftEnd


def classify(iv: Interval) -> IntervalClass:
    if iv.lo_open:
        bracket = Bracket.OPEN if iv.hi_open else Bracket.LEFT_OPEN
    else:
        bracket = Bracket.RIGHT_OPEN if iv.hi_open else Bracket.CLOSED
    if iv.lo > ZERO:
        left = LeftEnd.POSITIVE
    elif iv.lo_open:
        left = LeftEnd.ZERO_OPEN
    else:
        left = LeftEnd.ZERO_CLOSED
    return IntervalClass(bracket, left)


class Edge(NamedTuple):
    source: int
    target: int


@dataclass(frozen=True, eq=False)
class Imc:
    """An interval Markov chain over dense state indices.

    ``rows[i]`` maps target indices to the non-``[0,0]`` intervals leaving
    state ``i``.  Use :meth:`from_triples` to build one from state names.
    """

    states: tuple[str, ...]
    rows: tuple[Mapping[int, Interval], ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.states)) != len(self.states):
            raise ModelError("state identifiers must be unique")
        if len(self.rows) != len(self.states):
            raise ModelError("one row per state is required")
        n = len(self.states)
        clean = []
        for i, row in enumerate(self.rows):
            kept = {}
            for j in sorted(row):
                if not 0 <= j < n:
                    raise ModelError(f"row {self.states[i]} targets unknown index {j}")
                if not row[j].is_zero:
                    kept[j] = row[j]
            clean.append(kept)
        object.__setattr__(self, "rows", tuple(clean))
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    @classmethod
    def from_triples(
        cls, states: Iterable[str], triples: Iterable[tuple[str, str, Interval]]
    ) -> Imc:
        states = tuple(states)
        index = {s: i for i, s in enumerate(states)}
        rows: list[dict[int, Interval]] = [{} for _ in states]
        for src, dst, iv in triples:
            try:
                i, j = index[src], index[dst]
            except KeyError as exc:
                raise ModelError(f"undeclared state {exc.args[0]!r}") from None
            if j in rows[i]:
                raise ModelError(f"duplicate transition {src} -> {dst}")
            rows[i][j] = iv
        return cls(states, tuple(rows))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Imc):
            return NotImplemented
        return self.states == other.states and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.states)

    def __len__(self) -> int:
        return len(self.states)

    @property
    def full(self) -> int:
        return (1 << len(self.states)) - 1

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ModelError(f"unknown state {name!r}") from None

    def delta(self, s: int, t: int) -> Interval:
        return self.rows[s].get(t, NO_EDGE)

    def mask_of(self, names: Iterable[str]) -> int:
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return mask

    def names_of(self, mask: int) -> list[str]:
        """State names in ``mask``, sorted as strings."""
        return sorted(self.states[i] for i in iter_bits(mask))

    def num_edges(self) -> int:
        return sum(len(row) for row in self.rows)


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def edges(m: Imc) -> set[Edge]:
    return {Edge(i, j) for i, row in enumerate(m.rows) for j in row}


@dataclass(frozen=True)
class StateVerdict:
    state: str
    lo_sum: Fraction
    hi_sum: Fraction
    cond_1a: bool
    cond_1b: bool
    cond_2a: bool
    cond_2b: bool

    @property
    def ok(self) -> bool:
        return self.cond_1a and self.cond_1b and self.cond_2a and self.cond_2b

    def violations(self) -> list[tuple[str, Fraction]]:
        out = []
        if not self.cond_1a:
            out.append(("1a", self.lo_sum))
        if not self.cond_1b:
            out.append(("1b", self.lo_sum))
        if not self.cond_2a:
            out.append(("2a", self.hi_sum))
        if not self.cond_2b:
            out.append(("2b", self.hi_sum))
        return out


@dataclass(frozen=True)
class WellFormednessReport:
    verdicts: tuple[StateVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def violations(self) -> list[tuple[str, str, Fraction]]:
        """``(state, condition, offending sum)`` for every failed condition."""
        return [(v.state, cond, total) for v in self.verdicts for cond, total in v.violations()]

    def describe(self) -> str:
        lines = []
        for state, cond, total in self.violations():
            which = "lower" if cond.startswith("1") else "upper"
            lines.append(
                f"state {state}: condition {cond} violated ({which}-endpoint sum {format_rational(total)})"
            )
        return "\n".join(lines) if lines else "well formed"


def well_formed(m: Imc) -> WellFormednessReport:
    """Check that every state admits at least one assignment.

    Endpoint sums run over the whole row; ``[0,0]`` entries contribute nothing
    and are closed, so only stored intervals need visiting.
    """
    verdicts = []
    for i, row in enumerate(m.rows):
        ivs = row.values()
        lo_sum = sum((iv.lo for iv in ivs), ZERO)
        hi_sum = sum((iv.hi for iv in ivs), ZERO)
        verdicts.append(
            StateVerdict(
                state=m.states[i],
                lo_sum=lo_sum,
                hi_sum=hi_sum,
                cond_1a=lo_sum <= ONE,
                cond_1b=lo_sum != ONE or not any(iv.lo_open for iv in ivs),
                cond_2a=hi_sum >= ONE,
                cond_2b=hi_sum != ONE or not any(iv.hi_open for iv in ivs),
            )
        )
    return WellFormednessReport(tuple(verdicts))


ABSORBING = Interval(ONE, ONE)


def make_absorbing(m: Imc, target: int) -> Imc:
    """Copy of ``m`` where every state in the ``target`` mask has a [1,1] self-loop."""
    if target >> len(m.states):
        raise ModelError("target mask refers to unknown states")
    if all(m.rows[i] == {i: ABSORBING} for i in iter_bits(target)):
        return m
    rows = list(m.rows)
    for i in iter_bits(target):
        rows[i] = {i: ABSORBING}
    return Imc(m.states, tuple(rows))


def prune_dead_edges(m: Imc) -> Imc:
    """Copy of ``m`` without edges that no assignment can use.

    When the lower endpoints of a row already sum to 1, every assignment puts
    exactly the lower endpoint on each entry, so intervals starting at 0 carry
    nothing and are replaced by ``[0,0]``.  Returns ``m`` itself when nothing
    changes.
    """
    if m.__dict__.get("_pruned"):
        return m
    rows = list(m.rows)
    changed = False
    for i, row in enumerate(m.rows):
        if all(iv.lo > ZERO for iv in row.values()):
            continue
        if sum((iv.lo for iv in row.values()), ZERO) != ONE:
            continue
        rows[i] = {t: iv for t, iv in row.items() if iv.lo > ZERO}
        changed = True
    out = Imc(m.states, tuple(rows)) if changed else m
    object.__setattr__(out, "_pruned", True)
    return out


def prepare(m: Imc, target: int) -> Imc:
    """The model every analysis works on: target absorbing, dead edges removed."""
    return prune_dead_edges(make_absorbing(m, target))
