"""Edge sets of an IMC: filters, largeness, realisability and valid sets.

A valid edge set for a state is exactly the support of some assignment for
that state.  Besides largeness and realisability this needs the lower
endpoints to leave room: a row whose lower endpoints sum to 1 admits a single
assignment, so no edge starting at 0 can be in a valid set there.  :func:`witness_assignment` builds such an assignment with exact
rationals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .model import ONE, ZERO, Edge, Imc, Interval, LeftEnd, ModelError, classify

DEFAULT_EXCLUDABLE_LIMIT = 20


class EdgeSetError(ModelError):
    pass


class GuardExceeded(EdgeSetError):
    """Too many excludable edges for brute-force enumeration."""


class EdgeClass(enum.Enum):
    """Interval classes used to filter edges."""

    CLOSED = "[·,·]"
    LEFT_OPEN = "(·,·]"
    RIGHT_OPEN = "[·,·)"
    OPEN = "(·,·)"
    POSITIVE = "<+,·>"
    ZERO_CLOSED = "[0,·>"
    ZERO_OPEN = "(0,·>"
    ZERO = "<0,·>"
    RIGHT_CLOSED = "<·,·]"

    def holds(self, iv: Interval) -> bool:
        if self is EdgeClass.CLOSED:
            return not iv.lo_open and not iv.hi_open
        if self is EdgeClass.LEFT_OPEN:
            return iv.lo_open and not iv.hi_open
        if self is EdgeClass.RIGHT_OPEN:
            return not iv.lo_open and iv.hi_open
        if self is EdgeClass.OPEN:
            return iv.lo_open and iv.hi_open
        if self is EdgeClass.RIGHT_CLOSED:
            return not iv.hi_open
        left = classify(iv).left
        if self is EdgeClass.POSITIVE:
            return left is LeftEnd.POSITIVE
        if self is EdgeClass.ZERO_CLOSED:
            return left is LeftEnd.ZERO_CLOSED
        if self is EdgeClass.ZERO_OPEN:
            return left is LeftEnd.ZERO_OPEN
        return left is not LeftEnd.POSITIVE


def can_be_zero(iv: Interval) -> bool:
    """True when the interval admits probability exactly 0 (class ``[0,·>``)."""
    return iv.lo == ZERO and not iv.lo_open


class EdgeQuery:
    """Per-state edge lookups for one model."""

    def __init__(self, m: Imc) -> None:
        self.model = m

    def edges_from(self, s: int) -> frozenset[Edge]:
        return frozenset(Edge(s, t) for t in self.model.rows[s])

    def edges_from_to(self, s: int, x: int) -> frozenset[Edge]:
        return frozenset(Edge(s, t) for t in self.model.rows[s] if x >> t & 1)

    def edges_from_to_class(self, star: EdgeClass, s: int, x: int) -> frozenset[Edge]:
        row = self.model.rows[s]
        return frozenset(Edge(s, t) for t in row if x >> t & 1 and star.holds(row[t]))

    def interval(self, e: Edge) -> Interval:
        return self.model.delta(e.source, e.target)

    def _source(self, b: Iterable[Edge]) -> int:
        sources = {e.source for e in b}
        if len(sources) > 1:
            raise EdgeSetError(f"edges from several sources: {sorted(sources)}")
        return sources.pop()

    def _check_subset(self, s: int, b: frozenset[Edge]) -> None:
        row = self.model.rows[s]
        for e in b:
            if e.source != s or e.target not in row:
                raise EdgeSetError(f"{e} is not an edge leaving state {self.model.states[s]}")

    def is_large(self, b: Iterable[Edge]) -> bool:
        b = frozenset(b)
        if not b:
            return False
        self._source(b)
        return is_large_intervals([self.interval(e) for e in b])

    def is_realisable(self, s: int, b: Iterable[Edge]) -> bool:
        b = frozenset(b)
        self._check_subset(s, b)
        row = self.model.rows[s]
        return all(can_be_zero(row[t]) for t in row if Edge(s, t) not in b)

    def leaves_room(self, s: int, b: Iterable[Edge]) -> bool:
        """Lower endpoints of ``b`` still allow a positive value on every edge of ``b``.

        Fails only when the lower endpoints sum to exactly 1 and some edge of
        ``b`` needs strictly more than its lower endpoint.
        """
        ivs = [self.interval(e) for e in b]
        lo_sum = sum((iv.lo for iv in ivs), ZERO)
        return lo_sum < ONE or (lo_sum == ONE and not any(iv.lo_open or iv.lo == ZERO for iv in ivs))

    def is_valid(self, s: int, b: Iterable[Edge]) -> bool:
        b = frozenset(b)
        return self.is_realisable(s, b) and self.is_large(b) and self.leaves_room(s, b)

    def enumerate_valid_sets(self, s: int, limit: int = DEFAULT_EXCLUDABLE_LIMIT) -> list[frozenset[Edge]]:
        """All valid edge sets of ``s``.

        Only ``[0,·>`` edges may be left out of a realisable set, so candidates
        are the full edge set minus each subset of those edges.  Order is by the
        bitmask of excluded edges over the excludable edges in target order.
        """
        row = self.model.rows[s]
        excludable = [t for t in row if can_be_zero(row[t])]
        if len(excludable) > limit:
            raise GuardExceeded(
                f"state {self.model.states[s]} has {len(excludable)} excludable edges (limit {limit})"
            )
        full = self.edges_from(s)
        out = []
        for bits in range(1 << len(excludable)):
            dropped = {Edge(s, excludable[k]) for k in range(len(excludable)) if bits >> k & 1}
            candidate = full - dropped
            if self.is_large(candidate) and self.leaves_room(s, candidate):
                out.append(candidate)
        return out

    def witness_assignment(self, s: int, b: Iterable[Edge]) -> Assignment:
        b = frozenset(b)
        if not self.is_valid(s, b):
            raise EdgeSetError(f"edge set is not valid for state {self.model.states[s]}")
        targets = sorted(e.target for e in b)
        values = fill(self.model.rows[s], targets, ONE)
        return Assignment(s, dict(zip(targets, values)))


def is_large_intervals(ivs: Sequence[Interval]) -> bool:
    if not ivs:
        return False
    total = sum((iv.hi for iv in ivs), ZERO)
    return total > ONE or (total == ONE and not any(iv.hi_open for iv in ivs))


@dataclass(frozen=True)
class Assignment:
    state: int
    probs: dict[int, Fraction]

    @property
    def support(self) -> frozenset[int]:
        return frozenset(t for t, p in self.probs.items() if p > 0)

    def check(self, m: Imc) -> None:
        """Raise unless this is an exact distribution respecting every interval of the row."""
        if sum(self.probs.values(), ZERO) != ONE:
            raise EdgeSetError(f"assignment for {m.states[self.state]} does not sum to 1")
        for t in range(len(m.states)):
            p = self.probs.get(t, ZERO)
            if p not in m.delta(self.state, t):
                raise EdgeSetError(
                    f"probability {p} for {m.states[self.state]} -> {m.states[t]} "
                    f"outside {m.delta(self.state, t)}"
                )


def fill(row: Mapping[int, Interval], targets: Sequence[int], total: Fraction) -> list[Fraction]:
    """Strictly positive values inside each target's interval summing to ``total``.

    Open endpoints (and a closed lower endpoint at 0) are tightened by a slack
    small enough to keep the problem feasible, then mass is poured into the
    targets in order on top of the tightened lower bounds.
    """
    ivs = [row[t] for t in targets]
    n = len(ivs)
    if n == 0:
        if total == ZERO:
            return []
        raise EdgeSetError("no targets to carry probability mass")
    lower_strict = [iv.lo_open or iv.lo == ZERO for iv in ivs]
    lo_sum = sum((iv.lo for iv in ivs), ZERO)
    hi_sum = sum((iv.hi for iv in ivs), ZERO)
    if lo_sum > total or (lo_sum == total and any(lower_strict)):
        raise EdgeSetError("lower endpoints leave no room for the requested mass")
    if hi_sum < total or (hi_sum == total and any(iv.hi_open for iv in ivs)):
        raise EdgeSetError("upper endpoints cannot carry the requested mass")

    candidates = [iv.width / 2 for iv in ivs if iv.width > 0]
    if total > lo_sum:
        candidates.append((total - lo_sum) / (2 * n))
    if hi_sum > total:
        candidates.append((hi_sum - total) / (2 * n))
    eps = min(candidates) if candidates else ZERO

    lows = [iv.lo + eps if strict else iv.lo for iv, strict in zip(ivs, lower_strict)]
    highs = [iv.hi - eps if iv.hi_open else iv.hi for iv in ivs]
    values = list(lows)
    remaining = total - sum(lows, ZERO)
    for k in range(n):
        if remaining <= 0:
            break
        step = min(remaining, highs[k] - lows[k])
        values[k] += step
        remaining -= step
    assert remaining == 0, "tightened bounds must still cover the requested mass"
    return values


def edge_targets(b: Iterable[Edge]) -> int:
    mask = 0
    for e in b:
        mask |= 1 << e.target
    return mask

