"""Qualitative reachability under the uncertain-Markov-chain semantics.

All four sets are computed on the IMC itself.  ``cpre`` and ``apre`` decide,
per state, whether some assignment has its support inside (and, for ``apre``,
touching) given state sets, using only endpoint sums and interval classes.

Every entry point makes the target states absorbing and drops edges no
assignment can use (see :func:`openimc.model.prune_dead_edges`) before
analysing, so the caller may pass the model unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import Digraph, can_reach
from .model import ZERO, Imc, iter_bits, prepare


@dataclass(frozen=True)
class RowInfo:
    """Per-state lookups shared by the fixpoint operators."""

    graph: Digraph
    # targets whose interval cannot carry probability 0 (anything but [0,·>)
    no_zero: tuple[int, ...]
    # targets with a positive left endpoint
    positive: tuple[int, ...]
    # upper endpoints as integer numerators over the row's common denominator
    his: tuple[tuple[tuple[int, int, bool], ...], ...]
    dens: tuple[int, ...]


def row_info(m: Imc) -> RowInfo:
    cached = m.__dict__.get("_row_info")
    if cached is not None:
        return cached
    no_zero, positive, his, dens = [], [], [], []
    for row in m.rows:
        nz = pos = 0
        for t, iv in row.items():
            if iv.lo > ZERO or iv.lo_open:
                nz |= 1 << t
            if iv.lo > ZERO:
                pos |= 1 << t
        no_zero.append(nz)
        positive.append(pos)
        den = math.lcm(*(iv.hi.denominator for iv in row.values())) if row else 1
        his.append(tuple((t, iv.hi.numerator * (den // iv.hi.denominator), iv.hi_open) for t, iv in row.items()))
        dens.append(den)
    info = RowInfo(Digraph.of(m), tuple(no_zero), tuple(positive), tuple(his), tuple(dens))
    object.__setattr__(m, "_row_info", info)
    return info


def large_into(info: RowInfo, s: int, x: int) -> bool:
    """Is the set of edges from ``s`` into ``x`` large?  False when empty."""
    total = 0
    any_open = False
    nonempty = False
    for t, hi, hi_open in info.his[s]:
        if x >> t & 1:
            nonempty = True
            total += hi
            any_open = any_open or hi_open
    one = info.dens[s]
    return nonempty and (total > one or (total == one and not any_open))


def cpre(m: Imc, x: int) -> int:
    """States with an assignment whose support lies inside ``x``."""
    info = row_info(m)
    outside = m.full & ~x
    out = 0
    for s in range(len(m.states)):
        if info.no_zero[s] & outside:
            continue
        if large_into(info, s, x):
            out |= 1 << s
    return out


def apre(m: Imc, y: int, x: int) -> int:
    """States with an assignment supported inside ``y`` that reaches ``x & y``."""
    info = row_info(m)
    outside = m.full & ~y
    candidates = 0
    for t in iter_bits(x & y):
        for s in info.graph.pred[t]:
            candidates |= 1 << s
    out = 0
    for s in iter_bits(candidates):
        if info.no_zero[s] & outside:
            continue
        if large_into(info, s, y):
            out |= 1 << s
    return out


@dataclass
class FixpointTrace:
    """Intermediate sets of a (possibly nested) fixpoint computation.

    ``inner`` holds one increasing sequence per outer pass; ``outer`` holds the
    decreasing sequence of outer sets (empty for a plain least fixpoint).
    """

    inner: list[list[int]] = field(default_factory=list)
    outer: list[int] = field(default_factory=list)

    @property
    def inner_iterations(self) -> list[int]:
        return [len(seq) - 1 for seq in self.inner]

    @property
    def outer_iterations(self) -> int:
        return max(len(self.outer) - 1, 0)


@dataclass(frozen=True)
class FixpointResult:
    states: int
    trace: FixpointTrace


def aq0_umc(m: Imc, target: int) -> int:
    m = prepare(m, target)
    return m.full & ~can_reach(row_info(m).graph, target)


def eq0_umc(m: Imc, target: int) -> FixpointResult:
    """States where some chain reaches ``target`` with probability 0.

    Grows the set of states that reach the target with positive probability
    under every chain, then complements.
    """
    m = prepare(m, target)
    full = m.full
    x = target
    seq = [x]
    while True:
        nxt = x | (full & ~cpre(m, full & ~x))
        if nxt == x:
            break
        x = nxt
        seq.append(x)
    return FixpointResult(full & ~x, FixpointTrace(inner=[seq]))


def eq1_umc(m: Imc, target: int) -> FixpointResult:
    """States where some chain reaches ``target`` with probability 1."""
    m = prepare(m, target)
    y = m.full
    trace = FixpointTrace(outer=[y])
    while True:
        x = target
        seq = [x]
        while True:
            nxt = x | apre(m, y, x)
            if nxt == x:
                break
            x = nxt
            seq.append(x)
        trace.inner.append(seq)
        if x == y:
            break
        y = x
        trace.outer.append(y)
    return FixpointResult(y, trace)


def aq1_umc(m: Imc, target: int) -> int:
    m = prepare(m, target)
    eq0 = eq0_umc(m, target).states
    return m.full & ~can_reach(row_info(m).graph, eq0)
