"""Qualitative reachability under the interval-MDP semantics.

Three of the four sets coincide with their UMC counterparts and are the same
functions.  The universal probability-1 set differs: a scheduler with memory
can keep shrinking the probability of leaving an IMC-level end component
(ILEC), so a state fails it exactly when it can reach an ILEC disjoint from
the target.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .graph import can_reach, is_strongly_connected, sccs
from .model import ONE, ZERO, Imc, ModelError, iter_bits, prepare
from .umc import aq0_umc, eq0_umc, eq1_umc, row_info

aq0_imdp = aq0_umc
eq0_imdp = eq0_umc
eq1_imdp = eq1_umc


def _hi_sum_into(m: Imc, s: int, c: int) -> Fraction:
    return sum((iv.hi for t, iv in m.rows[s].items() if c >> t & 1), ZERO)


def _violations(m: Imc, c: int) -> int:
    """States of ``c`` failing ILEC condition (1) or (2) with respect to ``c``."""
    info = row_info(m)
    outside = m.full & ~c
    bad = 0
    for s in iter_bits(c):
        if info.positive[s] & outside or _hi_sum_into(m, s, c) < ONE:
            bad |= 1 << s
    return bad


def ilec_reasons(m: Imc, c: int) -> dict[int, list[int]]:
    """Failed ILEC conditions per state (``{state: [1, 2, 3]}``-style), empty if ``c`` is an ILEC."""
    if not c:
        raise ModelError("an ILEC candidate must be non-empty")
    info = row_info(m)
    outside = m.full & ~c
    reasons: dict[int, list[int]] = {}
    connected = is_strongly_connected(info.graph, c)
    for s in iter_bits(c):
        failed = []
        if info.positive[s] & outside:
            failed.append(1)
        if _hi_sum_into(m, s, c) < ONE:
            failed.append(2)
        if not connected:
            failed.append(3)
        if failed:
            reasons[s] = failed
    return reasons


def is_ilec(m: Imc, c: int) -> bool:
    return not ilec_reasons(m, c)


@dataclass(frozen=True)
class IlecReport:
    ilecs: tuple[int, ...]
    union: int
    rounds: int


def maximal_ilecs_avoiding(m: Imc, target: int) -> IlecReport:
    """Maximal ILECs disjoint from ``target`` by repeated SCC refinement.

    Components of the graph without the target are shrunk by dropping every
    state that breaks condition (1) or (2), and the survivors are split into
    SCCs again, until no component loses a state.
    """
    m = prepare(m, target)
    g = row_info(m).graph
    work = sccs(g, m.full & ~target)
    found: list[int] = []
    rounds = 0
    while work:
        rounds += 1
        nxt: list[int] = []
        for comp in sorted(work, key=lambda c: c & -c):
            bad = _violations(m, comp)
            if not bad:
                found.append(comp)
                continue
            survivors = comp & ~bad
            if survivors:
                nxt.extend(sccs(g, survivors))
        work = nxt
    found.sort(key=lambda c: c & -c)
    union = 0
    for comp in found:
        union |= comp
    return IlecReport(tuple(found), union, rounds)


def aq1_imdp(m: Imc, target: int) -> tuple[int, IlecReport]:
    m = prepare(m, target)
    report = maximal_ilecs_avoiding(m, target)
    return m.full & ~can_reach(row_info(m).graph, report.union), report
