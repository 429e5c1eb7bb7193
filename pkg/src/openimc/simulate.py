"""Monte Carlo runs of concrete schedulers under the interval-MDP semantics.

Two families are supported.  A constant scheduler uses one fixed assignment
per state.  A decaying scheduler, inside a chosen ILEC, gives the edges leaving
the ILEC a total probability ``base ** (n + 1 + offset)`` at the ``n``-th
transition (split evenly between them) and spreads the rest over the edges
staying inside, every one of them strictly positive.  Outside the ILEC both
families fall back to a fixed witness assignment of the full edge set.

Assignments are built and checked with exact rationals; sampling uses floats.
Runs stop at the horizon, so estimates of reaching the target are biased
downwards by at most the probability mass still running at that point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .edges import Assignment, EdgeQuery, EdgeSetError, fill
from .imdp import is_ilec
from .model import ONE, ZERO, Imc, ModelError, iter_bits, prepare

Z95 = 1.959963984540054


class SchedulerError(ModelError):
    pass


@dataclass(frozen=True)
class Estimate:
    hits: int
    trials: int

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    @property
    def half_width(self) -> float:
        p = self.estimate
        return Z95 * math.sqrt(p * (1 - p) / self.trials)


@dataclass
class ConstantScheduler:
    """Memoryless: ``assignments[s]`` maps successors of ``s`` to probabilities."""

    assignments: dict[int, dict[int, Fraction]] = field(default_factory=dict)


@dataclass
class DecayingScheduler:
    """Step-indexed: exit mass ``base ** (n + 1 + offset)`` at transition ``n`` inside ``ilec``.

    ``offset=None`` picks the smallest offset for which every step's
    assignment is feasible.
    """

    ilec: int
    base: Fraction = Fraction(1, 2)
    offset: int | None = None


@dataclass
class SchedulerSpec:
    kind: ConstantScheduler | DecayingScheduler
    start: int = 0
    horizon: int = 200
    trials: int = 100_000
    seed: int = 0


def default_assignment(m: Imc, s: int) -> Assignment:
    q = EdgeQuery(m)
    return q.witness_assignment(s, q.edges_from(s))


def split_assignment(m: Imc, s: int, region: int, exit_mass: Fraction) -> dict[int, Fraction]:
    """Assignment for ``s`` putting ``exit_mass`` evenly on the edges leaving ``region``.

    Edges staying inside ``region`` each get strictly positive probability.
    Raises :class:`EdgeSetError` when no such assignment exists.
    """
    row = m.rows[s]
    inside = [t for t in row if region >> t & 1]
    leaving = [t for t in row if not region >> t & 1]
    probs: dict[int, Fraction] = {}
    if leaving:
        share = exit_mass / len(leaving)
        for t in leaving:
            if share not in row[t]:
                raise EdgeSetError(f"exit share {share} outside {row[t]}")
            probs[t] = share
    elif exit_mass:
        raise EdgeSetError("no edge leaves the region")
    probs.update(zip(inside, fill(row, inside, ONE - sum(probs.values(), ZERO))))
    return probs


def constant_exit_scheduler(m: Imc, region: int, mass: Fraction) -> ConstantScheduler:
    """Memoryless scheduler leaving ``region`` with fixed probability ``mass`` per step."""
    out = {}
    for s in iter_bits(region):
        has_exit = any(not region >> t & 1 for t in m.rows[s])
        out[s] = split_assignment(m, s, region, mass if has_exit else ZERO)
    return ConstantScheduler(out)


def _feasible_offset(m: Imc, sched: DecayingScheduler, limit: int = 256) -> int:
    """Smallest offset whose first-step assignments exist; later steps need less exit mass."""
    start = sched.offset if sched.offset is not None else 0
    for offset in range(start, limit):
        mass = sched.base ** (1 + offset)
        try:
            for s in iter_bits(sched.ilec):
                _decay_step(m, sched.ilec, s, mass)
        except EdgeSetError:
            if sched.offset is not None:
                raise SchedulerError(f"offset {sched.offset} gives an infeasible assignment") from None
            continue
        return offset
    raise SchedulerError("no feasible offset for the decaying scheduler")


def _decay_step(m: Imc, region: int, s: int, mass: Fraction) -> dict[int, Fraction]:
    row = m.rows[s]
    # dead edges are already pruned, so any exit edge can carry positive mass
    has_exit = any(not region >> t & 1 for t in row)
    return split_assignment(m, s, region, mass if has_exit else ZERO)


class _Table:
    """Float sampling tables keyed by state (and step for decaying schedulers)."""

    def __init__(self, m: Imc, spec: SchedulerSpec) -> None:
        self.m = m
        self.kind = spec.kind
        self.cache: dict[tuple[int, int], tuple[np.ndarray, np.ndarray]] = {}
        self.fixed: dict[int, dict[int, Fraction]] = {}
        if isinstance(self.kind, ConstantScheduler):
            for s, probs in self.kind.assignments.items():
                try:
                    Assignment(s, dict(probs)).check(m)
                except EdgeSetError as exc:
                    raise SchedulerError(f"constant scheduler: {exc}") from None
                self.fixed[s] = probs
        else:
            if not 0 < self.kind.base < 1:
                raise SchedulerError("decay base must lie in (0,1)")
            if not self.kind.ilec or not is_ilec(m, self.kind.ilec):
                raise SchedulerError("decaying scheduler needs an ILEC")
            self.offset = _feasible_offset(m, self.kind)

    def exact(self, s: int, step: int) -> dict[int, Fraction]:
        if s in self.fixed:
            return self.fixed[s]
        if isinstance(self.kind, DecayingScheduler) and self.kind.ilec >> s & 1:
            mass = self.kind.base ** (step + 1 + self.offset)
            probs = _decay_step(self.m, self.kind.ilec, s, mass)
            Assignment(s, probs).check(self.m)
            return probs
        probs = default_assignment(self.m, s).probs
        self.fixed[s] = probs
        return probs

    def lookup(self, s: int, step: int) -> tuple[np.ndarray, np.ndarray]:
        stepped = isinstance(self.kind, DecayingScheduler) and self.kind.ilec >> s & 1
        key = (s, step if stepped else -1)
        hit = self.cache.get(key)
        if hit is None:
            probs = self.exact(s, step)
            targets = np.array(sorted(probs), dtype=np.int64)
            cum = np.cumsum([float(probs[t]) for t in targets])
            cum[-1] = 1.0
            hit = self.cache[key] = (targets, cum)
        return hit


def simulate_reach(m: Imc, target: int, spec: SchedulerSpec) -> Estimate:
    """Fraction of runs from ``spec.start`` that hit ``target`` within the horizon."""
    m = prepare(m, target)
    table = _Table(m, spec)
    if target >> spec.start & 1:
        return Estimate(spec.trials, spec.trials)
    rng = np.random.default_rng(spec.seed)
    tmask = np.zeros(len(m.states), dtype=bool)
    tmask[list(iter_bits(target))] = True
    current = np.full(spec.trials, spec.start, dtype=np.int64)
    active = np.ones(spec.trials, dtype=bool)
    hits = 0
    for step in range(spec.horizon):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        here = current[idx]
        draws = rng.random(idx.size)
        for s in np.unique(here):
            sel = here == s
            targets, cum = table.lookup(int(s), step)
            current[idx[sel]] = targets[np.searchsorted(cum, draws[sel], side="right")]
        arrived = tmask[current[idx]]
        hits += int(arrived.sum())
        active[idx[arrived]] = False
    return Estimate(hits, spec.trials)


def reference_decay_probability(base: Fraction, terms: int) -> Fraction:
    """``1 - prod_{i=1..terms} (1 - base**i)``, exactly.

    The probability of eventually taking a single exit edge whose probability
    at the ``i``-th attempt is ``base**i``.
    """
    base = Fraction(base)
    if not 0 < base < 1:
        raise ValueError("base must lie in (0,1)")
    stay = ONE
    for i in range(1, terms + 1):
        stay *= 1 - base**i
    return 1 - stay
