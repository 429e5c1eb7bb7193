"""Brute-force cross-check through the qualitative MDP abstraction.

Each state of the abstraction gets one action per valid edge set, whose
support is that set's targets.  The four sets are then computed with the
textbook finite-MDP algorithms over these explicit actions, which is
exponential in the number of ``[0,·>`` edges but shares nothing with the
polynomial operators except the model.

The universal probability-1 set under the interval-MDP semantics is not
covered: no finite abstraction captures schedulers whose exit probabilities
keep decaying.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .edges import DEFAULT_EXCLUDABLE_LIMIT, EdgeQuery, edge_targets
from .imdp import aq0_imdp, aq1_imdp, eq0_imdp, eq1_imdp
from .model import ONE, ZERO, Imc, Interval, make_absorbing, well_formed
from .parser import ModelDocument, emit_model
from .umc import aq0_umc, aq1_umc, eq0_umc, eq1_umc


@dataclass(frozen=True)
class QaMdp:
    states: tuple[str, ...]
    # actions[s] lists the support masks of the valid edge sets of s
    actions: tuple[tuple[int, ...], ...]

    @property
    def full(self) -> int:
        return (1 << len(self.states)) - 1


def build_qa(m: Imc, limit: int = DEFAULT_EXCLUDABLE_LIMIT, check_witness: bool = False) -> QaMdp:
    """Abstraction of ``m``; with ``check_witness`` every action's witness is verified exactly."""
    q = EdgeQuery(m)
    actions = []
    for s in range(len(m.states)):
        supports = []
        for b in q.enumerate_valid_sets(s, limit):
            if check_witness:
                w = q.witness_assignment(s, b)
                w.check(m)
            supports.append(edge_targets(b))
        actions.append(tuple(supports))
    return QaMdp(m.states, tuple(actions))


def _least_fixpoint(start: int, step) -> int:
    x = start
    while True:
        nxt = x | step(x)
        if nxt == x:
            return x
        x = nxt


def oracle_sets(qa: QaMdp, target: int) -> tuple[int, int, int, int]:
    """``(AQ0, EQ0, EQ1, AQ1)`` of the abstraction, all over explicit actions."""
    n = len(qa.states)
    full = qa.full
    states = range(n)

    def some_action_hits(x: int) -> int:
        return sum(1 << s for s in states if any(a & x for a in qa.actions[s]))

    def every_action_hits(x: int) -> int:
        return sum(1 << s for s in states if all(a & x for a in qa.actions[s]))

    # some scheduler reaches the target with positive probability
    reach_pos = _least_fixpoint(target, some_action_hits)
    aq0 = full & ~reach_pos

    # every scheduler reaches the target with positive probability
    forced_pos = _least_fixpoint(target, every_action_hits)
    eq0 = full & ~forced_pos

    y = full
    while True:
        def attract(x: int, y=y) -> int:
            return sum(
                1 << s
                for s in states
                if any(a & ~y == 0 and a & x & y for a in qa.actions[s])
            )

        x = _least_fixpoint(target, attract)
        if x == y:
            break
        y = x
    eq1 = y

    # drop states that can move into EQ0 with positive probability
    bad = _least_fixpoint(eq0, some_action_hits)
    aq1 = full & ~bad
    return aq0, eq0, eq1, aq1


@dataclass(frozen=True)
class RandomModelSpec:
    states: int = 4
    density: float = 0.6
    denominator: int = 4
    flip: float = 0.5
    seed: int = 0


def _grid(rng: random.Random, den: int) -> tuple[Fraction, Fraction]:
    hi = Fraction(rng.randint(1, den), den)
    lo = Fraction(rng.randint(0, int(hi * den)), den)
    if rng.random() < 0.35:
        lo = ZERO
    return lo, hi


def _make_interval(lo: Fraction, hi: Fraction, lo_open: bool, hi_open: bool) -> Interval:
    if lo == hi:
        lo_open = hi_open = False
    return Interval(lo, hi, lo_open, hi_open)


def _random_row(rng: random.Random, n: int, spec: RandomModelSpec) -> dict[int, Interval]:
    while True:
        targets = [t for t in range(n) if rng.random() < spec.density]
        if not targets:
            targets = [rng.randrange(n)]
        row = {}
        for t in targets:
            lo, hi = _grid(rng, spec.denominator)
            row[t] = _make_interval(lo, hi, rng.random() < spec.flip, rng.random() < spec.flip)
        row = _repair(rng, row, spec)
        if _row_ok(row):
            return row


def _repair(rng: random.Random, row: dict[int, Interval], spec: RandomModelSpec) -> dict[int, Interval]:
    hi_sum = sum((iv.hi for iv in row.values()), ZERO)
    if hi_sum < ONE:
        t = max(row, key=lambda k: (row[k].hi, -k))
        iv = row[t]
        row[t] = Interval(iv.lo, ONE, iv.lo_open, False)
    elif hi_sum == ONE and any(iv.hi_open for iv in row.values()):
        row = {t: _make_interval(iv.lo, iv.hi, iv.lo_open, rng.random() < spec.flip / 4) for t, iv in row.items()}
    lo_sum = sum((iv.lo for iv in row.values()), ZERO)
    order = list(row)
    rng.shuffle(order)
    for t in order:
        if lo_sum <= ONE:
            break
        iv = row[t]
        lo_sum -= iv.lo
        row[t] = _make_interval(ZERO, iv.hi, iv.lo_open, iv.hi_open)
    if lo_sum == ONE and any(iv.lo_open for iv in row.values()):
        row = {t: _make_interval(iv.lo, iv.hi, rng.random() < spec.flip / 4, iv.hi_open) for t, iv in row.items()}
    return row


def _row_ok(row: dict[int, Interval]) -> bool:
    ivs = row.values()
    lo_sum = sum((iv.lo for iv in ivs), ZERO)
    hi_sum = sum((iv.hi for iv in ivs), ZERO)
    if lo_sum > ONE or (lo_sum == ONE and any(iv.lo_open for iv in ivs)):
        return False
    return hi_sum > ONE or (hi_sum == ONE and not any(iv.hi_open for iv in ivs))


def random_model(spec: RandomModelSpec, rng: random.Random | None = None) -> Imc:
    """A well-formed random IMC with endpoints on the ``1/denominator`` grid."""
    rng = rng or random.Random(spec.seed)
    n = spec.states
    rows = tuple(_random_row(rng, n, spec) for _ in range(n))
    m = Imc(tuple(f"s{i}" for i in range(n)), rows)
    assert well_formed(m).ok
    return m


def random_target(rng: random.Random, n: int) -> int:
    """A random state mask, excluding the empty and the full set when ``n > 1``."""
    if n == 1:
        return 1
    while True:
        t = rng.randrange(1, 1 << n)
        if t != (1 << n) - 1:
            return t


@dataclass
class Mismatch:
    index: int
    model_text: str
    target: list[str]
    differing: dict[str, dict[str, list[str]]]


@dataclass
class DifferentialReport:
    instances: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "instances": self.instances,
            "mismatches": [
                {"index": mm.index, "target": mm.target, "differing": mm.differing, "model": mm.model_text}
                for mm in self.mismatches
            ],
        }


def compare(m: Imc, target: int, limit: int = DEFAULT_EXCLUDABLE_LIMIT) -> dict[str, dict[str, list[str]]]:
    """Disagreements between the polynomial algorithms and the oracle (empty when consistent)."""
    absorbed = make_absorbing(m, target)
    expected = oracle_sets(build_qa(absorbed, limit), target)
    got_umc = (
        aq0_umc(m, target),
        eq0_umc(m, target).states,
        eq1_umc(m, target).states,
        aq1_umc(m, target),
    )
    got_imdp = (aq0_imdp(m, target), eq0_imdp(m, target).states, eq1_imdp(m, target).states)
    diffs = {}
    for name, want, umc, imdp in zip(("AQ0", "EQ0", "EQ1", "AQ1"), expected, got_umc, got_imdp + (None,)):
        if umc != want:
            diffs[f"{name}_UMC"] = {"oracle": m.names_of(want), "algorithm": m.names_of(umc)}
        if imdp is not None and imdp != want:
            diffs[f"{name}_IMDP"] = {"oracle": m.names_of(want), "algorithm": m.names_of(imdp)}
    aq1_i, _ = aq1_imdp(m, target)
    if aq1_i & ~got_umc[3] or target & ~aq1_i:
        diffs["AQ1_IMDP_containment"] = {"umc": m.names_of(got_umc[3]), "imdp": m.names_of(aq1_i)}
    return diffs


def differential_run(
    spec: RandomModelSpec,
    instances: int,
    limit: int = DEFAULT_EXCLUDABLE_LIMIT,
    extra: list[tuple[Imc, int]] = (),
) -> DifferentialReport:
    """Compare algorithms and oracle on ``instances`` random models plus any ``extra`` ones.

    Instance ``i`` draws from ``random.Random(f"{seed}:{i}")``, so runs are
    reproducible and instances independent of each other.
    """
    report = DifferentialReport()
    cases = [(m, t) for m, t in extra]
    for i in range(instances):
        rng = random.Random(f"{spec.seed}:{i}")
        m = random_model(spec, rng)
        cases.append((m, random_target(rng, spec.states)))
    for i, (m, t) in enumerate(cases):
        report.instances += 1
        diffs = compare(m, t, limit)
        if diffs:
            report.mismatches.append(
                Mismatch(i, emit_model(ModelDocument.from_imc(m)), m.names_of(t), diffs)
            )
    return report
