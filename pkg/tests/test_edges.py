from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from openimc.edges import EdgeClass, EdgeQuery, EdgeSetError, GuardExceeded, fill
from openimc.model import Edge, Imc, Interval, well_formed
from openimc.oracle import RandomModelSpec, random_model

from conftest import random_instances, subsets


def support_feasible(m: Imc, s: int, support: set[int]) -> bool:
    """LP oracle: is there an assignment for ``s`` whose support is exactly ``support``?

    Maximises a common slack ``t`` on every strict constraint; feasible iff the
    optimum is positive (or no strict constraint exists and the LP is feasible).
    """
    n = len(m.states)
    strict_needed = False
    bounds, a_ub, b_ub = [], [], []
    for t in range(n):
        iv = m.delta(s, t)
        if t not in support:
            if not (iv.lo == 0 and not iv.lo_open):
                return False
            bounds.append((0, 0))
            continue
        bounds.append((0, 1))
        lo_strict = iv.lo_open or iv.lo == 0
        row = np.zeros(n + 1)
        row[t] = -1
        row[n] = 1 if lo_strict else 0
        a_ub.append(row)
        b_ub.append(-float(iv.lo))
        row = np.zeros(n + 1)
        row[t] = 1
        row[n] = 1 if iv.hi_open else 0
        a_ub.append(row)
        b_ub.append(float(iv.hi))
        strict_needed = strict_needed or lo_strict or iv.hi_open
    if not support:
        return False
    a_eq = [np.r_[np.ones(n), 0]]
    res = linprog(
        c=np.r_[np.zeros(n), -1],
        A_ub=np.array(a_ub),
        b_ub=b_ub,
        A_eq=np.array(a_eq),
        b_eq=[1],
        bounds=bounds + [(0, 1)],
        method="highs",
    )
    if res.status != 0:
        return False
    return -res.fun > 1e-9 if strict_needed else True


def edge_set(m: Imc, s: int, names) -> frozenset:
    return frozenset(Edge(s, m.index(t)) for t in names)


def test_edge_filters_fig2(fig2):
    q = EdgeQuery(fig2)
    s1 = fig2.index("s1")
    assert q.edges_from(s1) == edge_set(fig2, s1, ["s0", "s1", "s2"])
    assert q.edges_from_to(s1, fig2.mask_of(["s2"])) == edge_set(fig2, s1, ["s2"])
    assert q.edges_from_to_class(EdgeClass.POSITIVE, s1, fig2.full) == edge_set(fig2, s1, ["s0"])
    assert q.edges_from_to_class(EdgeClass.ZERO_CLOSED, s1, fig2.full) == edge_set(fig2, s1, ["s1"])
    assert q.edges_from_to_class(EdgeClass.ZERO, s1, fig2.full) == edge_set(fig2, s1, ["s1", "s2"])


def test_largeness_examples(fig1, fig2):
    q = EdgeQuery(fig2)
    s1 = fig2.index("s1")
    b2 = edge_set(fig2, s1, ["s0", "s2"])
    assert q.is_large(b2)
    assert not q.is_large(frozenset())
    rows = list(fig2.rows)
    rows[s1] = dict(rows[s1])
    rows[s1][fig2.index("s0")] = Interval.closed("0.6", "0.7")
    narrowed = Imc(fig2.states, tuple(rows))
    assert not EdgeQuery(narrowed).is_large(b2)
    assert EdgeQuery(narrowed).enumerate_valid_sets(s1) == [edge_set(fig2, s1, ["s0", "s1", "s2"])]
    assert EdgeQuery(fig1).is_large(edge_set(fig1, 0, ["s0", "s1"]))


def test_mixed_sources_rejected(fig2):
    with pytest.raises(EdgeSetError):
        EdgeQuery(fig2).is_large({Edge(0, 0), Edge(1, 1)})


def test_realisability_examples(fig1, fig2):
    s1 = fig2.index("s1")
    assert EdgeQuery(fig2).is_realisable(s1, edge_set(fig2, s1, ["s0", "s2"]))
    assert not EdgeQuery(fig1).is_realisable(0, edge_set(fig1, 0, ["s0"]))
    for m in (fig1, fig2):
        q = EdgeQuery(m)
        for s in range(len(m.states)):
            assert q.is_realisable(s, q.edges_from(s))
    with pytest.raises(EdgeSetError):
        EdgeQuery(fig2).is_realisable(s1, {Edge(0, 1)})


def test_validity_examples(fig1, fig2):
    q = EdgeQuery(fig2)
    s1 = fig2.index("s1")
    b1 = edge_set(fig2, s1, ["s0", "s1", "s2"])
    b2 = edge_set(fig2, s1, ["s0", "s2"])
    valid = [b for b in subsets(0b111) if q.is_valid(s1, {Edge(s1, t) for t in range(3) if b >> t & 1})]
    assert valid == [0b101, 0b111]
    assert q.enumerate_valid_sets(s1) == [b1, b2]
    assert EdgeQuery(fig1).enumerate_valid_sets(0) == [edge_set(fig1, 0, ["s0", "s1"])]
    assert q.enumerate_valid_sets(fig2.index("s2")) == [edge_set(fig2, 2, ["s2"])]
    assert not q.is_valid(s1, frozenset())


def test_witness_assignments_fig2(fig2):
    q = EdgeQuery(fig2)
    s1 = fig2.index("s1")
    for names in (["s0", "s1", "s2"], ["s0", "s2"]):
        b = edge_set(fig2, s1, names)
        w = q.witness_assignment(s1, b)
        w.check(fig2)
        assert w.support == {fig2.index(t) for t in names}
    # hand-picked assignments with the same supports pass the same check
    from openimc.edges import Assignment

    Assignment(s1, {0: Fraction(7, 10), 1: Fraction(12, 100), 2: Fraction(18, 100)}).check(fig2)
    Assignment(s1, {0: Fraction(8, 10), 2: Fraction(2, 10)}).check(fig2)


def test_witness_fig1_open_pair(fig1):
    w = EdgeQuery(fig1).witness_assignment(0, edge_set(fig1, 0, ["s0", "s1"]))
    a = w.probs[0]
    assert 0 < a < 1 and w.probs[1] == 1 - a


def test_witness_rejects_invalid(fig1):
    with pytest.raises(EdgeSetError):
        EdgeQuery(fig1).witness_assignment(0, edge_set(fig1, 0, ["s0"]))


def test_guard_limit():
    names = [f"t{i}" for i in range(4)]
    m = Imc.from_triples(["s"] + names, [("s", t, Interval.closed(0, 1)) for t in names])
    q = EdgeQuery(m)
    assert len(q.enumerate_valid_sets(0)) == 2**4 - 1
    with pytest.raises(GuardExceeded):
        q.enumerate_valid_sets(0, limit=3)


@pytest.mark.parametrize("seed", range(4))
def test_valid_sets_are_exactly_assignment_supports(seed):
    for m, _ in random_instances(60, seed=100 + seed, max_states=4, denominator=6):
        q = EdgeQuery(m)
        for s in range(len(m.states)):
            row_mask = sum(1 << t for t in m.rows[s])
            enumerated = set(q.enumerate_valid_sets(s))
            for sub in subsets(row_mask):
                b = frozenset(Edge(s, t) for t in range(len(m.states)) if sub >> t & 1)
                oracle = support_feasible(m, s, {t for t in range(len(m.states)) if sub >> t & 1})
                assert q.is_valid(s, b) == oracle, (m.states, s, sub)
                assert (b in enumerated) == oracle
                if oracle:
                    w = q.witness_assignment(s, b)
                    w.check(m)
                    assert {Edge(s, t) for t in w.support} == b
            assert enumerated, "every well-formed state has a valid set"


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(2, 5))
def test_largeness_monotone_and_realisability_antitone(seed, n):
    m = random_model(RandomModelSpec(states=n, denominator=5, seed=seed))
    q = EdgeQuery(m)
    for s in range(n):
        row_mask = sum(1 << t for t in m.rows[s])
        sets = [frozenset(Edge(s, t) for t in range(n) if sub >> t & 1) for sub in subsets(row_mask)]
        for b in sets:
            for bigger in sets:
                if b <= bigger:
                    if q.is_large(b):
                        assert q.is_large(bigger)
                    if q.is_realisable(s, b):
                        assert q.is_realisable(s, bigger)


@given(
    st.lists(
        st.tuples(st.integers(0, 6), st.integers(0, 6), st.booleans(), st.booleans()),
        min_size=1,
        max_size=5,
    ),
    st.integers(0, 12),
)
def test_fill_meets_every_constraint_or_refuses(raw, total_num):
    ivs = []
    for a, b, lo_open, hi_open in raw:
        lo, hi = sorted((a, b))
        hi = max(hi, 1)
        ivs.append(Interval(Fraction(lo, 6), Fraction(hi, 6), lo_open and lo < hi, hi_open and lo < hi))
    row = dict(enumerate(ivs))
    total = Fraction(total_num, 6)
    try:
        values = fill(row, list(row), total)
    except EdgeSetError:
        # refusal must mean no positive point exists: check the exact feasibility conditions
        lo_sum = sum(iv.lo for iv in ivs)
        hi_sum = sum(iv.hi for iv in ivs)
        strict_lo = any(iv.lo_open or iv.lo == 0 for iv in ivs)
        strict_hi = any(iv.hi_open for iv in ivs)
        assert lo_sum > total or hi_sum < total or (lo_sum == total and strict_lo) or (hi_sum == total and strict_hi)
        return
    assert sum(values) == total
    for v, iv in zip(values, ivs):
        assert v in iv and v > 0


def test_random_models_are_well_formed():
    for m, _ in random_instances(200, seed=5):
        assert well_formed(m).ok
