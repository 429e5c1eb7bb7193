import random
from fractions import Fraction

import pytest

import openimc.umc as umc
from openimc.edges import GuardExceeded
from openimc.model import Imc, Interval, prepare, well_formed
from openimc.oracle import (
    RandomModelSpec,
    build_qa,
    compare,
    differential_run,
    oracle_sets,
    random_model,
    random_target,
)

from conftest import subsets


def test_build_qa_examples(fig1, fig2):
    qa = build_qa(fig2, check_witness=True)
    assert sorted(qa.actions[fig2.index("s1")]) == sorted([0b111, 0b101])
    assert qa.actions[fig2.index("s2")] == (0b100,)
    assert build_qa(fig1).actions[0] == (0b11,)


def test_oracle_sets_examples(fig1, fig2):
    assert oracle_sets(build_qa(fig1), 0b10) == (0, 0, 0b11, 0b11)
    assert oracle_sets(build_qa(fig2), 0b100) == (0, 0, 0b111, 0b111)
    for m in (fig1, fig2):
        assert oracle_sets(build_qa(m), 0) == (m.full, m.full, 0, 0)


def test_guard_is_enforced():
    names = [f"t{i}" for i in range(6)]
    m = Imc.from_triples(["s"] + names, [("s", t, Interval.closed(0, 1)) for t in names])
    with pytest.raises(GuardExceeded):
        build_qa(m, limit=5)


def _direct_action_count(m: Imc, s: int) -> int:
    row = m.rows[s]
    lo_sum = sum(iv.lo for iv in row.values())
    excludable = [t for t, iv in row.items() if iv.lo == 0 and not iv.lo_open]
    count = 0
    for dropped in subsets(sum(1 << t for t in excludable)):
        kept = [iv for t, iv in row.items() if not dropped >> t & 1]
        hi = sum(iv.hi for iv in kept)
        large = kept and (hi > 1 or (hi == 1 and not any(iv.hi_open for iv in kept)))
        room = lo_sum < 1 or not any(iv.lo == 0 or iv.lo_open for iv in kept)
        count += bool(large and room)
    return count


def test_action_counts_spot_check():
    rng = random.Random(3)
    for i in range(150):
        m = random_model(RandomModelSpec(states=rng.randint(1, 5), denominator=rng.randint(2, 8), seed=i))
        qa = build_qa(m)
        for s in range(len(m.states)):
            assert len(qa.actions[s]) == _direct_action_count(m, s) >= 1
            assert len(set(qa.actions[s])) == len(qa.actions[s])


def test_generator_is_well_formed_and_deterministic():
    spec = RandomModelSpec(states=5, denominator=8, flip=0.8, seed=9)
    a = [random_model(spec, random.Random(f"9:{i}")) for i in range(100)]
    b = [random_model(spec, random.Random(f"9:{i}")) for i in range(100)]
    assert a == b
    assert all(well_formed(m).ok for m in a)
    targets = {random_target(random.Random(i), 3) for i in range(200)}
    assert 0 not in targets and 0b111 not in targets


def test_differential_default_spec():
    report = differential_run(RandomModelSpec(states=4, denominator=4, seed=42), 500)
    assert report.instances == 500
    assert report.ok, report.to_dict()


def test_single_state_is_trivially_consistent():
    for seed in range(5):
        assert differential_run(RandomModelSpec(states=1, seed=seed), 20).ok


def test_fig2_injected(fig2):
    report = differential_run(RandomModelSpec(states=3, seed=1), 10, extra=[(fig2, fig2.mask_of(["s2"]))])
    assert report.instances == 11 and report.ok
    assert compare(fig2, fig2.mask_of(["s2"])) == {}


def test_oracle_catches_a_broken_operator(monkeypatch):
    def sloppy_cpre(m, x):
        # forgets that edges leaving x must be able to carry 0
        info = umc.row_info(m)
        return sum(1 << s for s in range(len(m.states)) if umc.large_into(info, s, x))

    monkeypatch.setattr(umc, "cpre", sloppy_cpre)
    report = differential_run(RandomModelSpec(states=3, denominator=4, seed=5), 200)
    assert not report.ok
    first = report.mismatches[0]
    assert any(key.startswith("EQ0") for key in first.differing)
    assert "states:" in first.model_text


def test_abstraction_on_raw_model_sees_dead_edges_as_unusable():
    m = Imc.from_triples(
        ["s", "a", "b"],
        [
            ("s", "a", Interval.point(1)),
            ("s", "b", Interval.closed(0, Fraction(1, 2))),
            ("a", "a", Interval.point(1)),
            ("b", "b", Interval.point(1)),
        ],
    )
    assert build_qa(m).actions[0] == (0b010,)
    assert build_qa(m) == build_qa(prepare(m, 0))
    assert compare(m, m.mask_of(["b"])) == {}
