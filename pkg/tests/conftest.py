from __future__ import annotations

import itertools
import random

import pytest

from openimc.model import Imc, Interval
from openimc.models import load
from openimc.oracle import RandomModelSpec, random_model, random_target

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def fig1() -> Imc:
    return load("fig1")


@pytest.fixture
def fig2() -> Imc:
    return load("fig2")


def thin_loop_model() -> tuple[Imc, int]:
    """``s`` keeps [0.6,0.8] inside C={s} and leaves via two [0,0.2] edges."""
    m = Imc.from_triples(
        ["s", "u", "v"],
        [
            ("s", "s", Interval.closed("0.6", "0.8")),
            ("s", "u", Interval.closed(0, "0.2")),
            ("s", "v", Interval.closed(0, "0.2")),
            ("u", "u", Interval.point(1)),
            ("v", "v", Interval.point(1)),
        ],
    )
    return m, m.mask_of(["s"])


def forced_exit_model() -> tuple[Imc, int]:
    """``s`` keeps [0,0.5]+[0,0.5] inside C={s,c} and must leave via [0.1,0.5]."""
    m = Imc.from_triples(
        ["s", "c", "u"],
        [
            ("s", "s", Interval.closed(0, "0.5")),
            ("s", "c", Interval.closed(0, "0.5")),
            ("s", "u", Interval.closed("0.1", "0.5")),
            ("c", "s", Interval.point(1)),
            ("u", "u", Interval.point(1)),
        ],
    )
    return m, m.mask_of(["s", "c"])


def random_instances(count: int, seed: int, max_states: int = 5, denominator: int = 8):
    """Deterministic stream of ``(model, target)`` pairs with 1..max_states states."""
    for i in range(count):
        rng = random.Random(f"{seed}:{i}")
        n = rng.randint(1, max_states)
        spec = RandomModelSpec(
            states=n,
            density=rng.choice([0.3, 0.5, 0.8]),
            denominator=rng.randint(2, denominator),
            flip=rng.choice([0.2, 0.5, 0.8]),
        )
        m = random_model(spec, rng)
        yield m, random_target(rng, n)


def subsets(mask: int):
    bits = [i for i in range(mask.bit_length()) if mask >> i & 1]
    for r in range(len(bits) + 1):
        for combo in itertools.combinations(bits, r):
            yield sum(1 << b for b in combo)


@pytest.fixture
def record_criterion():
    def record(name: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS[name] = (passed, detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
