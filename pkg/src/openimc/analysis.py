"""Full qualitative analysis of a model under both semantics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .imdp import IlecReport, aq0_imdp, aq1_imdp, eq0_imdp, eq1_imdp
from .model import Imc, ModelError, prepare, well_formed
from .umc import FixpointTrace, aq0_umc, aq1_umc, eq0_umc, eq1_umc

SET_NAMES = ("AQ0", "EQ0", "EQ1", "AQ1")


class IllFormedModel(ModelError):
    def __init__(self, report) -> None:
        super().__init__(report.describe())
        self.report = report


@dataclass(frozen=True)
class QualitativeSets:
    aq0: int
    eq0: int
    eq1: int
    aq1: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.aq0, self.eq0, self.eq1, self.aq1)


@dataclass(frozen=True)
class AnalysisReport:
    model: Imc
    target: int
    umc: QualitativeSets
    imdp: QualitativeSets
    ilecs: IlecReport
    eq0_trace: FixpointTrace
    eq1_trace: FixpointTrace

    def names(self, mask: int) -> list[str]:
        return self.model.names_of(mask)

    def to_dict(self) -> dict:
        semantics = {}
        for label, sets in (("UMC", self.umc), ("IMDP", self.imdp)):
            semantics[label] = {k: self.names(v) for k, v in zip(SET_NAMES, sets.as_tuple())}
        return {
            "states": list(self.model.states),
            "target": self.names(self.target),
            "semantics": semantics,
            "ilecs": [self.names(c) for c in self.ilecs.ilecs],
            "iterations": {
                "EQ0": {"inner": self.eq0_trace.inner_iterations},
                "EQ1": {
                    "inner": self.eq1_trace.inner_iterations,
                    "outer": self.eq1_trace.outer_iterations,
                },
                "ILEC": {"rounds": self.ilecs.rounds},
            },
        }


def target_mask(m: Imc, target: int | Iterable[str]) -> int:
    if isinstance(target, int):
        if target >> len(m.states):
            raise ModelError("target mask refers to unknown states")
        return target
    return m.mask_of(target)


def analyze(m: Imc, target: int | Iterable[str]) -> AnalysisReport:
    """Compute all eight qualitative sets for reaching ``target``.

    Raises :class:`IllFormedModel` when some state has no assignment.
    """
    t = target_mask(m, target)
    wf = well_formed(m)
    if not wf.ok:
        raise IllFormedModel(wf)
    m = prepare(m, t)
    eq0 = eq0_umc(m, t)
    eq1 = eq1_umc(m, t)
    umc = QualitativeSets(aq0_umc(m, t), eq0.states, eq1.states, aq1_umc(m, t))
    imdp_aq1, ilecs = aq1_imdp(m, t)
    imdp = QualitativeSets(aq0_imdp(m, t), eq0_imdp(m, t).states, eq1_imdp(m, t).states, imdp_aq1)
    return AnalysisReport(m, t, umc, imdp, ilecs, eq0.trace, eq1.trace)
