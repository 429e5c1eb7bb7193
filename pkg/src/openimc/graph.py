"""Reachability and strongly connected components on the edge graph of an IMC."""

from __future__ import annotations

from dataclasses import dataclass

from .model import Imc, iter_bits


@dataclass(frozen=True)
class Digraph:
    succ: tuple[tuple[int, ...], ...]
    pred: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, m: Imc) -> Digraph:
        n = len(m.states)
        succ = tuple(tuple(row) for row in m.rows)
        pred: list[list[int]] = [[] for _ in range(n)]
        for s, targets in enumerate(succ):
            for t in targets:
                pred[t].append(s)
        return cls(succ, tuple(tuple(p) for p in pred))

    def __len__(self) -> int:
        return len(self.succ)


def can_reach(g: Digraph, target: int) -> int:
    """Mask of vertices with a (possibly empty) path into ``target``."""
    seen = target
    stack = list(iter_bits(target))
    while stack:
        v = stack.pop()
        for u in g.pred[v]:
            if not seen >> u & 1:
                seen |= 1 << u
                stack.append(u)
    return seen


def sccs(g: Digraph, restrict: int) -> list[int]:
    """SCCs of the subgraph induced by ``restrict``, as masks.

    Iterative Tarjan; roots are tried in index order.  A vertex without a
    self-loop still forms its own (trivial) component.
    """
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    out: list[int] = []
    counter = 0

    for root in iter_bits(restrict):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            succ = g.succ[v]
            recurse = False
            while i < len(succ):
                w = succ[i]
                i += 1
                if not restrict >> w & 1:
                    continue
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp |= 1 << w
                    if w == v:
                        break
                out.append(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return out


def is_strongly_connected(g: Digraph, members: int) -> bool:
    comps = sccs(g, members)
    return len(comps) == 1


def to_dot(m: Imc) -> str:
    lines = ["digraph imc {"]
    for s in m.states:
        lines.append(f'  "{s}";')
    for i, row in enumerate(m.rows):
        for j, iv in row.items():
            lines.append(f'  "{m.states[i]}" -> "{m.states[j]}" [label="{iv}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
