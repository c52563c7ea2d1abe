"""Variable dependency graph and the poset of dependency strata."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .frontend import Assign, Guard, GuardNondet, Program, assignments, command_reads
from .polyhedra import ContractError


@dataclass(frozen=True)
class DepGraph:
    """``(y, x)`` in ``edges`` means the value of ``y`` flows into ``x``."""

    nodes: frozenset
    edges: frozenset

    def preds(self, v: str) -> set[str]:
        return {a for a, b in self.edges if b == v}


@dataclass(frozen=True, order=True)
class Stratum:
    """A set of variables closed under dependency predecessors.

    Ordering is by size, then by the sorted names, which gives a linear
    extension of inclusion.
    """

    size: int = field(init=False, repr=False)
    vars: tuple[str, ...]

    def __init__(self, vars: Iterable[str]):
        names = tuple(sorted(set(vars)))
        object.__setattr__(self, "vars", names)
        object.__setattr__(self, "size", len(names))

    @property
    def id(self) -> str:
        return "{" + ",".join(self.vars) + "}"

    def __contains__(self, name) -> bool:
        return name in self.vars

    def issubset(self, other: "Stratum") -> bool:
        return set(self.vars) <= set(other.vars)

    def __str__(self):
        return self.id


@dataclass(frozen=True)
class StrataPoset:
    strata: tuple[Stratum, ...]                  # sorted, ends with the full set
    prec: dict = field(hash=False, compare=False)  # stratum -> tuple of immediate predecessors

    @property
    def top(self) -> Stratum:
        return self.strata[-1]

    def immediate_predecessors(self, s: Stratum) -> tuple[Stratum, ...]:
        if s not in self.prec:
            raise ContractError(f"stratum {s} is not in the poset")
        return self.prec[s]

    def hasse_edges(self) -> list[tuple[Stratum, Stratum]]:
        return [(a, b) for b in self.strata for a in self.prec[b]]

    def dump(self) -> str:
        lines = ["strata:"]
        lines += [f"  {s.id}" for s in self.strata]
        edges = self.hasse_edges()
        if edges:
            lines.append("order:")
            lines += [f"  {a.id} < {b.id}" for a, b in edges]
        return "\n".join(lines)


def make_poset(sets: Iterable[Iterable[str]], all_vars: Iterable[str]) -> StrataPoset:
    """Poset of the given variable sets plus the full set, deduplicated."""
    uniq = {Stratum(s) for s in sets}
    uniq.add(Stratum(all_vars))
    strata = tuple(sorted(uniq))
    prec = {}
    for s in strata:
        below = [t for t in strata if t != s and t.issubset(s)]
        prec[s] = tuple(t for t in below
                        if not any(u != t and t.issubset(u) for u in below))
    return StrataPoset(strata, prec)


def data_dependencies(p: Program, include_control: bool = False) -> DepGraph:
    """``y -> x`` for each assignment to ``x`` reading ``y``; optionally also for
    assignments control dependent on a test reading ``y``."""
    edges = set()
    for e in p.edges:
        for a in assignments(e.cmd):
            if isinstance(a, Assign):
                edges.update((y, a.var) for y in a.expr.variables())
    if include_control:
        for branch, node in control_dependences(p):
            reads = set()
            for e in p.succs(branch):
                reads |= command_reads(e.cmd)
            for e in p.succs(node):
                for a in assignments(e.cmd):
                    edges.update((y, a.var) for y in reads)
    return DepGraph(frozenset(v.name for v in p.vars), frozenset(edges))


def postdominators(p: Program) -> dict[int, set[int]]:
    """Iterative post-dominator sets.  Nodes that cannot reach the exit are
    post-dominated by everything (they never constrain control dependence)."""
    nodes = set(p.nodes)
    pdom = {n: set(nodes) for n in nodes}
    if p.exit in nodes:
        pdom[p.exit] = {p.exit}
    changed = True
    while changed:
        changed = False
        for n in sorted(nodes, reverse=True):
            if n == p.exit:
                continue
            succs = [e.dst for e in p.succs(n)]
            if not succs:
                continue
            new = set.intersection(*(pdom[s] for s in succs)) | {n}
            if new != pdom[n]:
                pdom[n] = new
                changed = True
    return pdom


def control_dependences(p: Program) -> set[tuple[int, int]]:
    """Pairs ``(branch, node)``: whether ``node`` executes depends on the test at ``branch``."""
    pdom = postdominators(p)
    out = set()
    for b in p.nodes:
        outs = p.succs(b)
        if len(outs) < 2 or not any(isinstance(e.cmd, (Guard, GuardNondet)) for e in outs):
            continue
        for e in outs:
            # every node on the post-dominator chain of the successor, up to
            # (excluding) the immediate post-dominator of b
            for n in pdom[e.dst]:
                if n == b or n not in pdom[b]:
                    out.add((b, n))
    return out


def strongly_connected_components(nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> list[list[str]]:
    """Tarjan's algorithm (iterative); components come out in reverse topological order."""
    succ: dict[str, list[str]] = {n: [] for n in nodes}
    for a, b in edges:
        succ[a].append(b)
    for n in succ:
        succ[n].sort()
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in sorted(succ):
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp))
    return out


def upstream_closure(g: DepGraph, v: str) -> frozenset[str]:
    """``{v' | v' ->* v}`` including ``v`` itself."""
    seen = {v}
    work = [v]
    while work:
        x = work.pop()
        for y in g.preds(x):
            if y not in seen:
                seen.add(y)
                work.append(y)
    return frozenset(seen)


def strata_from_deps(g: DepGraph, condense: bool = True) -> StrataPoset:
    if not condense:
        return make_poset((upstream_closure(g, v) for v in g.nodes), g.nodes)
    comps = strongly_connected_components(g.nodes, g.edges)
    comp_of = {v: k for k, c in enumerate(comps) for v in c}
    # reverse topological order: a component's predecessors come later in the
    # list, so process from the end and reuse their closures
    closure: dict[int, frozenset[str]] = {}
    comp_preds: dict[int, set[int]] = {k: set() for k in range(len(comps))}
    for a, b in g.edges:
        if comp_of[a] != comp_of[b]:
            comp_preds[comp_of[b]].add(comp_of[a])
    for k in reversed(range(len(comps))):
        acc = set(comps[k])
        for j in comp_preds[k]:
            acc |= closure[j]
        closure[k] = frozenset(acc)
    return make_poset(closure.values(), g.nodes)


def compute_strata(p: Program, include_control: bool = False) -> StrataPoset:
    return strata_from_deps(data_dependencies(p, include_control))


def immediate_predecessors(poset: StrataPoset, s: Stratum) -> tuple[Stratum, ...]:
    return poset.immediate_predecessors(s)
