"""Abstract-domain contract, edge transfer functions and the stratified product.

Both concrete domains (``Polyhedron`` and ``IntervalValue``) expose the same
method set, so the engine is written once against ``AbstractValue``.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .frontend import Assign, AssignNondet, Command, Guard, GuardNondet, Seq, Skip
from .intervals import IntervalValue
from .linear import LinConstraint
from .polyhedra import ContractError, Polyhedron
from .strata import StrataPoset, Stratum


class AbstractValue(ABC):
    """Lattice element over named dimensions.

    ``upto_terminating`` declares that chains ``u' = widen(u, v) meet K`` with
    ``v`` inside ``K`` stabilize, which the intersecting stratified scheme needs.
    """

    upto_terminating = False
    dims: tuple[str, ...]

    @classmethod
    @abstractmethod
    def top(cls, dims): ...

    @classmethod
    @abstractmethod
    def bottom(cls, dims): ...

    @abstractmethod
    def join(self, other): ...

    @abstractmethod
    def meet(self, other): ...

    @abstractmethod
    def widen(self, other, thresholds=()): ...

    @abstractmethod
    def includes(self, other) -> bool: ...

    @abstractmethod
    def project(self, keep): ...

    @abstractmethod
    def embed(self, dims): ...


AbstractValue.register(Polyhedron)
AbstractValue.register(IntervalValue)

DOMAINS = {"polyhedra": Polyhedron, "intervals": IntervalValue}


def get_domain(name: str):
    try:
        return DOMAINS[name]
    except KeyError:
        raise ValueError(f"unknown domain {name!r}; choose from {sorted(DOMAINS)}") from None


def to_polyhedron(v) -> Polyhedron:
    if isinstance(v, Polyhedron):
        return v
    return Polyhedron.from_constraints(v.constraints(), v.dims)


def transfer(v, cmd: Command):
    """Abstract post-condition of one edge command."""
    if v.is_empty():
        return v
    if isinstance(cmd, Assign):
        return v.assign(cmd.var, cmd.expr)
    if isinstance(cmd, AssignNondet):
        return v.forget(cmd.var)
    if isinstance(cmd, Guard):
        return v.guard(cmd.constraints)
    if isinstance(cmd, Seq):
        for c in cmd.cmds:
            v = transfer(v, c)
        return v
    if isinstance(cmd, (GuardNondet, Skip)):
        return v
    raise TypeError(f"unknown command {cmd!r}")


def thresholds_for(thresholds: Sequence[LinConstraint], dims) -> list[LinConstraint]:
    dims = set(dims)
    return [t for t in thresholds if t.variables() <= dims]


def widen_after_join(u, cand, thresholds=()):
    """``u widen (u join cand)``: the argument order that keeps widening's precondition."""
    return u.widen(u.join(cand), thresholds_for(thresholds, u.dims))


# -- stratified tuples --------------------------------------------------------

@dataclass(frozen=True)
class StratifiedTuple:
    """Family of values indexed by strata, each stored over its stratum's variables.
    Ordering and equality are component-wise; the represented set is the meet."""

    poset: StrataPoset
    parts: tuple      # aligned with poset.strata

    def __getitem__(self, s: Stratum):
        return self.parts[self.poset.strata.index(s)]

    def items(self):
        return zip(self.poset.strata, self.parts)

    def replace(self, values: Mapping[Stratum, object]) -> "StratifiedTuple":
        return StratifiedTuple(self.poset, tuple(values.get(s, v) for s, v in self.items()))

    def dump(self) -> str:
        from .polyhedra import format_constraints
        out = []
        for s, v in self.items():
            out.append(" ".join(s.vars) + ":")
            body = format_constraints(v) if isinstance(v, Polyhedron) else "\n".join(map(str, v.constraints()))
            out.extend("  " + line for line in body.splitlines())
        return "\n".join(out)

    def __str__(self):
        return "; ".join(f"{s.id}: {v}" for s, v in self.items())


def tuple_uniform(poset: StrataPoset, value) -> StratifiedTuple:
    """Tuple whose components are the projections of ``value``."""
    return StratifiedTuple(poset, tuple(value.project(s.vars) for s in poset.strata))


def tuple_top(poset: StrataPoset, domain) -> StratifiedTuple:
    return StratifiedTuple(poset, tuple(domain.top(s.vars) for s in poset.strata))


def tuple_bottom(poset: StrataPoset, domain) -> StratifiedTuple:
    return StratifiedTuple(poset, tuple(domain.bottom(s.vars) for s in poset.strata))


def tuple_gamma(t: StratifiedTuple):
    dims = t.poset.top.vars
    out = None
    for _, v in t.items():
        v = v.embed(dims)
        out = v if out is None else out.meet(v)
    return out


def _same_poset(a: StratifiedTuple, b: StratifiedTuple):
    if a.poset.strata != b.poset.strata:
        raise ContractError("stratified tuples over different posets")


def tuple_includes(t1: StratifiedTuple, t2: StratifiedTuple) -> bool:
    """Every component of ``t2`` is included in the matching one of ``t1``."""
    _same_poset(t1, t2)
    return all(a.includes(b) for a, b in zip(t1.parts, t2.parts))


def tuple_join(t: StratifiedTuple, q) -> StratifiedTuple:
    """Component-wise ``P_S join proj_S(q)`` (used during the widening delay)."""
    return StratifiedTuple(t.poset, tuple(v.join(q.project(s.vars)) for s, v in t.items()))


def _component_widen(v, q, s: Stratum, thresholds):
    return widen_after_join(v, q.project(s.vars), thresholds)


def tuple_widen1(t: StratifiedTuple, q, thresholds=()) -> StratifiedTuple:
    """Independent widening of every component against the projection of ``q``."""
    return StratifiedTuple(t.poset, tuple(_component_widen(v, q, s, thresholds) for s, v in t.items()))


def tuple_widen2(t: StratifiedTuple, q, thresholds=()) -> StratifiedTuple:
    """Widen components in increasing stratum order, intersecting each with the
    already widened components of its immediate predecessors."""
    done: dict[Stratum, object] = {}
    for s, v in t.items():
        r = _component_widen(v, q, s, thresholds)
        for pre in t.poset.immediate_predecessors(s):
            r = r.meet(done[pre].embed(s.vars))
        done[s] = r
    return StratifiedTuple(t.poset, tuple(done[s] for s in t.poset.strata))


@dataclass
class ReductionStats:
    passes: int = 0
    converged: bool = True


def reduce_step(t: StratifiedTuple, s: Stratum) -> StratifiedTuple:
    """Replace ``R_S`` by ``R_S`` met with the projections of all other components."""
    r = t[s]
    for s2, v in t.items():
        if s2 == s:
            continue
        shared = [x for x in s.vars if x in s2]
        if not shared:
            if v.is_empty():
                r = r.meet(type(r).bottom(s.vars))
            continue
        r = r.meet(v.project(shared).embed(s.vars))
    return t.replace({s: r})


def reduce_tuple(t: StratifiedTuple, stats: Optional[ReductionStats] = None) -> StratifiedTuple:
    """Round-robin reductions (strata by size, then name) until nothing changes,
    bounded by ``|strata|^2`` passes."""
    n = len(t.poset.strata)
    bound = max(1, n * n)
    passes = 0
    while True:
        passes += 1
        before = t
        for s in t.poset.strata:
            t = reduce_step(t, s)
        if t == before:
            break
        if passes >= bound:
            if stats is not None:
                stats.converged = False
            break
    if stats is not None:
        stats.passes += passes
    return t


def tuple_widen_closure(t: StratifiedTuple, q, thresholds=(),
                        stats: Optional[ReductionStats] = None) -> StratifiedTuple:
    """Component-wise widening followed by reductions in every direction.
    Not a widening: iteration with it may fail to stabilize."""
    return reduce_tuple(tuple_widen1(t, q, thresholds), stats)


TUPLE_WIDENINGS = {"w1": tuple_widen1, "w2": tuple_widen2, "closure": tuple_widen_closure}


def show(v) -> str:
    """Short human-readable rendering of a domain value."""
    if isinstance(v, Polyhedron):
        from .polyhedra import pretty
        return pretty(v)
    return str(v)
