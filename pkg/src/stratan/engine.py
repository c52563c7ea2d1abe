"""Fixpoint engine: classic, stratified and stratified-product analyses.

All analyses share one worklist solver.  Nodes are numbered in reverse
postorder by the front end, so a min-heap on node ids is an RPO worklist.
Widening is applied only at widening points (loop body entries by default).
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import domains as dom
from .frontend import Program, restrict, widening_points
from .linear import LinConstraint
from .strata import StrataPoset, Stratum, compute_strata

METHODS = ("classic", "strata-v1", "strata-v2", "product-w1", "product-w2", "product-closure")


class ConfigError(ValueError):
    pass


def normalize_method(name: str) -> str:
    m = name.replace("_", "-").lower()
    if m not in METHODS:
        raise ConfigError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
    return m


@dataclass(frozen=True)
class IntervalBounds:
    """Optional integer bounds on variables at program entry."""

    bounds: tuple = ()   # (name, lo | None, hi | None)

    def __post_init__(self):
        for name, lo, hi in self.bounds:
            if lo is not None and hi is not None and lo > hi:
                raise ValueError(f"empty entry range for {name}: [{lo}, {hi}]")

    @staticmethod
    def of(mapping) -> "IntervalBounds":
        return IntervalBounds(tuple(sorted((k, lo, hi) for k, (lo, hi) in mapping.items())))

    def constraints(self, dims) -> list[LinConstraint]:
        out = []
        for name, lo, hi in self.bounds:
            if name not in dims:
                continue
            if lo is not None:
                out.append(LinConstraint.make({name: 1}, lo))
            if hi is not None:
                out.append(LinConstraint.make({name: -1}, -hi))
        return out


@dataclass
class AnalysisConfig:
    method: str = "strata-v2"
    domain: str = "polyhedra"
    widening_delay: int = 1
    narrowing_steps: int = 2
    max_iterations: int = 100
    thresholds: tuple = ()
    control_deps: bool = False
    widen_everywhere: bool = False
    strata: Optional[StrataPoset] = None       # overrides the computed poset
    entry_bounds: Optional[IntervalBounds] = None

    def __post_init__(self):
        self.method = normalize_method(self.method)
        dom.get_domain(self.domain)
        if self.widening_delay < 0 or self.narrowing_steps < 0:
            raise ConfigError("delay and narrowing steps must be non-negative")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be at least 1")
        self.thresholds = tuple(self.thresholds)


@dataclass(frozen=True)
class TraceEntry:
    stratum: Optional[str]   # stratum id for stratified runs
    node: int
    step: int                # 0-based index of the update at this node
    op: str                  # "join" | "widen" | "narrow"
    value: object
    parts: Optional[dom.StratifiedTuple] = None


@dataclass
class DivergenceReport:
    node: int
    iterations: int
    stratum: Optional[str] = None
    growth: list = field(default_factory=list)   # per step: {component: text}

    def summary(self) -> str:
        where = f" in stratum {self.stratum}" if self.stratum else ""
        return (f"no fixpoint after {self.iterations} widening steps at n{self.node}{where}")


@dataclass
class InvariantMap:
    program: Program
    dims: tuple
    values: dict
    method: str = "classic"
    domain: str = "polyhedra"
    points: frozenset = frozenset()
    counts: dict = field(default_factory=dict)        # widening point -> changing updates
    converged: bool = True
    trace: list = field(default_factory=list)
    divergence: Optional[DivergenceReport] = None
    tuples: dict = field(default_factory=dict)        # product runs: node -> tuple
    strata: Optional[StrataPoset] = None
    per_stratum: dict = field(default_factory=dict)   # stratified runs: Stratum -> InvariantMap
    wall_time: float = 0.0
    parts: dict = field(default_factory=dict)         # node -> disjuncts whose hull is the value

    def __getitem__(self, n: int):
        return self.values[n]

    @property
    def iterations(self) -> int:
        own = max(self.counts.values(), default=0)
        return max([own] + [m.iterations for m in self.per_stratum.values()])

    def loop_invariant(self, k: int = 0):
        """Value at the body entry of the ``k``-th loop (source order)."""
        loops = sorted(self.program.loops, key=lambda lp: lp.line)
        return self.values[loops[k].body]


# -- solver -------------------------------------------------------------------

MAX_DISJUNCTS = 16


def _hull(values, bottom):
    out = bottom
    for v in values:
        out = out.join(v)
    return out


def _add_disjunct(parts: list, v) -> None:
    if v.is_empty() or any(d.includes(v) for d in parts):
        return
    parts[:] = [d for d in parts if not v.includes(d)]
    parts.append(v)


class _Solver:
    """Worklist solver.  Values are joined only at widening points; other nodes
    carry a short list of disjuncts, so a path between two widening points is
    transferred exactly (a loop test is applied before the hull, not after)."""

    def __init__(self, prog: Program, dims, cfg: AnalysisConfig, kctx=None, variant=None,
                 poset: Optional[StrataPoset] = None, widen_tuple=None, label=None):
        self.p = prog
        self.dims = tuple(dims)
        self.cfg = cfg
        self.domain = dom.get_domain(cfg.domain)
        self.K = kctx
        self.variant = variant          # None | "v1" | "v2"
        self.poset = poset
        self.widen_tuple = widen_tuple  # product mode when set
        self.label = label
        self.points = widening_points(prog, cfg.widen_everywhere)
        self.preds = {n: prog.preds(n) for n in prog.nodes}
        self.succs = {n: prog.succs(n) for n in prog.nodes}
        self.bottom = self.domain.bottom(self.dims)
        init = self.domain.top(self.dims)
        if cfg.entry_bounds is not None:
            init = init.guard(cfg.entry_bounds.constraints(self.dims))
        self.init = init
        self.X: dict = {}
        self.D: dict = {}
        self.T: dict = {}
        self.counts = {n: 0 for n in self.points}
        self.trace: list[TraceEntry] = []
        self.divergence: Optional[DivergenceReport] = None
        self.growth: dict[int, list] = {}

    def _k(self, n):
        return self.K[n] if self.K is not None else None

    def parts(self, n) -> tuple:
        k = self._k(n)
        if n == self.p.entry:
            v = self.init if k is None else self.init.meet(k)
            return () if v.is_empty() else (v,)
        out: list = []
        for e in self.preds[n]:
            for d in self.D.get(e.src, ()):
                if self.variant == "v1" and e.src in self.points and self.K is not None:
                    d = d.meet(self.K[e.src])
                r = dom.transfer(d, e.cmd)
                if k is not None:
                    r = r.meet(k)
                _add_disjunct(out, r)
        if len(out) > MAX_DISJUNCTS:
            out = [_hull(out, self.bottom)]
        return tuple(out)

    def candidate(self, n):
        return _hull(self.parts(n), self.bottom)

    def _set(self, n, value, parts=None) -> bool:
        if parts is None:
            parts = () if value.is_empty() else (value,)
        changed = n not in self.D or self.D[n] != parts
        self.X[n] = value
        self.D[n] = parts
        return changed

    def update(self, n) -> bool:
        if n not in self.points:
            parts = self.parts(n)
            return self._set(n, _hull(parts, self.bottom), parts)
        cand = self.candidate(n)
        old = self.X.get(n, self.bottom)
        step = self.counts[n]
        delayed = step < self.cfg.widening_delay
        op = "join" if delayed else "widen"
        if self.widen_tuple is not None:
            t = self.T.get(n) or dom.tuple_bottom(self.poset, self.domain)
            q = old.join(cand)
            t2 = dom.tuple_join(t, q) if delayed else self.widen_tuple(t, q, self.cfg.thresholds)
            if t2 == t:
                return self._set(n, old)
            self.T[n] = t2
            new = dom.tuple_gamma(t2)
            self._record(n, step, op, new, t2)
            return self._set(n, new) or True
        new = old.join(cand) if delayed else dom.widen_after_join(old, cand, self.cfg.thresholds)
        k = self._k(n)
        if self.variant == "v2" and k is not None:
            new = new.meet(k)
        if new != old:
            self._record(n, step, op, new, None)
        return self._set(n, new)

    def _record(self, n, step, op, value, parts):
        self.counts[n] = step + 1
        self.trace.append(TraceEntry(self.label, n, step, op, value, parts))
        if parts is not None:
            self.growth.setdefault(n, []).append({s.id: dom.show(v) for s, v in parts.items()})
        else:
            self.growth.setdefault(n, []).append({"value": dom.show(value)})
        if self.counts[n] > self.cfg.max_iterations and self.divergence is None:
            self.divergence = DivergenceReport(n, self.counts[n] - 1, self.label, self.growth[n])

    def ascend(self) -> bool:
        work = [self.p.entry]
        queued = {self.p.entry}
        while work:
            n = heapq.heappop(work)
            queued.discard(n)
            changed = self.update(n)
            if self.divergence is not None:
                return False
            if changed:
                for e in self.succs[n]:
                    if e.dst not in queued:
                        queued.add(e.dst)
                        heapq.heappush(work, e.dst)
        for n in self.p.nodes:
            if n not in self.X:
                self._set(n, self.bottom)
        if self.variant == "v1" and self.K is not None:
            for n in self.p.nodes:
                k = self.K[n]
                parts = []
                for d in self.D[n]:
                    _add_disjunct(parts, d.meet(k))
                self.X[n] = self.X[n].meet(k)
                self.D[n] = tuple(parts) if n not in self.points else (
                    () if self.X[n].is_empty() else (self.X[n],))
        return True

    def _inductive(self) -> bool:
        """Every recomputed disjunct lies inside its node's current value."""
        return all(self.X[n].includes(d) for n in self.p.nodes for d in self.parts(n))

    def descend(self, steps: int):
        # Collapsing an oversized disjunct list to its hull is not monotone, so a
        # round can lose inductiveness; such a round is rolled back.
        inductive = self._inductive()
        for rnd in range(steps):
            snapshot = (dict(self.X), dict(self.D), dict(self.T), len(self.trace))
            changed = False
            for n in self.p.nodes:
                old = self.X[n]
                if n not in self.points:
                    parts = self.parts(n)
                    changed |= self._set(n, _hull(parts, self.bottom), parts)
                    continue
                cand = self.candidate(n)
                if n in self.T:
                    t = self.T[n]
                    t2 = dom.StratifiedTuple(t.poset, tuple(
                        v.meet(cand.project(s.vars)) for s, v in t.items()))
                    self.T[n] = t2
                    new = dom.tuple_gamma(t2)
                else:
                    new = old.meet(cand)
                if new != old:
                    changed = True
                    self._set(n, new)
                    self.trace.append(TraceEntry(self.label, n, rnd, "narrow", new, self.T.get(n)))
            if inductive and not self._inductive():
                self.X, self.D, self.T = snapshot[0], snapshot[1], snapshot[2]
                del self.trace[snapshot[3]:]
                break
            if not changed:
                break

    def result(self, method: str) -> InvariantMap:
        return InvariantMap(self.p, self.dims, dict(self.X), method, self.cfg.domain,
                            self.points, dict(self.counts), self.divergence is None,
                            list(self.trace), self.divergence, dict(self.T), self.poset,
                            parts=dict(self.D))


def _run(solver: _Solver, method: str, steps: int) -> InvariantMap:
    if solver.ascend():
        solver.descend(steps)
    else:
        for n in solver.p.nodes:
            solver._set(n, solver.domain.top(solver.dims))
    return solver.result(method)


# -- public analyses ----------------------------------------------------------

def analyze_classic(p: Program, cfg: Optional[AnalysisConfig] = None) -> InvariantMap:
    cfg = cfg or AnalysisConfig(method="classic")
    start = time.perf_counter()
    out = _run(_Solver(p, p.var_names, cfg), "classic", cfg.narrowing_steps)
    out.wall_time = time.perf_counter() - start
    return out


def _poset(p: Program, cfg: AnalysisConfig) -> StrataPoset:
    return cfg.strata if cfg.strata is not None else compute_strata(p, cfg.control_deps)


def analyze_stratified(p: Program, cfg: Optional[AnalysisConfig] = None,
                       variant: str = "v2") -> InvariantMap:
    """Analyze ``p`` restricted to each stratum in increasing order, each run
    restricted by the meet of its immediate predecessors' results."""
    cfg = cfg or AnalysisConfig(method=f"strata-{variant}")
    if variant not in ("v1", "v2"):
        raise ConfigError(f"unknown stratified variant {variant!r}")
    domain = dom.get_domain(cfg.domain)
    if variant == "v2" and not domain.upto_terminating:
        raise ConfigError(f"domain {cfg.domain!r} does not declare an 'up to' terminating widening")
    start = time.perf_counter()
    poset = _poset(p, cfg)
    results: dict[Stratum, InvariantMap] = {}
    final = None
    for s in poset.strata:
        sub = restrict(p, s.vars)
        preds = poset.immediate_predecessors(s)
        kctx = None
        if preds:
            kctx = {}
            for n in p.nodes:
                k = domain.top(s.vars)
                for pre in preds:
                    k = k.meet(results[pre].values[n].embed(s.vars))
                kctx[n] = k
        solver = _Solver(sub, s.vars, cfg, kctx, variant, label=s.id)
        final = _run(solver, f"strata-{variant}", cfg.narrowing_steps)
        results[s] = final
        if not final.converged:
            break
    out = InvariantMap(p, final.dims, final.values, f"strata-{variant}", cfg.domain,
                       final.points, final.counts, final.converged,
                       [t for m in results.values() for t in m.trace], final.divergence,
                       strata=poset, per_stratum=results, parts=final.parts)
    if final.dims != p.var_names:      # stopped early on divergence
        top = domain.top(p.var_names)
        out.values = {n: top for n in p.nodes}
        out.parts = {n: (top,) for n in p.nodes}
        out.dims = p.var_names
    out.wall_time = time.perf_counter() - start
    return out


def analyze_product(p: Program, cfg: Optional[AnalysisConfig] = None,
                    widening: str = "w2") -> InvariantMap:
    """One fixpoint over stratified tuples; only the widening differs from classic."""
    cfg = cfg or AnalysisConfig(method=f"product-{widening}")
    if widening not in dom.TUPLE_WIDENINGS:
        raise ConfigError(f"unknown tuple widening {widening!r}")
    start = time.perf_counter()
    poset = _poset(p, cfg)
    solver = _Solver(p, p.var_names, cfg, poset=poset,
                     widen_tuple=dom.TUPLE_WIDENINGS[widening])
    out = _run(solver, f"product-{widening}", cfg.narrowing_steps)
    out.wall_time = time.perf_counter() - start
    return out


def analyze(p: Program, cfg: AnalysisConfig) -> InvariantMap:
    m = cfg.method
    if m == "classic":
        return analyze_classic(p, cfg)
    if m.startswith("strata-"):
        return analyze_stratified(p, cfg, m.split("-")[1])
    return analyze_product(p, cfg, m.split("-")[1])


def narrow(p: Program, imap: InvariantMap, steps: int,
           cfg: Optional[AnalysisConfig] = None) -> InvariantMap:
    """Decreasing iterations from a post-fixpoint; each step meets every node with
    its recomputed value, so the result stays a post-fixpoint."""
    cfg = cfg or AnalysisConfig(method="classic", domain=imap.domain)
    solver = _Solver(p, imap.dims, cfg)
    for n, v in imap.values.items():
        solver._set(n, v, imap.parts.get(n))
    solver.descend(steps)
    out = solver.result(imap.method)
    out.counts = dict(imap.counts)
    return out


def check_postfixpoint(p: Program, imap: InvariantMap,
                       entry_bounds: Optional[IntervalBounds] = None) -> bool:
    return not postfixpoint_violations(p, imap, entry_bounds)


def postfixpoint_violations(p: Program, imap: InvariantMap,
                            entry_bounds: Optional[IntervalBounds] = None) -> list:
    """Edges whose post-image escapes the target's invariant (``None`` for the entry).

    When the map carries disjuncts, each one is pushed through the edge
    separately, matching how the engine propagates between widening points.
    """
    domain = dom.get_domain(imap.domain)
    init = domain.top(imap.dims)
    if entry_bounds is not None:
        init = init.guard(entry_bounds.constraints(imap.dims))
    bad = []
    if not imap.values[p.entry].includes(init):
        bad.append(None)
    for e in p.edges:
        sources = imap.parts.get(e.src, (imap.values[e.src],))
        target = imap.values[e.dst]
        if not all(target.includes(dom.transfer(d, e.cmd)) for d in sources):
            bad.append(e)
    return bad
