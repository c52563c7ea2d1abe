"""Brute-force reachable states of bounded-integer programs.

Nondeterministic values are drawn from a finite range, so the result is an
under-approximation of the true collecting semantics.  A soundness violation
found against it is therefore always genuine; absence of violations is
evidence, not proof.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .frontend import Assign, AssignNondet, Guard, GuardNondet, Program, Seq, Skip


@dataclass(frozen=True)
class OracleConfig:
    nondet_range: tuple[int, int] = (-8, 8)
    ranges: tuple = ()          # per-variable overrides: (name, lo, hi)
    entry: tuple = ()           # per-variable entry ranges: (name, lo, hi); others start at 0
    cap: int = 100_000

    def __post_init__(self):
        lo, hi = self.nondet_range
        if lo > hi:
            raise ValueError("empty nondet range")
        if self.cap <= 0:
            raise ValueError("state cap must be positive")

    def range_for(self, name: str) -> range:
        for n, lo, hi in self.ranges:
            if n == name:
                return range(lo, hi + 1)
        lo, hi = self.nondet_range
        return range(lo, hi + 1)


@dataclass(frozen=True)
class ConcreteState:
    node: int
    store: tuple        # values aligned with the program's sorted variable names


@dataclass
class ReachResult:
    dims: tuple
    states: dict = field(default_factory=dict)   # node -> set of store tuples
    truncated: bool = False
    count: int = 0

    def at(self, node: int) -> set:
        return self.states.get(node, set())

    def stores(self, node: int) -> list[dict]:
        return [dict(zip(self.dims, s)) for s in sorted(self.at(node))]

    def all_states(self) -> set[ConcreteState]:
        return {ConcreteState(n, s) for n, ss in self.states.items() for s in ss}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["node", *self.dims])
        for n in sorted(self.states):
            for s in sorted(self.states[n]):
                w.writerow([n, *s])
        return buf.getvalue()


def _step(cmd, store: tuple, dims: tuple, cfg: OracleConfig) -> list[tuple]:
    if isinstance(cmd, Skip):
        return [store]
    if isinstance(cmd, Assign):
        env = dict(zip(dims, store))
        value = cmd.expr.evaluate(env)
        if value.denominator != 1:
            raise ValueError(f"non-integer value in {cmd}")
        k = dims.index(cmd.var)
        return [store[:k] + (int(value),) + store[k + 1:]]
    if isinstance(cmd, AssignNondet):
        k = dims.index(cmd.var)
        return [store[:k] + (v,) + store[k + 1:] for v in cfg.range_for(cmd.var)]
    if isinstance(cmd, Guard):
        env = dict(zip(dims, store))
        return [store] if all(c.holds(env) for c in cmd.constraints) else []
    if isinstance(cmd, GuardNondet):
        if cmd.test is None:
            return [store]
        return [store] if cmd.test.holds(dict(zip(dims, store))) else []
    if isinstance(cmd, Seq):
        out = [store]
        for c in cmd.cmds:
            out = [t for s in out for t in _step(c, s, dims, cfg)]
        return out
    raise TypeError(f"unknown command {cmd!r}")


def _entry_stores(dims, cfg: OracleConfig) -> list[tuple]:
    stores = [()]
    spans = {n: range(lo, hi + 1) for n, lo, hi in cfg.entry}
    for d in dims:
        stores = [s + (v,) for s in stores for v in spans.get(d, (0,))]
    return stores


def reach(p: Program, cfg: Optional[OracleConfig] = None) -> ReachResult:
    """Breadth-first exploration of (node, store) pairs from the entry."""
    cfg = cfg or OracleConfig()
    dims = p.var_names
    out = ReachResult(dims)
    succs = {n: p.succs(n) for n in p.nodes}
    seen: set = set()
    work: deque = deque()
    for s in _entry_stores(dims, cfg):
        seen.add((p.entry, s))
        work.append((p.entry, s))
    while work:
        node, store = work.popleft()
        out.states.setdefault(node, set()).add(store)
        for e in succs[node]:
            for nxt in _step(e.cmd, store, dims, cfg):
                key = (e.dst, nxt)
                if key in seen:
                    continue
                if len(seen) >= cfg.cap:
                    out.truncated = True
                    continue
                seen.add(key)
                work.append(key)
    out.count = len(seen)
    return out


@dataclass
class SoundnessReport:
    violations: list = field(default_factory=list)   # (node, store dict)
    truncated: bool = False
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.truncated


def check_soundness(p: Program, imap, cfg: Optional[OracleConfig] = None,
                    reached: Optional[ReachResult] = None) -> SoundnessReport:
    """Every reachable concrete state must lie in its node's invariant."""
    reached = reached or reach(p, cfg)
    report = SoundnessReport(truncated=reached.truncated)
    for node, stores in sorted(reached.states.items()):
        value = imap.values[node] if hasattr(imap, "values") else imap[node]
        for s in sorted(stores):
            report.checked += 1
            point = {d: Fraction(x) for d, x in zip(reached.dims, s)}
            if not value.contains(point):
                report.violations.append((node, dict(zip(reached.dims, s))))
    return report
