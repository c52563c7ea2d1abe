"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

The lines are collected in ``RESULTS`` and printed in the terminal summary by
``conftest.pytest_terminal_summary``; running this file directly prints them too.
"""

import random
import time

import pytest

from conftest import corpus_names, load, poly
from progen import random_program
from stratan import domains as dom
from stratan.engine import METHODS, AnalysisConfig, analyze, check_postfixpoint
from stratan.frontend import parse
from stratan.oracle import OracleConfig, check_soundness, reach
from stratan.polyhedra import Polyhedron

RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str, elapsed: float, limit: float = None):
    within = limit is None or elapsed < limit
    status = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g}s)" if limit is not None else ""
    RESULTS[n] = f"criterion {n}: {status}  {detail}  [{elapsed:.2f}s{budget}]"
    print(RESULTS[n])
    assert ok, detail
    assert within, f"took {elapsed:.2f}s, limit {limit}s"


def cfg(method, **kw):
    return AnalysisConfig(method=method, **kw)


# -- 1 ---------------------------------------------------------------------------

def test_criterion_1_classic_iterates():
    t0 = time.perf_counter()
    p = load("listing2.whl")
    im = analyze(p, cfg("classic", widening_delay=0, narrowing_steps=0))
    want = [poly("i = 1", "j = 0"), poly("i - j = 1", "i >= 1"),
            poly("-i + j >= -1", "7*i - 4*j >= 7"), poly("-i + j >= -1"), poly()]
    got = [t.value for t in im.trace]
    narrowed = analyze(p, cfg("classic", widening_delay=0, narrowing_steps=1)).loop_invariant()
    ok = got == want and narrowed == poly("i <= 5")
    report(1, ok, f"{len(got)} iterates match, narrowed head: {dom.show(narrowed)}",
           time.perf_counter() - t0, 1.0)


# -- 2 ---------------------------------------------------------------------------

def test_criterion_2_listing1():
    t0 = time.perf_counter()
    head = analyze(load("listing1.whl"), cfg("classic", widening_delay=0)).loop_invariant()
    ok = head == poly("i >= 1", "i <= 5", dims=("i",))
    report(2, ok, f"loop head: {dom.show(head)}", time.perf_counter() - t0, 1.0)


# -- 3 ---------------------------------------------------------------------------

def test_criterion_3_stratified_precision():
    t0 = time.perf_counter()
    p = load("listing2.whl")
    details, ok = [], True
    for variant in ("strata-v1", "strata-v2"):
        im = analyze(p, cfg(variant, widening_delay=0, narrowing_steps=2))
        head = im.loop_invariant()
        vertices = sorted(head.vertices())
        good = (im.converged and im.iterations <= 4
                and vertices == [(1, 0), (2, 1), (3, 3), (5, 9)]
                and head.ray_directions() == [(0, 1)]
                and head.contains({"i": 1, "j": 1000}) and head.contains({"i": 5, "j": 1000})
                and poly("i >= 1", "i <= 5").includes(head))
        ok &= good
        details.append(f"{variant}: {im.iterations} widenings, vertices "
                       f"{[tuple(map(int, v)) for v in vertices]} + ray (0,1)")
    report(3, ok, "; ".join(details), time.perf_counter() - t0, 1.0)


# -- 4 ---------------------------------------------------------------------------

def test_criterion_4_variant_agreement():
    t0 = time.perf_counter()
    names = corpus_names()
    differ = []
    for name in names:
        p = load(name)
        a, b = analyze(p, cfg("strata-v1")), analyze(p, cfg("strata-v2"))
        if a.values != b.values:
            differ.append(name)
    synthetic = sum(n.startswith("corpus/") for n in names)
    ok = not differ and synthetic >= 10
    report(4, ok, f"{len(names)} programs ({synthetic} synthetic), differing: {differ or 'none'}",
           time.perf_counter() - t0)


# -- 5 ---------------------------------------------------------------------------

def test_criterion_5_listing3():
    t0 = time.perf_counter()
    p = load("listing3.whl")
    w2 = analyze(p, cfg("product-w2", widening_delay=4))
    closure = analyze(p, cfg("product-closure", widening_delay=4))
    rows = closure.divergence.growth if closure.divergence else []
    seen = [(rows[k]["{i}"], rows[k]["{j}"]) for k in (4, 5, 6)] if len(rows) > 6 else []
    want = [("0 <= i <= 2", "0 <= j <= 2"), ("0 <= i <= 3", "0 <= j <= 2"), ("0 <= i <= 3", "0 <= j <= 3")]
    ok = (w2.converged and w2.loop_invariant() == poly("i >= j", "i <= j + 1", "j >= 0")
          and not closure.converged and seen == want)
    report(5, ok, f"w2: {dom.show(w2.loop_invariant())}; closure diverged after "
                  f"{closure.divergence.iterations if closure.divergence else 0} steps, "
                  f"iterates 4-6: {seen}", time.perf_counter() - t0, 2.0)


# -- 6 ---------------------------------------------------------------------------

def test_criterion_6_interval_collapse():
    t0 = time.perf_counter()
    bad = []
    for name in corpus_names():
        p = load(name)
        classic = analyze(p, cfg("classic", domain="intervals"))
        for method in ("product-w1", "product-w2"):
            im = analyze(p, cfg(method, domain="intervals"))
            for t in im.trace:
                if t.parts is None:
                    continue
                full = t.parts[t.parts.poset.top]
                if any(v != full.project(s.vars) for s, v in t.parts.items()):
                    bad.append((name, method, "component"))
                    break
            if im.values != classic.values:
                bad.append((name, method, "final"))
    report(6, not bad, f"{len(corpus_names())} programs x 2 widenings, mismatches: {bad or 'none'}",
           time.perf_counter() - t0)


# -- 7 ---------------------------------------------------------------------------

def test_criterion_7_soundness():
    t0 = time.perf_counter()
    ocfg = OracleConfig((-8, 8), cap=100_000)
    checked, skipped, seed, runs = 0, 0, 0, 0
    violations = []
    while checked < 200:
        p = parse(random_program(seed), name=f"random{seed}")
        seed += 1
        reached = reach(p, ocfg)
        if reached.truncated:
            skipped += 1
            continue
        checked += 1
        for method in METHODS:
            im = analyze(p, cfg(method))
            if not im.converged:
                continue
            runs += 1
            rep = check_soundness(p, im, reached=reached)
            if rep.violations or not check_postfixpoint(p, im):
                violations.append((p.name, method))
    report(7, not violations, f"{checked} programs, {runs} converged runs, {skipped} regenerated, "
                              f"violations: {violations or 'none'}", time.perf_counter() - t0, 120.0)


# -- 8 ---------------------------------------------------------------------------

def test_criterion_8_precision_on_corpus():
    t0 = time.perf_counter()
    weaker = []
    for name in corpus_names():
        p = load(name)
        classic = analyze(p, cfg("classic"))
        for method in METHODS[1:]:
            im = analyze(p, cfg(method))
            if not im.converged:
                continue
            if any(not classic.values[n].includes(im.values[n]) for n in p.nodes):
                weaker.append((name, method))
    report(8, not weaker, f"{len(corpus_names())} programs x {len(METHODS) - 1} methods, "
                          f"not included in classic: {weaker or 'none'}", time.perf_counter() - t0)


# -- 9 ---------------------------------------------------------------------------

def _random_poly(rng, dims):
    from stratan.linear import LinConstraint
    cs = []
    for _ in range(rng.randint(0, 5)):
        coeffs = {d: rng.randint(-3, 3) for d in dims}
        cs.append(LinConstraint.make(coeffs, rng.randint(-6, 6), rng.choice([">=", ">=", ">=", "="])))
    return Polyhedron.from_constraints(cs, dims)


def _point(rng, dims, r):
    return [rng.randint(-r, r) for _ in dims]


def _duality(rng, dims):
    p = _random_poly(rng, dims)
    if p.is_empty():
        return True
    back = Polyhedron.from_generators(dims, p.vertices(), p.ray_directions(), p.line_directions())
    return back == p and Polyhedron.from_constraints(p.constraints(), dims) == p


def _rank(p):
    return (p.dimension(), -len(p.constraints()))


def _widening_chain(rng, dims):
    x = Polyhedron.from_generators(dims, [_point(rng, dims, 2)])
    for k in range(12):
        v = x.join(Polyhedron.from_generators(dims, [_point(rng, dims, 2 + k)]))
        nxt = x.widen(v)
        if not (nxt.includes(v) and (nxt == x or _rank(nxt) > _rank(x))):
            return False
        x = nxt
    return True


def _upto_chain(rng, dims):
    k_poly = Polyhedron.from_generators(dims, [_point(rng, dims, 6) for _ in range(len(dims) + 2)])
    u = Polyhedron.from_generators(dims, [k_poly.vertices()[0]])
    acc = u
    history = []
    for k in range(20):
        if k < 12:
            acc = acc.join(Polyhedron.from_generators(dims, [_point(rng, dims, 6)]).meet(k_poly))
        v = u.join(acc)
        nxt = u.widen(v).meet(k_poly)
        if not (k_poly.includes(nxt) and nxt.includes(v)):
            return False
        history.append(nxt != u)
        u = nxt
    return not any(history[-4:])


def test_criterion_9_kernel_properties():
    t0 = time.perf_counter()
    rng = random.Random(2024)
    counts = {"duality": 0, "widening": 0, "upto": 0}
    failed = []
    for kind, check in (("duality", _duality), ("widening", _widening_chain), ("upto", _upto_chain)):
        for _ in range(1000):
            dims = tuple("abcd"[: rng.randint(1, 4)])
            if not check(rng, dims):
                failed.append(kind)
            counts[kind] += 1
    report(9, not failed, f"instances {counts}, failures: {len(failed)}", time.perf_counter() - t0, 60.0)


if __name__ == "__main__":
    pytest.main([__file__, "-q"])
