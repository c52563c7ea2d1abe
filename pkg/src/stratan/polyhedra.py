"""Exact rational convex polyhedra in double description.

Everything is computed on homogenized integer vectors.  A constraint is
``(c, a1, ..., an)`` meaning ``a.x + c >= 0`` (or ``= 0``); a generator is
``(d, x1, ..., xn)`` where ``d > 0`` marks a vertex ``x / d`` and ``d = 0`` a
ray or a line.  Conversions in both directions use the same Chernikova /
double-description routine (:func:`_dd`), with lineality handled by pivoting
so that the output is always minimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .linear import EQ, GE, AffExpr, LinConstraint, integerize

Vec = tuple[int, ...]


class ContractError(AssertionError):
    """An operation was called outside its precondition."""


def _normalize(v: Sequence[int]) -> Vec:
    g = math.gcd(*v)
    if g > 1:
        return tuple(x // g for x in v)
    return tuple(v)


def _dot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _combine(p: Sequence[int], vp: int, q: Sequence[int], vq: int) -> Vec:
    """Positive combination of p (vp > 0) and q (vq < 0) on the hyperplane."""
    return _normalize([vp * y - vq * x for x, y in zip(p, q)])


def _dd(n: int, eqs: Iterable[Sequence[int]], ineqs: Iterable[Sequence[int]]):
    """Generators of the cone ``{y : e.y = 0, a.y >= 0}`` in ``Z^n``.

    Returns ``(lines, rays)``: a basis of the lineality space and the extreme
    rays of the pointed part, both as normalized integer tuples.
    """
    lines: list[list[int]] = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
    rays: list[Vec] = []
    sats: list[int] = []
    work = [(tuple(e), True) for e in eqs] + [(tuple(a), False) for a in ineqs]
    for bit_index, (c, is_eq) in enumerate(work):
        if not any(c):
            continue
        bit = 1 << bit_index
        pivot = None
        for k, line in enumerate(lines):
            v = _dot(c, line)
            if v != 0:
                pivot = k
                break
        if pivot is not None:
            pl = lines.pop(pivot)
            pv = _dot(c, pl)
            if pv < 0:
                pl = [-x for x in pl]
                pv = -pv
            new_lines = []
            for line in lines:
                w = _dot(c, line)
                if w:
                    line = list(_normalize([pv * x - w * y for x, y in zip(line, pl)]))
                new_lines.append(line)
            lines = new_lines
            new_rays = []
            for r in rays:
                w = _dot(c, r)
                if w:
                    r = _normalize([pv * x - w * y for x, y in zip(r, pl)])
                new_rays.append(r)
            rays = new_rays
            sats = [s | bit for s in sats]
            if not is_eq:
                # saturates every earlier constraint, not this one
                rays.append(_normalize(pl))
                sats.append((bit - 1))
            continue
        vals = [_dot(c, r) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zero = [k for k, v in enumerate(vals) if v == 0]
        if not neg and not is_eq:
            for k in zero:
                sats[k] |= bit
            continue
        created: list[tuple[Vec, int]] = []
        for p in pos:
            for q in neg:
                common = sats[p] & sats[q]
                adjacent = True
                for k in range(len(rays)):
                    if k != p and k != q and (sats[k] & common) == common:
                        adjacent = False
                        break
                if adjacent:
                    created.append((_combine(rays[p], vals[p], rays[q], vals[q]), common | bit))
        keep = zero if is_eq else pos + zero
        keep_set = set(keep)
        rays = [rays[k] for k in range(len(rays)) if k in keep_set] + [r for r, _ in created]
        new_sats = []
        for k in range(len(vals)):
            if k in keep_set:
                new_sats.append(sats[k] | bit if vals[k] == 0 else sats[k])
        sats = new_sats + [s for _, s in created]
    return [tuple(line) for line in lines], rays


def _rref(rows: list[Vec], order: Sequence[int]) -> tuple[list[Vec], list[int]]:
    """Integer reduced row echelon form, choosing pivots in column ``order``."""
    rows = [list(r) for r in rows]
    out: list[list[int]] = []
    pivots: list[int] = []
    for col in order:
        idx = next((k for k, r in enumerate(rows) if r[col] != 0), None)
        if idx is None:
            continue
        piv = rows.pop(idx)
        if piv[col] < 0:
            piv = [-x for x in piv]
        piv = list(_normalize(piv))
        rows = [_eliminate(r, piv, col) for r in rows]
        out = [_eliminate(r, piv, col) for r in out]
        out.append(piv)
        pivots.append(col)
        rows = [r for r in rows if any(r)]
    return [tuple(r) for r in out], pivots


def _eliminate(row: Sequence[int], piv: Sequence[int], col: int) -> list[int]:
    """Zero ``row[col]`` using ``piv`` (``piv[col] > 0``), keeping row's orientation."""
    w = row[col]
    if w == 0:
        return list(row)
    p = piv[col]
    return list(_normalize([p * x - w * y for x, y in zip(row, piv)]))


def _reduce(vec: Sequence[int], basis: list[Vec], pivots: list[int]) -> Vec:
    v = list(vec)
    for row, col in zip(basis, pivots):
        v = _eliminate(v, row, col)
    return _normalize(v)


def _satisfies(c: Sequence[int], g: Sequence[int], is_eq: bool, is_line: bool) -> bool:
    v = _dot(c, g)
    if is_eq or is_line:
        return v == 0
    return v >= 0


class Polyhedron:
    """Closed convex polyhedron over named dimensions, kept minimized in both
    descriptions.  Instances are immutable and canonical: two polyhedra over
    the same dimensions are equal as sets iff they compare equal."""

    __slots__ = ("dims", "eqs", "ineqs", "lines", "rays", "empty", "_hash")

    upto_terminating = True

    def __init__(self, dims, eqs, ineqs, lines, rays, empty):
        self.dims: tuple[str, ...] = tuple(dims)
        self.eqs: tuple[Vec, ...] = tuple(eqs)
        self.ineqs: tuple[Vec, ...] = tuple(ineqs)
        self.lines: tuple[Vec, ...] = tuple(lines)
        self.rays: tuple[Vec, ...] = tuple(rays)
        self.empty: bool = empty
        self._hash = None

    # -- construction -------------------------------------------------

    @classmethod
    def top(cls, dims: Sequence[str]) -> "Polyhedron":
        return _canonical(tuple(dims), [], [], [(0,) + _unit(len(dims), k) for k in range(len(dims))],
                          [(1,) + (0,) * len(dims)])

    @classmethod
    def bottom(cls, dims: Sequence[str]) -> "Polyhedron":
        n = len(dims)
        return cls(tuple(dims), (), ((-1,) + (0,) * n,), (), (), True)

    @classmethod
    def from_constraints(cls, constraints: Iterable[LinConstraint], dims: Sequence[str]) -> "Polyhedron":
        dims = tuple(dims)
        eqs, ineqs = [], []
        for c in constraints:
            vec = _constraint_vec(c, dims)
            (eqs if c.rel == EQ else ineqs).append(vec)
        return _from_hrep(dims, eqs, ineqs)

    @classmethod
    def from_generators(cls, dims: Sequence[str], vertices=(), rays=(), lines=()) -> "Polyhedron":
        """Build from points (mappings or sequences aligned with ``dims``)."""
        dims = tuple(dims)
        gl = [(0,) + tuple(integerize(_coords(l, dims))) for l in lines]
        gr = [(0,) + tuple(integerize(_coords(r, dims))) for r in rays]
        for v in vertices:
            xs = _coords(v, dims)
            ints = integerize([Fraction(1)] + xs)
            gr.append(tuple(ints))
        return _from_vrep(dims, gl, gr)

    # -- inspection ---------------------------------------------------

    def is_empty(self) -> bool:
        return self.empty

    def is_top(self) -> bool:
        return not self.empty and not self.eqs and not self.ineqs

    def dimension(self) -> int:
        """Affine dimension (-1 for the empty set)."""
        if self.empty:
            return -1
        return len(self.dims) - len(self.eqs)

    def constraints(self) -> list[LinConstraint]:
        if self.empty:
            return [LinConstraint.make({}, 1)]
        out = []
        for vec, rel in [(e, EQ) for e in self.eqs] + [(a, GE) for a in self.ineqs]:
            coeffs = {d: a for d, a in zip(self.dims, vec[1:]) if a}
            out.append(LinConstraint.make(coeffs, -vec[0], rel))
        return out

    def inequalities(self) -> list[LinConstraint]:
        """Constraint system with every equality split in two halves."""
        out = []
        for c in self.constraints():
            out.extend(c.halves())
        return out

    def vertices(self) -> list[tuple[Fraction, ...]]:
        return [tuple(Fraction(x, r[0]) for x in r[1:]) for r in self.rays if r[0] > 0]

    def ray_directions(self) -> list[tuple[int, ...]]:
        return [r[1:] for r in self.rays if r[0] == 0]

    def line_directions(self) -> list[tuple[int, ...]]:
        return [l[1:] for l in self.lines]

    def generators(self) -> list[tuple[str, tuple]]:
        out = [("V", v) for v in self.vertices()]
        out += [("R", r) for r in self.ray_directions()]
        out += [("L", l) for l in self.line_directions()]
        return out

    def contains(self, point: Mapping[str, object]) -> bool:
        if self.empty:
            return False
        xs = [Fraction(point[d]) for d in self.dims]
        for e in self.eqs:
            if e[0] + sum(a * x for a, x in zip(e[1:], xs)) != 0:
                return False
        for a in self.ineqs:
            if a[0] + sum(c * x for c, x in zip(a[1:], xs)) < 0:
                return False
        return True

    def satisfies(self, c: LinConstraint) -> bool:
        """True iff every point of the polyhedron satisfies ``c``."""
        if self.empty:
            return True
        vec = _constraint_vec(c, self.dims)
        is_eq = c.rel == EQ
        return all(_satisfies(vec, g, is_eq, True) for g in self.lines) and all(
            _satisfies(vec, g, is_eq, False) for g in self.rays)

    def includes(self, other: "Polyhedron") -> bool:
        """``other`` is a subset of ``self``."""
        _check_dims(self, other)
        if other.empty:
            return True
        if self.empty:
            return False
        for e in self.eqs:
            if any(_dot(e, g) for g in other.lines) or any(_dot(e, g) for g in other.rays):
                return False
        for a in self.ineqs:
            if any(_dot(a, g) for g in other.lines) or any(_dot(a, g) < 0 for g in other.rays):
                return False
        return True

    # -- lattice ------------------------------------------------------

    def meet(self, other: "Polyhedron") -> "Polyhedron":
        _check_dims(self, other)
        if self.empty or other.empty:
            return Polyhedron.bottom(self.dims)
        return _from_hrep(self.dims, self.eqs + other.eqs, self.ineqs + other.ineqs)

    def join(self, other: "Polyhedron") -> "Polyhedron":
        _check_dims(self, other)
        if self.empty:
            return other
        if other.empty:
            return self
        return _from_vrep(self.dims, self.lines + other.lines, self.rays + other.rays)

    def widen(self, other: "Polyhedron", thresholds: Sequence[LinConstraint] = ()) -> "Polyhedron":
        if thresholds:
            return widen_upto(self, other, thresholds)
        return widen_standard(self, other)

    def guard(self, constraints: Iterable[LinConstraint]) -> "Polyhedron":
        constraints = list(constraints)
        if self.empty or not constraints:
            return self
        return self.meet(Polyhedron.from_constraints(constraints, self.dims))

    # -- dimensions ---------------------------------------------------

    def project(self, keep: Iterable[str]) -> "Polyhedron":
        """Eliminate every dimension outside ``keep``; result lives over ``keep`` only."""
        keep = set(keep)
        new_dims = tuple(d for d in self.dims if d in keep)
        if self.empty:
            return Polyhedron.bottom(new_dims)
        idx = [0] + [k + 1 for k, d in enumerate(self.dims) if d in keep]
        pick = lambda g: tuple(g[k] for k in idx)
        lines = [pick(l) for l in self.lines]
        rays = [pick(r) for r in self.rays]
        return _from_vrep(new_dims, [l for l in lines if any(l)], [r for r in rays if any(r)])

    def embed(self, dims: Sequence[str]) -> "Polyhedron":
        """Reinterpret over a superset of dimensions (same constraints)."""
        dims = tuple(dims)
        if dims == self.dims:
            return self
        missing = set(self.dims) - set(dims)
        if missing:
            raise ContractError(f"cannot embed: dimensions {sorted(missing)} dropped")
        pos = {d: k + 1 for k, d in enumerate(self.dims)}

        def lift(v):
            return (v[0],) + tuple(v[pos[d]] if d in pos else 0 for d in dims)

        if self.empty:
            return Polyhedron.bottom(dims)
        extra = [(0,) + _unit(len(dims), k) for k, d in enumerate(dims) if d not in pos]
        return _canonical(dims, [lift(e) for e in self.eqs], [lift(a) for a in self.ineqs],
                          [lift(l) for l in self.lines] + extra, [lift(r) for r in self.rays])

    def forget(self, var: str) -> "Polyhedron":
        if self.empty:
            return self
        k = self.dims.index(var)
        return _from_vrep(self.dims, self.lines + ((0,) + _unit(len(self.dims), k),), self.rays)

    def assign(self, var: str, expr: AffExpr) -> "Polyhedron":
        return affine_image(self, var, expr)

    # -- misc ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polyhedron):
            return NotImplemented
        return (self.dims == other.dims and self.empty == other.empty
                and self.eqs == other.eqs and self.ineqs == other.ineqs)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dims, self.empty, self.eqs, self.ineqs))
        return self._hash

    def __repr__(self) -> str:
        return f"Polyhedron({self.dims}, {format_constraints(self)})"

    def __str__(self) -> str:
        return pretty(self)


def _unit(n: int, k: int) -> Vec:
    return tuple(1 if i == k else 0 for i in range(n))


def _coords(p, dims) -> list[Fraction]:
    if isinstance(p, Mapping):
        return [Fraction(p.get(d, 0)) for d in dims]
    p = list(p)
    if len(p) != len(dims):
        raise ValueError("generator length does not match dimensions")
    return [Fraction(x) for x in p]


def _constraint_vec(c: LinConstraint, dims: Sequence[str]) -> Vec:
    coeffs = c.coeffs
    unknown = set(coeffs) - set(dims)
    if unknown:
        raise ContractError(f"constraint {c} mentions unknown dimensions {sorted(unknown)}")
    return (-c.bound,) + tuple(coeffs.get(d, 0) for d in dims)


def _check_dims(p: Polyhedron, q: Polyhedron) -> None:
    if p.dims != q.dims:
        raise ContractError(f"dimension mismatch: {p.dims} vs {q.dims}")


def _positivity(n: int) -> Vec:
    return (1,) + (0,) * n


def _from_hrep(dims, eqs, ineqs) -> Polyhedron:
    n = len(dims)
    lines, rays = _dd(n + 1, eqs, [_positivity(n)] + list(ineqs))
    if not any(r[0] > 0 for r in rays):
        return Polyhedron.bottom(dims)
    # rays above are minimal generators; derive the minimal constraints
    ceqs, cineqs = _dd(n + 1, lines, rays)
    return _canonical(dims, ceqs, cineqs, lines, rays)


def _from_vrep(dims, lines, rays) -> Polyhedron:
    n = len(dims)
    if not any(r[0] > 0 for r in rays):
        return Polyhedron.bottom(dims)
    ceqs, cineqs = _dd(n + 1, lines, rays)
    glines, grays = _dd(n + 1, ceqs, cineqs)
    return _canonical(dims, ceqs, cineqs, glines, grays)


def _canonical(dims, eqs, ineqs, lines, rays) -> Polyhedron:
    n = len(dims)
    # equalities: reduced echelon form, pivots taken from the last variable backwards
    eqs, epiv = _rref([_normalize(e) for e in eqs if any(e)], list(range(n, 0, -1)))
    if any(col == 0 for col in epiv):
        return Polyhedron.bottom(dims)
    red = set()
    for a in ineqs:
        v = _reduce(a, eqs, epiv)
        if any(v[1:]):
            red.add(v)
        elif v[0] < 0:
            return Polyhedron.bottom(dims)
    lines, lpiv = _rref([_normalize(l) for l in lines if any(l)], list(range(1, n + 1)))
    grays = set()
    for r in rays:
        v = _reduce(r, lines, lpiv)
        if any(v):
            grays.add(v)
    eqs_sorted = sorted(eqs, key=lambda v: (v[1:], v[0]))
    ineqs_sorted = sorted(red, key=lambda v: (v[1:], v[0]))
    rays_sorted = sorted(grays, key=lambda v: (-v[0], v[1:]) if v[0] else (1, v[1:]))
    return Polyhedron(dims, eqs_sorted, ineqs_sorted, sorted(lines), rays_sorted, False)


def chernikova(constraints: Sequence[LinConstraint], dims: Sequence[str]):
    """Minimal generators ``(vertices, rays, lines)`` of a constraint system."""
    p = Polyhedron.from_constraints(constraints, dims)
    return p.vertices(), p.ray_directions(), p.line_directions()


def chernikova_dual(dims: Sequence[str], vertices=(), rays=(), lines=()) -> list[LinConstraint]:
    """Minimal constraint system of the hull of a generator system."""
    return Polyhedron.from_generators(dims, vertices, rays, lines).constraints()


# -- module-level lattice operations --------------------------------------

def from_constraints(cs: Iterable[LinConstraint], dims: Sequence[str]) -> Polyhedron:
    return Polyhedron.from_constraints(cs, dims)


def join(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    return p.join(q)


def meet(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    return p.meet(q)


def project(p: Polyhedron, keep: Iterable[str]) -> Polyhedron:
    return p.project(keep)


def forget(p: Polyhedron, var: str) -> Polyhedron:
    return p.forget(var)


def includes(p: Polyhedron, q: Polyhedron) -> bool:
    return p.includes(q)


def is_empty(p: Polyhedron) -> bool:
    return p.is_empty()


def affine_image(p: Polyhedron, var: str, expr: AffExpr) -> Polyhedron:
    """Exact post-image of ``var := expr``."""
    if p.empty:
        return p
    dims = p.dims
    unknown = expr.variables() - set(dims)
    if unknown:
        raise ContractError(f"expression reads unknown dimensions {sorted(unknown)}")
    k = dims.index(var) + 1
    n = len(dims)
    # integer homogenized row: new x_k = (row . y) / den
    fr = [expr.constant] + [expr.coeff(d) for d in dims]
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    row = [int(f * den) for f in fr]

    def image(g, linear_only):
        value = _dot(row[1:], g[1:]) + (0 if linear_only else row[0] * g[0])
        out = [x * den for x in g]
        out[k] = value
        return _normalize(out)

    lines = [image(l, True) for l in p.lines]
    rays = [image(r, r[0] == 0) for r in p.rays]
    alpha = row[k]
    if alpha != 0:
        # invertible: substitute x_k = (den * x_k' - rest) / alpha in the constraints
        def subst(c):
            ck = c[k]
            out = [x * alpha for x in c]
            if alpha < 0:
                out = [-x for x in out]
            s = 1 if alpha > 0 else -1
            for j in range(n + 1):
                if j == k:
                    out[j] = s * ck * den
                else:
                    out[j] -= s * ck * row[j]
            return _normalize(out)

        return _canonical(dims, [subst(e) for e in p.eqs], [subst(a) for a in p.ineqs],
                          [l for l in lines if any(l)], [r for r in rays if any(r)])
    return _from_vrep(dims, [l for l in lines if any(l)], [r for r in rays if any(r)])


def _implies(eqs: list[Vec], ineqs: list[Vec], target: Vec, n: int) -> bool:
    lines, rays = _dd(n + 1, eqs, [_positivity(n)] + ineqs)
    return all(_dot(target, l) == 0 for l in lines) and all(_dot(target, r) >= 0 for r in rays)


def widen_standard(p: Polyhedron, q: Polyhedron) -> Polyhedron:
    """Standard widening with the mutual-redundancy correction.

    Keeps the constraints of ``p`` (equalities split in halves) satisfied by
    ``q``, plus every constraint of ``q`` that can replace some constraint of
    ``p`` without changing ``p``.  Requires ``p`` included in ``q``.
    """
    _check_dims(p, q)
    if not q.includes(p):
        raise ContractError("widening requires the first argument to be included in the second")
    if p.empty:
        return q
    if q.empty:
        return p
    n = len(p.dims)
    c1 = _halves(p)
    c2 = _halves(q)
    kept = [c for c in c1 if q_satisfies(q, c)]
    kept_set = set(kept)
    for g in c2:
        if g in kept_set:
            continue
        for b in c1:
            if b == g:
                continue
            others = [c for c in c1 if c != b] + [g]
            if _implies([], others, b, n):
                kept.append(g)
                kept_set.add(g)
                break
    return _from_hrep(p.dims, [], kept)


def _halves(p: Polyhedron) -> list[Vec]:
    out = []
    for e in p.eqs:
        out.append(e)
        out.append(tuple(-x for x in e))
    out.extend(p.ineqs)
    return out


def q_satisfies(q: Polyhedron, c: Vec) -> bool:
    return all(_dot(c, l) == 0 for l in q.lines) and all(_dot(c, r) >= 0 for r in q.rays)


def widen_upto(p: Polyhedron, q: Polyhedron, thresholds: Sequence[LinConstraint]) -> Polyhedron:
    """Standard widening, then intersect with the thresholds satisfied by both arguments."""
    w = widen_standard(p, q)
    keep = [c for c in thresholds if p.satisfies(c) and q.satisfies(c)]
    if not keep:
        return w
    return w.guard(keep)


# -- text formats ------------------------------------------------------------

def format_constraints(p: Polyhedron) -> str:
    """Golden-file dump: one constraint per line."""
    return "\n".join(str(c) for c in p.constraints())


def format_generators(p: Polyhedron) -> str:
    """Generator dump, e.g. ``V(1, 0)`` / ``R(1, 1)`` / ``L(0, 1)``."""
    out = []
    for kind, coords in p.generators():
        out.append(f"{kind}({', '.join(_fmt_num(x) for x in coords)})")
    return "\n".join(out)


def _fmt_num(x) -> str:
    from .numfmt import fmt_rational
    return fmt_rational(Fraction(x))


def pretty(p: Polyhedron) -> str:
    """Human-oriented conjunction; single-variable bounds are merged into ranges."""
    if p.empty:
        return "bottom"
    if p.is_top():
        return "top"
    from .numfmt import fmt_rational
    lower: dict[str, Fraction] = {}
    upper: dict[str, Fraction] = {}
    other = []
    for c in p.constraints():
        if c.rel == GE and len(c.terms) == 1:
            (name, a), = c.terms
            val = Fraction(c.bound, a)
            if a > 0:
                lower[name] = val
            else:
                upper[name] = val
        elif c.rel == EQ and len(c.terms) == 1:
            (name, a), = c.terms
            other.append(f"{name} = {fmt_rational(Fraction(c.bound, a))}")
        else:
            other.append(c.pretty())
    parts = []
    for name in sorted(set(lower) | set(upper)):
        lo, hi = lower.get(name), upper.get(name)
        if lo is not None and hi is not None:
            parts.append(f"{fmt_rational(lo)} <= {name} <= {fmt_rational(hi)}")
        elif lo is not None:
            parts.append(f"{name} >= {fmt_rational(lo)}")
        else:
            parts.append(f"{name} <= {fmt_rational(hi)}")
    return " && ".join(parts + other)
