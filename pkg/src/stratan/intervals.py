"""Non-relational interval domain over named dimensions."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .linear import EQ, AffExpr, LinConstraint
from .polyhedra import ContractError

Bound = Optional[Fraction]


class IntervalValue:
    """Box ``prod [lo_v, hi_v]``; ``None`` bounds are infinite.  Bottom has no bounds stored."""

    __slots__ = ("dims", "bounds")

    upto_terminating = True

    def __init__(self, dims: Sequence[str], bounds: Optional[Sequence[tuple[Bound, Bound]]]):
        self.dims = tuple(dims)
        if bounds is not None:
            bounds = tuple(bounds)
            for lo, hi in bounds:
                if lo is not None and hi is not None and lo > hi:
                    bounds = None
                    break
        self.bounds = bounds

    @classmethod
    def top(cls, dims):
        return cls(dims, [(None, None)] * len(tuple(dims)))

    @classmethod
    def bottom(cls, dims):
        return cls(dims, None)

    @classmethod
    def from_constraints(cls, constraints: Iterable[LinConstraint], dims):
        return cls.top(dims).guard(constraints)

    def is_empty(self) -> bool:
        return self.bounds is None

    def is_top(self) -> bool:
        return self.bounds is not None and all(b == (None, None) for b in self.bounds)

    def interval(self, var: str) -> tuple[Bound, Bound]:
        if self.bounds is None:
            raise ValueError("bottom has no intervals")
        return self.bounds[self.dims.index(var)]

    def _check(self, other):
        if self.dims != other.dims:
            raise ContractError(f"dimension mismatch: {self.dims} vs {other.dims}")

    def includes(self, other: "IntervalValue") -> bool:
        self._check(other)
        if other.bounds is None:
            return True
        if self.bounds is None:
            return False
        for (a, b), (c, d) in zip(self.bounds, other.bounds):
            if a is not None and (c is None or c < a):
                return False
            if b is not None and (d is None or d > b):
                return False
        return True

    def join(self, other):
        self._check(other)
        if self.bounds is None:
            return other
        if other.bounds is None:
            return self
        out = []
        for (a, b), (c, d) in zip(self.bounds, other.bounds):
            lo = None if a is None or c is None else min(a, c)
            hi = None if b is None or d is None else max(b, d)
            out.append((lo, hi))
        return IntervalValue(self.dims, out)

    def meet(self, other):
        self._check(other)
        if self.bounds is None or other.bounds is None:
            return IntervalValue.bottom(self.dims)
        out = []
        for (a, b), (c, d) in zip(self.bounds, other.bounds):
            lo = c if a is None else a if c is None else max(a, c)
            hi = d if b is None else b if d is None else min(b, d)
            out.append((lo, hi))
        return IntervalValue(self.dims, out)

    def widen(self, other, thresholds: Sequence[LinConstraint] = ()):
        self._check(other)
        if not other.includes(self):
            raise ContractError("widening requires the first argument to be included in the second")
        if self.bounds is None:
            return other
        out = []
        for (a, b), (c, d) in zip(self.bounds, other.bounds):
            out.append((a if a == c else None, b if b == d else None))
        result = IntervalValue(self.dims, out)
        keep = [t for t in thresholds if self.satisfies(t) and other.satisfies(t)]
        return result.guard(keep) if keep else result

    def project(self, keep: Iterable[str]):
        keep = set(keep)
        dims = tuple(d for d in self.dims if d in keep)
        if self.bounds is None:
            return IntervalValue.bottom(dims)
        return IntervalValue(dims, [b for d, b in zip(self.dims, self.bounds) if d in keep])

    def embed(self, dims):
        dims = tuple(dims)
        if dims == self.dims:
            return self
        if set(self.dims) - set(dims):
            raise ContractError("cannot embed into a smaller set of dimensions")
        if self.bounds is None:
            return IntervalValue.bottom(dims)
        own = dict(zip(self.dims, self.bounds))
        return IntervalValue(dims, [own.get(d, (None, None)) for d in dims])

    def forget(self, var: str):
        if self.bounds is None:
            return self
        k = self.dims.index(var)
        b = list(self.bounds)
        b[k] = (None, None)
        return IntervalValue(self.dims, b)

    def _range(self, expr: AffExpr) -> tuple[Bound, Bound]:
        lo: Bound = expr.constant
        hi: Bound = expr.constant
        for name, c in expr.terms:
            a, b = self.bounds[self.dims.index(name)]
            if c < 0:
                a, b = b, a
            lo = None if lo is None or a is None else lo + c * a
            hi = None if hi is None or b is None else hi + c * b
        return lo, hi

    def assign(self, var: str, expr: AffExpr):
        if self.bounds is None:
            return self
        k = self.dims.index(var)
        b = list(self.bounds)
        b[k] = self._range(expr)
        return IntervalValue(self.dims, b)

    def satisfies(self, c: LinConstraint) -> bool:
        if self.bounds is None:
            return True
        lo, hi = self._range(c.lhs())
        if c.rel == EQ:
            return lo is not None and hi is not None and lo == hi == c.bound
        return lo is not None and lo >= c.bound

    def guard(self, constraints: Iterable[LinConstraint]):
        """Meet with linear constraints by bound propagation (sound, not exact)."""
        constraints = [h for c in constraints for h in c.halves()]
        value = self
        for _ in range(2):
            for c in constraints:
                value = value._refine(c)
                if value.bounds is None:
                    return value
        return value

    def _refine(self, c: LinConstraint):
        if self.bounds is None:
            return self
        if not c.terms:
            return self if c.bound <= 0 else IntervalValue.bottom(self.dims)
        b = list(self.bounds)
        expr = c.lhs()
        for name, a in c.terms:
            k = self.dims.index(name)
            rest = expr - AffExpr.make({name: a})
            # a*x >= bound - rest  ->  need max(rest)
            _, rest_hi = IntervalValue(self.dims, b)._range(rest)
            if rest_hi is None:
                continue
            limit = Fraction(c.bound) - rest_hi
            lo, hi = b[k]
            if a > 0:
                nb = limit / a
                lo = nb if lo is None else max(lo, nb)
            else:
                nb = limit / a
                hi = nb if hi is None else min(hi, nb)
            if lo is not None and hi is not None and lo > hi:
                return IntervalValue.bottom(self.dims)
            b[k] = (lo, hi)
        return IntervalValue(self.dims, b)

    def contains(self, point: Mapping[str, object]) -> bool:
        if self.bounds is None:
            return False
        for d, (lo, hi) in zip(self.dims, self.bounds):
            x = point[d]
            if (lo is not None and x < lo) or (hi is not None and x > hi):
                return False
        return True

    def constraints(self) -> list[LinConstraint]:
        if self.bounds is None:
            return [LinConstraint.make({}, 1)]
        out = []
        for d, (lo, hi) in zip(self.dims, self.bounds):
            if lo is not None and hi is not None and lo == hi:
                out.append(LinConstraint.make({d: 1}, lo, EQ))
                continue
            if lo is not None:
                out.append(LinConstraint.make({d: 1}, lo))
            if hi is not None:
                out.append(LinConstraint.make({d: -1}, -hi))
        return out

    def __eq__(self, other):
        if not isinstance(other, IntervalValue):
            return NotImplemented
        return self.dims == other.dims and self.bounds == other.bounds

    def __hash__(self):
        return hash((self.dims, self.bounds))

    def __repr__(self):
        return f"IntervalValue({self.dims}, {self})"

    def __str__(self):
        from .numfmt import fmt_rational
        if self.bounds is None:
            return "bottom"
        parts = []
        for d, (lo, hi) in zip(self.dims, self.bounds):
            if lo is None and hi is None:
                continue
            l = "-oo" if lo is None else fmt_rational(lo)
            h = "+oo" if hi is None else fmt_rational(hi)
            parts.append(f"{d} in [{l}, {h}]")
        return " && ".join(parts) if parts else "top"
