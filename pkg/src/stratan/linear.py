"""Affine expressions and linear constraints with exact rational coefficients."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

GE = ">="
EQ = "="


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def integerize(values: Iterable[Fraction]) -> list[int]:
    """Scale rationals to coprime integers (positive scaling only)."""
    values = [_frac(v) for v in values]
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    ints = [int(v * den) for v in values]
    g = math.gcd(*ints) if ints else 0
    if g > 1:
        ints = [v // g for v in ints]
    return ints


@dataclass(frozen=True)
class AffExpr:
    """``sum(coeffs[v] * v) + constant``; zero coefficients are never stored."""

    terms: tuple[tuple[str, Fraction], ...] = ()
    constant: Fraction = Fraction(0)

    @staticmethod
    def make(coeffs: Mapping[str, object] | None = None, constant=0) -> "AffExpr":
        items = []
        for name, c in (coeffs or {}).items():
            c = _frac(c)
            if c != 0:
                items.append((name, c))
        return AffExpr(tuple(sorted(items)), _frac(constant))

    @staticmethod
    def var(name: str) -> "AffExpr":
        return AffExpr(((name, Fraction(1)),), Fraction(0))

    @staticmethod
    def const(value) -> "AffExpr":
        return AffExpr((), _frac(value))

    @property
    def coeffs(self) -> dict[str, Fraction]:
        return dict(self.terms)

    def coeff(self, name: str) -> Fraction:
        for n, c in self.terms:
            if n == name:
                return c
        return Fraction(0)

    def variables(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms

    def __add__(self, other: "AffExpr") -> "AffExpr":
        coeffs = self.coeffs
        for n, c in other.terms:
            coeffs[n] = coeffs.get(n, Fraction(0)) + c
        return AffExpr.make(coeffs, self.constant + other.constant)

    def __neg__(self) -> "AffExpr":
        return AffExpr(tuple((n, -c) for n, c in self.terms), -self.constant)

    def __sub__(self, other: "AffExpr") -> "AffExpr":
        return self + (-other)

    def scale(self, k) -> "AffExpr":
        k = _frac(k)
        return AffExpr.make({n: c * k for n, c in self.terms}, self.constant * k)

    def evaluate(self, store: Mapping[str, object]) -> Fraction:
        total = self.constant
        for n, c in self.terms:
            total += c * store[n]
        return total

    def __str__(self) -> str:
        return format_linear(self.coeffs, self.constant)


def format_linear(coeffs: Mapping[str, Fraction], constant=0) -> str:
    parts = []
    for name in sorted(coeffs):
        c = coeffs[name]
        if c == 0:
            continue
        mag = abs(c)
        body = name if mag == 1 else f"{mag}*{name}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    constant = _frac(constant)
    if constant != 0 or not parts:
        if not parts:
            parts.append(str(constant))
        else:
            parts.append(("- " if constant < 0 else "+ ") + str(abs(constant)))
    return " ".join(parts)


@dataclass(frozen=True)
class LinConstraint:
    """``sum(coeffs[v] * v)  rel  bound`` with rel in {>=, =}.

    Always normalized: integer coefficients and bound with unit content, and
    for equalities the first nonzero coefficient (by name) is positive.
    """

    terms: tuple[tuple[str, int], ...]
    bound: int
    rel: str = GE

    @staticmethod
    def make(coeffs: Mapping[str, object], bound, rel: str = GE) -> "LinConstraint":
        if rel not in (GE, EQ):
            raise ValueError(f"unsupported relation {rel!r}")
        names = sorted(n for n, c in coeffs.items() if _frac(c) != 0)
        ints = integerize([_frac(coeffs[n]) for n in names] + [_frac(bound)])
        if not names:
            # trivially true or false; keep a canonical witness
            b = Fraction(bound)
            if rel == GE:
                return TRUE if b <= 0 else FALSE
            return TRUE if b == 0 else FALSE
        *cs, b = ints
        if rel == EQ and cs[0] < 0:
            cs = [-c for c in cs]
            b = -b
        return LinConstraint(tuple(zip(names, cs)), b, rel)

    @staticmethod
    def from_expr(expr: AffExpr, rel: str = GE) -> "LinConstraint":
        """``expr >= 0`` (or ``expr = 0``)."""
        return LinConstraint.make(expr.coeffs, -expr.constant, rel)

    @property
    def coeffs(self) -> dict[str, int]:
        return dict(self.terms)

    def variables(self) -> frozenset[str]:
        return frozenset(n for n, _ in self.terms)

    def is_trivial(self) -> bool:
        return not self.terms

    def is_false(self) -> bool:
        return not self.terms and self == FALSE

    def lhs(self) -> AffExpr:
        return AffExpr.make(dict(self.terms))

    def holds(self, store: Mapping[str, object]) -> bool:
        value = sum((c * store[n] for n, c in self.terms), Fraction(0))
        return value >= self.bound if self.rel == GE else value == self.bound

    def halves(self) -> tuple["LinConstraint", ...]:
        """Split an equality into its two inequalities."""
        if self.rel == GE:
            return (self,)
        c = self.coeffs
        return (
            LinConstraint.make(c, self.bound, GE),
            LinConstraint.make({n: -v for n, v in c.items()}, -self.bound, GE),
        )

    def negate(self) -> tuple["LinConstraint", ...]:
        """Integer complement, as a disjunction of constraints."""
        c = self.coeffs
        neg = {n: -v for n, v in c.items()}
        if self.rel == GE:
            return (LinConstraint.make(neg, -self.bound + 1),)
        return (LinConstraint.make(c, self.bound + 1), LinConstraint.make(neg, -self.bound + 1))

    def __str__(self) -> str:
        """Golden-file form, e.g. ``-1*i + 1*j >= -1``."""
        if not self.terms:
            return f"0 {self.rel} {self.bound}"
        out = []
        for k, (n, c) in enumerate(self.terms):
            if k == 0:
                out.append(f"{c}*{n}")
            else:
                out.append(f"{'-' if c < 0 else '+'} {abs(c)}*{n}")
        return f"{' '.join(out)} {self.rel} {self.bound}"

    def pretty(self) -> str:
        return f"{format_linear(dict(self.terms))} {'>=' if self.rel == GE else '='} {self.bound}"


TRUE = LinConstraint((), 0, GE)
FALSE = LinConstraint((), 1, GE)


def parse_constraint(text: str) -> LinConstraint:
    """Parse the golden-file constraint format (also accepts ``<=`` and spacing variants)."""
    for op in (">=", "<=", "==", "="):
        if op in text:
            lhs, rhs = text.split(op, 1)
            break
    else:
        raise ValueError(f"no relation in {text!r}")
    left = _parse_linear(lhs)
    right = _parse_linear(rhs)
    expr = left - right
    if op == "<=":
        expr = -expr
    return LinConstraint.from_expr(expr, EQ if op in ("=", "==") else GE)


def _parse_linear(text: str) -> AffExpr:
    text = text.replace(" ", "")
    if not text:
        raise ValueError("empty linear expression")
    result = AffExpr()
    i = 0
    while i < len(text):
        sign = 1
        while i < len(text) and text[i] in "+-":
            if text[i] == "-":
                sign = -sign
            i += 1
        j = i
        while j < len(text) and text[j] not in "+-":
            j += 1
        term = text[i:j]
        if not term:
            raise ValueError(f"malformed linear expression {text!r}")
        if "*" in term:
            num, name = term.split("*", 1)
            result = result + AffExpr.make({name: sign * Fraction(num)})
        elif term[0].isdigit():
            result = result + AffExpr.const(sign * Fraction(term))
        else:
            result = result + AffExpr.make({term: sign})
        i = j
    return result
