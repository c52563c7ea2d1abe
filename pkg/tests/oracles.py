"""Independent reference computations for the polyhedra tests.

Vertices of a bounded polyhedron are found by solving every square subsystem of
its constraints with exact Gaussian elimination and keeping the feasible
solutions.  Nothing here touches the double-description code.
"""

from fractions import Fraction
from itertools import combinations

from stratan.linear import EQ


def _solve(rows, rhs):
    """Unique solution of a square system, or None when singular."""
    n = len(rows)
    m = [list(map(Fraction, r)) + [Fraction(b)] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return tuple(m[k][n] / m[k][k] for k in range(n))


def _holds(c, dims, point):
    return c.holds(dict(zip(dims, point)))


def brute_vertices(constraints, dims):
    """Vertex set of a bounded polyhedron given by ``constraints``."""
    dims = tuple(dims)
    rows = []
    for c in constraints:
        for h in c.halves() if c.rel == EQ else (c,):
            rows.append(h)
    out = set()
    for combo in combinations(rows, len(dims)):
        a = [[c.coeffs.get(d, 0) for d in dims] for c in combo]
        x = _solve(a, [c.bound for c in combo])
        if x is not None and all(_holds(c, dims, x) for c in constraints):
            out.add(x)
    return out


def box(dims, lo, hi):
    """Constraint strings bounding every dimension to ``[lo, hi]``."""
    return [f"{d} >= {lo}" for d in dims] + [f"{d} <= {hi}" for d in dims]
