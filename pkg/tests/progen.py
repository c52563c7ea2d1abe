"""Seeded generator of small bounded while-programs for property tests.

Programs use at most three variables and at most two loops (possibly nested).
Every loop runs on a dedicated counter that only the loop itself writes, so
all executions are finite.
"""

import random

VARS = ("a", "b", "c")


class _Gen:
    def __init__(self, seed: int):
        self.rng = random.Random(seed)
        self.names = list(VARS[: self.rng.randint(1, 3)])
        self.loops_left = 2

    def expr(self):
        rng = self.rng
        terms = []
        for v in rng.sample(self.names, rng.randint(0, min(2, len(self.names)))):
            k = rng.choice([-2, -1, 1, 1, 2])
            terms.append(v if k == 1 else f"{k}*{v}")
        terms.append(str(rng.randint(-3, 3)))
        return " + ".join(terms)

    def cond(self):
        roll = self.rng.random()
        if roll < 0.2:
            return "nondet()"
        if roll < 0.3:
            return f"{self.rng.choice(self.names)} % 2 == {self.rng.randint(0, 1)}"
        ops = ["<", "<=", ">", ">=", "==", "!="]
        atoms = [f"{self.expr()} {self.rng.choice(ops)} {self.expr()}"
                 for _ in range(self.rng.randint(1, 2))]
        return " && ".join(atoms)

    def block(self, writable, loop_depth, if_depth, indent):
        rng = self.rng
        pad = "  " * indent
        out = []
        for _ in range(rng.randint(1, 3)):
            roll = rng.random()
            if roll < 0.3 and loop_depth < 2 and self.loops_left and len(writable) > 0:
                self.loops_left -= 1
                v, rest = writable[0], writable[1:]
                out.append(f"{pad}{v} = {rng.randint(-2, 1)};")
                out.append(f"{pad}while ({v} < {rng.randint(1, 4)}) {{")
                out += self.block(rest, loop_depth + 1, if_depth, indent + 1)
                out.append(f"{pad}  {v} = {v} + 1;")
                out.append(f"{pad}}}")
            elif roll < 0.5 and if_depth < 2:
                out.append(f"{pad}if ({self.cond()}) {{")
                out += self.block(writable, loop_depth, if_depth + 1, indent + 1)
                if rng.random() < 0.5:
                    out.append(f"{pad}}} else {{")
                    out += self.block(writable, loop_depth, if_depth + 1, indent + 1)
                out.append(f"{pad}}}")
            elif writable:
                v = rng.choice(writable)
                rhs = "nondet()" if rng.random() < 0.1 else self.expr()
                out.append(f"{pad}{v} = {rhs};")
        return out or [f"{pad};"]


def random_program(seed: int) -> str:
    g = _Gen(seed)
    decl = ", ".join(f"{v} = {g.rng.randint(-2, 2)}" for v in g.names)
    body = g.block(list(g.names), 0, 0, 0)
    return f"int {decl};\n" + "\n".join(body) + "\n"
