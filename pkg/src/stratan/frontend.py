"""While-language front end: parsing, CFG lowering and variable restriction.

Concrete syntax::

    int i = 1, j = nondet();      // declarations
    i = i + 2*j - 3;  i++;  j -= i;
    if (i <= j && j < 10) { ... } else { ... }
    while (nondet()) { ... }
    if (j % 2 == 0) i = i + 1;    // congruence tests are analyzed as nondet()

Expressions are affine with integer coefficients.  Strict comparisons are
tightened (``i < 5`` becomes ``i <= 4``) because variables are integers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Optional, Union

from .linear import EQ, FALSE, GE, AffExpr, LinConstraint


class FrontendError(Exception):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        loc = f"{line}:{column}: " if line else ""
        super().__init__(f"{loc}{message}")


class ParseError(FrontendError):
    pass


class UndeclaredVariable(FrontendError):
    pass


class NonlinearExpression(FrontendError):
    pass


# -- program model ------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Congruence:
    """``expr % modulus == residue`` (or ``!=`` when ``negated``)."""

    expr: AffExpr
    modulus: int
    residue: int
    negated: bool = False

    def holds(self, store) -> bool:
        value = self.expr.evaluate(store)
        ok = value.denominator == 1 and (value.numerator - self.residue) % self.modulus == 0
        return ok != self.negated

    def variables(self):
        return self.expr.variables()

    def __str__(self):
        return f"{self.expr} % {self.modulus} {'!=' if self.negated else '=='} {self.residue}"


@dataclass(frozen=True)
class Assign:
    var: str
    expr: AffExpr

    def __str__(self):
        return f"{self.var} = {self.expr}"


@dataclass(frozen=True)
class AssignNondet:
    var: str

    def __str__(self):
        return f"{self.var} = nondet()"


@dataclass(frozen=True)
class Guard:
    """Conjunction of affine constraints (empty conjunction is ``true``)."""

    constraints: tuple[LinConstraint, ...]

    def __str__(self):
        if not self.constraints:
            return "assume(true)"
        return "assume(" + " && ".join(c.pretty() for c in self.constraints) + ")"


@dataclass(frozen=True)
class GuardNondet:
    test: Optional[Congruence] = None

    def __str__(self):
        return f"assume(nondet: {self.test})" if self.test else "assume(nondet())"


@dataclass(frozen=True)
class Skip:
    def __str__(self):
        return "skip"


@dataclass(frozen=True)
class Seq:
    """Assignments executed in order on one edge (multi-variable declarations)."""

    cmds: tuple

    def __str__(self):
        return "; ".join(str(c) for c in self.cmds)


Command = Union[Assign, AssignNondet, Guard, GuardNondet, Skip, Seq]


def make_seq(cmds) -> Command:
    cmds = tuple(c for c in cmds if not isinstance(c, Skip))
    if not cmds:
        return Skip()
    return cmds[0] if len(cmds) == 1 else Seq(cmds)


def command_reads(cmd: Command) -> frozenset[str]:
    if isinstance(cmd, Seq):
        return frozenset().union(*(command_reads(c) for c in cmd.cmds))
    if isinstance(cmd, Assign):
        return cmd.expr.variables()
    if isinstance(cmd, Guard):
        out = frozenset()
        for c in cmd.constraints:
            out |= c.variables()
        return out
    if isinstance(cmd, GuardNondet) and cmd.test is not None:
        return cmd.test.variables()
    return frozenset()


def command_writes(cmd: Command) -> frozenset[str]:
    if isinstance(cmd, Seq):
        return frozenset().union(*(command_writes(c) for c in cmd.cmds))
    if isinstance(cmd, (Assign, AssignNondet)):
        return frozenset([cmd.var])
    return frozenset()


def assignments(cmd: Command) -> list:
    """The Assign/AssignNondet commands contained in ``cmd``."""
    if isinstance(cmd, Seq):
        return list(cmd.cmds)
    return [cmd] if isinstance(cmd, (Assign, AssignNondet)) else []


@dataclass(frozen=True)
class Edge:
    src: int
    cmd: Command
    dst: int


@dataclass(frozen=True)
class Loop:
    head: int        # node testing the loop condition (target of the back edges)
    body: int        # first node inside the body, where iterations start
    line: int


@dataclass(frozen=True)
class Program:
    vars: tuple[Var, ...]
    nodes: tuple[int, ...]
    edges: tuple[Edge, ...]
    entry: int
    exit: int
    lines: tuple[int, ...] = ()          # source line of each node
    loops: tuple[Loop, ...] = ()
    name: str = ""
    ast: tuple = field(default=(), compare=False, repr=False)

    @property
    def var_names(self) -> tuple[str, ...]:
        return tuple(sorted(v.name for v in self.vars))

    def succs(self, n: int) -> list[Edge]:
        return [e for e in self.edges if e.src == n]

    def preds(self, n: int) -> list[Edge]:
        return [e for e in self.edges if e.dst == n]

    def node_label(self, n: int) -> str:
        role = []
        if n == self.entry:
            role.append("entry")
        if n == self.exit:
            role.append("exit")
        for lp in self.loops:
            if lp.head == n:
                role.append(f"loop test, line {lp.line}")
            if lp.body == n:
                role.append(f"loop body entry, line {lp.line}")
        line = self.lines[n] if self.lines else 0
        if not role and line:
            role.append(f"line {line}")
        return f"n{n}" + (f" ({'; '.join(role)})" if role else "")


# -- lexer ----------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<num>\d+)
  | (?P<id>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\+\+|--|\+=|-=|<=|>=|==|!=|&&|\|\||[-+*/%<>=(){};,!])
""", re.VERBOSE | re.DOTALL)

KEYWORDS = {"int", "if", "else", "while", "nondet", "true", "false", "for"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind in ("num", "id", "op"):
            if kind == "id" and value in KEYWORDS:
                kind = "kw"
            out.append(Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


# -- AST -------------------------------------------------------------------------

@dataclass
class Expr:
    """Polynomial-free expression tree; ``to_affine`` rejects nonlinear products."""
    op: str
    args: tuple = ()
    value: object = None
    line: int = 0
    col: int = 0


@dataclass
class Cmp:
    op: str
    left: Expr
    right: Expr


@dataclass
class ModTest:
    expr: Expr
    modulus: int
    residue: int
    negated: bool


@dataclass
class Cond:
    kind: str                  # "and" | "nondet" | "true" | "false" | "mod"
    atoms: list = field(default_factory=list)
    mod: Optional[ModTest] = None


@dataclass
class Decl:
    items: list                # (name, Expr | None for nondet)
    line: int


@dataclass
class AssignStmt:
    name: str
    expr: Optional[Expr]       # None means nondet()
    line: int
    col: int = 0


@dataclass
class IfStmt:
    cond: Cond
    then: list
    orelse: list
    line: int


@dataclass
class WhileStmt:
    cond: Cond
    body: list
    line: int


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def error(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def accept(self, text: str) -> Optional[Token]:
        if self.tok.text == text and self.tok.kind in ("op", "kw"):
            t = self.tok
            self.pos += 1
            return t
        return None

    def expect(self, text: str) -> Token:
        t = self.accept(text)
        if t is None:
            shown = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {shown!r}")
        return t

    def ident(self) -> Token:
        if self.tok.kind != "id":
            self.error(f"expected identifier, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.pos += 1
        return t

    def program(self) -> list:
        stmts = []
        while self.tok.kind != "eof":
            stmts.append(self.statement())
        return stmts

    def block(self) -> list:
        if self.accept("{"):
            stmts = []
            while not self.accept("}"):
                if self.tok.kind == "eof":
                    self.error("unterminated block")
                stmts.append(self.statement())
            return stmts
        return [self.statement()]

    def statement(self):
        t = self.tok
        if self.accept("int"):
            items = []
            while True:
                name = self.ident()
                init = Expr("const", value=0, line=name.line, col=name.col)
                if self.accept("="):
                    init = self.rhs()
                else:
                    init = None
                items.append((name.text, init, name.line, name.col))
                if not self.accept(","):
                    break
            self.expect(";")
            return Decl(items, t.line)
        if self.accept("if"):
            self.expect("(")
            cond = self.condition()
            self.expect(")")
            then = self.block()
            orelse = self.block() if self.accept("else") else []
            return IfStmt(cond, then, orelse, t.line)
        if self.accept("while"):
            self.expect("(")
            cond = self.condition()
            self.expect(")")
            return WhileStmt(cond, self.block(), t.line)
        if self.accept(";"):
            return None
        if t.kind == "id":
            name = self.ident()
            if self.accept("++"):
                stmt = AssignStmt(name.text, _bin("+", _var(name), _num(1)), name.line, name.col)
            elif self.accept("--"):
                stmt = AssignStmt(name.text, _bin("-", _var(name), _num(1)), name.line, name.col)
            elif self.accept("+="):
                stmt = AssignStmt(name.text, _bin("+", _var(name), self.expr()), name.line, name.col)
            elif self.accept("-="):
                stmt = AssignStmt(name.text, _bin("-", _var(name), self.expr()), name.line, name.col)
            else:
                self.expect("=")
                stmt = AssignStmt(name.text, self.rhs(), name.line, name.col)
            self.expect(";")
            return stmt
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def rhs(self) -> Optional[Expr]:
        if self.tok.text == "nondet":
            self.pos += 1
            self.expect("(")
            self.expect(")")
            return None
        return self.expr()

    def condition(self) -> Cond:
        t = self.tok
        if self.accept("nondet"):
            self.expect("(")
            self.expect(")")
            return Cond("nondet")
        if self.accept("true"):
            return Cond("true")
        if self.accept("false"):
            return Cond("false")
        atoms = [self.comparison()]
        while self.accept("&&"):
            if self.tok.text in ("nondet", "true", "false"):
                self.error("nondet()/true/false cannot be combined with other tests")
            atoms.append(self.comparison())
        if any(isinstance(a, ModTest) for a in atoms):
            if len(atoms) > 1:
                self.error("a congruence test cannot be combined with other tests", t)
            return Cond("mod", mod=atoms[0])
        if self.tok.text == "||":
            self.error("disjunctions are not supported; use nested if statements")
        return Cond("and", atoms)

    def comparison(self):
        left = self.expr()
        op = self.tok
        if op.text not in ("<=", "<", ">=", ">", "==", "!="):
            self.error(f"expected comparison operator, found {op.text or 'end of input'!r}")
        self.pos += 1
        right = self.expr()
        if left.op == "%":
            if op.text not in ("==", "!="):
                self.error("congruence tests must use == or !=", op)
            if right.op != "const":
                self.error("congruence residue must be an integer constant", op)
            return ModTest(left.args[0], left.args[1].value, right.value, op.text == "!=")
        return Cmp(op.text, left, right)

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.tok
            self.pos += 1
            node = Expr(op.text, (node, self.term()), line=op.line, col=op.col)
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.text in ("*", "%", "/") and self.tok.kind == "op":
            op = self.tok
            self.pos += 1
            rhs = self.unary()
            if op.text == "/":
                raise NonlinearExpression("division is not supported", op.line, op.col)
            if op.text == "%":
                if rhs.op != "const" or rhs.value <= 0:
                    raise NonlinearExpression("modulus must be a positive constant", op.line, op.col)
            node = Expr(op.text, (node, rhs), line=op.line, col=op.col)
        return node

    def unary(self) -> Expr:
        t = self.tok
        if self.accept("-"):
            return Expr("neg", (self.unary(),), line=t.line, col=t.col)
        if self.accept("+"):
            return self.unary()
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if t.kind == "num":
            self.pos += 1
            return Expr("const", value=int(t.text), line=t.line, col=t.col)
        if t.kind == "id":
            self.pos += 1
            return Expr("var", value=t.text, line=t.line, col=t.col)
        if t.text == "nondet":
            self.error("nondet() is only allowed as a whole right-hand side or condition")
        self.error(f"unexpected {t.text or 'end of input'!r} in expression")


def _var(t: Token) -> Expr:
    return Expr("var", value=t.text, line=t.line, col=t.col)


def _num(v: int) -> Expr:
    return Expr("const", value=v)


def _bin(op, a, b) -> Expr:
    return Expr(op, (a, b), line=a.line, col=a.col)


def to_affine(e: Expr, declared: Optional[set] = None) -> AffExpr:
    """Affine form of ``e``.  Nonlinearity is reported before undeclared names."""
    result = _affine(e)
    if declared is not None:
        _check_declared(e, declared)
    return result


def _check_declared(e: Expr, declared: set):
    if e.op == "var" and e.value not in declared:
        raise UndeclaredVariable(f"undeclared variable {e.value!r}", e.line, e.col)
    for a in e.args:
        _check_declared(a, declared)


def _affine(e: Expr) -> AffExpr:
    if e.op == "const":
        return AffExpr.const(e.value)
    if e.op == "var":
        return AffExpr.var(e.value)
    if e.op == "neg":
        return -_affine(e.args[0])
    a = _affine(e.args[0])
    b = _affine(e.args[1])
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        if a.is_constant():
            return b.scale(a.constant)
        if b.is_constant():
            return a.scale(b.constant)
        raise NonlinearExpression("product of variables is not affine", e.line, e.col)
    raise NonlinearExpression(f"operator {e.op!r} is not affine", e.line, e.col)


# -- lowering ---------------------------------------------------------------------

def _cmp_constraints(c: Cmp, declared) -> tuple[list, list]:
    """Positive and negative DNFs (lists of conjunctions) of one comparison."""
    d = to_affine(c.right, declared) - to_affine(c.left, declared)   # right - left
    one = AffExpr.const(1)
    ge = lambda e: LinConstraint.from_expr(e)
    if c.op == "<=":
        return [[ge(d)]], [[ge(-d - one)]]
    if c.op == "<":
        return [[ge(d - one)]], [[ge(-d)]]
    if c.op == ">=":
        return [[ge(-d)]], [[ge(d - one)]]
    if c.op == ">":
        return [[ge(-d - one)]], [[ge(d)]]
    eq = [[LinConstraint.from_expr(d, EQ)]]
    ne = [[ge(d - one)], [ge(-d - one)]]
    return (eq, ne) if c.op == "==" else (ne, eq)


def _cond_commands(cond: Cond, declared) -> tuple[list[Command], list[Command]]:
    if cond.kind == "nondet":
        return [GuardNondet()], [GuardNondet()]
    if cond.kind == "true":
        return [Guard(())], [Guard((FALSE,))]
    if cond.kind == "false":
        return [Guard((FALSE,))], [Guard(())]
    if cond.kind == "mod":
        m = cond.mod
        expr = to_affine(m.expr, declared)
        if not all(c.denominator == 1 for _, c in expr.terms):
            raise NonlinearExpression("congruence test needs integer coefficients")
        test = Congruence(expr, m.modulus, m.residue, m.negated)
        return [GuardNondet(test)], [GuardNondet(replace(test, negated=not m.negated))]
    pos: list[list] = [[]]
    neg: list[list] = []
    for atom in cond.atoms:
        p, n = _cmp_constraints(atom, declared)
        pos = [a + b for a in pos for b in p]
        neg.extend(n)
    return [_guard(t) for t in pos], [_guard(t) for t in neg]


def _guard(conj: list[LinConstraint]) -> Guard:
    conj = [c for c in conj if c.terms or c.is_false()]
    if any(c.is_false() for c in conj):
        return Guard((FALSE,))
    return Guard(tuple(conj))


class _Builder:
    def __init__(self):
        self.edges: list[tuple[int, Command, int]] = []
        self.lines: list[int] = []
        self.loops: list[tuple[int, int, int]] = []
        self.declared: set[str] = set()
        self.order: list[str] = []

    def node(self, line: int) -> int:
        self.lines.append(line)
        return len(self.lines) - 1

    def edge(self, src: int, cmd: Command, dst: int):
        self.edges.append((src, cmd, dst))

    def block(self, stmts: list, src: int, dst: int):
        stmts = [s for s in stmts if s is not None]
        if not stmts:
            self.edge(src, Skip(), dst)
            return
        cur = src
        for k, s in enumerate(stmts):
            nxt = dst if k == len(stmts) - 1 else None
            cur = self.stmt(s, cur, nxt)

    def stmt(self, s, src: int, dst: Optional[int]) -> int:
        """Lower ``s`` from ``src``; returns the node reached (``dst`` if given)."""
        if isinstance(s, Decl):
            cmds = []
            for name, init, line, col in s.items:
                if name in self.declared:
                    raise FrontendError(f"variable {name!r} declared twice", line, col)
                cmd = AssignNondet(name) if init is None else Assign(name, to_affine(init, self.declared))
                self.declared.add(name)
                self.order.append(name)
                cmds.append(cmd)
            target = dst if dst is not None else self.node(s.line)
            self.edge(src, cmds[0] if len(cmds) == 1 else Seq(tuple(cmds)), target)
            return target
        if isinstance(s, AssignStmt):
            expr = None if s.expr is None else to_affine(s.expr, self.declared)
            if s.name not in self.declared:
                raise UndeclaredVariable(f"undeclared variable {s.name!r}", s.line, s.col)
            cmd = AssignNondet(s.name) if expr is None else Assign(s.name, expr)
            target = dst if dst is not None else self.node(s.line)
            self.edge(src, cmd, target)
            return target
        if isinstance(s, IfStmt):
            target = dst if dst is not None else self.node(s.line)
            pos, neg = _cond_commands(s.cond, self.declared)
            then_node = self.node(s.line)
            for cmd in pos:
                self.edge(src, cmd, then_node)
            self.block(s.then, then_node, target)
            if s.orelse:
                else_node = self.node(s.line)
                for cmd in neg:
                    self.edge(src, cmd, else_node)
                self.block(s.orelse, else_node, target)
            else:
                for cmd in neg:
                    self.edge(src, cmd, target)
            return target
        if isinstance(s, WhileStmt):
            head = src
            if src == 0:   # the entry must keep no incoming edges
                head = self.node(s.line)
                self.edge(src, Skip(), head)
            target = dst if dst is not None else self.node(s.line)
            pos, neg = _cond_commands(s.cond, self.declared)
            body = self.node(s.line)
            for cmd in pos:
                self.edge(head, cmd, body)
            for cmd in neg:
                self.edge(head, cmd, target)
            self.loops.append((head, body, s.line))
            self.block(s.body, body, head)
            return target
        raise TypeError(f"unknown statement {s!r}")


def parse(text: str, name: str = "") -> Program:
    """Parse source text and lower it to a CFG."""
    stmts = Parser(text).program()
    b = _Builder()
    entry = b.node(1)
    exit_ = b.node(stmts[-1].line if stmts and stmts[-1] is not None else 1)
    b.block(stmts, entry, exit_)
    return replace(_finish(b, entry, exit_, name), ast=tuple(stmts))


def _finish(b: _Builder, entry: int, exit_: int, name: str) -> Program:
    # renumber nodes in reverse postorder from the entry
    succ: dict[int, list[int]] = {}
    for s, _, d in b.edges:
        succ.setdefault(s, []).insert(0, d)   # later edges first, so loop bodies precede exits
    seen, post = set(), []
    stack = [(entry, iter(succ.get(entry, [])))]
    seen.add(entry)
    while stack:
        node, it = stack[-1]
        for nxt in it:
            if nxt not in seen:
                seen.add(nxt)
                stack.append((nxt, iter(succ.get(nxt, []))))
                break
        else:
            post.append(node)
            stack.pop()
    order = list(reversed(post))
    renum = {old: new for new, old in enumerate(order)}
    edges = tuple(Edge(renum[s], c, renum[d]) for s, c, d in b.edges if s in renum and d in renum)
    lines = tuple(b.lines[old] for old in order)
    loops = tuple(Loop(renum[h], renum[bd], ln) for h, bd, ln in b.loops if h in renum and bd in renum)
    vars_ = tuple(Var(n, k) for k, n in enumerate(b.order))
    exit_new = renum.get(exit_, -1)
    return Program(vars_, tuple(range(len(order))), edges, 0, exit_new, lines, loops, name)


def parse_file(path) -> Program:
    from pathlib import Path
    p = Path(path)
    return parse(p.read_text(), p.name)


# -- analysis-facing utilities ----------------------------------------------------

def restrict(p: Program, keep: Iterable[str]) -> Program:
    """The program where every reference to a variable outside ``keep`` is
    replaced by nondeterministic choice.  CFG shape is unchanged."""
    keep = frozenset(keep)
    unknown = keep - {v.name for v in p.vars}
    if unknown:
        raise ValueError(f"unknown variables {sorted(unknown)}")
    return replace(p, edges=tuple(Edge(e.src, _restrict_cmd(e.cmd, keep), e.dst) for e in p.edges))


def _restrict_cmd(cmd: Command, keep: frozenset) -> Command:
    if isinstance(cmd, Seq):
        return make_seq(_restrict_cmd(c, keep) for c in cmd.cmds)
    if isinstance(cmd, (Assign, AssignNondet)) and cmd.var not in keep:
        return Skip()
    if isinstance(cmd, Assign) and not cmd.expr.variables() <= keep:
        return AssignNondet(cmd.var)
    if isinstance(cmd, Guard) and not command_reads(cmd) <= keep:
        return GuardNondet()
    if isinstance(cmd, GuardNondet) and cmd.test is not None and not cmd.test.variables() <= keep:
        return GuardNondet()
    return cmd


def back_edges(p: Program) -> set[Edge]:
    """Edges whose target is an ancestor in a depth-first spanning tree from the entry."""
    out = set()
    on_stack, done = set(), set()
    stack = [(p.entry, iter(p.succs(p.entry)))]
    on_stack.add(p.entry)
    while stack:
        node, it = stack[-1]
        for e in it:
            if e.dst in on_stack:
                out.add(e)
            elif e.dst not in done:
                on_stack.add(e.dst)
                stack.append((e.dst, iter(p.succs(e.dst))))
                break
        else:
            stack.pop()
            on_stack.discard(node)
            done.add(node)
    return out


def natural_loop(p: Program, edge: Edge) -> set[int]:
    body = {edge.dst, edge.src}
    work = [edge.src]
    while work:
        n = work.pop()
        if n == edge.dst:
            continue
        for e in p.preds(n):
            if e.src not in body:
                body.add(e.src)
                work.append(e.src)
    return body


def widening_points(p: Program, everywhere: bool = False) -> frozenset[int]:
    """Loop body entries: for every back edge into ``h``, the successors of
    ``h`` inside its natural loop.  Every cycle crosses one of them."""
    if everywhere:
        return frozenset(n for n in p.nodes if n != p.entry)
    points = set()
    for be in back_edges(p):
        loop = natural_loop(p, be)
        for e in p.succs(be.dst):
            if e.dst in loop:
                points.add(e.dst)
    return frozenset(points)


def contract_skips(p: Program) -> Program:
    """Merge ``u -skip-> v`` when it is the only edge leaving ``u`` (u is not the entry
    unless v has no other predecessor).  Used for structural comparisons."""
    edges = list(p.edges)
    entry = p.entry
    changed = True
    while changed:
        changed = False
        for e in edges:
            if not isinstance(e.cmd, Skip) or e.src == e.dst:
                continue
            outs = [x for x in edges if x.src == e.src]
            if len(outs) != 1:
                continue
            if e.src == entry and any(x.dst == e.dst and x is not e for x in edges):
                continue
            u, v = e.src, e.dst
            edges = [Edge(v if x.src == u else x.src, x.cmd, v if x.dst == u else x.dst)
                     for x in edges if x is not e]
            if u == entry:
                entry = v
            changed = True
            break
    nodes = sorted({entry} | {x.src for x in edges} | {x.dst for x in edges})
    return replace(p, nodes=tuple(nodes), edges=tuple(edges), entry=entry, lines=(), loops=())


def isomorphic(p: Program, q: Program) -> bool:
    """Labelled-graph isomorphism anchored at the entries (edge labels compared as text)."""
    if len(p.nodes) != len(q.nodes) or len(p.edges) != len(q.edges):
        return False

    def out(prog, n):
        return sorted((str(e.cmd), e.dst) for e in prog.edges if e.src == n)

    def sig(prog, n):
        return (sorted(str(e.cmd) for e in prog.edges if e.src == n),
                sorted(str(e.cmd) for e in prog.edges if e.dst == n))

    def extend(mapping, used, pending):
        if not pending:
            return len(mapping) == len(p.nodes)
        a, b = pending[0]
        rest = pending[1:]
        if a in mapping:
            return mapping[a] == b and extend(mapping, used, rest)
        if b in used or sig(p, a) != sig(q, b):
            return False
        mapping = dict(mapping)
        mapping[a] = b
        used = used | {b}
        pa, qb = out(p, a), out(q, b)
        # try every label-preserving pairing of successor edges
        return _pair(pa, qb, lambda pairs: extend(mapping, used, rest + pairs))

    return extend({}, frozenset(), [(p.entry, q.entry)])


def _pair(left, right, k):
    if not left:
        return k([])
    (label, dst), rest = left[0], left[1:]
    for idx, (lab2, dst2) in enumerate(right):
        if lab2 == label:
            remaining = right[:idx] + right[idx + 1:]
            if _pair(rest, remaining, lambda pairs: k([(dst, dst2)] + pairs)):
                return True
    return False


# -- printing ---------------------------------------------------------------------

def format_source(stmts: list, indent: int = 0) -> str:
    """Pretty-print a parsed statement list back to concrete syntax."""
    pad = "  " * indent
    out = []
    for s in stmts:
        if s is None:
            out.append(f"{pad};")
        elif isinstance(s, Decl):
            items = ", ".join(f"{n} = {'nondet()' if e is None else _fmt_expr(e)}" for n, e, *_ in s.items)
            out.append(f"{pad}int {items};")
        elif isinstance(s, AssignStmt):
            out.append(f"{pad}{s.name} = {'nondet()' if s.expr is None else _fmt_expr(s.expr)};")
        elif isinstance(s, IfStmt):
            out.append(f"{pad}if ({_fmt_cond(s.cond)}) {{")
            out.append(format_source(s.then, indent + 1))
            if s.orelse:
                out.append(f"{pad}}} else {{")
                out.append(format_source(s.orelse, indent + 1))
            out.append(f"{pad}}}")
        elif isinstance(s, WhileStmt):
            out.append(f"{pad}while ({_fmt_cond(s.cond)}) {{")
            out.append(format_source(s.body, indent + 1))
            out.append(f"{pad}}}")
    return "\n".join(x for x in out if x)


def _fmt_expr(e: Expr) -> str:
    if e.op == "const":
        return str(e.value)
    if e.op == "var":
        return e.value
    if e.op == "neg":
        return f"-({_fmt_expr(e.args[0])})"
    return f"({_fmt_expr(e.args[0])} {e.op} {_fmt_expr(e.args[1])})"


def _fmt_cond(c: Cond) -> str:
    if c.kind in ("nondet",):
        return "nondet()"
    if c.kind in ("true", "false"):
        return c.kind
    if c.kind == "mod":
        m = c.mod
        return f"{_fmt_expr(m.expr)} % {m.modulus} {'!=' if m.negated else '=='} {m.residue}"
    return " && ".join(f"{_fmt_expr(a.left)} {a.op} {_fmt_expr(a.right)}" for a in c.atoms)


def parse_statements(text: str) -> list:
    return Parser(text).program()


def format_program(p: Program) -> str:
    """Source text of a parsed program (restricted programs have no source)."""
    return format_source(list(p.ast)) + "\n"
