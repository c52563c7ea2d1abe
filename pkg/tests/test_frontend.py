import pytest

from conftest import load
from progen import random_program
from stratan.frontend import (Assign, AssignNondet, Guard, GuardNondet, NonlinearExpression,
                              ParseError, Seq, Skip, UndeclaredVariable, back_edges,
                              contract_skips, format_program, isomorphic, parse, restrict,
                              widening_points)
from stratan.oracle import OracleConfig, reach


def cmds(p):
    return [e.cmd for e in p.edges]


class TestParse:
    def test_listing1_shape(self, listing1):
        assert len(listing1.nodes) == 4
        assert widening_points(listing1) == {2}

    def test_listing2_shape(self, listing2):
        assert len(listing2.nodes) == 5
        assert isinstance(listing2.edges[0].cmd, Seq)

    def test_straight_line(self):
        p = parse("int i=0;")
        assert len(p.nodes) == 2 and len(p.edges) == 1
        assert not back_edges(p) and not widening_points(p)

    def test_nondet_declaration(self):
        p = parse("int i; int j = nondet();")
        assert isinstance(p.edges[0].cmd, AssignNondet)

    def test_increment_sugar(self):
        a = parse("int i=0; i++; i += 2;")
        b = parse("int i=0; i = i + 1; i = i + 2;")
        assert cmds(a) == cmds(b)

    def test_conjunction_is_one_guard(self):
        p = parse("int i=0, j=0; if (i < 3 && j >= 0) { i = 1; }")
        guards = [c for c in cmds(p) if isinstance(c, Guard) and len(c.constraints) == 2]
        assert guards

    def test_strict_comparison_closed_over_integers(self):
        p = parse("int i=0; while (i < 5) { i = i + 1; }")
        texts = [str(c) for c in cmds(p)]
        assert "assume(-i >= -4)" in texts

    def test_mod_test_is_nondet_guard(self, restriction_program):
        tests = [c for c in cmds(restriction_program) if isinstance(c, GuardNondet)]
        assert tests and all(c.test is not None for c in tests)

    def test_comments_ignored(self):
        assert cmds(parse("int i=0; // note\ni = 1;")) == cmds(parse("int i=0; i = 1;"))


class TestErrors:
    def test_nonlinear(self):
        with pytest.raises(NonlinearExpression) as err:
            parse("int i=1, j=2;\ni = i*j;")
        assert (err.value.line, err.value.column) == (2, 6)

    def test_undeclared(self):
        with pytest.raises(UndeclaredVariable):
            parse("int i=0; k = 1;")

    def test_syntax_error_location(self):
        with pytest.raises(ParseError) as err:
            parse("int i=0;\nwhile (i < ) { }")
        assert err.value.line == 2

    def test_disjunction_rejected(self):
        with pytest.raises(ParseError):
            parse("int i=0; if (i < 1 || i > 3) { i = 0; }")


class TestBackEdges:
    def test_listing2_single_back_edge(self, listing2):
        (e,) = back_edges(listing2)
        assert (e.src, e.dst) == (3, 1)

    def test_sequential_loops(self):
        p = parse("int i=0, j=0; while (i < 3) { i = i + 1; } while (j < 3) { j = j + 1; }")
        assert len(back_edges(p)) == 2

    def test_nested_loops(self):
        p = load("corpus/nest3_dct.whl")
        assert len(back_edges(p)) == 3


class TestRestrict:
    def test_restriction_program(self, restriction_program):
        r = restrict(restriction_program, {"i"})
        assert all(c.test is None for c in cmds(r) if isinstance(c, GuardNondet))
        assert not any(isinstance(c, Assign) and c.var == "j" for c in cmds(r))

    def test_full_set_is_identity(self, listing2):
        assert restrict(listing2, listing2.var_names) == listing2

    def test_idempotent(self, restriction_program):
        once = restrict(restriction_program, {"i"})
        assert restrict(once, {"i"}) == once

    def test_listing2_restricts_to_listing1(self, listing1, listing2):
        r = contract_skips(restrict(listing2, {"i"}))
        l1 = contract_skips(restrict(parse("int i=1, j=0; while (i<=5) { i=i+1; }"), {"i"}))
        assert isomorphic(r, l1)
        assert len(contract_skips(r).nodes) == len(listing1.nodes)

    def test_assignment_from_dropped_variable_becomes_nondet(self):
        p = parse("int i=0, j=0; i = j + 1;")
        assert isinstance(restrict(p, {"i"}).edges[-1].cmd, AssignNondet)

    def test_unknown_variable(self, listing1):
        with pytest.raises(ValueError):
            restrict(listing1, {"z"})

    @pytest.mark.parametrize("name", ["listing2.whl", "restriction.whl"])
    def test_restriction_over_approximates_concretely(self, name):
        p = load(name)
        full = reach(p, OracleConfig(cap=20_000))
        part = reach(restrict(p, {"i"}), OracleConfig(cap=20_000))
        k = p.var_names.index("i")
        for n in p.nodes:
            assert {s[k] for s in full.at(n)} <= {s[k] for s in part.at(n)}


class TestRoundTrip:
    @pytest.mark.parametrize("seed", range(25))
    def test_format_then_parse(self, seed):
        p = parse(random_program(seed))
        q = parse(format_program(p))
        assert isomorphic(p, q)

    def test_isomorphism_detects_change(self, listing1):
        other = parse("int i=1;\nwhile (i<=6) {\n  i=i+1;\n}")
        assert not isomorphic(listing1, other)

    def test_empty_block_is_skip_edge(self):
        p = parse("int i=0; if (i > 0) { } else { i = 1; }")
        assert sum(isinstance(c, Skip) for c in cmds(p)) == 1
