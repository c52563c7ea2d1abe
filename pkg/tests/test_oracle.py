import pytest

from conftest import poly
from stratan.engine import AnalysisConfig, analyze
from stratan.frontend import parse
from stratan.oracle import OracleConfig, check_soundness, reach
from stratan.polyhedra import Polyhedron


class TestReach:
    def test_listing2_head(self, listing2):
        assert reach(listing2).at(1) == {(1, 0), (2, 1), (3, 3), (4, 6), (5, 10), (6, 15)}

    def test_listing1_head(self, listing1):
        assert reach(listing1).at(1) == {(i,) for i in range(1, 7)}

    def test_unreachable_node(self):
        p = parse("int i=0; if (i > 3) { i = 7; }")
        then_node = next(e.dst for e in p.edges if str(e.cmd) == "assume(i >= 4)")
        assert reach(p).at(then_node) == set()

    def test_nondet_range(self):
        r = reach(parse("int i = nondet();"), OracleConfig((-2, 2)))
        assert r.at(1) == {(-2,), (-1,), (0,), (1,), (2,)}

    def test_entry_ranges(self, listing1):
        r = reach(listing1, OracleConfig(entry=(("i", 5, 7),)))
        assert r.at(0) == {(5,), (6,), (7,)}

    def test_cap_sets_truncation(self, listing3):
        r = reach(listing3, OracleConfig(cap=500))
        assert r.truncated and r.count == 500

    def test_mod_guard_evaluated(self, restriction_program):
        r = reach(restriction_program)
        assert r.at(restriction_program.exit) == {(6, 24)}

    def test_csv(self, listing1):
        lines = reach(listing1).to_csv().splitlines()
        assert lines[0] == "node,i" and "1,1" in lines

    def test_bad_config(self):
        with pytest.raises(ValueError):
            OracleConfig((3, 1))
        with pytest.raises(ValueError):
            OracleConfig(cap=0)


class TestSoundness:
    def test_engine_result_sound(self, listing2):
        im = analyze(listing2, AnalysisConfig(method="strata-v2"))
        rep = check_soundness(listing2, im)
        assert rep.ok and rep.checked > 0

    def test_corrupted_invariant(self, listing1):
        im = analyze(listing1, AnalysisConfig(method="classic"))
        im.values[1] = poly("i >= 2", dims=("i",))
        rep = check_soundness(listing1, im)
        assert rep.violations == [(1, {"i": 1})]

    def test_bottom_at_unreachable_node(self):
        p = parse("int i=0; if (i > 3) { i = 7; }")
        im = analyze(p, AnalysisConfig(method="classic"))
        dead = next(e.dst for e in p.edges if str(e.cmd) == "assume(i >= 4)")
        im.values[dead] = Polyhedron.bottom(("i",))
        assert check_soundness(p, im).ok
