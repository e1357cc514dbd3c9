import pytest

import gdmskit as gk
from gdmskit import graph as gg

CANTOR = """\
system cantor
space v 0 1
edge e1 v v similarity 0.3333333333333333 0 1
edge e2 v v similarity 0.3333333333333333 0.6666666666666666 1
incidence full
"""

CF_FULL = """\
# the full continued-fraction system
system gauss
family cf
incidence full
"""

TWO_COMPONENT = """\
system linked
space v 0 1
edge a v v similarity 0.3333333333333333 0 1
edge b v v similarity 0.3333333333333333 0.6666666666666666 1
edge c v v similarity 0.25 0 1
edge d v v similarity 0.25 0.75 1
incidence explicit
allow a a
allow a b
allow b a
allow b b
allow b c
allow c c
allow c d
allow d c
allow d d
"""


class TestParsing:
    def test_similarity_round_trip(self):
        sys1, _ = gk.parse_spec(CANTOR)
        text = gk.serialize_spec(sys1)
        sys2, _ = gk.parse_spec(text)
        assert gk.serialize_spec(sys2) == text
        assert sys2.name == "cantor"
        assert sys2.edge_ids == ("e1", "e2")

    def test_cf_round_trip(self):
        sys1, _ = gk.parse_spec(CF_FULL)
        assert sys1.infinite
        text = gk.serialize_spec(sys1)
        sys2, _ = gk.parse_spec(text)
        assert gk.serialize_spec(sys2) == text

    def test_truncated_cf_round_trip(self):
        sys1, _ = gk.parse_spec("system t\nfamily cf truncate 3\nincidence banded 1\n")
        assert not sys1.infinite
        assert sys1.edge_ids == (1, 2, 3)
        text = gk.serialize_spec(sys1)
        sys2, _ = gk.parse_spec(text)
        assert sys2.edge_ids == (1, 2, 3)
        assert sys2.incidence.kind == gg.BANDED

    def test_explicit_system(self):
        sys, _ = gk.parse_spec(TWO_COMPONENT)
        assert gk.is_admissible(sys, ("b", "c"))
        assert not gk.is_admissible(sys, ("c", "a"))

    def test_comments_and_blank_lines_ignored(self):
        text = CANTOR.replace("incidence full", "\n# note\nincidence full  # trailing")
        sys, _ = gk.parse_spec(text)
        assert sys.edge_ids == ("e1", "e2")


class TestRejections:
    def reject(self, text, fragment, line=None):
        with pytest.raises(gk.SpecError) as exc:
            gk.parse_spec(text)
        assert fragment in str(exc.value)
        if line is not None:
            assert exc.value.line == line

    def test_unknown_keyword(self):
        self.reject("system x\nweird 1 2\n", "unknown keyword", line=2)

    def test_missing_incidence(self):
        self.reject("system x\nspace v 0 1\nedge e v v similarity 0.5 0 1\n",
                    "incidence")

    def test_allow_without_explicit(self):
        self.reject(CANTOR + "allow e1 e2\n", "explicit")

    def test_explicit_without_allow(self):
        self.reject(CANTOR.replace("incidence full", "incidence explicit"),
                    "allow")

    def test_cf_with_edges(self):
        self.reject(CANTOR + "family cf\n", "mutually exclusive")

    def test_cf_wrong_space(self):
        self.reject("system x\nspace v 0 2\nfamily cf\nincidence full\n",
                    "[0, 1]")

    def test_bad_ratio(self):
        self.reject(CANTOR.replace("0.3333333333333333 0 1", "1.5 0 1"),
                    "between 0 and 1", line=3)

    def test_named_rule_needs_integer_ids(self):
        self.reject(CANTOR.replace("incidence full", "incidence banded 1"),
                    "integer edge ids")

    def test_duplicate_edge_id(self):
        bad = CANTOR.replace("edge e2", "edge e1")
        self.reject(bad, "duplicate edge id")

    def test_incompatible_allow_pair(self):
        # a allow pair must respect the vertex structure
        text = """\
system bad
space u 0 1
space w 2 3
edge a u u similarity 0.5 0 1
edge b w w similarity 0.5 2 1
incidence explicit
allow a b
"""
        self.reject(text, "compat")

    def test_image_outside_space(self):
        text = """\
system bad
space v 0 1
edge a v v similarity 0.5 0.9 1
incidence full
"""
        self.reject(text, "image")


class TestValidationEffects:
    def test_explicit_dead_edges_pruned(self):
        # edge z has no admissible successor and is removed at load time
        text = TWO_COMPONENT + "edge z v v similarity 0.1 0.2 1\n"
        text = text.replace("allow d d\n", "allow d d\nallow z z\n")
        # give z a successor loop so it stays, then drop it to see pruning
        sys_kept, _ = gk.parse_spec(text)
        assert "z" in sys_kept.edge_ids
        text2 = TWO_COMPONENT + "edge z v v similarity 0.1 0.2 1\n" \
            + "# z allowed only into a dead end\n"
        text2 = text2.replace("allow d d\n", "allow d d\nallow z c\n")
        sys2, _ = gk.parse_spec(text2.replace("allow z c\n", ""))
        assert "z" not in sys2.edge_ids

    def test_overlap_warning_emitted(self):
        text = """\
system overlap
space v 0 1
edge a v v similarity 0.6 0 1
edge b v v similarity 0.6 0.4 1
incidence full
"""
        _, warnings = gk.parse_spec(text)
        assert any("overlap" in w.lower() for w in warnings)
