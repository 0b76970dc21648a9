import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import abelianization_by_minors

from gradspine.errors import MultiplicityViolation, ParseError, PatternViolation
from gradspine.origami import (Presentation, abelian_invariants, bundled_origami,
                               format_word, origami_from_dict, parse_origami, parse_word,
                               presentation, presentation_complexity, relation_matrix,
                               simplify, validate_origami)

EMPTY_DISK = {"surface": "disk", "arcs": [], "identifications": [],
              "cells": [{"label": "D", "ground": True, "boundary": []}]}

# one waterfall whose two sides run along free trajectories of the same
# waterfall generator, with no arc shared with another polygon
FREE_WATERFALL = {
    "surface": "disk",
    "arcs": [
        {"label": "f1", "kind": "boundary", "ends": ["p0", "p1"], "generator": "a",
         "free": True},
        {"label": "r1", "kind": "boundary", "ends": ["p1", "p2"]},
        {"label": "f2", "kind": "boundary", "ends": ["p3", "p2"], "generator": "a",
         "free": True},
        {"label": "r2", "kind": "boundary", "ends": ["p3", "p0"]},
    ],
    "identifications": [],
    "cells": [{"label": "W", "boundary": ["f1", "r1", "-f2", "r2"]}],
}


def cascade_dict():
    return bundled_origami("contractible_cascade").as_dict()


def test_empty_disk():
    code = origami_from_dict(EMPTY_DISK)
    v = validate_origami(code)
    assert v.valid and v.patterns == ()
    p = presentation(code)
    assert p.generators == () and p.relators == ()
    assert presentation_complexity(p) == 0
    assert abelian_invariants(p) == (0, [])


def test_cascade_is_valid():
    v = validate_origami(bundled_origami("contractible_cascade"))
    assert v.valid
    assert v.patterns == ("disjoint",) * 3
    assert v.arc_multiplicity == 2


def test_cascade_presentation():
    p = presentation(bundled_origami("contractible_cascade"))
    assert p.generators == ("a", "b", "c")
    assert [format_word(r) for r in p.relators] == ["b a c", "a b^-1", "a c^-1"]
    assert presentation_complexity(p) == 7


def test_free_waterfall():
    code = origami_from_dict(FREE_WATERFALL)
    assert validate_origami(code).valid
    p = presentation(code)
    assert p.generators == ("a",)
    assert p.relators == ((),) or p.relators == ()
    s = simplify(p)
    assert s.generators == ("a",) and s.relators == ()
    assert abelian_invariants(s) == (1, [])


def test_triple_cover_of_arc_interior():
    d = cascade_dict()
    d["arcs"].append({"label": "tx", "kind": "boundary", "ends": ["p6", "p7"],
                      "generator": "a", "free": False})
    d["identifications"].append({"boundary": "tx", "interior": "sa", "orientation": 1,
                                 "pattern": None})
    with pytest.raises(MultiplicityViolation):
        validate_origami(origami_from_dict(d))


def test_boundary_arc_glued_twice():
    d = cascade_dict()
    d["identifications"].append({"boundary": "ta", "interior": "sb", "orientation": 1,
                                 "pattern": None})
    d["arcs"][1]["generator"] = "a"
    d["arcs"][7]["generator"] = "a"
    with pytest.raises(MultiplicityViolation):
        validate_origami(origami_from_dict(d))


def test_vertex_covered_four_times():
    arcs, idents = [], []
    for k in range(3):
        arcs.append({"label": f"b{k}", "kind": "boundary", "ends": [f"p{k}", f"e{k}"],
                     "generator": f"g{k}"})
        arcs.append({"label": f"i{k}", "kind": "interior", "ends": ["q", f"s{k}"],
                     "generator": f"g{k}"})
        idents.append({"boundary": f"b{k}", "interior": f"i{k}", "orientation": 1})
    d = {"surface": "disk", "arcs": arcs, "identifications": idents, "cells": []}
    with pytest.raises(MultiplicityViolation):
        validate_origami(origami_from_dict(d))


@pytest.mark.parametrize("edit", [
    lambda d: d["identifications"][0].update(pattern="hinge"),
    lambda d: d["identifications"][0].update(interior="tb"),
    lambda d: d["identifications"][0].update(interior="zz"),
    lambda d: d["arcs"][6].update(generator="q"),
    lambda d: d["cells"].append({"label": "X", "boundary": ["ta"]}),
    lambda d: d["cells"].append({"label": "Y", "boundary": ["nope"]}),
])
def test_pattern_violations(edit):
    d = cascade_dict()
    edit(d)
    with pytest.raises(PatternViolation):
        validate_origami(origami_from_dict(d))


def test_hinge_pattern_detected():
    d = cascade_dict()
    d["arcs"][6]["ends"] = ["p0", "q1"]
    d["identifications"][0]["pattern"] = None
    assert validate_origami(origami_from_dict(d)).patterns[0] == "hinge"


def test_parse_roundtrip_and_errors():
    code = bundled_origami("contractible_cascade")
    assert parse_origami(json.dumps(code.as_dict())) == code
    with pytest.raises(ParseError):
        parse_origami("[]")
    with pytest.raises(ParseError):
        parse_origami("{")
    with pytest.raises(ParseError):
        bundled_origami("missing")


# -- presentations ----------------------------------------------------------------

def test_simplify_examples():
    p = Presentation.from_strings(["a"], [])
    assert simplify(p) == p
    q = Presentation.from_strings(["a"], ["a a a"])
    assert presentation_complexity(q) == 3
    assert simplify(q) == q
    assert abelian_invariants(q) == (0, [3])


def test_cascade_substitution_reaches_cyclic_group():
    p = presentation(bundled_origami("contractible_cascade"))
    s = simplify(p, substitute=True)
    assert len(s.generators) == 1
    assert [len(r) for r in s.relators] == [3]
    assert abelian_invariants(p) == abelian_invariants(s) == (0, [3])


def test_word_roundtrip():
    w = (("a", 1), ("b", -1), ("c", 1))
    assert parse_word(format_word(w)) == w
    assert parse_word("a*b^-1*c") == w
    with pytest.raises(ValueError):
        Presentation.from_strings(["a"], ["b"])


letters = st.tuples(st.sampled_from("abcd"), st.sampled_from([1, -1]))
presentations = st.lists(st.lists(letters, min_size=1, max_size=6), max_size=4).map(
    lambda rels: Presentation(tuple("abcd"), tuple(tuple(r) for r in rels)))


@given(presentations)
def test_abelianization_matches_minor_oracle(p):
    assert abelian_invariants(p) == abelianization_by_minors(4, relation_matrix(p))


@given(presentations, st.booleans())
def test_simplify_keeps_abelianization(p, substitute):
    s = simplify(p, substitute=substitute)
    assert abelian_invariants(s) == abelian_invariants(p)
    if not substitute:
        assert presentation_complexity(s) <= presentation_complexity(p)


@given(presentations)
def test_simplify_is_idempotent(p):
    s = simplify(p)
    assert simplify(s) == s
