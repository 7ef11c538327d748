import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capsched import dsl
from capsched.dsl import ParseError
from capsched.fixtures import FIXTURE_DIR
from capsched.model import EventKind, PatternKind
from modelgen import random_model_text

FIXTURES = sorted(p.name for p in FIXTURE_DIR.glob("*.rts"))

MINIMAL = """system "m"
transaction T1 {
  external E1 periodic period=10
  action A1 trigger=E1 owner=C priority=1 deadline=10 {
    sub s1 exec=2
  }
}
"""


def _error(text):
    with pytest.raises(ParseError) as exc:
        dsl.parse(text)
    return exc.value


def test_agc_counts(agc):
    assert len(agc.transactions) == 3
    assert len(agc.actions) == 12
    assert len(agc.events) == 12
    assert sum(e.kind is EventKind.EXTERNAL for e in agc.events) == 3


def test_agc_patterns(agc):
    e3 = agc.event("E3").pattern
    assert e3.kind is PatternKind.SPORADIC
    assert (e3.outer_period, e3.inner_period, e3.burst, e3.jitter) == (900, 300, 3, 0)
    assert agc.event("E1").pattern.jitter == 3
    assert agc.event("E2").pattern.kind is PatternKind.APERIODIC


def test_minimal_model():
    m = dsl.parse(MINIMAL)
    assert m.name == "m"
    assert m.action("A1").cost == 2


@pytest.mark.parametrize("text", ["", "   \n# only a comment\n"])
def test_empty_input(text):
    err = _error(text)
    assert err.code == "EMPTY_MODEL"
    assert (err.span.line, err.span.column) == (1, 1)


def test_missing_attribute_value_names_expected_token():
    err = _error(MINIMAL.replace("period=10", "period="))
    assert err.code == "UNEXPECTED_TOKEN"
    # the next token, on the following line, is where the value was expected
    assert (err.span.line, err.span.column) == (4, 3)
    assert err.expected == ("INT",)


def test_unknown_attribute():
    err = _error(MINIMAL.replace("owner=C", "owner=C colour=3"))
    assert err.code == "UNKNOWN_ATTRIBUTE"
    assert (err.span.line, err.span.column) == (4, 32)


def test_missing_attribute():
    err = _error(MINIMAL.replace(" deadline=10", ""))
    assert err.code == "MISSING_ATTRIBUTE"


def test_duplicate_id():
    err = _error(MINIMAL.replace("}\n}\n", "}\n  action A1 trigger=E1 owner=C priority=1 deadline=10 {\n"
                                          "    sub s2 exec=1\n  }\n}\n"))
    assert err.code in ("DUPLICATE_ID", "DUPLICATE_TRIGGER")


def test_dangling_emission():
    err = _error(MINIMAL.replace("sub s1 exec=2", "sub s1 exec=2 emits signal E9"))
    assert err.code == "DANGLING_REF"
    assert err.span.line == 5


def test_unexpected_eof():
    err = _error(MINIMAL[:-3])
    assert err.code == "UNEXPECTED_EOF"


def test_bad_character():
    err = _error(MINIMAL.replace("exec=2", "exec=2 $"))
    assert err.code == "BAD_CHARACTER"


def test_sporadic_render_line(agc):
    assert "  external E3 sporadic outer=900 inner=300 burst=3\n" in dsl.render(agc)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_round_trip(name):
    m = dsl.load(FIXTURE_DIR / name)
    text = dsl.render(m)
    again = dsl.parse(text)
    assert again == m
    assert dsl.render(again) == text


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_random_round_trip(seed):
    m = dsl.parse(random_model_text(random.Random(seed)))
    assert dsl.parse(dsl.render(m)) == m


def test_spans_point_at_declarations():
    doc = dsl.parse_document(MINIMAL)
    assert (doc.spans["T1"].line, doc.spans["A1"].line, doc.spans["E1"].line) == (2, 4, 3)
