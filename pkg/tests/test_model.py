import dataclasses
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from capsched import dsl
from capsched.fixtures import path as fixture_path
from capsched.model import (
    Action,
    ArrivalPattern,
    Emission,
    Event,
    EventKind,
    SubAction,
    SystemModel,
    Transaction,
    causal_closure,
    successors,
    validate,
)
from modelgen import random_model_text


def _codes(text):
    return validate(dsl.parse(text)).codes()


def test_agc_is_clean(agc):
    rep = validate(agc)
    assert rep.ok
    assert rep.diagnostics == ()


def test_broken_fixture_reports_priority_mismatch():
    rep = validate(dsl.load(fixture_path("broken.rts")))
    assert not rep.ok
    assert "SYNC_PRIORITY_MISMATCH" in rep.codes()


def test_validate_is_idempotent(agc):
    broken = dsl.load(fixture_path("broken.rts"))
    assert validate(agc) == validate(agc)
    assert validate(broken) == validate(broken)


def test_arrival_pattern_constructors():
    p = ArrivalPattern.periodic(60, jitter=3)
    assert (p.outer_period, p.inner_period, p.burst, p.jitter) == (60, 60, 1, 3)
    s = ArrivalPattern.sporadic(900, 300, 3)
    assert [s.arrival(q) for q in range(5)] == [0, 300, 600, 900, 1200]
    assert s.with_jitter(4).jitter == 4


def test_agc_capsules_and_lookup(agc):
    assert agc.action("A12").owner == "Roll_Gap_Control"
    assert agc.event("E12").kind is EventKind.SIGNAL
    assert agc.transaction("T3").deadline == 250
    assert "Roll_Gap_Control" in agc.capsules


def test_causal_closure_of_agc(agc):
    assert set(causal_closure(agc, "A3")) == {"A3", "A10", "A11", "A12"}
    assert set(successors(agc, "A1")) == {"A4", "A5", "A6"}


def _txn(actions, external="E1", deadline=50, jitter=0):
    events = [Event(external, EventKind.EXTERNAL, actions[0].id, ArrivalPattern.periodic(100, jitter))]
    for a in actions:
        for s in a.subs:
            if s.emits:
                target = next(b for b in actions if b.trigger == s.emits.target)
                events.append(Event(s.emits.target, s.emits.kind, target.id, None))
    return SystemModel("m", (Transaction("T1", external, tuple(a.id for a in actions), deadline),),
                       tuple(events), tuple(actions))


def _act(aid, trigger, prio, *subs):
    return Action(aid, trigger, "C", prio, 50, tuple(subs))


def test_missing_reply_is_reported():
    m = _txn([
        _act("A1", "E1", 3, SubAction("s1", 2, Emission("call", "E2"))),
        _act("A2", "E2", 3, SubAction("s2", 2)),
    ])
    assert "MISSING_REPLY" in validate(m).codes()


def test_cycle_in_causes_is_reported():
    m = _txn([
        _act("A1", "E1", 3, SubAction("s1", 2, Emission("signal", "E2"))),
        _act("A2", "E2", 3, SubAction("s2", 2, Emission("signal", "E3"))),
        _act("A3", "E3", 3, SubAction("s3", 2, Emission("signal", "E2"))),
    ])
    assert "CYCLE_IN_CAUSES" in validate(m).codes()


def test_jitter_on_internal_and_burst_checks():
    text = dsl.render(dsl.load(fixture_path("agc.rts")))
    m = dsl.parse(text)
    bad = m.replace_pattern("E3", ArrivalPattern(900, 100, 10, 0, "sporadic"))
    assert "BURST_EXCEEDS_OUTER" in validate(bad).codes()
    ev = m.event("E5")
    events = tuple(dataclasses.replace(e, pattern=ArrivalPattern.periodic(60, 2)) if e.id == "E5" else e
                   for e in m.events)
    assert ev.pattern is None
    assert "JITTER_ON_INTERNAL" in validate(dataclasses.replace(m, events=events)).codes()


def test_multiple_emitters_reported(agc):
    a2 = agc.action("A2")
    subs = a2.subs + (SubAction("extra", 1, Emission("signal", "E5")),)
    m = agc.replace_action(dataclasses.replace(a2, subs=subs))
    assert "MULTIPLE_EMITTERS" in validate(m).codes()


def _topo_order(model):
    # Kahn's algorithm over the emission graph, independent of the validator
    indeg = {a.id: 0 for a in model.actions}
    for a in model.actions:
        for b in successors(model, a.id):
            indeg[b] += 1
    ready = [a for a, d in indeg.items() if d == 0]
    order = []
    while ready:
        a = ready.pop()
        order.append(a)
        for b in successors(model, a):
            indeg[b] -= 1
            if indeg[b] == 0:
                ready.append(b)
    return order


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_valid_models_have_a_topological_order(seed):
    m = dsl.parse(random_model_text(random.Random(seed)))
    assert validate(m).ok
    order = _topo_order(m)
    assert len(order) == len(m.actions)
    pos = {a: i for i, a in enumerate(order)}
    for a in m.actions:
        for b in successors(m, a.id):
            assert pos[a.id] < pos[b]
