import xml.etree.ElementTree as ET

from capsched import gantt
from capsched.sim import Scenario, adversarial_scenario, simulate
from modelgen import single_job_model as _model

SVG = "{http://www.w3.org/2000/svg}"


def _lanes(svg_text):
    root = ET.fromstring(svg_text)
    assert root.tag == SVG + "svg"
    return root, root.findall(f"{SVG}g[@class='lane']")


def test_agc_adversarial_svg(agc):
    trace = simulate(agc, adversarial_scenario(agc, 300))
    root, lanes = _lanes(gantt.render_svg(trace))
    assert [g.get("data-job") for g in lanes] == ["A1", "A5", "A2", "A7", "A3", "A12"]
    rects = {g.get("data-job"): g.findall(f"{SVG}rect[@class='exec']") for g in lanes}
    for job, rs in rects.items():
        assert len(rs) == sum(e.job == job for e in trace.executions)
    a1 = next(g for g in lanes if g.get("data-job") == "A1")
    assert a1.findall(f"{SVG}line[@class='arrival']")
    assert a1.findall(f"{SVG}line[@class='jitter']")
    assert a1.findall(f"{SVG}line[@class='deadline']")
    a3 = next(g for g in lanes if g.get("data-job") == "A3")
    assert a3.findall(f"{SVG}circle[@class='emission']")


def test_empty_trace_still_has_lanes(agc):
    trace = simulate(agc, Scenario(0))
    assert trace.executions == []
    _, lanes = _lanes(gantt.render_svg(trace))
    assert len(lanes) == 6
    assert all(not g.findall(f"{SVG}rect") for g in lanes)
    assert gantt.render_text(trace).splitlines()[0] == "A1  ."


def test_text_lanes():
    trace = simulate(_model((5, 1, 10, 0)), Scenario(10))
    assert gantt.render_text(trace) == "A1 #####.....\n"
    trace = simulate(_model((3, 1, 100, 0), (4, 2, 100, 0)), Scenario(1))
    assert gantt.render_text(trace) == "A1 ....###\nA2 ####...\n"
