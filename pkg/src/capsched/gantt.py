"""Gantt rendering of simulator traces, as SVG or plain text."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import defaultdict
from typing import Dict, List, Optional

from .sim.engine import Trace

LANE_HEIGHT = 28
BAR_HEIGHT = 16
LABEL_WIDTH = 90
PLOT_WIDTH = 1200
AXIS_HEIGHT = 24

_STYLE = """
.exec { fill: #4c78a8; stroke: #1f3b57; stroke-width: 0.5 }
.arrival { stroke: #222; stroke-width: 1.5 }
.jitter { stroke: #888; stroke-width: 1 }
.release { stroke: #2a9d3a; stroke-width: 1.5 }
.emission { fill: #f28e2b }
.deadline { stroke: #d62728; stroke-width: 1; stroke-dasharray: 3 2 }
.tick { stroke: #ccc; stroke-width: 0.5 }
text { font-family: monospace; font-size: 11px }
"""


def horizon(trace: Trace) -> int:
    """Last tick worth drawing: the duration or the final completion, whichever is later."""
    last = max((e.end for e in trace.executions), default=0)
    return max(trace.duration, last, 1)


def _root_lane(trace: Trace) -> Dict[str, str]:
    # the lane an arrival belongs to is the lane of its transaction's first job
    out = {}
    for r in trace.records:
        if r.kind == "arrival":
            out.setdefault(r.transaction, r.job)
    return out


def render_text(trace: Trace, end: Optional[int] = None) -> str:
    """One row per job, one character per tick: ``#`` busy, ``.`` idle."""
    end = horizon(trace) if end is None else end
    rows = {j: ["."] * end for j in trace.jobs}
    for e in trace.executions:
        row = rows[e.job]
        for t in range(e.start, min(e.end, end)):
            row[t] = "#"
    width = max((len(j) for j in trace.jobs), default=0)
    return "".join(f"{j.ljust(width)} {''.join(rows[j])}\n" for j in trace.jobs)


def render_svg(trace: Trace, title: str = "schedule") -> str:
    """Standalone SVG document with one ``<g class="lane">`` per job."""
    end = horizon(trace)
    scale = PLOT_WIDTH / end

    def x(t: int) -> str:
        return f"{LABEL_WIDTH + t * scale:.2f}"

    height = AXIS_HEIGHT + LANE_HEIGHT * max(1, len(trace.jobs))
    svg = ET.Element("svg", {
        "xmlns": "http://www.w3.org/2000/svg",
        "width": str(LABEL_WIDTH + PLOT_WIDTH + 10),
        "height": str(height),
        "viewBox": f"0 0 {LABEL_WIDTH + PLOT_WIDTH + 10} {height}",
    })
    ET.SubElement(svg, "title").text = title
    ET.SubElement(svg, "style").text = _STYLE

    axis = ET.SubElement(svg, "g", {"class": "axis"})
    step = _tick_step(end)
    for t in range(0, end + 1, step):
        ET.SubElement(axis, "line", {"class": "tick", "x1": x(t), "x2": x(t),
                                     "y1": str(AXIS_HEIGHT - 4), "y2": str(height)})
        label = ET.SubElement(axis, "text", {"x": x(t), "y": str(AXIS_HEIGHT - 8),
                                             "text-anchor": "middle"})
        label.text = str(t)

    by_lane: Dict[str, List] = defaultdict(list)
    for r in trace.records:
        by_lane[r.job].append(r)
    execs: Dict[str, List] = defaultdict(list)
    for e in trace.executions:
        execs[e.job].append(e)
    root_of = _root_lane(trace)
    deadlines = defaultdict(list)
    for inst in trace.instances:
        lane = root_of.get(inst.transaction)
        if lane is not None:
            deadlines[lane].append(inst.arrival + trace.deadlines.get(inst.transaction, 0))

    for i, job in enumerate(trace.jobs):
        top = AXIS_HEIGHT + i * LANE_HEIGHT
        mid = top + LANE_HEIGHT / 2
        bar_top = top + (LANE_HEIGHT - BAR_HEIGHT) / 2
        lane = ET.SubElement(svg, "g", {"class": "lane", "data-job": job})
        name = ET.SubElement(lane, "text", {"x": "4", "y": f"{mid + 4:.1f}"})
        name.text = job
        for e in execs[job]:
            rect = ET.SubElement(lane, "rect", {
                "class": "exec", "x": x(e.start), "y": f"{bar_top:.1f}",
                "width": f"{(e.end - e.start) * scale:.2f}", "height": str(BAR_HEIGHT),
                "data-instance": str(e.instance),
            })
            ET.SubElement(rect, "title").text = f"{job}#{e.instance} [{e.start}, {e.end})"
        for r in by_lane[job]:
            if r.kind == "arrival":
                ET.SubElement(lane, "line", {"class": "arrival", "x1": x(r.time), "x2": x(r.time),
                                             "y1": f"{top + 2}", "y2": f"{mid:.1f}"})
                J = trace.jitter_bounds.get(r.transaction, 0)
                if J:
                    ET.SubElement(lane, "line", {"class": "jitter", "x1": x(r.time),
                                                 "x2": x(r.time + J), "y1": f"{top + 4}",
                                                 "y2": f"{top + 4}"})
            elif r.kind == "release":
                ET.SubElement(lane, "line", {"class": "release", "x1": x(r.time), "x2": x(r.time),
                                             "y1": f"{mid:.1f}", "y2": f"{top + LANE_HEIGHT - 2}"})
            elif r.kind == "emission":
                ET.SubElement(lane, "circle", {"class": "emission", "cx": x(r.time),
                                               "cy": f"{bar_top:.1f}", "r": "2.5"})
        for d in deadlines[job]:
            ET.SubElement(lane, "line", {"class": "deadline", "x1": x(d), "x2": x(d),
                                         "y1": f"{top}", "y2": f"{top + LANE_HEIGHT}"})
    ET.indent(svg)
    return ET.tostring(svg, encoding="unicode") + "\n"


def _tick_step(end: int) -> int:
    step = 1
    while end / step > 20:
        for m in (2, 5, 10):
            if end / (step * m) <= 20:
                return step * m
        step *= 10
    return step
