import json
from fractions import Fraction

import pytest

from capsched import __version__, report
from capsched.analysis import AnalysisConfig, analyze


@pytest.mark.parametrize("stages", [False, True])
def test_round_trip(agc, stages):
    doc = report.from_analysis(analyze(agc, AnalysisConfig(stages=stages)))
    assert report.parse(report.emit(doc)) == doc


def test_json_layout(agc):
    data = json.loads(report.emit(report.from_analysis(analyze(agc))))
    assert data["schema_version"] == 1
    assert data["tool_version"] == __version__
    assert data["utilization"] == {"numerator": 431, "denominator": 600, "decimal": 0.718333}
    assert [t["wcrt"] for t in data["transactions"]] == [54, 114, 155]
    assert data["verdict"] == "schedulable"
    assert "stages" not in data
    assert data["config"] == {"policy": "run-to-completion", "max_window": None, "stages": False}


def test_unbounded_serializes_null(agc):
    doc = report.from_analysis(analyze(agc, AnalysisConfig(max_window=50)))
    data = json.loads(report.emit(doc))
    assert data["transactions"][0]["wcrt"] is None
    assert report.parse(report.emit(doc)).utilization == Fraction(431, 600)


def test_rejects_other_schema_versions():
    with pytest.raises(ValueError):
        report.parse(json.dumps({"schema_version": 2}))
