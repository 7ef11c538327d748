"""Machine-readable analysis report (JSON), schema version 1."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import __version__
from .analysis import AnalysisReport

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class TransactionEntry:
    id: str
    wcrt: Optional[int]
    deadline: int
    blocking: int
    verdict: str
    instances_examined: int
    responses: Tuple[int, ...]


@dataclass(frozen=True)
class StageEntry:
    job: str
    transaction: str
    jitter: Optional[int]
    wcrt: Optional[int]


@dataclass(frozen=True)
class ReportDocument:
    model: str
    verdict: str
    utilization: Fraction
    transactions: Tuple[TransactionEntry, ...]
    max_window: Optional[int]
    policy: str
    stages: Optional[Tuple[StageEntry, ...]] = None
    tool_version: str = __version__
    schema_version: int = SCHEMA_VERSION


def from_analysis(report: AnalysisReport) -> ReportDocument:
    txns = tuple(
        TransactionEntry(r.transaction, r.wcrt, r.deadline, r.blocking, r.verdict,
                         r.instances_examined, tuple(r.responses))
        for r in report.results
    )
    stages = None
    if report.stages is not None:
        stages = tuple(StageEntry(s.root, s.transaction, s.jitter, s.wcrt) for s in report.stages)
    return ReportDocument(report.model, report.verdict, report.utilization, txns,
                          report.config.max_window, report.config.policy, stages)


def to_dict(doc: ReportDocument) -> dict:
    u = doc.utilization
    out = {
        "schema_version": doc.schema_version,
        "tool_version": doc.tool_version,
        "model": doc.model,
        "verdict": doc.verdict,
        "utilization": {
            "numerator": u.numerator,
            "denominator": u.denominator,
            "decimal": round(float(u), 6),
        },
        "config": {"policy": doc.policy, "max_window": doc.max_window, "stages": doc.stages is not None},
        "transactions": [dict(asdict(t), responses=list(t.responses)) for t in doc.transactions],
    }
    if doc.stages is not None:
        out["stages"] = [asdict(s) for s in doc.stages]
    return out


def emit(doc: ReportDocument) -> str:
    return json.dumps(to_dict(doc), indent=2) + "\n"


def parse(text: str) -> ReportDocument:
    data = json.loads(text)
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {version!r}")
    u = data["utilization"]
    txns = tuple(
        TransactionEntry(t["id"], t["wcrt"], t["deadline"], t["blocking"], t["verdict"],
                         t["instances_examined"], tuple(t["responses"]))
        for t in data["transactions"]
    )
    stages = None
    if "stages" in data:
        stages = tuple(StageEntry(s["job"], s["transaction"], s["jitter"], s["wcrt"])
                       for s in data["stages"])
    cfg = data["config"]
    return ReportDocument(
        model=data["model"],
        verdict=data["verdict"],
        utilization=Fraction(u["numerator"], u["denominator"]),
        transactions=txns,
        max_window=cfg["max_window"],
        policy=cfg["policy"],
        stages=stages,
        tool_version=data["tool_version"],
        schema_version=version,
    )
