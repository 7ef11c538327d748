"""Schedulability analysis for run-to-completion, fixed-priority transaction models.

Models are written in the ``.rts`` text format (:mod:`capsched.dsl`),
checked structurally (:func:`capsched.model.validate`), reduced to jobs and
chains (:mod:`capsched.derive`) and analysed for worst-case end-to-end
response times (:mod:`capsched.analysis`).  :mod:`capsched.sim` replays
concrete scenarios as an independent oracle.
"""

__version__ = "0.1.0"

from .analysis import AnalysisConfig, analyze, end_to_end_wcrt, release_count, utilization  # noqa: E402
from .dsl import ParseError, load, parse, render  # noqa: E402
from .model import SystemModel, validate  # noqa: E402

__all__ = [
    "AnalysisConfig", "ParseError", "SystemModel", "analyze", "end_to_end_wcrt", "load", "parse",
    "release_count", "render", "utilization", "validate",
]
