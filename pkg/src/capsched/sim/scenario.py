"""Concrete arrival scenarios for the simulator."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..model import ArrivalPattern, SystemModel

JITTER_POLICIES = ("zero", "max", "fixed", "random", "first_max")
GAP_POLICIES = ("exact", "random")


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class SourcePolicy:
    """How one external event source behaves in a scenario.

    ``jitter`` selects the release delay of each instance: ``zero``, ``max``
    (always J), ``fixed`` (``delta`` for every instance), ``random`` (uniform
    in ``[0, J]``) or ``first_max`` (J for the first instance, 0 afterwards).
    ``gaps`` is ``exact`` (bursts start exactly one outer period apart) or
    ``random`` (an extra ``[0, max_extra_gap]`` ticks per gap).
    """

    phase: int = 0
    jitter: str = "zero"
    delta: int = 0
    gaps: str = "exact"
    max_extra_gap: int = 0

    def __post_init__(self):
        if self.jitter not in JITTER_POLICIES:
            raise ScenarioError(f"unknown jitter policy {self.jitter!r}")
        if self.gaps not in GAP_POLICIES:
            raise ScenarioError(f"unknown gap policy {self.gaps!r}")
        if self.phase < 0 or self.delta < 0 or self.max_extra_gap < 0:
            raise ScenarioError("phase, delta and max_extra_gap must be >= 0")


@dataclass(frozen=True)
class Scenario:
    duration: int
    sources: Mapping[str, SourcePolicy] = field(default_factory=dict)
    seed: int = 0

    def policy(self, event_id: str) -> SourcePolicy:
        return self.sources.get(event_id, SourcePolicy())


@dataclass(frozen=True)
class Arrivals:
    """Expanded external instances of one transaction."""

    transaction: str
    arrival: np.ndarray
    release: np.ndarray


def default_duration(model: SystemModel) -> int:
    from ..analysis import hyperperiod

    deadlines = [t.deadline for t in model.transactions]
    return 2 * hyperperiod(model) + max(deadlines, default=0)


def check(model: SystemModel, scenario: Scenario) -> None:
    if scenario.duration < 0:
        raise ScenarioError("duration must be >= 0")
    externals = {t.external_event for t in model.transactions}
    for ev, pol in scenario.sources.items():
        if ev not in externals:
            raise ScenarioError(f"{ev!r} is not an external event of the model")
        J = model.event(ev).pattern.jitter
        if pol.jitter == "fixed" and pol.delta > J:
            raise ScenarioError(f"fixed delay {pol.delta} on {ev} exceeds its jitter bound {J}")


def _expand_one(pattern: ArrivalPattern, pol: SourcePolicy, duration: int,
                rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    T, t, n, J = pattern.outer_period, pattern.inner_period, pattern.burst, pattern.jitter
    if pol.phase >= duration:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    n_bursts = (duration - pol.phase) // T + 1
    gaps = np.full(n_bursts, T, dtype=np.int64)
    if pol.gaps == "random" and pol.max_extra_gap > 0:
        gaps += rng.integers(0, pol.max_extra_gap + 1, size=n_bursts)
    gaps[0] = 0
    starts = pol.phase + np.cumsum(gaps)
    arrival = (starts[:, None] + t * np.arange(n, dtype=np.int64)[None, :]).ravel()
    arrival = arrival[arrival < duration]
    if pol.jitter == "zero":
        delay = np.zeros(arrival.size, dtype=np.int64)
    elif pol.jitter == "max":
        delay = np.full(arrival.size, J, dtype=np.int64)
    elif pol.jitter == "fixed":
        delay = np.full(arrival.size, pol.delta, dtype=np.int64)
    elif pol.jitter == "random":
        delay = rng.integers(0, J + 1, size=arrival.size).astype(np.int64)
    else:
        delay = np.zeros(arrival.size, dtype=np.int64)
        if arrival.size:
            delay[0] = J
    return arrival, arrival + delay


def expand(model: SystemModel, scenario: Scenario) -> List[Arrivals]:
    """Arrival and release instants per transaction, deterministic in the seed."""
    check(model, scenario)
    out = []
    for idx, txn in enumerate(model.transactions):
        rng = np.random.default_rng([scenario.seed, idx])
        a, r = _expand_one(model.pattern(txn.id), scenario.policy(txn.external_event),
                           scenario.duration, rng)
        out.append(Arrivals(txn.id, a, r))
    return out


def random_scenario(model: SystemModel, seed: int, duration: Optional[int] = None,
                    jitter: str = "random") -> Scenario:
    """Random phases, per-source jitter policy and occasionally stretched gaps."""
    if duration is None:
        duration = default_duration(model)
    rng = np.random.default_rng(seed)
    sources: Dict[str, SourcePolicy] = {}
    for txn in model.transactions:
        p = model.pattern(txn.id)
        phase = int(rng.integers(0, p.outer_period))
        stretch = bool(rng.integers(0, 2))
        sources[txn.external_event] = SourcePolicy(
            phase=phase,
            jitter=jitter,
            gaps="random" if stretch else "exact",
            max_extra_gap=max(1, p.outer_period // 4) if stretch else 0,
        )
    return Scenario(duration, sources, seed)
