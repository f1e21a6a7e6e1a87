"""Desk-scale self-consumption scheduler for one shiftable appliance.

Places a fixed-duration appliance run on the day so as to maximize the
energy served from local PV production, Σ_t min(pv_t, base_load_t +
appliance_t), while honoring every slot forced by grounded constraints.
Exhaustive search: all start offsets for a contiguous run, all slot
combinations (small horizons only) otherwise.  Ties go to the earliest
placement in lexicographic slot order, so results are deterministic.

This is a stand-in for the real community-level optimizer: just enough
model for generated constraints to have observable consequences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

from .constraints import Constraint
from .errors import Pref2ConstraintError
from .grounding import ConflictError, GroundedAssignment, Horizon, ground, merge

MAX_COMBINATORIAL_SLOTS = 24


class SchedulerError(Pref2ConstraintError):
    pass


class InfeasibleError(SchedulerError):
    pass


class TooLargeError(SchedulerError):
    pass


@dataclass(frozen=True)
class Appliance:
    power_kw: float
    duration_slots: int
    contiguous: bool = True

    def __post_init__(self) -> None:
        if self.power_kw <= 0:
            raise SchedulerError("appliance power must be > 0 kW")
        if self.duration_slots < 1:
            raise SchedulerError("appliance duration must be >= 1 slot")


@dataclass(frozen=True)
class ScheduleProblem:
    horizon: Horizon
    pv: tuple[float, ...]
    base_load: tuple[float, ...]
    appliance: Appliance
    forced: GroundedAssignment

    def __post_init__(self) -> None:
        n = self.horizon.num_slots
        if len(self.pv) != n or len(self.base_load) != n:
            raise SchedulerError(f"pv and base_load must have {n} entries")
        if any(v < 0 for v in self.pv) or any(v < 0 for v in self.base_load):
            raise SchedulerError("pv and base_load must be non-negative")
        if self.appliance.duration_slots > n:
            raise SchedulerError("appliance duration exceeds the horizon")
        if self.forced.horizon != self.horizon:
            raise SchedulerError("forced assignment horizon differs from problem horizon")

    @property
    def appliance_kwh_per_slot(self) -> float:
        return self.appliance.power_kw * self.horizon.slot_minutes / 60.0

    @classmethod
    def from_dict(cls, data: dict) -> "ScheduleProblem":
        horizon = Horizon(int(data["slot_minutes"]))
        appliance = Appliance(
            power_kw=float(data["appliance"]["power_kw"]),
            duration_slots=int(data["appliance"]["duration_slots"]),
            contiguous=bool(data["appliance"].get("contiguous", True)),
        )
        if "forced" in data and data["forced"] is not None:
            forced = GroundedAssignment.from_dict(data["forced"])
        else:
            forced = GroundedAssignment(horizon)
        return cls(
            horizon=horizon,
            pv=tuple(float(v) for v in data["pv"]),
            base_load=tuple(float(v) for v in data["base_load"]),
            appliance=appliance,
            forced=forced,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ScheduleProblem":
        with open(path, encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))


@dataclass(frozen=True)
class Schedule:
    on_slots: frozenset[int]
    self_consumption_kwh: float
    feasible: bool

    def to_dict(self) -> dict:
        return {
            "on_slots": sorted(self.on_slots),
            "self_consumption_kwh": self.self_consumption_kwh,
            "feasible": self.feasible,
        }

    def timeline(self, horizon: Horizon) -> str:
        """Compact per-slot text strip: '#' for on, '.' for off."""
        cells = ["#" if i in self.on_slots else "." for i in range(horizon.num_slots)]
        return "".join(cells)


def self_consumption(problem: ScheduleProblem, on_slots: frozenset[int]) -> float:
    """Energy served from PV under a placement, in kWh."""
    per_slot = problem.appliance_kwh_per_slot
    total = 0.0
    for i in range(problem.horizon.num_slots):
        consumption = problem.base_load[i] + (per_slot if i in on_slots else 0.0)
        total += min(problem.pv[i], consumption)
    return total


def _respects_forced(on_slots: frozenset[int], forced: GroundedAssignment) -> bool:
    for slot, value in enumerate(forced.state):
        if value == 1 and slot not in on_slots:
            return False
        if value == 0 and slot in on_slots:
            return False
    return True


def _candidate_placements(problem: ScheduleProblem) -> list[frozenset[int]]:
    n = problem.horizon.num_slots
    duration = problem.appliance.duration_slots
    if problem.appliance.contiguous:
        return [
            frozenset(range(start, start + duration)) for start in range(n - duration + 1)
        ]
    if n > MAX_COMBINATORIAL_SLOTS:
        raise TooLargeError(
            f"non-contiguous search needs num_slots <= {MAX_COMBINATORIAL_SLOTS}, got {n}"
        )
    return [frozenset(combo) for combo in combinations(range(n), duration)]


def solve(problem: ScheduleProblem) -> Schedule:
    """Best feasible placement by exhaustive search, earliest-slots tie-break."""
    must_on = problem.forced.forced_state_slots(1)
    if len(must_on) > problem.appliance.duration_slots:
        raise InfeasibleError(
            f"{len(must_on)} slots are forced on but the appliance only runs "
            f"for {problem.appliance.duration_slots}"
        )
    best: tuple[float, list[int]] | None = None
    best_slots: frozenset[int] | None = None
    for placement in _candidate_placements(problem):
        if not _respects_forced(placement, problem.forced):
            continue
        score = self_consumption(problem, placement)
        key = (-score, sorted(placement))
        if best is None or key < best:
            best = key
            best_slots = placement
    if best_slots is None:
        raise InfeasibleError("no placement satisfies the forced slots")
    return Schedule(
        on_slots=best_slots,
        self_consumption_kwh=-best[0],
        feasible=True,
    )


@dataclass(frozen=True)
class FunctionalCheck:
    passed: bool
    reason: str | None = None
    schedule: Schedule | None = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "reason": self.reason,
            "schedule": self.schedule.to_dict() if self.schedule else None,
        }


def check_functional(
    gold: list[Constraint],
    generated: list[Constraint],
    problem: ScheduleProblem,
) -> FunctionalCheck:
    """Do the generated constraints behave like the gold ones on this problem?

    Solves the problem under the generated constraints (merged with the
    problem's own forced slots) and checks that the resulting schedule
    satisfies the gold state forcing, and that every gold temperature
    setting is reproduced by the generated grounding.  Grounding conflicts
    and infeasibility come back as a failed check with a reason, not an
    exception.
    """
    try:
        gold_grounded = ground(gold, problem.horizon)
    except ConflictError as exc:
        return FunctionalCheck(False, f"gold constraints conflict: {exc}")
    try:
        generated_grounded = ground(generated, problem.horizon)
    except ConflictError as exc:
        return FunctionalCheck(False, f"generated constraints conflict: {exc}")

    try:
        forced = merge(problem.forced, generated_grounded)
    except ConflictError as exc:
        return FunctionalCheck(False, f"generated constraints clash with the problem: {exc}")
    constrained = ScheduleProblem(
        horizon=problem.horizon,
        pv=problem.pv,
        base_load=problem.base_load,
        appliance=problem.appliance,
        forced=forced,
    )
    try:
        schedule = solve(constrained)
    except InfeasibleError as exc:
        return FunctionalCheck(False, f"infeasible under generated constraints: {exc}")

    for slot, value in enumerate(gold_grounded.state):
        if value == 1 and slot not in schedule.on_slots:
            return FunctionalCheck(
                False, f"slot {slot} must be on per gold constraints", schedule
            )
        if value == 0 and slot in schedule.on_slots:
            return FunctionalCheck(
                False, f"slot {slot} must be off per gold constraints", schedule
            )
    for slot, degrees in enumerate(gold_grounded.temperature):
        if degrees is None:
            continue
        if generated_grounded.temperature[slot] != degrees:
            return FunctionalCheck(
                False,
                f"slot {slot} must hold {degrees} °C per gold constraints",
                schedule,
            )
    return FunctionalCheck(True, None, schedule)
