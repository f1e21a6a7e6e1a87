"""Expand constraints into per-slot forced values over a discretized day.

The day is cut into equal slots; slot ``i`` covers the half-open interval
``[i * slot_minutes, (i + 1) * slot_minutes)`` in minutes since midnight.
A constraint forces a slot only when the slot is *fully contained* in the
constraint's time window, so "until 08:30" never touches the 08:30-09:00
slot.  Grounded assignments are the hand-off format for the external
optimizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from .constraints import All, Constraint, From, Range, TimeCondition, Until, Variable
from .errors import Pref2ConstraintError

MINUTES_PER_DAY = 1440
ALLOWED_SLOT_MINUTES = (1, 5, 15, 30, 60)


class GroundingError(Pref2ConstraintError):
    pass


@dataclass(frozen=True)
class SlotConflict:
    slot: int
    variable: str  # "state" | "temperature"
    existing: float
    incoming: float


class ConflictError(GroundingError):
    """Two constraints force different values of one variable on a slot."""

    def __init__(self, conflicts: list[SlotConflict]):
        self.conflicts = conflicts
        shown = ", ".join(
            f"slot {c.slot} ({c.variable}: {c.existing} vs {c.incoming})"
            for c in conflicts[:5]
        )
        suffix = "" if len(conflicts) <= 5 else f", … {len(conflicts) - 5} more"
        super().__init__(f"{len(conflicts)} conflicting slot(s): {shown}{suffix}")


class HorizonMismatchError(GroundingError):
    pass


@dataclass(frozen=True)
class Horizon:
    """A full day divided into 1440 / slot_minutes equal slots."""

    slot_minutes: int = 30

    def __post_init__(self) -> None:
        if self.slot_minutes not in ALLOWED_SLOT_MINUTES:
            raise GroundingError(
                f"slot_minutes must be one of {ALLOWED_SLOT_MINUTES}, got {self.slot_minutes}"
            )

    @property
    def num_slots(self) -> int:
        return MINUTES_PER_DAY // self.slot_minutes

    def slot_interval(self, slot: int) -> tuple[int, int]:
        """Minute interval [start, end) covered by a slot."""
        return slot * self.slot_minutes, (slot + 1) * self.slot_minutes


def condition_window(condition: TimeCondition) -> tuple[int, int]:
    """Closed minute window [lo, hi] over which a condition holds."""
    if isinstance(condition, All):
        return 0, MINUTES_PER_DAY
    if isinstance(condition, Range):
        return condition.start.minutes, condition.end.minutes
    if isinstance(condition, From):
        return condition.start.minutes, MINUTES_PER_DAY
    if isinstance(condition, Until):
        return 0, condition.end.minutes
    raise TypeError(f"unknown condition {condition!r}")


@dataclass
class GroundedAssignment:
    """Per-slot forced values; None marks a slot left free for the optimizer."""

    horizon: Horizon
    state: list[int | None] = field(default_factory=list)
    temperature: list[float | None] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = self.horizon.num_slots
        if not self.state:
            self.state = [None] * n
        if not self.temperature:
            self.temperature = [None] * n
        if len(self.state) != n or len(self.temperature) != n:
            raise GroundingError(
                f"assignment arrays must have {n} entries for {self.horizon.slot_minutes}-minute slots"
            )

    def forced_state_slots(self, value: int) -> set[int]:
        return {i for i, v in enumerate(self.state) if v == value}

    def is_empty(self) -> bool:
        return all(v is None for v in self.state) and all(
            v is None for v in self.temperature
        )

    def to_dict(self) -> dict:
        return {
            "slot_minutes": self.horizon.slot_minutes,
            "state": list(self.state),
            "temperature": list(self.temperature),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "GroundedAssignment":
        horizon = Horizon(int(data["slot_minutes"]))
        return cls(
            horizon,
            [None if v is None else int(v) for v in data["state"]],
            [None if v is None else float(v) for v in data["temperature"]],
        )


def _slot_range(window: tuple[int, int], horizon: Horizon) -> range:
    """Indices of slots fully contained in the closed minute window."""
    lo, hi = window
    m = horizon.slot_minutes
    first = -(-lo // m)  # ceil division
    last = hi // m - 1
    return range(max(first, 0), min(last, horizon.num_slots - 1) + 1)


def ground(constraints: Iterable[Constraint], horizon: Horizon) -> GroundedAssignment:
    """Apply constraints slot-wise; collect every conflicting slot before failing."""
    assignment = GroundedAssignment(horizon)
    conflicts: list[SlotConflict] = []
    for constraint in constraints:
        slots = _slot_range(condition_window(constraint.condition), horizon)
        if constraint.variable is Variable.STATE:
            value = constraint.value.value
            for i in slots:
                current = assignment.state[i]
                if current is None:
                    assignment.state[i] = value
                elif current != value:
                    conflicts.append(SlotConflict(i, "state", current, value))
        else:
            degrees = constraint.value.value
            for i in slots:
                current = assignment.temperature[i]
                if current is None:
                    assignment.temperature[i] = degrees
                elif current != degrees:
                    conflicts.append(SlotConflict(i, "temperature", current, degrees))
    if conflicts:
        raise ConflictError(conflicts)
    return assignment


def merge(a: GroundedAssignment, b: GroundedAssignment) -> GroundedAssignment:
    """Union of two assignments on the same horizon; conflict-free merges commute."""
    if a.horizon != b.horizon:
        raise HorizonMismatchError(
            f"cannot merge {a.horizon.slot_minutes}-minute and "
            f"{b.horizon.slot_minutes}-minute assignments"
        )
    merged = GroundedAssignment(a.horizon, list(a.state), list(a.temperature))
    conflicts: list[SlotConflict] = []
    for i, value in enumerate(b.state):
        if value is None:
            continue
        if merged.state[i] is None:
            merged.state[i] = value
        elif merged.state[i] != value:
            conflicts.append(SlotConflict(i, "state", merged.state[i], value))
    for i, degrees in enumerate(b.temperature):
        if degrees is None:
            continue
        if merged.temperature[i] is None:
            merged.temperature[i] = degrees
        elif merged.temperature[i] != degrees:
            conflicts.append(SlotConflict(i, "temperature", merged.temperature[i], degrees))
    if conflicts:
        raise ConflictError(conflicts)
    return merged
