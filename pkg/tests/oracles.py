"""Independent brute-force oracles the tests check the library against.

Everything here is written the naive way on purpose — per-slot loops,
list-based clipping, full enumeration — and must not share code with the
implementations under test.
"""

from __future__ import annotations

from itertools import combinations


def chrf_oracle(reference: str, hypothesis: str, beta: float = 1.0, max_n: int = 6) -> float:
    """Slow chrF: list-removal clipping, skip orders absent from the side's string."""
    ref = "".join(reference.split())
    hyp = "".join(hypothesis.split())
    precisions: list[float] = []
    recalls: list[float] = []
    for n in range(1, max_n + 1):
        ref_grams = [ref[i : i + n] for i in range(len(ref) - n + 1)]
        hyp_grams = [hyp[i : i + n] for i in range(len(hyp) - n + 1)]
        pool = list(ref_grams)
        matched = 0
        for gram in hyp_grams:
            if gram in pool:
                pool.remove(gram)
                matched += 1
        if hyp_grams:
            precisions.append(matched / len(hyp_grams))
        if ref_grams:
            recalls.append(matched / len(ref_grams))
    chr_p = sum(precisions) / len(precisions) if precisions else 0.0
    chr_r = sum(recalls) / len(recalls) if recalls else 0.0
    if chr_p == 0.0 and chr_r == 0.0:
        return 0.0
    return 100.0 * (1 + beta**2) * chr_p * chr_r / (chr_r + beta**2 * chr_p)


def _window_minutes(condition) -> tuple[int, int]:
    from pref2constraint.constraints import All, From, Range, Until

    if isinstance(condition, All):
        return 0, 1440
    if isinstance(condition, Range):
        return condition.start.minutes, condition.end.minutes
    if isinstance(condition, From):
        return condition.start.minutes, 1440
    if isinstance(condition, Until):
        return 0, condition.end.minutes
    raise AssertionError(condition)


def ground_oracle(constraints, slot_minutes: int):
    """Per-slot containment check for every slot and constraint.

    Returns (state, temperature, conflicts) where conflicts is a list of
    (slot index, variable name) pairs in first-seen order.
    """
    from pref2constraint.constraints import Variable

    num_slots = 1440 // slot_minutes
    state: list[int | None] = [None] * num_slots
    temperature: list[float | None] = [None] * num_slots
    conflicts: list[tuple[int, str]] = []
    for constraint in constraints:
        lo, hi = _window_minutes(constraint.condition)
        for slot in range(num_slots):
            slot_start = slot * slot_minutes
            slot_end = slot_start + slot_minutes
            if not (lo <= slot_start and slot_end <= hi):
                continue
            if constraint.variable is Variable.STATE:
                value = constraint.value.value
                if state[slot] is None:
                    state[slot] = value
                elif state[slot] != value:
                    conflicts.append((slot, "state"))
            else:
                value = constraint.value.value
                if temperature[slot] is None:
                    temperature[slot] = value
                elif temperature[slot] != value:
                    conflicts.append((slot, "temperature"))
    return state, temperature, conflicts


def schedule_oracle(problem):
    """Enumerate every admissible placement and keep the best one.

    Considers all contiguous windows (or all slot combinations for a
    non-contiguous appliance), filters by the forced slots with explicit
    per-slot checks, scores with a separate energy loop, and breaks ties
    toward the lexicographically smallest sorted slot list.  Returns None
    when nothing is admissible.
    """
    n = problem.horizon.num_slots
    duration = problem.appliance.duration_slots
    appliance_kwh = problem.appliance.power_kw * problem.horizon.slot_minutes / 60.0

    if problem.appliance.contiguous:
        candidates = [
            list(range(start, start + duration)) for start in range(0, n - duration + 1)
        ]
    else:
        candidates = [list(combo) for combo in combinations(range(n), duration)]

    def admissible(slots: list[int]) -> bool:
        for slot in range(n):
            forced = problem.forced.state[slot]
            if forced == 1 and slot not in slots:
                return False
            if forced == 0 and slot in slots:
                return False
        return True

    def score(slots: list[int]) -> float:
        total = 0.0
        for slot in range(n):
            used = problem.base_load[slot]
            if slot in slots:
                used += appliance_kwh
            total += min(problem.pv[slot], used)
        return total

    best = None
    best_score = None
    for slots in candidates:
        if not admissible(slots):
            continue
        value = score(slots)
        if best is None or value > best_score or (value == best_score and slots < best):
            best = slots
            best_score = value
    if best is None:
        return None
    return sorted(best), best_score
