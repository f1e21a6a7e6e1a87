"""Formal appliance constraints: AST, strict parser, renderer, lenient extractor.

A constraint assigns a value to a decision variable and quantifies the
assignment over a time condition::

    s_t = 1 ∀ t                     appliance on all day
    s_t = 0 ∀ 12:00 ≤ t ≤ 15:00     appliance off inside an interval
    s_t = 1 ∀ t ≥ 22:00             appliance on from a time onward
    h_t = 19.5 ∀ t ≤ 07:00          desired temperature until a time

Two entry points with different strictness:

* :func:`parse_constraint` accepts a single constraint string and is meant
  for curated gold data.  It reports syntax errors with a character
  position.
* :func:`extract_constraints` scans raw model output (prose, markdown,
  truncated text) and never fails; rejected candidates come back as
  :class:`ExtractionIssue` values.

Both accept "∀"/"forall", "≤"/"<=", "≥"/">=" and the time literals
``H``, ``H:MM``, ``H.MM``, ``H,MM`` (dot and comma are common Italian
minute separators).  The canonical rendering uses "∀", "≤"/"≥" and
zero-padded ``HH:MM``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .errors import Pref2ConstraintError


class ConstraintError(Pref2ConstraintError):
    """Base class for constraint construction and parse errors."""


class ConstraintSyntaxError(ConstraintError):
    """Input does not conform to the constraint grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class PairingError(ConstraintError):
    """Variable and value kinds do not fit together (e.g. s_t with 2)."""


class RangeError(ConstraintError):
    """A time or temperature literal is outside its allowed range."""


@dataclass(frozen=True)
class TemperatureBounds:
    """Allowed span for desired temperatures, in °C."""

    min_c: float = 10.0
    max_c: float = 60.0

    def __post_init__(self) -> None:
        if not self.min_c < self.max_c:
            raise RangeError(f"empty temperature bounds [{self.min_c}, {self.max_c}]")


DEFAULT_BOUNDS = TemperatureBounds()

MINUTES_PER_DAY = 1440


@dataclass(frozen=True, order=True)
class TimePoint:
    """A time of day in minutes since midnight; 1440 means end-of-day 24:00."""

    minutes: int

    def __post_init__(self) -> None:
        if not 0 <= self.minutes <= MINUTES_PER_DAY:
            raise RangeError(f"time of day out of range: {self.minutes} minutes")

    @classmethod
    def of(cls, hour: int, minute: int = 0) -> "TimePoint":
        return cls(hour * 60 + minute)

    def render(self) -> str:
        return f"{self.minutes // 60:02d}:{self.minutes % 60:02d}"


@dataclass(frozen=True)
class All:
    """The assignment holds for every t."""


@dataclass(frozen=True)
class Range:
    """The assignment holds for start ≤ t ≤ end."""

    start: TimePoint
    end: TimePoint

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise RangeError(
                f"time range must satisfy start < end, got "
                f"{self.start.render()} .. {self.end.render()}"
            )


@dataclass(frozen=True)
class From:
    """The assignment holds for t ≥ start."""

    start: TimePoint


@dataclass(frozen=True)
class Until:
    """The assignment holds for t ≤ end."""

    end: TimePoint


TimeCondition = All | Range | From | Until


class Variable(Enum):
    STATE = "s_t"
    TEMPERATURE = "h_t"


@dataclass(frozen=True)
class Binary:
    """On/off value for the appliance state variable."""

    value: int

    def __post_init__(self) -> None:
        if self.value not in (0, 1):
            raise PairingError(f"state value must be 0 or 1, got {self.value}")


@dataclass(frozen=True)
class Degrees:
    """Desired temperature in °C."""

    value: float

    def render(self) -> str:
        if float(self.value).is_integer():
            return str(int(self.value))
        return repr(float(self.value))


ConstraintValue = Binary | Degrees


@dataclass(frozen=True)
class Constraint:
    """One formal constraint: variable, assigned value, time condition."""

    variable: Variable
    value: ConstraintValue
    condition: TimeCondition

    def __post_init__(self) -> None:
        if self.variable is Variable.STATE and not isinstance(self.value, Binary):
            raise PairingError("s_t only takes the binary values 0 or 1")
        if self.variable is Variable.TEMPERATURE and not isinstance(self.value, Degrees):
            raise PairingError("h_t only takes temperature values in °C")


def check_bounds(constraint: Constraint, bounds: TemperatureBounds = DEFAULT_BOUNDS) -> None:
    """Raise RangeError if a temperature assignment falls outside *bounds*."""
    if isinstance(constraint.value, Degrees):
        v = constraint.value.value
        if not bounds.min_c <= v <= bounds.max_c:
            raise RangeError(
                f"temperature {v} outside allowed range "
                f"[{bounds.min_c}, {bounds.max_c}]"
            )


# Token patterns shared by the strict parser and the lenient extractor.
# Hours take one or two digits, minutes exactly two; "24:00" is the only
# valid hour-24 literal.
_TIME = r"\d{1,2}(?:[:.,]\d{2})?"
_NUMBER = r"\d+(?:[.,]\d+)?"
_LE = r"(?:≤|<=)"
_GE = r"(?:≥|>=)"

_TIME_RE = re.compile(_TIME)
_NUMBER_RE = re.compile(_NUMBER)
_VAR_RE = re.compile(r"[sh]_t")
_EQ_RE = re.compile(r"=")
_QUANT_STRICT_RE = re.compile(r"∀|forall")
_LE_RE = re.compile(_LE)
_CMP_RE = re.compile(rf"{_LE}|{_GE}")
_T_RE = re.compile(r"t(?![A-Za-z0-9_])")
_WS_RE = re.compile(r"\s*")


def _parse_time_literal(text: str, position: int) -> TimePoint:
    """Convert a matched time literal (H, H:MM, H.MM, H,MM) to a TimePoint."""
    if ":" in text or "." in text or "," in text:
        hour_part, minute_part = re.split(r"[:.,]", text)
        hour, minute = int(hour_part), int(minute_part)
    else:
        hour, minute = int(text), 0
    if minute > 59:
        raise ConstraintSyntaxError(f"invalid minutes in time literal '{text}'", position)
    total = hour * 60 + minute
    if total > MINUTES_PER_DAY:
        raise RangeError(f"time literal '{text}' is past 24:00")
    return TimePoint(total)


def _parse_value_literal(variable: Variable, text: str) -> ConstraintValue:
    if variable is Variable.STATE:
        if text not in ("0", "1"):
            raise PairingError(f"s_t only takes the binary values 0 or 1, got '{text}'")
        return Binary(int(text))
    return Degrees(float(text.replace(",", ".")))


class _Cursor:
    """Minimal scanning cursor: match expected token patterns at a position."""

    def __init__(self, text: str, pos: int = 0):
        self.text = text
        self.pos = pos

    def skip_ws(self) -> None:
        self.pos = _WS_RE.match(self.text, self.pos).end()

    def take(self, pattern: re.Pattern[str]) -> str | None:
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.pos = m.end()
        return m.group()

    def expect(self, pattern: re.Pattern[str], what: str) -> str:
        token = self.take(pattern)
        if token is None:
            raise ConstraintSyntaxError(f"expected {what}", self.pos)
        return token

    def at_end(self) -> bool:
        return self.pos >= len(self.text)


def _parse_condition(cur: _Cursor) -> TimeCondition:
    """COND ::= TIME LE t LE TIME | t GE TIME | t LE TIME | t"""
    cur.skip_ws()
    start_pos = cur.pos
    if cur.take(_T_RE) is not None:
        cur.skip_ws()
        op = cur.take(_CMP_RE)
        if op is None:
            return All()
        cur.skip_ws()
        time_pos = cur.pos
        literal = cur.expect(_TIME_RE, "a time literal")
        point = _parse_time_literal(literal, time_pos)
        if op in ("≥", ">="):
            return From(point)
        return Until(point)
    first_pos = cur.pos
    first = cur.take(_TIME_RE)
    if first is None:
        raise ConstraintSyntaxError("expected 't' or a time literal", start_pos)
    start = _parse_time_literal(first, first_pos)
    cur.skip_ws()
    cur.expect(_LE_RE, "'≤' or '<='")
    cur.skip_ws()
    cur.expect(_T_RE, "'t'")
    cur.skip_ws()
    cur.expect(_LE_RE, "'≤' or '<='")
    cur.skip_ws()
    second_pos = cur.pos
    second = cur.expect(_TIME_RE, "a time literal")
    return Range(start, _parse_time_literal(second, second_pos))


def parse_constraint(text: str, bounds: TemperatureBounds = DEFAULT_BOUNDS) -> Constraint:
    """Parse a single constraint string under the strict grammar.

    Raises ConstraintSyntaxError (with position), PairingError, or
    RangeError.  Whitespace between tokens is optional.
    """
    cur = _Cursor(text)
    cur.skip_ws()
    var_token = cur.expect(_VAR_RE, "'s_t' or 'h_t'")
    variable = Variable(var_token)
    cur.skip_ws()
    cur.expect(_EQ_RE, "'='")
    cur.skip_ws()
    value_token = cur.expect(_NUMBER_RE, "a numeric value")
    value = _parse_value_literal(variable, value_token)
    cur.skip_ws()
    cur.expect(_QUANT_STRICT_RE, "'∀' or 'forall'")
    condition = _parse_condition(cur)
    cur.skip_ws()
    if not cur.at_end():
        raise ConstraintSyntaxError("unexpected trailing text", cur.pos)
    constraint = Constraint(variable, value, condition)
    check_bounds(constraint, bounds)
    return constraint


def render_condition(condition: TimeCondition) -> str:
    if isinstance(condition, All):
        return "t"
    if isinstance(condition, Range):
        return f"{condition.start.render()} ≤ t ≤ {condition.end.render()}"
    if isinstance(condition, From):
        return f"t ≥ {condition.start.render()}"
    return f"t ≤ {condition.end.render()}"


def render_constraint(constraint: Constraint) -> str:
    """Emit the canonical form: '∀', '≤'/'≥', zero-padded HH:MM, single spaces."""
    if isinstance(constraint.value, Binary):
        value = str(constraint.value.value)
    else:
        value = constraint.value.render()
    return f"{constraint.variable.value} = {value} ∀ {render_condition(constraint.condition)}"


def canonicalize(text: str, bounds: TemperatureBounds = DEFAULT_BOUNDS) -> str:
    """Normalize a parsable constraint string to its canonical rendering."""
    return render_constraint(parse_constraint(text, bounds))


class IssueKind(Enum):
    TRUNCATED = "truncated"
    MALFORMED = "malformed"
    PAIRING = "pairing"
    RANGE = "range"


@dataclass(frozen=True)
class ExtractionIssue:
    """One rejected constraint candidate found in raw model output."""

    start: int
    end: int
    text: str
    kind: IssueKind
    detail: str


# Lenient candidate: same grammar, but any quantifier spelling and with the
# condition alternatives ordered longest-first so a bare 't' never steals
# the 't' of 't ≤ TIME'.
_LENIENT_RE = re.compile(
    rf"""
    (?P<var>[sh]_t) \s* = \s* (?P<val>{_NUMBER}) \s*
    (?:∀|forall|for\s+all) \s*
    (?P<cond>
        (?P<r1>{_TIME}) \s* {_LE} \s* t \s* {_LE} \s* (?P<r2>{_TIME})
      | t \s* {_GE} \s* (?P<f1>{_TIME})
      | t \s* {_LE} \s* (?P<u1>{_TIME})
      | t (?![A-Za-z0-9_])
    )
    """,
    re.VERBOSE | re.IGNORECASE,
)

# Prefix of a constraint that runs into end-of-text: used to tell apart
# generation truncation (e.g. the 30-token cap) from plain noise.
_TRUNCATED_RE = re.compile(
    rf"""
    [sh]_t \s* (?: = \s* (?:{_NUMBER} \s*
        (?:(?:∀|forall|for\s+all) \s*
            (?: {_TIME} \s* {_LE} \s* t \s* (?:{_LE} \s*)?
              | t \s* (?:{_LE}|{_GE}) \s*
              | f(?:o(?:r(?:a(?:l)?)?)?)?
            )?
        )?
    )?)? \s* $
    """,
    re.VERBOSE | re.IGNORECASE,
)

_ANCHOR_RE = re.compile(r"[sh]_t\s*=")


def _constraint_from_match(m: re.Match[str], bounds: TemperatureBounds) -> Constraint:
    variable = Variable(m.group("var").lower())
    value = _parse_value_literal(variable, m.group("val"))
    if m.group("r1") is not None:
        start = _parse_time_literal(m.group("r1"), m.start("r1"))
        end = _parse_time_literal(m.group("r2"), m.start("r2"))
        condition: TimeCondition = Range(start, end)
    elif m.group("f1") is not None:
        condition = From(_parse_time_literal(m.group("f1"), m.start("f1")))
    elif m.group("u1") is not None:
        condition = Until(_parse_time_literal(m.group("u1"), m.start("u1")))
    else:
        condition = All()
    constraint = Constraint(variable, value, condition)
    check_bounds(constraint, bounds)
    return constraint


def extract_constraints(
    model_output: str, bounds: TemperatureBounds = DEFAULT_BOUNDS
) -> tuple[list[Constraint], list[ExtractionIssue]]:
    """Scan raw model output for constraints; total, never raises.

    Returns every successfully parsed constraint in order of appearance,
    plus one ExtractionIssue per rejected candidate (truncated, malformed,
    bad pairing, or out-of-range literal).
    """
    constraints: list[Constraint] = []
    issues: list[ExtractionIssue] = []
    pos = 0
    while (anchor := _ANCHOR_RE.search(model_output, pos)) is not None:
        start = anchor.start()
        full = _LENIENT_RE.match(model_output, start)
        if full is not None:
            try:
                constraints.append(_constraint_from_match(full, bounds))
            except PairingError as exc:
                issues.append(
                    ExtractionIssue(start, full.end(), full.group(), IssueKind.PAIRING, str(exc))
                )
            except RangeError as exc:
                issues.append(
                    ExtractionIssue(start, full.end(), full.group(), IssueKind.RANGE, str(exc))
                )
            except ConstraintSyntaxError as exc:
                issues.append(
                    ExtractionIssue(start, full.end(), full.group(), IssueKind.MALFORMED, str(exc))
                )
            pos = full.end()
            continue
        if _TRUNCATED_RE.match(model_output, start) is not None:
            snippet = model_output[start:]
            issues.append(
                ExtractionIssue(
                    start,
                    len(model_output),
                    snippet,
                    IssueKind.TRUNCATED,
                    "candidate cut off at end of output",
                )
            )
            pos = len(model_output)
            continue
        snippet = model_output[start : start + 40]
        issues.append(
            ExtractionIssue(
                start,
                start + len(snippet),
                snippet,
                IssueKind.MALFORMED,
                "candidate does not match the constraint grammar",
            )
        )
        pos = anchor.end()
    return constraints, issues
