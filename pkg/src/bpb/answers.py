"""Typed answers, rule-based answer computation, and output constraints.

Four of the rewrite kinds admit a closed-form answer computed from the
original example alone (no reading model involved):

* ``APPEND_BOOL``   evaluate the appended comparison against the original
  numeric answer.
* ``REPLACE_ARITH`` when the original answer is a sum (difference) of a
  unique pair of numbers found in the example text, answer with that pair's
  difference (sum).
* ``REPLACE_BOOL``  "are both true?" = yes entails "are both false?" = no;
  a "no" leaves the flipped question undetermined.
* ``REPLACE_COMP``  the flipped comparison selects the other of the two
  entities named by the question.

When no rule fires, the caller falls back to executing the rewritten
decomposition step by step. Independently of answers, each rewrite kind may
impose a *constraint* on any prediction (numeric-typed, yes/no-typed, or a
bound relative to the original answer); constraints are checkable even when
the exact new answer is unknown.
"""

from __future__ import annotations

import calendar
import math
import re
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Sequence

from .lexicon import NUMBER_WORDS
from .perturb import (
    ComparisonCondition,
    NotApplicable,
    PerturbationKind,
    RewriteCandidate,
)
from .qdmr import OperatorKind
from .textnorm import format_number, normalize_text, normalize_tokens, parse_number


class AnswerType(str, Enum):
    NUMBER = "NUMBER"
    SPAN = "SPAN"
    SPANS = "SPANS"
    YESNO = "YESNO"
    DATE = "DATE"


@dataclass(frozen=True)
class DateValue:
    """A possibly partial calendar date."""

    day: int | None = None
    month: int | None = None
    year: int | None = None

    def __post_init__(self) -> None:
        if self.day is None and self.month is None and self.year is None:
            raise ValueError("a date needs at least one of day/month/year")
        if self.day is not None and not 1 <= self.day <= 31:
            raise ValueError(f"day out of range: {self.day}")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    def as_text(self) -> str:
        parts: list[str] = []
        if self.day is not None:
            parts.append(str(self.day))
        if self.month is not None:
            parts.append(calendar.month_name[self.month])
        if self.year is not None:
            parts.append(str(self.year))
        return " ".join(parts)


@dataclass(frozen=True)
class Answer:
    """A typed answer value.

    ``value`` holds a float (NUMBER), str (SPAN), tuple[str, ...] (SPANS),
    bool (YESNO), or DateValue (DATE). ``unit`` is only meaningful for
    NUMBER answers and is excluded from scoring.
    """

    type: AnswerType
    value: object
    unit: str | None = None

    def __post_init__(self) -> None:
        if self.unit is not None and self.type is not AnswerType.NUMBER:
            raise ValueError("only numeric answers carry a unit")
        if self.type is AnswerType.NUMBER:
            if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
                raise ValueError("NUMBER answers hold a number")
            if not math.isfinite(float(self.value)):
                raise ValueError("NUMBER answers must be finite")
            object.__setattr__(self, "value", float(self.value))
        elif self.type is AnswerType.SPAN:
            if not isinstance(self.value, str) or not self.value.strip():
                raise ValueError("SPAN answers hold non-empty text")
        elif self.type is AnswerType.SPANS:
            if (
                not isinstance(self.value, tuple)
                or not self.value
                or not all(isinstance(s, str) and s.strip() for s in self.value)
            ):
                raise ValueError("SPANS answers hold a non-empty tuple of non-empty texts")
        elif self.type is AnswerType.YESNO:
            if not isinstance(self.value, bool):
                raise ValueError("YESNO answers hold a bool")
        elif self.type is AnswerType.DATE:
            if not isinstance(self.value, DateValue):
                raise ValueError("DATE answers hold a DateValue")

    # -- constructors ------------------------------------------------------
    @classmethod
    def number(cls, value: float | int, unit: str | None = None) -> Answer:
        return cls(type=AnswerType.NUMBER, value=value, unit=unit)

    @classmethod
    def span(cls, text: str) -> Answer:
        return cls(type=AnswerType.SPAN, value=text)

    @classmethod
    def spans(cls, items: Sequence[str]) -> Answer:
        items = tuple(items)
        if len(items) == 1:
            return cls.span(items[0])
        return cls(type=AnswerType.SPANS, value=items)

    @classmethod
    def yesno(cls, flag: bool) -> Answer:
        return cls(type=AnswerType.YESNO, value=flag)

    @classmethod
    def date(
        cls, day: int | None = None, month: int | None = None, year: int | None = None
    ) -> Answer:
        return cls(type=AnswerType.DATE, value=DateValue(day=day, month=month, year=year))

    # -- views -------------------------------------------------------------
    def as_text(self) -> str:
        """Canonical surface form (units omitted)."""
        if self.type is AnswerType.NUMBER:
            return format_number(self.value)  # type: ignore[arg-type]
        if self.type is AnswerType.SPAN:
            return str(self.value)
        if self.type is AnswerType.SPANS:
            return ", ".join(self.value)  # type: ignore[arg-type]
        if self.type is AnswerType.YESNO:
            return "yes" if self.value else "no"
        return self.value.as_text()  # type: ignore[union-attr]

    def as_dict(self) -> dict:
        out: dict = {"type": self.type.value}
        if self.type is AnswerType.DATE:
            date: DateValue = self.value  # type: ignore[assignment]
            out["value"] = {"day": date.day, "month": date.month, "year": date.year}
        elif self.type is AnswerType.SPANS:
            out["value"] = list(self.value)  # type: ignore[arg-type]
        else:
            out["value"] = self.value
        if self.unit is not None:
            out["unit"] = self.unit
        return out

    @classmethod
    def from_dict(cls, data: dict) -> Answer:
        kind = AnswerType(data["type"])
        value = data["value"]
        if kind is AnswerType.DATE:
            return cls.date(
                day=value.get("day"), month=value.get("month"), year=value.get("year")
            )
        if kind is AnswerType.SPANS:
            return cls(type=kind, value=tuple(value))
        return cls(type=kind, value=value, unit=data.get("unit"))


def numeric_value(answer: Answer | None) -> float | None:
    """The numeric reading of an answer, if it has one.

    NUMBER answers yield their value; SPAN (or single-item SPANS) answers
    yield a value when the whole span parses as a number.
    """
    if answer is None:
        return None
    if answer.type is AnswerType.NUMBER:
        return float(answer.value)  # type: ignore[arg-type]
    if answer.type is AnswerType.SPAN:
        return parse_number(str(answer.value))
    if answer.type is AnswerType.SPANS and len(answer.value) == 1:  # type: ignore[arg-type]
        return parse_number(answer.value[0])  # type: ignore[index]
    return None


# --------------------------------------------------------------------------
# Number mining
# --------------------------------------------------------------------------

_WORD_ALTERNATION = "|".join(sorted(NUMBER_WORDS, key=len, reverse=True))
_NUMBER_TOKEN_RE = re.compile(
    rf"\d{{1,3}}(?:,\d{{3}})+(?:\.\d+)?|\d+(?:\.\d+)?|\b(?:{_WORD_ALTERNATION})\b",
    re.IGNORECASE,
)


def extract_numbers(text: str) -> list[float]:
    """All numbers in ``text``, in order: digits, grouped digits, decimals,
    and the spelled-out words one..twenty."""
    values: list[float] = []
    for m in _NUMBER_TOKEN_RE.finditer(text):
        token = m.group(0)
        word = NUMBER_WORDS.get(token.lower())
        if word is not None:
            values.append(float(word))
            continue
        parsed = parse_number(token)
        if parsed is not None:
            values.append(parsed)
    return values


# --------------------------------------------------------------------------
# Answer rules
# --------------------------------------------------------------------------


class ArithmeticFlip(str, Enum):
    SUM_TO_DIFF = "SUM_TO_DIFF"
    DIFF_TO_SUM = "DIFF_TO_SUM"


_MIN_FLIP_ANSWER = 10.0
_PAIR_TOLERANCE = 1e-6


def answer_append_bool(condition: ComparisonCondition, original_value: float | int) -> Answer:
    """Evaluate the appended comparison against the original numeric answer."""
    if isinstance(original_value, bool) or not isinstance(original_value, (int, float)):
        raise NotApplicable("appended comparisons need a numeric original answer")
    return Answer.yesno(condition.operator.holds(float(original_value), float(condition.value)))


def _dedup_values(numbers: Sequence[float]) -> list[float]:
    kept: list[float] = []
    for v in numbers:
        if not any(math.isclose(v, k, abs_tol=_PAIR_TOLERANCE) for k in kept):
            kept.append(v)
    return sorted(kept)


def answer_replace_arith(
    numbers: Sequence[float], original_value: float, flip: ArithmeticFlip
) -> Answer | None:
    """Answer a sum<->difference flip from the numbers in the example text.

    The original answer must be at least 10 (small values match too many
    spurious pairs) and must be produced by exactly one unordered pair of
    distinct values; duplicated values are considered once. Returns None
    whenever the pair is missing or ambiguous.
    """
    if original_value is None or not math.isfinite(float(original_value)):
        return None
    a = float(original_value)
    if a < _MIN_FLIP_ANSWER:
        return None
    matches: list[tuple[float, float]] = []
    for x, y in combinations(_dedup_values(numbers), 2):
        if flip is ArithmeticFlip.SUM_TO_DIFF:
            if math.isclose(x + y, a, abs_tol=_PAIR_TOLERANCE):
                matches.append((x, y))
        else:
            if math.isclose(abs(x - y), a, abs_tol=_PAIR_TOLERANCE):
                matches.append((x, y))
    if len(matches) != 1:
        return None
    x, y = matches[0]
    if flip is ArithmeticFlip.SUM_TO_DIFF:
        return Answer.number(abs(x - y))
    return Answer.number(x + y)


def answer_replace_bool(original: Answer) -> Answer | None:
    """"Both true" = yes entails "both false" = no; "no" is undetermined."""
    if original.type is not AnswerType.YESNO:
        raise NotApplicable("boolean flips need a yes/no original answer")
    if original.value:
        return Answer.yesno(False)
    return None


_COMP_TAIL_RE = re.compile(r",\s*(?P<a>[^,?]+?)\s+or\s+(?P<b>[^,?]+?)\s*\??\s*$", re.IGNORECASE)
_COMP_OF_RE = re.compile(
    r"\b(?:of|between)\s+(?P<a>.+?)\s+(?:or|and)\s+(?P<b>.+?)\s*\??\s*$", re.IGNORECASE
)
_DETERMINER_RE = re.compile(r"^(?:the|a|an)\s+", re.IGNORECASE)


def _trim_candidate(text: str) -> str:
    return _DETERMINER_RE.sub("", text.strip())


def comparison_entities(question: str) -> tuple[str, str] | None:
    """The two entities a comparison question chooses between, if stated.

    Recognizes the ", A or B?" tail and the "of/between A or/and B?" tail.
    """
    for rx in (_COMP_TAIL_RE, _COMP_OF_RE):
        m = rx.search(question)
        if m:
            a, b = _trim_candidate(m.group("a")), _trim_candidate(m.group("b"))
            if a and b:
                return a, b
    return None


def _entity_matches(answer_text: str, entity: str) -> bool:
    if normalize_text(answer_text) == normalize_text(entity):
        return True
    answer_tokens = set(normalize_tokens(answer_text))
    return bool(answer_tokens) and answer_tokens <= set(normalize_tokens(entity))


def answer_replace_comp(question: str, original_answer: str) -> Answer | None:
    """The flipped comparison picks the entity the original answer did not."""
    entities = comparison_entities(question)
    if entities is None:
        return None
    a, b = entities
    matches_a = _entity_matches(original_answer, a)
    matches_b = _entity_matches(original_answer, b)
    if matches_a == matches_b:  # neither, or ambiguous
        return None
    return Answer.span(b if matches_a else a)


def flip_for(candidate: RewriteCandidate) -> ArithmeticFlip | None:
    """Which arithmetic flip a REPLACE_ARITH candidate performed, read off
    the rewritten root operator."""
    if candidate.kind is not PerturbationKind.REPLACE_ARITH:
        return None
    root = candidate.decomposition.root.operator
    if root.kind is not OperatorKind.ARITHMETIC:
        return None
    if root.sub == "sum":
        return ArithmeticFlip.DIFF_TO_SUM
    if root.sub == "difference":
        return ArithmeticFlip.SUM_TO_DIFF
    return None


def rule_answer(
    candidate: RewriteCandidate,
    *,
    original_answer: Answer | None,
    question: str,
    context: str = "",
) -> Answer | None:
    """Closed-form answer for a rewrite candidate, or None when no rule fires."""
    kind = candidate.kind
    try:
        if kind is PerturbationKind.APPEND_BOOL and candidate.condition is not None:
            value = numeric_value(original_answer)
            if value is None:
                return None
            return answer_append_bool(candidate.condition, value)
        if kind is PerturbationKind.REPLACE_ARITH:
            value = numeric_value(original_answer)
            flip = flip_for(candidate)
            if value is None or flip is None:
                return None
            numbers = extract_numbers(question) + extract_numbers(context)
            return answer_replace_arith(numbers, value, flip)
        if kind is PerturbationKind.REPLACE_BOOL:
            if original_answer is None:
                return None
            return answer_replace_bool(original_answer)
        if kind is PerturbationKind.REPLACE_COMP:
            if original_answer is None or original_answer.type not in (
                AnswerType.SPAN,
                AnswerType.SPANS,
            ):
                return None
            return answer_replace_comp(question, original_answer.as_text())
    except NotApplicable:
        return None
    return None


# --------------------------------------------------------------------------
# Constraints
# --------------------------------------------------------------------------


class ConstraintKind(str, Enum):
    NUMERIC = "NUMERIC"  # prediction must be a bare number
    BOOLEAN = "BOOLEAN"  # prediction must be yes or no
    GEQ = "GEQ"  # numeric and >= value
    LEQ = "LEQ"  # numeric and <= value


@dataclass(frozen=True)
class Constraint:
    kind: ConstraintKind
    value: float | None = None

    def __post_init__(self) -> None:
        if self.kind in (ConstraintKind.GEQ, ConstraintKind.LEQ):
            if (
                self.value is None
                or isinstance(self.value, bool)
                or not isinstance(self.value, (int, float))
                or not math.isfinite(float(self.value))
                or float(self.value) < 0
            ):
                raise ValueError(f"{self.kind.value} constraints need a non-negative bound")
            object.__setattr__(self, "value", float(self.value))
        elif self.value is not None:
            raise ValueError(f"{self.kind.value} constraints carry no value")

    def as_dict(self) -> dict:
        out: dict = {"kind": self.kind.value}
        if self.value is not None:
            out["value"] = self.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> Constraint:
        return cls(kind=ConstraintKind(data["kind"]), value=data.get("value"))


def constraints_for(
    candidate: RewriteCandidate, original_value: float | None = None
) -> tuple[Constraint, ...]:
    """Constraints a prediction for this candidate must satisfy.

    Bound constraints for arithmetic flips rely on both operands being
    non-negative (which number mining guarantees): then |x-y| <= x+y, so a
    sum answer bounds the flipped difference from above and a difference
    answer bounds the flipped sum from below.
    """
    kind = candidate.kind
    if kind in (
        PerturbationKind.APPEND_BOOL,
        PerturbationKind.CHANGE_LAST_TO_BOOL,
        PerturbationKind.REPLACE_BOOL,
    ):
        return (Constraint(ConstraintKind.BOOLEAN),)
    if kind is PerturbationKind.CHANGE_LAST_TO_ARITH:
        return (Constraint(ConstraintKind.NUMERIC),)
    if kind is PerturbationKind.REPLACE_ARITH:
        flip = flip_for(candidate)
        if (
            flip is None
            or original_value is None
            or isinstance(original_value, bool)
            or not math.isfinite(float(original_value))
            or float(original_value) < 0
        ):
            return (Constraint(ConstraintKind.NUMERIC),)
        if flip is ArithmeticFlip.SUM_TO_DIFF:
            return (Constraint(ConstraintKind.LEQ, float(original_value)),)
        return (Constraint(ConstraintKind.GEQ, float(original_value)),)
    return ()
