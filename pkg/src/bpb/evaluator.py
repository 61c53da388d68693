"""Step-by-step execution of a decomposition over a reading backend.

Query-shaped steps (SELECT, FILTER, PROJECT, DISCARD, OTHER) are turned into
standalone questions — references substituted with earlier results — and sent
to a reading-comprehension backend once each. Structured steps (AGGREGATE,
ARITHMETIC, COMPARISON, BOOLEAN, UNION, INTERSECTION) are computed
symbolically from earlier values.

Execution is conservative: rather than produce a dubious answer it *discards*
the whole evaluation with a reason. Discard triggers:

* an empty backend reply, or one longer than ``max_answer_words`` words;
* a non-numeric operand reaching a numeric operation;
* a yes/no operation over non-yes/no operands;
* a known-noisy producer/value-shape pair (default: PROJECT steps yielding
  text) feeding a numeric consumer — unless every list item is numeric;
* an empty intersection;
* a comparison step whose phrase or target cannot be read.

Values carry a *provenance* string (the leaf step text they came from) so a
comparison can answer with the description of the winning side.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .answers import Answer
from .backends import RCBackend
from .lexicon import NUMBER_WORDS
from .perturb import Comparator
from .qdmr import Decomposition, OperatorKind, Step
from .textnorm import (
    format_number,
    normalize_text,
    parse_leading_number,
    parse_number,
    split_list,
    word_count,
)


class ValueKind(str, Enum):
    NUMBER = "NUMBER"
    YESNO = "YESNO"
    TEXT = "TEXT"
    TEXT_LIST = "TEXT_LIST"


class DiscardReason(str, Enum):
    EMPTY_REPLY = "EMPTY_REPLY"
    TOO_LONG = "TOO_LONG"
    NON_NUMERIC = "NON_NUMERIC"
    TYPE_MISMATCH = "TYPE_MISMATCH"
    NOISY_OPERAND = "NOISY_OPERAND"
    EMPTY_RESULT = "EMPTY_RESULT"
    MALFORMED_STEP = "MALFORMED_STEP"


@dataclass(frozen=True)
class StepValue:
    """The value a step produced, plus where it came from.

    ``op_kind`` is the operator kind of the producing step (used by the
    noisy-producer check); ``provenance`` is the leaf description backing
    the value.
    """

    kind: ValueKind
    text: str
    number: float | None = None
    flag: bool | None = None
    items: tuple[str, ...] = ()
    op_kind: OperatorKind | None = None
    provenance: str = ""


# Numeric consumers for the noisy-producer check. Counting a noisy list is
# fine (its length is still meaningful); arithmetic over it is not.
_NUMERIC_CONSUMERS : frozenset[tuple[OperatorKind, str | None]] = frozenset(
    {(OperatorKind.ARITHMETIC, "sum"), (OperatorKind.ARITHMETIC, "difference")}
    | {(OperatorKind.AGGREGATE, sub) for sub in ("sum", "max", "min", "avg")}
    | {(OperatorKind.COMPARISON, "highest"), (OperatorKind.COMPARISON, "lowest")}
    | {(OperatorKind.BOOLEAN, "compare-to-value")}
)

_DEFAULT_BLOCKLIST: frozenset[tuple[OperatorKind, ValueKind]] = frozenset(
    {
        (OperatorKind.PROJECT, ValueKind.TEXT),
        (OperatorKind.PROJECT, ValueKind.TEXT_LIST),
        (OperatorKind.PROJECT, ValueKind.YESNO),
    }
)


@dataclass(frozen=True)
class EvaluatorConfig:
    max_answer_words: int = 8
    noisy_producers: frozenset[tuple[OperatorKind, ValueKind]] = _DEFAULT_BLOCKLIST


@dataclass(frozen=True)
class Evaluation:
    answer: Answer | None
    reason: DiscardReason | None = None
    queries: int = 0
    values: tuple[StepValue | None, ...] = ()

    def __post_init__(self) -> None:
        if (self.answer is None) == (self.reason is None):
            raise ValueError("an evaluation either answers or names a discard reason")

    @property
    def discarded(self) -> bool:
        return self.answer is None


class _Discard(Exception):
    def __init__(self, reason: DiscardReason) -> None:
        self.reason = reason
        super().__init__(reason.value)


# --------------------------------------------------------------------------
# Turning steps into standalone questions
# --------------------------------------------------------------------------

_REF_RE = re.compile(r"#(\d+)")

_INTERROGATIVE_STARTERS = frozenset(
    {
        "what", "which", "who", "whom", "whose", "where", "when", "how", "why",
        "did", "do", "does", "is", "are", "was", "were",
        "can", "could", "will", "would", "should", "has", "have", "had", "if",
    }
)


def substitute_refs(step_text: str, values: Mapping[int, str]) -> str:
    """Replace ``#k`` placeholders and phrase the result as a question."""
    filled = _REF_RE.sub(lambda m: values[int(m.group(1))], step_text).strip()
    filled = filled.rstrip("?. ").strip()
    first = filled.split()[0].lower() if filled.split() else ""
    if first in _INTERROGATIVE_STARTERS:
        return filled[0].upper() + filled[1:] + "?"
    return f"What is {filled}?"


# --------------------------------------------------------------------------
# Reading backend replies
# --------------------------------------------------------------------------

def parse_backend_reply(reply: str, config: EvaluatorConfig = EvaluatorConfig()) -> StepValue:
    """Classify a backend reply into a typed value.

    Order: yes/no, then a whole-string number, then a comma/"and" list,
    then a number with a unit tail ("25 yards"), then plain text. Raises
    _Discard for replies that are empty or too long to be an answer.
    """
    text = reply.strip()
    if not text:
        raise _Discard(DiscardReason.EMPTY_REPLY)
    if word_count(text) > config.max_answer_words:
        raise _Discard(DiscardReason.TOO_LONG)
    lowered = text.lower().rstrip("?.! ")
    if lowered in ("yes", "no"):
        return StepValue(kind=ValueKind.YESNO, text=lowered, flag=lowered == "yes")
    whole = parse_number(text)
    if whole is not None:
        return StepValue(kind=ValueKind.NUMBER, text=text, number=whole)
    parts = split_list(text)
    if len(parts) > 1:
        return StepValue(kind=ValueKind.TEXT_LIST, text=text, items=tuple(parts))
    number = parse_leading_number(text)
    if number is not None:
        return StepValue(kind=ValueKind.NUMBER, text=text, number=number)
    return StepValue(kind=ValueKind.TEXT, text=text)


# --------------------------------------------------------------------------
# Operand coercion helpers
# --------------------------------------------------------------------------


def _listed(value: StepValue) -> tuple[str, ...]:
    if value.kind is ValueKind.TEXT_LIST:
        return value.items
    return (value.text,)


def _item_number(item: str) -> float | None:
    number = parse_leading_number(item)
    if number is not None:
        return number
    return float(NUMBER_WORDS[item.strip().lower()]) if item.strip().lower() in NUMBER_WORDS else None


def _all_numeric(value: StepValue) -> bool:
    if value.kind is ValueKind.NUMBER:
        return True
    if value.kind is ValueKind.TEXT_LIST:
        return all(_item_number(item) is not None for item in value.items)
    return False


def _as_number(value: StepValue) -> float:
    if value.kind is ValueKind.NUMBER:
        assert value.number is not None
        return value.number
    if value.kind is ValueKind.TEXT:
        number = _item_number(value.text)
        if number is not None:
            return number
    raise _Discard(DiscardReason.NON_NUMERIC)


def _as_numbers(value: StepValue) -> list[float]:
    if value.kind is ValueKind.TEXT_LIST:
        numbers = [_item_number(item) for item in value.items]
        if any(n is None for n in numbers):
            raise _Discard(DiscardReason.NON_NUMERIC)
        return [n for n in numbers if n is not None]
    return [_as_number(value)]


def _as_flag(value: StepValue) -> bool:
    if value.kind is ValueKind.YESNO:
        assert value.flag is not None
        return value.flag
    raise _Discard(DiscardReason.TYPE_MISMATCH)


def _number_value(number: float, provenance: str) -> StepValue:
    return StepValue(
        kind=ValueKind.NUMBER,
        text=format_number(number),
        number=number,
        provenance=provenance,
    )


def _flag_value(flag: bool, provenance: str) -> StepValue:
    return StepValue(
        kind=ValueKind.YESNO, text="yes" if flag else "no", flag=flag, provenance=provenance
    )


# --------------------------------------------------------------------------
# Comparison phrases inside boolean steps
# --------------------------------------------------------------------------

_PHRASE_COMPARATORS: tuple[tuple[str, Comparator], ...] = (
    ("higher than", Comparator.GT),
    ("greater than", Comparator.GT),
    ("larger than", Comparator.GT),
    ("bigger than", Comparator.GT),
    ("more than", Comparator.GT),
    ("lower than", Comparator.LT),
    ("smaller than", Comparator.LT),
    ("less than", Comparator.LT),
    ("fewer than", Comparator.LT),
    ("at least", Comparator.GEQ),
    ("at most", Comparator.LEQ),
    ("not equal to", Comparator.NEQ),
    ("equal to", Comparator.EQ),
    ("the same as", Comparator.EQ),
)

_TRAILING_NUMBER_RE = re.compile(rf"(\d[\d,]*(?:\.\d+)?|{'|'.join(NUMBER_WORDS)})\s*$", re.IGNORECASE)


def parse_comparison_phrase(step_text: str) -> tuple[Comparator, float] | None:
    """Read the comparator and target value out of a compare-to-value step."""
    lowered = step_text.lower()
    found: tuple[int, Comparator] | None = None
    for phrase, comparator in _PHRASE_COMPARATORS:
        at = lowered.find(phrase)
        if at >= 0 and (found is None or at < found[0]):
            found = (at, comparator)
    if found is None:
        return None
    m = _TRAILING_NUMBER_RE.search(step_text.strip())
    if m is None:
        return None
    token = m.group(1)
    value = (
        float(NUMBER_WORDS[token.lower()])
        if token.lower() in NUMBER_WORDS
        else float(token.replace(",", ""))
    )
    return found[1], value


# --------------------------------------------------------------------------
# The executor
# --------------------------------------------------------------------------

_QUERY_KINDS = frozenset(
    {
        OperatorKind.SELECT,
        OperatorKind.FILTER,
        OperatorKind.PROJECT,
        OperatorKind.DISCARD,
        OperatorKind.OTHER,
    }
)


def _provenance_for_query(step: Step, values: list[StepValue]) -> str:
    if step.operator.kind is OperatorKind.SELECT or not step.refs:
        return step.text
    return values[step.refs[0] - 1].provenance


def _check_noisy_operands(step: Step, operands: list[StepValue], config: EvaluatorConfig) -> None:
    key = (step.operator.kind, step.operator.sub)
    if key not in _NUMERIC_CONSUMERS:
        return
    for operand in operands:
        if operand.op_kind is None:
            continue
        if (operand.op_kind, operand.kind) not in config.noisy_producers:
            continue
        if _all_numeric(operand):
            continue
        raise _Discard(DiscardReason.NOISY_OPERAND)


def _evaluate_step(
    step: Step,
    operands: list[StepValue],
    *,
    all_values: list[StepValue],
    context: str,
    backend: RCBackend,
    config: EvaluatorConfig,
    counter: list[int],
) -> StepValue:
    kind = step.operator.kind
    sub = step.operator.sub

    if kind in _QUERY_KINDS:
        question = substitute_refs(step.text, {i + 1: v.text for i, v in enumerate(all_values) if v is not None})
        reply, _score = backend.answer(question, context)
        counter[0] += 1
        value = parse_backend_reply(reply, config)
        return StepValue(
            kind=value.kind,
            text=value.text,
            number=value.number,
            flag=value.flag,
            items=value.items,
            op_kind=kind,
            provenance=_provenance_for_query(step, all_values),
        )

    _check_noisy_operands(step, operands, config)

    if kind is OperatorKind.AGGREGATE:
        operand = operands[0]
        provenance = operand.provenance
        if sub == "count":
            return _number_value(float(len(_listed(operand))), provenance)
        numbers = _as_numbers(operand)
        if sub == "sum":
            return _number_value(sum(numbers), provenance)
        if sub == "max":
            return _number_value(max(numbers), provenance)
        if sub == "min":
            return _number_value(min(numbers), provenance)
        return _number_value(sum(numbers) / len(numbers), provenance)

    if kind is OperatorKind.ARITHMETIC:
        left, right = (_as_number(op) for op in operands[:2])
        result = left + right if sub == "sum" else left - right
        return _number_value(result, step.text)

    if kind is OperatorKind.COMPARISON:
        numbers = [_as_number(op) for op in operands]
        best = max(numbers) if sub == "highest" else min(numbers)
        winner = operands[numbers.index(best)]
        return StepValue(
            kind=ValueKind.TEXT,
            text=winner.provenance or winner.text,
            provenance=winner.provenance or winner.text,
        )

    if kind is OperatorKind.BOOLEAN:
        if sub == "compare-to-value":
            parsed = parse_comparison_phrase(step.text)
            if parsed is None:
                raise _Discard(DiscardReason.MALFORMED_STEP)
            comparator, target = parsed
            return _flag_value(comparator.holds(_as_number(operands[0]), target), step.text)
        if sub == "same-as":
            a, b = operands[:2]
            if a.kind is ValueKind.NUMBER and b.kind is ValueKind.NUMBER:
                same = abs(_as_number(a) - _as_number(b)) <= 1e-9
            else:
                same = normalize_text(a.text) == normalize_text(b.text)
            return _flag_value(same, step.text)
        flags = [_as_flag(op) for op in operands[:2]]
        if sub == "both-true":
            return _flag_value(all(flags), step.text)
        return _flag_value(not any(flags), step.text)

    if kind is OperatorKind.UNION:
        merged: list[str] = []
        for operand in operands:
            merged.extend(_listed(operand))
        return StepValue(
            kind=ValueKind.TEXT_LIST,
            text=", ".join(merged),
            items=tuple(merged),
            provenance=step.text,
        )

    assert kind is OperatorKind.INTERSECTION
    first, second = operands[:2]
    second_keys = {normalize_text(item) for item in _listed(second)}
    kept = [item for item in _listed(first) if normalize_text(item) in second_keys]
    if not kept:
        raise _Discard(DiscardReason.EMPTY_RESULT)
    return StepValue(
        kind=ValueKind.TEXT_LIST, text=", ".join(kept), items=tuple(kept), provenance=step.text
    )


def _to_answer(value: StepValue) -> Answer:
    if value.kind is ValueKind.NUMBER:
        assert value.number is not None
        return Answer.number(value.number)
    if value.kind is ValueKind.YESNO:
        assert value.flag is not None
        return Answer.yesno(value.flag)
    if value.kind is ValueKind.TEXT_LIST:
        return Answer.spans(value.items)
    return Answer.span(value.text)


def evaluate(
    decomposition: Decomposition,
    context: str,
    backend: RCBackend,
    config: EvaluatorConfig = EvaluatorConfig(),
) -> Evaluation:
    """Execute every step in order and convert the root value to an answer.

    Backend transport errors propagate; semantic problems produce a
    discarded Evaluation with a reason. Each query-shaped step performs
    exactly one backend call, made in step order.
    """
    values: list[StepValue] = []
    counter = [0]
    try:
        for step in decomposition.steps:
            operands = [values[r - 1] for r in step.refs]
            value = _evaluate_step(
                step,
                operands,
                all_values=values,
                context=context,
                backend=backend,
                config=config,
                counter=counter,
            )
            values.append(value)
    except _Discard as discard:
        return Evaluation(
            answer=None, reason=discard.reason, queries=counter[0], values=tuple(values)
        )
    return Evaluation(answer=_to_answer(values[-1]), queries=counter[0], values=tuple(values))
