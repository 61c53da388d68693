"""Scoring predictions against typed answers, groups, and constraints.

Three layers:

* token overlap — bag-of-tokens F1 after shared normalization, with
  type-aware handling (yes/no answers score exactly, span lists align
  prediction parts to gold spans one-to-one);
* constraints — typed checks a prediction must satisfy even when the exact
  answer is unknown (numeric-shaped, yes/no-shaped, or bounded);
* groups — a question plus its rewrites; a group counts as *consistent*
  only when every scored member clears the F1 threshold (0.8), so the
  metric rewards models that are right about a neighborhood of questions,
  not just one point.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .answers import Answer, AnswerType, Constraint, ConstraintKind
from .perturb import PerturbationKind
from .textnorm import format_number, normalize_tokens, parse_number, split_list

CONSISTENCY_THRESHOLD = 0.8
_SLACK = 1e-9

# Fixed presentation order for per-kind breakdowns.
KIND_ORDER: tuple[PerturbationKind, ...] = tuple(PerturbationKind)


class MissingPrediction(Exception):
    """A scored member has no prediction attached."""

    def __init__(self, question: str) -> None:
        self.question = question
        super().__init__(f"no prediction for question: {question!r}")


# --------------------------------------------------------------------------
# Token-level scoring
# --------------------------------------------------------------------------


def token_f1(prediction: str, gold: str) -> float:
    """Bag-of-tokens F1 over normalized tokens; empty sides score 0."""
    pred_tokens = normalize_tokens(prediction)
    gold_tokens = normalize_tokens(gold)
    if not pred_tokens or not gold_tokens:
        return 0.0
    overlap = Counter(pred_tokens) & Counter(gold_tokens)
    hits = sum(overlap.values())
    if hits == 0:
        return 0.0
    precision = hits / len(pred_tokens)
    recall = hits / len(gold_tokens)
    return 2 * precision * recall / (precision + recall)


def _yesno_score(prediction: str, flag: bool) -> float:
    tokens = normalize_tokens(prediction)
    want = "yes" if flag else "no"
    return 1.0 if tokens == [want] else 0.0


def _spans_score(prediction: str, spans: Sequence[str]) -> float:
    """Greedy one-to-one alignment of prediction parts to gold spans,
    averaged over the larger side."""
    parts = split_list(prediction)
    if not parts:
        return 0.0
    scored = sorted(
        (
            (-token_f1(part, span), i, j)
            for i, part in enumerate(parts)
            for j, span in enumerate(spans)
        ),
    )
    used_parts: set[int] = set()
    used_spans: set[int] = set()
    total = 0.0
    for negative, i, j in scored:
        if negative == 0.0 or i in used_parts or j in used_spans:
            continue
        used_parts.add(i)
        used_spans.add(j)
        total += -negative
    return total / max(len(parts), len(spans))


def score_prediction(prediction: str, gold: Answer) -> float:
    """Type-aware F1 of a textual prediction against a typed gold answer."""
    if gold.type is AnswerType.YESNO:
        return _yesno_score(prediction, bool(gold.value))
    if gold.type is AnswerType.NUMBER:
        return token_f1(prediction, format_number(gold.value))  # type: ignore[arg-type]
    if gold.type is AnswerType.SPANS:
        return _spans_score(prediction, gold.value)  # type: ignore[arg-type]
    return token_f1(prediction, gold.as_text())


# --------------------------------------------------------------------------
# Constraints
# --------------------------------------------------------------------------


def constraint_satisfied(prediction: str, constraint: Constraint) -> bool:
    """Check one constraint. Numeric checks require the whole prediction to
    parse as a number; bounds allow 1e-9 slack."""
    if constraint.kind is ConstraintKind.BOOLEAN:
        return normalize_tokens(prediction) in (["yes"], ["no"])
    value = parse_number(prediction)
    if value is None:
        return False
    if constraint.kind is ConstraintKind.NUMERIC:
        return True
    assert constraint.value is not None
    if constraint.kind is ConstraintKind.LEQ:
        return value <= constraint.value + _SLACK
    return value >= constraint.value - _SLACK


def constraints_satisfied(prediction: str, constraints: Iterable[Constraint]) -> bool:
    return all(constraint_satisfied(prediction, c) for c in constraints)


# --------------------------------------------------------------------------
# Groups
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupMember:
    """One question in a contrast group.

    The original question has ``kind`` None and always carries a gold
    answer; rewritten members carry a gold answer, constraints, or both.
    """

    question: str
    prediction: str | None = None
    gold: Answer | None = None
    constraints: tuple[Constraint, ...] = ()
    kind: PerturbationKind | None = None

    def __post_init__(self) -> None:
        if self.gold is None and not self.constraints:
            raise ValueError("a member needs a gold answer or constraints")

    @property
    def is_original(self) -> bool:
        return self.kind is None

    def require_prediction(self) -> str:
        if self.prediction is None:
            raise MissingPrediction(self.question)
        return self.prediction

    def f1(self) -> float | None:
        """Token F1 against gold, or None for constraint-only members."""
        if self.gold is None:
            return None
        return score_prediction(self.require_prediction(), self.gold)

    def constraints_ok(self) -> bool | None:
        if not self.constraints:
            return None
        return constraints_satisfied(self.require_prediction(), self.constraints)


@dataclass(frozen=True)
class ContrastGroup:
    members: tuple[GroupMember, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("a group needs at least one member")


def _member_clears(member: GroupMember, threshold: float, use_constraints: bool) -> bool:
    f1 = member.f1()
    if f1 is not None:
        return f1 >= threshold - _SLACK
    if use_constraints:
        ok = member.constraints_ok()
        return bool(ok)
    return True  # constraint-only members are invisible to the plain metric


def group_consistent(
    group: ContrastGroup,
    *,
    threshold: float = CONSISTENCY_THRESHOLD,
    use_constraints: bool = False,
) -> bool:
    return all(_member_clears(m, threshold, use_constraints) for m in group.members)


def consistency(
    groups: Sequence[ContrastGroup],
    *,
    threshold: float = CONSISTENCY_THRESHOLD,
    use_constraints: bool = False,
) -> float:
    """Fraction of groups whose every scored member clears the threshold."""
    if not groups:
        return 0.0
    passed = sum(
        group_consistent(g, threshold=threshold, use_constraints=use_constraints)
        for g in groups
    )
    return passed / len(groups)


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


def _mean(values: Sequence[float]) -> float | None:
    if not values:
        return None
    return sum(values) / len(values)


@dataclass(frozen=True)
class KindBreakdown:
    kind: PerturbationKind
    count: int
    f1: float | None
    constraint_rate: float | None


@dataclass(frozen=True)
class Report:
    groups: int
    members: int
    originals: int
    f1_original: float | None
    f1_contrast: float | None
    consistency: float
    consistency_with_constraints: float
    constraint_rate: float | None
    per_kind: tuple[KindBreakdown, ...]
    generation: Mapping[str, object] = field(default_factory=dict)

    def as_dict(self) -> dict:
        out: dict = {
            "groups": self.groups,
            "members": self.members,
            "originals": self.originals,
            "f1_original": self.f1_original,
            "f1_contrast": self.f1_contrast,
            "consistency": self.consistency,
            "consistency_with_constraints": self.consistency_with_constraints,
            "constraint_rate": self.constraint_rate,
            "per_kind": [
                {
                    "kind": row.kind.value,
                    "count": row.count,
                    "f1": row.f1,
                    "constraint_rate": row.constraint_rate,
                }
                for row in self.per_kind
            ],
        }
        if self.generation:
            out["generation"] = dict(self.generation)
        return out

    def format_table(self) -> str:
        def cell(value: float | None) -> str:
            return "   --" if value is None else f"{value:5.3f}"

        lines = [
            f"groups {self.groups}  members {self.members}  originals {self.originals}",
            f"F1 original {cell(self.f1_original)}  contrast {cell(self.f1_contrast)}",
            f"consistency {self.consistency:5.3f}  "
            f"with constraints {self.consistency_with_constraints:5.3f}",
            f"constraint rate {cell(self.constraint_rate)}",
        ]
        if self.per_kind:
            lines.append(f"{'kind':<22}{'count':>6}{'F1':>8}{'constr':>8}")
            for row in self.per_kind:
                lines.append(
                    f"{row.kind.value:<22}{row.count:>6}{cell(row.f1):>8}"
                    f"{cell(row.constraint_rate):>8}"
                )
        return "\n".join(lines)


def build_report(
    groups: Sequence[ContrastGroup], generation: Mapping[str, object] | None = None
) -> Report:
    """Score every member and aggregate; raises MissingPrediction when a
    member has no prediction."""
    members = [m for g in groups for m in g.members]
    original_f1s = [m.f1() for m in members if m.is_original]
    contrast_f1s = [m.f1() for m in members if not m.is_original]
    constraint_checks = [m.constraints_ok() for m in members]
    per_kind: list[KindBreakdown] = []
    for kind in KIND_ORDER:
        of_kind = [m for m in members if m.kind is kind]
        if not of_kind:
            continue
        f1s = [f for m in of_kind if (f := m.f1()) is not None]
        checks = [ok for m in of_kind if (ok := m.constraints_ok()) is not None]
        per_kind.append(
            KindBreakdown(
                kind=kind,
                count=len(of_kind),
                f1=_mean(f1s),
                constraint_rate=_mean([float(c) for c in checks]),
            )
        )
    return Report(
        groups=len(groups),
        members=len(members),
        originals=sum(m.is_original for m in members),
        f1_original=_mean([f for f in original_f1s if f is not None]),
        f1_contrast=_mean([f for f in contrast_f1s if f is not None]),
        consistency=consistency(list(groups)),
        consistency_with_constraints=consistency(list(groups), use_constraints=True),
        constraint_rate=_mean([float(c) for c in constraint_checks if c is not None]),
        per_kind=tuple(per_kind),
        generation=dict(generation or {}),
    )
