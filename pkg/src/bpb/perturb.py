"""Symbolic rewrite rules over decompositions.

Seven rewrite kinds produce semantics-changing variants of a decomposition:

* APPEND_BOOL          - append a yes/no comparison against the old answer
* CHANGE_LAST_TO_ARITH - replace a comparison root with a difference
* CHANGE_LAST_TO_BOOL  - replace a two-argument root with an equality test
* REPLACE_ARITH        - swap sum and difference in an arithmetic root
* REPLACE_BOOL         - flip "both ... are true" to "... are false"
* REPLACE_COMP         - flip a comparison's pole (highest <-> lowest)
* PRUNE_STEP           - drop one intermediate step and rewire around it

Each rule raises :class:`NotApplicable` when its precondition fails;
:func:`perturb_all` collects the union of all applicable rules in a fixed
order so generation is reproducible without any sampling.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum

from .qdmr import (
    Decomposition,
    Operator,
    OperatorKind,
    Step,
    decomposition_from_texts,
    renumber,
    rewrite_refs,
    validate,
)
from .textnorm import format_number


class NotApplicable(Exception):
    """A rewrite rule's precondition does not hold for this input."""


class PerturbationKind(str, Enum):
    APPEND_BOOL = "APPEND_BOOL"
    CHANGE_LAST_TO_ARITH = "CHANGE_LAST_TO_ARITH"
    CHANGE_LAST_TO_BOOL = "CHANGE_LAST_TO_BOOL"
    REPLACE_ARITH = "REPLACE_ARITH"
    REPLACE_BOOL = "REPLACE_BOOL"
    REPLACE_COMP = "REPLACE_COMP"
    PRUNE_STEP = "PRUNE_STEP"


class Comparator(str, Enum):
    """Comparison operators usable in appended yes/no steps.

    Generation draws only from :data:`GENERATED_COMPARATORS`; EQ exists so
    realized equality-form questions ("If there were two ...?") can be
    represented and answered, but no rule ever emits it.
    """

    GT = ">"
    LT = "<"
    LEQ = "<="
    GEQ = ">="
    NEQ = "!="
    EQ = "="

    def holds(self, left: float, right: float) -> bool:
        if self is Comparator.GT:
            return left > right
        if self is Comparator.LT:
            return left < right
        if self is Comparator.LEQ:
            return left <= right
        if self is Comparator.GEQ:
            return left >= right
        if self is Comparator.NEQ:
            return left != right
        return left == right


GENERATED_COMPARATORS: tuple[Comparator, ...] = (
    Comparator.GT,
    Comparator.LT,
    Comparator.LEQ,
    Comparator.GEQ,
    Comparator.NEQ,
)

# Phrases used inside appended decomposition steps.
STEP_PHRASES: dict[Comparator, str] = {
    Comparator.GT: "higher than",
    Comparator.LT: "lower than",
    Comparator.GEQ: "at least",
    Comparator.LEQ: "at most",
    Comparator.NEQ: "not equal to",
    Comparator.EQ: "equal to",
}


@dataclass(frozen=True)
class ComparisonCondition:
    """The comparison carried by an appended yes/no step."""

    operator: Comparator
    value: float | int

    def __post_init__(self) -> None:
        if isinstance(self.value, bool) or not isinstance(self.value, (int, float)):
            raise ValueError("condition value must be a number")
        if not math.isfinite(float(self.value)):
            raise ValueError("condition value must be finite")


@dataclass(frozen=True)
class RewriteCandidate:
    """One rewritten decomposition plus enough detail to realize and answer it.

    ``provenance`` lists the original step indices the rule touched;
    ``pruned_step`` is set only for PRUNE_STEP.
    """

    kind: PerturbationKind
    decomposition: Decomposition
    condition: ComparisonCondition | None = None
    pruned_step: int | None = None
    provenance: tuple[int, ...] = ()


def _require_number(a: object) -> float:
    if isinstance(a, bool) or not isinstance(a, (int, float)) or not math.isfinite(float(a)):
        raise NotApplicable("answer is not numeric")
    return float(a)


def comparison_values(a: float | int) -> list[int]:
    """Candidate comparison values derived from the answer ``a``.

    The pool is {a+k, a-k, a/k, a*k : k in 1..3}, keeping only values that
    are non-negative integers. Returned sorted ascending, de-duplicated.
    """
    a = float(a)
    pool: set[int] = set()
    for k in (1, 2, 3):
        for v in (a + k, a - k, a / k, a * k):
            if v < 0 or not math.isfinite(v):
                continue
            if math.isclose(v, round(v), abs_tol=1e-9):
                pool.add(int(round(v)))
    return sorted(pool)


def append_bool(d: Decomposition, a: object) -> list[RewriteCandidate]:
    """Append ``if #n is <phrase> <v>`` steps comparing the old answer.

    One candidate per (comparator, value) pair, comparators in generation
    order, values ascending.
    """
    value = _require_number(a)
    root_index = d.root_index
    candidates: list[RewriteCandidate] = []
    for comparator in GENERATED_COMPARATORS:
        for v in comparison_values(value):
            text = f"if #{root_index} is {STEP_PHRASES[comparator]} {format_number(v)}"
            rewritten = decomposition_from_texts(
                [*(s.text for s in d.steps), text], source_question=d.source_question
            )
            candidates.append(
                RewriteCandidate(
                    kind=PerturbationKind.APPEND_BOOL,
                    decomposition=rewritten,
                    condition=ComparisonCondition(comparator, v),
                    provenance=(root_index,),
                )
            )
    return candidates


def _replace_root(d: Decomposition, new_text: str) -> Decomposition:
    return decomposition_from_texts(
        [*(s.text for s in d.steps[:-1]), new_text], source_question=d.source_question
    )


def change_last(d: Decomposition) -> list[RewriteCandidate]:
    """Swap a two-argument root for a different operation over the same refs.

    A comparison root yields both an arithmetic and an equality variant; an
    arithmetic root yields the equality variant only.
    """
    root = d.root
    if root.operator.kind not in (OperatorKind.ARITHMETIC, OperatorKind.COMPARISON):
        raise NotApplicable("root is not arithmetic or comparison")
    if len(root.refs) != 2:
        raise NotApplicable("root does not reference exactly two steps")
    i, j = sorted(root.refs)
    out: list[RewriteCandidate] = []
    if root.operator.kind is OperatorKind.COMPARISON:
        out.append(
            RewriteCandidate(
                kind=PerturbationKind.CHANGE_LAST_TO_ARITH,
                decomposition=_replace_root(d, f"the difference of #{i} and #{j}"),
                provenance=(d.root_index,),
            )
        )
    out.append(
        RewriteCandidate(
            kind=PerturbationKind.CHANGE_LAST_TO_BOOL,
            decomposition=_replace_root(d, f"if #{i} is the same as #{j}"),
            provenance=(d.root_index,),
        )
    )
    return out


_SUM_WORD_RE = re.compile(r"\b(sum|total)\b", re.IGNORECASE)
_DIFFERENCE_WORD_RE = re.compile(r"\bdifference\b", re.IGNORECASE)


def replace_arith(d: Decomposition) -> RewriteCandidate:
    """Swap sum and difference in an arithmetic root, keeping its refs."""
    root = d.root
    if root.operator != Operator(OperatorKind.ARITHMETIC, "sum") and root.operator != Operator(
        OperatorKind.ARITHMETIC, "difference"
    ):
        raise NotApplicable("root is not an arithmetic sum or difference")
    if root.operator.sub == "sum":
        new_text = _SUM_WORD_RE.sub("difference", root.text, count=1)
    else:
        new_text = _DIFFERENCE_WORD_RE.sub("sum", root.text, count=1)
    return RewriteCandidate(
        kind=PerturbationKind.REPLACE_ARITH,
        decomposition=_replace_root(d, new_text),
        provenance=(d.root_index,),
    )


_TRUE_WORD_RE = re.compile(r"\btrue\b", re.IGNORECASE)


def replace_bool(d: Decomposition) -> RewriteCandidate:
    """Flip a ``both ... are true`` root to ``... are false``.

    Only the true-to-false direction exists: the original's answer is known
    to be derivable only in that direction (yes flips to no).
    """
    root = d.root
    if root.operator != Operator(OperatorKind.BOOLEAN, "both-true"):
        raise NotApplicable("root is not a both-true step")
    return RewriteCandidate(
        kind=PerturbationKind.REPLACE_BOOL,
        decomposition=_replace_root(d, _TRUE_WORD_RE.sub("false", root.text, count=1)),
        provenance=(d.root_index,),
    )


def replace_comp(d: Decomposition) -> RewriteCandidate:
    """Flip a comparison root's pole, regenerating canonical step text."""
    root = d.root
    if root.operator.kind is not OperatorKind.COMPARISON:
        raise NotApplicable("root is not a comparison")
    flipped = "lowest" if root.operator.sub == "highest" else "highest"
    refs = ", ".join(f"#{r}" for r in sorted(root.refs))
    return RewriteCandidate(
        kind=PerturbationKind.REPLACE_COMP,
        decomposition=_replace_root(d, f"which is {flipped} of {refs}"),
        provenance=(d.root_index,),
    )


def prune_step(d: Decomposition) -> list[RewriteCandidate]:
    """Drop one single-reference intermediate step, rewiring its consumers.

    Only non-root steps with exactly one reference qualify: their consumers
    can be rewired onto the pruned step's input (a referenceless leaf offers
    no rewiring target). After rewiring, steps no longer reachable from the
    root are pruned too and the numbering is compacted. One candidate per
    prunable step; candidates that fail validation are dropped.
    """
    n = d.root_index
    candidates: list[RewriteCandidate] = []
    for pruned in range(1, n):
        step = d.step(pruned)
        if len(step.refs) != 1:
            continue
        target = step.refs[0]
        rewiring = {i: i for i in range(1, n + 1)}
        rewiring[pruned] = target
        kept: dict[int, str] = {}
        for i, s in enumerate(d.steps, start=1):
            if i == pruned:
                continue
            kept[i] = rewrite_refs(s.text, rewiring, step=i) if pruned in s.refs else s.text
        reachable = {n}
        frontier = [n]
        while frontier:
            current = frontier.pop()
            for ref in Step.from_text(kept[current], current).refs:
                if ref in kept and ref not in reachable:
                    reachable.add(ref)
                    frontier.append(ref)
        rewritten = renumber({i: text for i, text in kept.items() if i in reachable})
        if validate(rewritten):
            continue
        candidates.append(
            RewriteCandidate(
                kind=PerturbationKind.PRUNE_STEP,
                decomposition=rewritten,
                pruned_step=pruned,
                provenance=(pruned,),
            )
        )
    return candidates


def perturb_all(d: Decomposition, answer_value: float | int | None) -> list[RewriteCandidate]:
    """Union of every applicable rule's candidates, in a fixed order.

    Rules run in the order they are documented above; within a rule,
    candidates follow step order and then comparator/value order.
    ``answer_value`` is the original question's numeric answer when one is
    known; it gates APPEND_BOOL only.
    """
    problems = validate(d)
    if problems:
        raise ValueError(f"decomposition does not validate: {problems[0]}")
    out: list[RewriteCandidate] = []
    if answer_value is not None:
        try:
            out.extend(append_bool(d, answer_value))
        except NotApplicable:
            pass
    for rule in (change_last, replace_arith, replace_bool, replace_comp, prune_step):
        try:
            result = rule(d)
        except NotApplicable:
            continue
        if isinstance(result, list):
            out.extend(result)
        else:
            out.append(result)
    return out
