"""Typed dataflow representation of question decompositions.

A decomposition is an ordered list of natural-language steps. Each step may
reference the results of earlier steps with ``#k`` placeholders, so the whole
thing forms a DAG whose root is the final step. Steps carry an operator label
inferred from surface keywords; rewrite rules and the step executor dispatch
on those labels.

Wire format: steps joined by ``;``, each optionally prefixed with
``return ``. References are written ``#k`` with ``k >= 1`` and must point
strictly backwards.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

from .lexicon import COMPARATIVE_POLARITY, NUMBER_WORDS


class QdmrError(ValueError):
    """Base class for decomposition parsing and rewrite errors."""


class EmptyDecomposition(QdmrError):
    def __init__(self) -> None:
        super().__init__("decomposition has no steps")


class MalformedReference(QdmrError):
    def __init__(self, step: int, token: str) -> None:
        self.step = step
        self.token = token
        super().__init__(f"step {step}: malformed reference {token!r}")


class ForwardReference(QdmrError):
    def __init__(self, step: int, ref: int) -> None:
        self.step = step
        self.ref = ref
        super().__init__(f"step {step}: reference #{ref} does not point backwards")


class DanglingReference(QdmrError):
    def __init__(self, step: int, ref: int) -> None:
        self.step = step
        self.ref = ref
        super().__init__(f"step {step}: reference #{ref} has no target")


class OperatorKind(str, Enum):
    SELECT = "SELECT"
    FILTER = "FILTER"
    PROJECT = "PROJECT"
    AGGREGATE = "AGGREGATE"
    ARITHMETIC = "ARITHMETIC"
    COMPARISON = "COMPARISON"
    BOOLEAN = "BOOLEAN"
    UNION = "UNION"
    INTERSECTION = "INTERSECTION"
    DISCARD = "DISCARD"
    OTHER = "OTHER"


_ALLOWED_SUBKINDS: dict[OperatorKind, frozenset[str]] = {
    OperatorKind.AGGREGATE: frozenset({"count", "sum", "max", "min", "avg"}),
    OperatorKind.ARITHMETIC: frozenset({"sum", "difference"}),
    OperatorKind.COMPARISON: frozenset({"highest", "lowest"}),
    OperatorKind.BOOLEAN: frozenset(
        {"compare-to-value", "same-as", "both-true", "both-false"}
    ),
}


@dataclass(frozen=True)
class Operator:
    """Operator label of a step: a kind plus an optional sub-kind."""

    kind: OperatorKind
    sub: str | None = None

    def __post_init__(self) -> None:
        allowed = _ALLOWED_SUBKINDS.get(self.kind)
        if allowed is None:
            if self.sub is not None:
                raise ValueError(f"{self.kind.value} takes no sub-kind")
        elif self.sub not in allowed:
            raise ValueError(f"{self.kind.value} sub-kind must be one of {sorted(allowed)}")

    def __str__(self) -> str:
        if self.sub is None:
            return self.kind.value
        return f"{self.kind.value}({self.sub})"


_REF_RE = re.compile(r"#(\d+)")
_BAD_REF_RE = re.compile(r"#(?!\d)(\S*)")

_WORD_NUMBER = "|".join(NUMBER_WORDS)
_IF_RE = re.compile(r"^if\b", re.IGNORECASE)
_BOOL_BOTH_RE = re.compile(r"^if\s+both\b.*\bare\s+(true|false)\b", re.IGNORECASE)
_BOOL_SAME_RE = re.compile(r"^if\b.*\bis the same as\b", re.IGNORECASE)
_BOOL_COMPARE_RE = re.compile(
    r"^if\b.*\bis\s+"
    r"(?:(?:higher|greater|larger|bigger|more)\s+than"
    r"|(?:lower|smaller|less|fewer)\s+than"
    r"|at\s+least"
    r"|at\s+most"
    r"|(?:not\s+)?equal\s+to)\s+"
    rf"(?:\d[\d,\.]*|{_WORD_NUMBER})\s*$",
    re.IGNORECASE,
)
_COUNT_RE = re.compile(r"^(?:the\s+)?number of\b", re.IGNORECASE)
_SUM_RE = re.compile(r"^(?:the\s+)?(?:sum|total) of\b", re.IGNORECASE)
_DIFFERENCE_RE = re.compile(r"^(?:the\s+)?difference of\b", re.IGNORECASE)
_COMPARISON_RE = re.compile(r"^which\s+(?:is|was|are|were)\s+(\w+)\s+of\b", re.IGNORECASE)
_AGGREGATE_RE = re.compile(
    r"^(?:the\s+)?(highest|lowest|largest|smallest|biggest|maximum|minimum|max|min"
    r"|average|avg|mean) of\s+#\d+$",
    re.IGNORECASE,
)
_UNION_RE = re.compile(r"^#\d+(?:\s*,\s*#\d+)*\s*,?\s+or\s+#\d+$", re.IGNORECASE)
_IN_BOTH_RE = re.compile(r"\bin both\b", re.IGNORECASE)
_DISCARD_RE = re.compile(r"\b(?:besides|excluding)\b", re.IGNORECASE)
_LEADING_REF_RE = re.compile(r"^#\d+\b")
_PROJECT_RE = re.compile(r"\b(?:of|that|in|on|from|for|with|by|at)\s+#\d+", re.IGNORECASE)

_AGGREGATE_WORDS = {
    "highest": "max",
    "largest": "max",
    "biggest": "max",
    "maximum": "max",
    "max": "max",
    "lowest": "min",
    "smallest": "min",
    "minimum": "min",
    "min": "min",
    "average": "avg",
    "avg": "avg",
    "mean": "avg",
}


def classify_operator(step_text: str, ref_count: int) -> Operator:
    """Infer a step's operator label from surface keywords.

    Classification is purely lexical plus the reference count; it never
    inspects neighboring steps. Unrecognized text falls back to SELECT when
    it has no references (a leaf description) and OTHER when it has some
    (an opaque step the executor must hand to the reading backend).
    """
    text = step_text.strip()
    if _IF_RE.match(text):
        both = _BOOL_BOTH_RE.match(text)
        if both and ref_count == 2:
            return Operator(OperatorKind.BOOLEAN, f"both-{both.group(1).lower()}")
        if _BOOL_SAME_RE.match(text) and ref_count == 2:
            return Operator(OperatorKind.BOOLEAN, "same-as")
        if _BOOL_COMPARE_RE.match(text) and ref_count == 1:
            return Operator(OperatorKind.BOOLEAN, "compare-to-value")
        return Operator(OperatorKind.OTHER)
    if ref_count >= 1 and _COUNT_RE.match(text):
        return Operator(OperatorKind.AGGREGATE, "count")
    if ref_count >= 1 and _SUM_RE.match(text):
        if ref_count == 2:
            return Operator(OperatorKind.ARITHMETIC, "sum")
        return Operator(OperatorKind.AGGREGATE, "sum")
    if ref_count >= 1 and _DIFFERENCE_RE.match(text):
        return Operator(OperatorKind.ARITHMETIC, "difference")
    comparison = _COMPARISON_RE.match(text)
    if comparison:
        pole = COMPARATIVE_POLARITY.get(comparison.group(1).lower())
        if pole is not None:
            return Operator(OperatorKind.COMPARISON, pole)
    aggregate = _AGGREGATE_RE.match(text)
    if aggregate:
        return Operator(OperatorKind.AGGREGATE, _AGGREGATE_WORDS[aggregate.group(1).lower()])
    if ref_count >= 2 and _UNION_RE.match(text):
        return Operator(OperatorKind.UNION)
    if ref_count >= 1 and _IN_BOTH_RE.search(text):
        return Operator(OperatorKind.INTERSECTION)
    if ref_count >= 1 and _DISCARD_RE.search(text):
        return Operator(OperatorKind.DISCARD)
    if _LEADING_REF_RE.match(text):
        return Operator(OperatorKind.FILTER)
    if ref_count >= 1 and _PROJECT_RE.search(text):
        return Operator(OperatorKind.PROJECT)
    if ref_count == 0:
        return Operator(OperatorKind.SELECT)
    return Operator(OperatorKind.OTHER)


def extract_refs(text: str, step: int = 0) -> tuple[int, ...]:
    """Ordered, de-duplicated ``#k`` references appearing in ``text``.

    Raises MalformedReference for a ``#`` token not followed by digits and
    for the out-of-range ``#0``.
    """
    bad = _BAD_REF_RE.search(text)
    if bad is not None:
        super_token = "#" + bad.group(1)
        raise MalformedReference(step, super_token)
    refs: list[int] = []
    for match in _REF_RE.finditer(text):
        value = int(match.group(1))
        if value < 1:
            raise MalformedReference(step, match.group(0))
        if value not in refs:
            refs.append(value)
    return tuple(refs)


@dataclass(frozen=True)
class Step:
    """One decomposition step: its text, its references, and its operator."""

    text: str
    refs: tuple[int, ...]
    operator: Operator

    @classmethod
    def from_text(cls, text: str, step: int = 0) -> "Step":
        clean = text.strip()
        refs = extract_refs(clean, step)
        return cls(text=clean, refs=refs, operator=classify_operator(clean, len(refs)))


@dataclass(frozen=True)
class Decomposition:
    """An ordered tuple of steps; step numbers are 1-based positions."""

    steps: tuple[Step, ...]
    source_question: str | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.steps)

    @property
    def root(self) -> Step:
        return self.steps[-1]

    @property
    def root_index(self) -> int:
        return len(self.steps)

    def step(self, index: int) -> Step:
        """1-based accessor."""
        return self.steps[index - 1]


_RETURN_PREFIX_RE = re.compile(r"^return\s+", re.IGNORECASE)


def decomposition_from_texts(
    texts: Iterable[str], source_question: str | None = None
) -> Decomposition:
    """Build a decomposition from raw step texts, checking reference sanity."""
    steps: list[Step] = []
    for i, raw in enumerate(texts, start=1):
        text = _RETURN_PREFIX_RE.sub("", raw.strip()).strip()
        if not text:
            continue
        step = Step.from_text(text, step=i)
        for ref in step.refs:
            if ref >= i:
                raise ForwardReference(i, ref)
        steps.append(step)
    if not steps:
        raise EmptyDecomposition()
    return Decomposition(steps=tuple(steps), source_question=source_question)


def parse_decomposition(text: str, source_question: str | None = None) -> Decomposition:
    """Parse the delimited wire format into a Decomposition."""
    return decomposition_from_texts(text.split(";"), source_question=source_question)


def serialize(d: Decomposition) -> str:
    """Canonical delimited form: every step carries the ``return `` prefix."""
    return " ;".join(f"return {step.text}" for step in d.steps)


@dataclass(frozen=True)
class Violation:
    """One validation finding; ``step`` is the offending 1-based index."""

    kind: str
    step: int
    detail: str = ""

    def __str__(self) -> str:
        suffix = f": {self.detail}" if self.detail else ""
        return f"{self.kind} at step {self.step}{suffix}"


def _required_ref_count(operator: Operator) -> int | None:
    if operator.kind in (OperatorKind.ARITHMETIC, OperatorKind.COMPARISON):
        return 2
    if operator.kind is OperatorKind.BOOLEAN:
        return 1 if operator.sub == "compare-to-value" else 2
    return None


def validate(d: Decomposition) -> list[Violation]:
    """Structural checks: backward references, reachability, operator arity.

    Returns an empty list when the decomposition is well-formed.
    """
    violations: list[Violation] = []
    n = len(d.steps)
    if n == 0:
        return [Violation("empty", 0)]
    for i, step in enumerate(d.steps, start=1):
        try:
            refs = extract_refs(step.text, i)
        except MalformedReference as exc:
            violations.append(Violation("malformed-reference", i, exc.token))
            continue
        if refs != step.refs:
            violations.append(Violation("refs-mismatch", i, f"{step.refs} vs text {refs}"))
        for ref in refs:
            if ref >= i:
                violations.append(Violation("forward-reference", i, f"#{ref}"))
        required = _required_ref_count(step.operator)
        if required is not None and len(step.refs) != required:
            violations.append(
                Violation("arity", i, f"{step.operator} needs {required} refs, has {len(step.refs)}")
            )
    reachable = {n}
    frontier = [n]
    while frontier:
        current = frontier.pop()
        for ref in d.steps[current - 1].refs:
            if 1 <= ref <= n and ref not in reachable:
                reachable.add(ref)
                frontier.append(ref)
    for i in range(1, n + 1):
        if i not in reachable:
            violations.append(Violation("unreachable", i))
    return violations


def rewrite_refs(text: str, mapping: Mapping[int, int], step: int = 0) -> str:
    """Rewrite every ``#old`` in ``text`` to ``#mapping[old]``.

    Raises DanglingReference when a reference has no entry in the mapping.
    """

    def _sub(match: re.Match[str]) -> str:
        old = int(match.group(1))
        if old not in mapping:
            raise DanglingReference(step, old)
        return f"#{mapping[old]}"

    return _REF_RE.sub(_sub, text)


def renumber(steps: Mapping[int, str] | Decomposition) -> Decomposition:
    """Compact gapped step numbering to 1..n, rewriting references.

    ``steps`` maps original 1-based indices (possibly with gaps after a
    deletion) to step texts whose references still use the original
    numbering. Passing a Decomposition is the identity case.
    """
    if isinstance(steps, Decomposition):
        items = {i: step.text for i, step in enumerate(steps.steps, start=1)}
    else:
        items = dict(steps)
    if not items:
        raise EmptyDecomposition()
    order = sorted(items)
    mapping = {old: new for new, old in enumerate(order, start=1)}
    texts = [rewrite_refs(items[old], mapping, step=mapping[old]) for old in order]
    return decomposition_from_texts(texts)
