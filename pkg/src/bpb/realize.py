"""Turning rewritten decompositions back into natural-language questions.

Four rule-based textual patterns cover the rewrite kinds whose surface form
is predictable; everything else goes to a question-generation backend. The
pattern route is preferred when both apply, because its output is exact.

Pattern ids:

* ``HOWMANY_DID``         "How many X did Y ...?"   -> "If Y ... <cmp> v X?"
* ``HOWMANY_WERE``        "How many X were there R?" -> "If there were <cmp> v X R?"
* ``BOTH_TO_NEITHER``     "Are A and B both P?"      -> "Are neither A nor B P?"
* ``SUPERLATIVE_ANTONYM`` flips the comparative word of a comparison question

The exact regexes are exposed as data (:data:`PATTERN_REGEXES`) and pinned
by an external test fixture so they can be audited and diffed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from .backends import BackendMalformedReply, QGBackend
from .lexicon import ANTONYMS, SPELLED_NUMBERS
from .perturb import Comparator, PerturbationKind, RewriteCandidate
from .textnorm import format_number


class RealizationMethod(str, Enum):
    PATTERN = "PATTERN"
    BACKEND = "BACKEND"


@dataclass(frozen=True)
class RealizationResult:
    question: str
    method: RealizationMethod
    pattern_id: str | None = None

    def __post_init__(self) -> None:
        if not self.question.strip():
            raise ValueError("realized question must be non-empty")
        if not self.question.endswith("?"):
            raise ValueError("realized question must end with '?'")


# Comparator phrases at the question surface. These differ from the phrases
# used inside decomposition steps; equality renders as the bare count.
QUESTION_PHRASES: dict[Comparator, str] = {
    Comparator.GT: "more than",
    Comparator.LT: "less than",
    Comparator.GEQ: "at least",
    Comparator.LEQ: "at most",
    Comparator.NEQ: "not equal to",
    Comparator.EQ: "",
}

_SUPERLATIVE_ALTERNATION = "|".join(sorted(ANTONYMS))

PATTERN_REGEXES: dict[str, str] = {
    "HOWMANY_DID": r"^how many (?P<what>.+?) did (?P<rest>.+?)\??$",
    "HOWMANY_WERE": r"^how many (?P<what>.+?) were there(?: (?P<rest>.+?))?\??$",
    "BOTH_TO_NEITHER": (
        r"^(?P<aux>are|is|was|were|do|does|did|can|could|should|would|will|have|has|had) "
        r"(?P<a>.+?) and (?P<b>.+?) both (?P<pred>.+?)\??$"
    ),
    "SUPERLATIVE_ANTONYM": rf"\b(?P<word>{_SUPERLATIVE_ALTERNATION})\b",
}

_COMPILED = {name: re.compile(rx, re.IGNORECASE) for name, rx in PATTERN_REGEXES.items()}


def antonym(word: str) -> str | None:
    """Bidirectional antonym lookup; returns the lexicon's lowercase form."""
    return ANTONYMS.get(word.lower())


def _spelled_value(value: float | int) -> str:
    f = float(value)
    if f == int(f) and int(f) in SPELLED_NUMBERS:
        return SPELLED_NUMBERS[int(f)]
    return format_number(value)


def _match_case(replacement: str, original: str) -> str:
    if original.isupper():
        return replacement.upper()
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def _realize_append_bool(question: str, candidate: RewriteCandidate) -> RealizationResult | None:
    condition = candidate.condition
    if condition is None:
        return None
    phrase = QUESTION_PHRASES[condition.operator]
    did = _COMPILED["HOWMANY_DID"].match(question.strip())
    if did:
        words = ["If", did.group("rest"), phrase, format_number(condition.value), did.group("what")]
        return RealizationResult(
            question=" ".join(w for w in words if w) + "?",
            method=RealizationMethod.PATTERN,
            pattern_id="HOWMANY_DID",
        )
    were = _COMPILED["HOWMANY_WERE"].match(question.strip())
    if were:
        words = ["If there were", phrase, _spelled_value(condition.value), were.group("what")]
        if were.group("rest"):
            words.append(were.group("rest"))
        return RealizationResult(
            question=" ".join(w for w in words if w) + "?",
            method=RealizationMethod.PATTERN,
            pattern_id="HOWMANY_WERE",
        )
    return None


def _realize_replace_bool(question: str) -> RealizationResult | None:
    m = _COMPILED["BOTH_TO_NEITHER"].match(question.strip())
    if m is None:
        return None
    text = f"{m.group('aux')} neither {m.group('a')} nor {m.group('b')} {m.group('pred')}?"
    return RealizationResult(
        question=text, method=RealizationMethod.PATTERN, pattern_id="BOTH_TO_NEITHER"
    )


def _realize_replace_comp(question: str) -> RealizationResult | None:
    m = _COMPILED["SUPERLATIVE_ANTONYM"].search(question)
    if m is None:
        return None
    opposite = antonym(m.group("word"))
    if opposite is None:  # pragma: no cover - alternation is built from the lexicon
        return None
    flipped = question[: m.start()] + _match_case(opposite, m.group("word")) + question[m.end() :]
    if not flipped.endswith("?"):
        flipped += "?"
    return RealizationResult(
        question=flipped, method=RealizationMethod.PATTERN, pattern_id="SUPERLATIVE_ANTONYM"
    )


_PATTERN_KINDS = frozenset(
    {PerturbationKind.APPEND_BOOL, PerturbationKind.REPLACE_BOOL, PerturbationKind.REPLACE_COMP}
)


def realize_pattern(question: str, candidate: RewriteCandidate) -> RealizationResult | None:
    """Rule-based realization; None when no pattern covers this candidate."""
    if candidate.kind not in _PATTERN_KINDS:
        return None
    if candidate.kind is PerturbationKind.APPEND_BOOL:
        return _realize_append_bool(question, candidate)
    if candidate.kind is PerturbationKind.REPLACE_BOOL:
        return _realize_replace_bool(question)
    return _realize_replace_comp(question)


def realize_backend(candidate: RewriteCandidate, backend: QGBackend) -> RealizationResult:
    """Backend realization of the candidate's decomposition.

    Raises BackendUnavailable / BackendMalformedReply on transport or shape
    failures; an empty question counts as malformed. A missing trailing
    question mark is repaired rather than rejected.
    """
    steps = [step.text for step in candidate.decomposition.steps]
    question = backend.generate(steps).strip()
    if not question:
        raise BackendMalformedReply("backend produced an empty question")
    if not question.endswith("?"):
        question += "?"
    return RealizationResult(question=question, method=RealizationMethod.BACKEND)
