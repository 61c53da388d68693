"""End-to-end contrast-set generation, grouping, sampling, and export.

``generate`` drives the full path for each input record: obtain a
decomposition (inline, from a lookup table, or from a parsing backend),
produce rewrite candidates, realize each as a question (rule-based patterns
first, question-generation backend as fallback), compute an answer (closed
form first, step execution as fallback), and attach constraints. A record
is emitted only when it has an answer or at least one constraint, and
identical questions from the same source are emitted once.

Backend failures during a candidate are tallied on the log and the run
continues; only configuration-level problems abort.

A ``GenerationLog`` tallies the funnel per rewrite kind; within each kind,
``realized == answered + constraint_only + discarded + duplicates``.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .answers import Answer, Constraint, constraints_for, numeric_value, rule_answer
from .backends import BackendError, ParseBackend, QGBackend, RCBackend
from .datasets import InputRecord, SchemaError
from .evaluator import EvaluatorConfig, evaluate
from .metrics import KIND_ORDER, ContrastGroup, GroupMember
from .perturb import PerturbationKind, perturb_all
from .qdmr import (
    Decomposition,
    QdmrError,
    decomposition_from_texts,
    parse_decomposition,
    serialize,
    validate,
)
from .realize import RealizationMethod, realize_backend, realize_pattern
from .textnorm import normalize_text


class AnswerMethod(str, Enum):
    """How a generated record's answer was obtained (NONE = constraints only)."""

    RULE = "RULE"
    EVALUATOR = "EVALUATOR"
    NONE = "NONE"


@dataclass(frozen=True)
class GeneratedRecord:
    """One rewritten question ready for answering or training.

    ``context`` is carried over from the source record and ``id`` is
    deterministic (``<source>/<kind>/<n>``), so downstream files are
    self-contained and reproducible.
    """

    id: str
    source_id: str
    perturbation: PerturbationKind
    question: str
    decomposition: str
    answer: Answer | None = None
    constraints: tuple[Constraint, ...] = ()
    context: str = ""
    answer_method: AnswerMethod = AnswerMethod.NONE
    realization_method: RealizationMethod = RealizationMethod.PATTERN
    pattern_id: str | None = None

    def __post_init__(self) -> None:
        if self.answer is None and not self.constraints:
            raise ValueError(f"{self.id}: a generated record needs an answer or constraints")
        if (self.answer_method is AnswerMethod.NONE) != (self.answer is None):
            raise ValueError(f"{self.id}: answer_method must be NONE exactly when no answer")
        problems = validate(parse_decomposition(self.decomposition))
        if problems:
            raise ValueError(f"{self.id}: decomposition does not validate: {problems[0]}")

    def as_dict(self) -> dict:
        return {
            "id": self.id,
            "source_id": self.source_id,
            "perturbation": self.perturbation.value,
            "question": self.question,
            "decomposition": self.decomposition,
            "answer": self.answer.as_dict() if self.answer else None,
            "constraints": [c.as_dict() for c in self.constraints],
            "context": self.context,
            "answer_method": self.answer_method.value,
            "realization_method": self.realization_method.value,
            "pattern_id": self.pattern_id,
        }

    @classmethod
    def from_dict(cls, data: dict) -> GeneratedRecord:
        return cls(
            id=str(data["id"]),
            source_id=str(data["source_id"]),
            perturbation=PerturbationKind(data["perturbation"]),
            question=str(data["question"]),
            decomposition=str(data["decomposition"]),
            answer=Answer.from_dict(data["answer"]) if data.get("answer") else None,
            constraints=tuple(Constraint.from_dict(c) for c in data.get("constraints", [])),
            context=str(data.get("context", "")),
            answer_method=AnswerMethod(data.get("answer_method", "NONE")),
            realization_method=RealizationMethod(data.get("realization_method", "PATTERN")),
            pattern_id=data.get("pattern_id"),
        )


@dataclass
class KindStats:
    candidates: int = 0
    realized: int = 0
    answered: int = 0
    constraint_only: int = 0
    discarded: int = 0
    duplicates: int = 0

    def reconciles(self) -> bool:
        return self.realized == (
            self.answered + self.constraint_only + self.discarded + self.duplicates
        )

    def as_dict(self) -> dict:
        return {
            "candidates": self.candidates,
            "realized": self.realized,
            "answered": self.answered,
            "constraint_only": self.constraint_only,
            "discarded": self.discarded,
            "duplicates": self.duplicates,
        }


@dataclass
class GenerationLog:
    sources: int = 0
    with_decomposition: int = 0
    parse_failures: int = 0
    backend_failures: int = 0
    emitted: int = 0
    emitted_kind_pairs: int = 0
    per_kind: dict[PerturbationKind, KindStats] = field(default_factory=dict)

    def kind(self, kind: PerturbationKind) -> KindStats:
        return self.per_kind.setdefault(kind, KindStats())

    def as_dict(self) -> dict:
        sources = self.with_decomposition
        return {
            "sources": self.sources,
            "with_decomposition": self.with_decomposition,
            "parse_failures": self.parse_failures,
            "backend_failures": self.backend_failures,
            "emitted": self.emitted,
            # "Rewrites per example" is ambiguous between counting emitted
            # records and counting distinct rewrite kinds; report both.
            "avg_rewrites_per_source": self.emitted / sources if sources else 0.0,
            "avg_kinds_per_source": self.emitted_kind_pairs / sources if sources else 0.0,
            "kinds": {
                kind.value: self.per_kind[kind].as_dict()
                for kind in KIND_ORDER
                if kind in self.per_kind
            },
        }

    def summary(self) -> str:
        lines = [
            f"sources {self.sources}  with decomposition {self.with_decomposition}  "
            f"parse failures {self.parse_failures}  backend failures {self.backend_failures}  "
            f"emitted {self.emitted}"
        ]
        header = (
            f"{'kind':<22}{'cand':>6}{'real':>6}{'ans':>6}{'constr':>7}{'disc':>6}{'dup':>5}"
        )
        if self.per_kind:
            lines.append(header)
        for kind in KIND_ORDER:
            stats = self.per_kind.get(kind)
            if stats is None:
                continue
            lines.append(
                f"{kind.value:<22}{stats.candidates:>6}{stats.realized:>6}"
                f"{stats.answered:>6}{stats.constraint_only:>7}{stats.discarded:>6}"
                f"{stats.duplicates:>5}"
            )
        return "\n".join(lines)


def _decomposition_for(
    record: InputRecord,
    qdmr_map: Mapping[str, str] | None,
    parse_backend: ParseBackend | None,
    log: GenerationLog,
) -> Decomposition | None:
    serialized = record.decomposition
    if serialized is None and qdmr_map is not None:
        serialized = qdmr_map.get(record.id) or qdmr_map.get(normalize_text(record.question))
    try:
        if serialized is not None:
            dec = parse_decomposition(serialized)
        elif parse_backend is not None:
            try:
                steps = parse_backend.parse(record.question)
            except BackendError:
                log.backend_failures += 1
                return None
            dec = decomposition_from_texts(steps)
        else:
            return None
        if validate(dec):
            return None
        return dec
    except QdmrError:
        return None


def generate(
    records: Sequence[InputRecord],
    *,
    rc_backend: RCBackend | None = None,
    qg_backend: QGBackend | None = None,
    parse_backend: ParseBackend | None = None,
    qdmr_map: Mapping[str, str] | None = None,
    kinds: Iterable[PerturbationKind] | None = None,
    evaluator_config: EvaluatorConfig = EvaluatorConfig(),
) -> tuple[list[GeneratedRecord], GenerationLog]:
    """Generate rewritten questions for every input record.

    ``kinds`` restricts generation to the named rewrite kinds (all by
    default). Backend failures are tallied per candidate and never abort
    the run.
    """
    allowed = frozenset(kinds) if kinds is not None else frozenset(PerturbationKind)
    out: list[GeneratedRecord] = []
    log = GenerationLog()
    for record in records:
        log.sources += 1
        dec = _decomposition_for(record, qdmr_map, parse_backend, log)
        if dec is None:
            log.parse_failures += 1
            continue
        log.with_decomposition += 1
        original_value = numeric_value(record.answer)
        candidates = [c for c in perturb_all(dec, original_value) if c.kind in allowed]
        seen_questions = {record.question.strip()}
        emitted_kinds: set[PerturbationKind] = set()
        serial = 0
        for candidate in candidates:
            stats = log.kind(candidate.kind)
            stats.candidates += 1
            realized = realize_pattern(record.question, candidate)
            if realized is None and qg_backend is not None:
                try:
                    realized = realize_backend(candidate, qg_backend)
                except BackendError:
                    log.backend_failures += 1
                    realized = None
            if realized is None:
                continue
            stats.realized += 1
            question = realized.question.strip()
            if question in seen_questions:
                stats.duplicates += 1
                continue
            seen_questions.add(question)
            answer = rule_answer(
                candidate,
                original_answer=record.answer,
                question=record.question,
                context=record.context,
            )
            answer_method = AnswerMethod.RULE if answer is not None else AnswerMethod.NONE
            if answer is None and rc_backend is not None:
                try:
                    evaluation = evaluate(
                        candidate.decomposition, record.context, rc_backend, evaluator_config
                    )
                except BackendError:
                    log.backend_failures += 1
                else:
                    if not evaluation.discarded:
                        answer = evaluation.answer
                        answer_method = AnswerMethod.EVALUATOR
            constraints = constraints_for(candidate, original_value)
            if answer is None and not constraints:
                stats.discarded += 1
                continue
            serial += 1
            out.append(
                GeneratedRecord(
                    id=f"{record.id}/{candidate.kind.value}/{serial}",
                    source_id=record.id,
                    perturbation=candidate.kind,
                    question=question,
                    decomposition=serialize(candidate.decomposition),
                    answer=answer,
                    constraints=constraints,
                    context=record.context,
                    answer_method=answer_method,
                    realization_method=realized.method,
                    pattern_id=realized.pattern_id,
                )
            )
            emitted_kinds.add(candidate.kind)
            if answer is not None:
                stats.answered += 1
            else:
                stats.constraint_only += 1
        log.emitted_kind_pairs += len(emitted_kinds)
    log.emitted = len(out)
    assert all(stats.reconciles() for stats in log.per_kind.values())
    return out, log


# --------------------------------------------------------------------------
# Grouping for evaluation
# --------------------------------------------------------------------------


def group_rows(
    records: Sequence[InputRecord], generated: Sequence[GeneratedRecord]
) -> list[dict]:
    """Contrast groups as serializable rows (original member first).

    Records without a gold answer cannot anchor a group and are skipped.
    """
    by_source: dict[str, list[GeneratedRecord]] = {}
    for item in generated:
        by_source.setdefault(item.source_id, []).append(item)
    rows: list[dict] = []
    for record in records:
        if record.answer is None:
            continue
        members = [
            {
                "id": record.id,
                "question": record.question,
                "gold": record.answer.as_dict(),
                "constraints": [],
                "kind": None,
            }
        ]
        for item in by_source.get(record.id, []):
            members.append(
                {
                    "id": item.id,
                    "question": item.question,
                    "gold": item.answer.as_dict() if item.answer else None,
                    "constraints": [c.as_dict() for c in item.constraints],
                    "kind": item.perturbation.value,
                }
            )
        rows.append({"members": members})
    return rows


def rows_to_groups(
    rows: Sequence[dict], predictions: Mapping[str, str] | None = None
) -> list[ContrastGroup]:
    """Materialize scored groups from rows, attaching predictions by id."""
    groups: list[ContrastGroup] = []
    for row in rows:
        members = []
        for member in row["members"]:
            members.append(
                GroupMember(
                    question=str(member["question"]),
                    prediction=(
                        predictions.get(str(member["id"])) if predictions is not None else None
                    ),
                    gold=Answer.from_dict(member["gold"]) if member.get("gold") else None,
                    constraints=tuple(
                        Constraint.from_dict(c) for c in member.get("constraints", [])
                    ),
                    kind=PerturbationKind(member["kind"]) if member.get("kind") else None,
                )
            )
        groups.append(ContrastGroup(members=tuple(members)))
    return groups


def build_groups(
    records: Sequence[InputRecord],
    generated: Sequence[GeneratedRecord],
    predictions: Mapping[str, str] | None = None,
) -> list[ContrastGroup]:
    """One group per source record with a gold answer, original member first."""
    return rows_to_groups(group_rows(records, generated), predictions)


def write_group_rows(rows: Sequence[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for row in rows:
            handle.write(json.dumps(row, sort_keys=True) + "\n")


def read_group_rows(path: str | Path) -> list[dict]:
    rows: list[dict] = []
    with Path(path).open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
                if not isinstance(row, dict) or "members" not in row:
                    raise ValueError("expected an object with a 'members' list")
                rows.append(row)
            except ValueError as error:
                raise SchemaError(str(path), f"line {line_no}: {error}") from error
    return rows


# --------------------------------------------------------------------------
# Sampling and augmentation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AugmentConfig:
    """Share of the original set each rewrite kind may contribute."""

    tau: float
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0 < self.tau <= 1:
            raise ValueError("tau must be in (0, 1]")


def sample_for_augmentation(
    generated: Sequence[GeneratedRecord], n_sources: int, ratio: float, seed: int
) -> list[GeneratedRecord]:
    """Per-kind sample capped at ``floor(ratio * n_sources)`` records.

    One generator seeds the whole pass; kinds are visited in their fixed
    order, so output is reproducible for a given seed.
    """
    if ratio < 0:
        raise ValueError("ratio must be non-negative")
    rng = random.Random(seed)
    cap = int(math.floor(ratio * n_sources + 1e-9))
    picked: list[GeneratedRecord] = []
    for kind in KIND_ORDER:
        pool = [g for g in generated if g.perturbation is kind]
        take = min(cap, len(pool))
        if take:
            picked.extend(rng.sample(pool, take))
    return picked


def augment(
    train: Sequence[InputRecord],
    generated: Sequence[GeneratedRecord],
    config: AugmentConfig,
) -> list[InputRecord]:
    """Training records plus sampled answered rewrites, in stable order."""
    answered = [g for g in generated if g.answer is not None]
    picked = sample_for_augmentation(answered, len(train), config.tau, config.seed)
    extra = [
        InputRecord(
            id=g.id,
            question=g.question,
            context=g.context,
            answer=g.answer,
            decomposition=g.decomposition,
        )
        for g in picked
    ]
    return [*train, *extra]


def export_validation_sample(
    generated: Sequence[GeneratedRecord], per_kind: int, seed: int
) -> list[dict]:
    """A stratified sample of generated records for human review."""
    rng = random.Random(seed)
    rows: list[dict] = []
    for kind in KIND_ORDER:
        pool = [g for g in generated if g.perturbation is kind]
        take = min(per_kind, len(pool))
        for item in rng.sample(pool, take) if take else []:
            rows.append(
                {
                    "source_id": item.source_id,
                    "perturbation": kind.value,
                    "context": item.context,
                    "question": item.question,
                    "proposed_answer": item.answer.as_text() if item.answer else "",
                }
            )
    return rows


# --------------------------------------------------------------------------
# File round-trips
# --------------------------------------------------------------------------


def write_generated(records: Sequence[GeneratedRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.as_dict(), sort_keys=True) + "\n")


def read_generated(path: str | Path) -> list[GeneratedRecord]:
    records: list[GeneratedRecord] = []
    with Path(path).open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(GeneratedRecord.from_dict(json.loads(line)))
            except (KeyError, TypeError, ValueError) as error:
                raise SchemaError(str(path), f"line {line_no}: {error}") from error
    return records


def load_predictions(path: str | Path) -> dict[str, str]:
    """Predictions as a JSON object (id -> text) or JSONL of id/prediction."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        return {}
    try:
        payload = json.loads(text)
    except ValueError:
        payload = None
    if isinstance(payload, dict) and "prediction" not in payload:
        return {str(key): str(value) for key, value in payload.items()}
    try:
        table: dict[str, str] = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            table[str(row["id"])] = str(row["prediction"])
        return table
    except (KeyError, TypeError, ValueError) as error:
        raise SchemaError(str(path), f"unreadable predictions: {error}") from error
