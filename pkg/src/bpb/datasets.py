"""Loading reading-comprehension datasets into a common record shape.

Supported formats:

* ``drop``          passage-keyed JSON with typed number/span/date answers;
* ``hotpotqa``      list of multi-paragraph examples; the context keeps only
                    the paragraphs named by the supporting facts;
* ``iirc``          articles with linked evidence; the context is the
                    article text followed by the question's evidence
                    snippets;
* ``generic-jsonl`` one object per line with id/question/context and
                    optional answer and decomposition;
* ``break-csv``     a CSV of question decompositions (also loadable as a
                    lookup table from question id or text to decomposition).
"""

from __future__ import annotations

import calendar
import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .answers import Answer
from .textnorm import normalize_text, parse_number

FORMATS = ("drop", "hotpotqa", "iirc", "generic-jsonl", "break-csv")


class DatasetError(ValueError):
    """Base class for input loading failures."""


class UnknownFormat(DatasetError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unknown dataset format {name!r}; expected one of {', '.join(FORMATS)}")


class SchemaError(DatasetError):
    def __init__(self, source: str, detail: str) -> None:
        super().__init__(f"{source}: {detail}")


@dataclass(frozen=True)
class InputRecord:
    """One question ready for rewriting: text, context, optional gold answer,
    and an optional inline decomposition (canonical serialized form)."""

    id: str
    question: str
    context: str = ""
    answer: Answer | None = None
    decomposition: str | None = None
    dataset: str = "generic"

    def __post_init__(self) -> None:
        if not self.id.strip():
            raise ValueError("record id must be non-empty")
        if not self.question.strip():
            raise ValueError(f"record {self.id}: question must be non-empty")


def typed_answer(value: object) -> Answer | None:
    """Read a JSON answer value by shape: yes/no, number, span, or spans."""
    if value is None:
        return None
    if isinstance(value, bool):
        return Answer.yesno(value)
    if isinstance(value, (int, float)):
        return Answer.number(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            return None
        if text.lower() in ("yes", "no"):
            return Answer.yesno(text.lower() == "yes")
        number = parse_number(text)
        if number is not None:
            return Answer.number(number)
        return Answer.span(text)
    if isinstance(value, list):
        items = [str(item).strip() for item in value if str(item).strip()]
        if not items:
            return None
        return Answer.spans(items)
    raise ValueError(f"unsupported answer value: {value!r}")


def _month_index(month: str) -> int | None:
    month = month.strip()
    if not month:
        return None
    if month.isdigit():
        return int(month)
    names = {name.lower(): i for i, name in enumerate(calendar.month_name) if name}
    names.update({name.lower(): i for i, name in enumerate(calendar.month_abbr) if name})
    index = names.get(month.lower())
    if index is None:
        raise ValueError(f"unrecognized month {month!r}")
    return index


def _drop_answer(payload: dict) -> Answer | None:
    number = str(payload.get("number", "")).strip()
    if number:
        value = parse_number(number)
        if value is None:
            raise ValueError(f"unparseable number answer {number!r}")
        return Answer.number(value)
    date = payload.get("date") or {}
    if any(str(date.get(k, "")).strip() for k in ("day", "month", "year")):
        day = str(date.get("day", "")).strip()
        year = str(date.get("year", "")).strip()
        return Answer.date(
            day=int(day) if day else None,
            month=_month_index(str(date.get("month", ""))),
            year=int(year) if year else None,
        )
    spans = [str(s).strip() for s in payload.get("spans", []) if str(s).strip()]
    if spans:
        return Answer.spans(spans)
    return None


def _load_drop(path: Path) -> list[InputRecord]:
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise SchemaError(str(path), "expected a JSON object keyed by passage id")
    records: list[InputRecord] = []
    for passage_id, block in data.items():
        try:
            passage = block["passage"]
            for pair in block["qa_pairs"]:
                records.append(
                    InputRecord(
                        id=str(pair["query_id"]),
                        question=str(pair["question"]),
                        context=str(passage),
                        answer=_drop_answer(pair.get("answer") or {}),
                        dataset="drop",
                    )
                )
        except (KeyError, TypeError, ValueError) as error:
            raise SchemaError(str(path), f"passage {passage_id!r}: {error}") from error
    return records


def _load_hotpotqa(path: Path) -> list[InputRecord]:
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise SchemaError(str(path), "expected a JSON list of examples")
    records: list[InputRecord] = []
    for example in data:
        try:
            gold_titles = {title for title, _ in example.get("supporting_facts", [])}
            paragraphs = []
            for title, sentences in example.get("context", []):
                if not gold_titles or title in gold_titles:
                    paragraphs.append("".join(sentences))
            records.append(
                InputRecord(
                    id=str(example["_id"]),
                    question=str(example["question"]),
                    context=" ".join(paragraphs),
                    answer=typed_answer(example.get("answer")),
                    dataset="hotpotqa",
                )
            )
        except (KeyError, TypeError, ValueError) as error:
            raise SchemaError(str(path), f"example {example.get('_id')!r}: {error}") from error
    return records


def _iirc_answer(payload: dict) -> Answer | None:
    kind = payload.get("type")
    if kind in (None, "none"):
        return None
    if kind == "binary":
        text = str(payload.get("answer_value", "")).strip().lower()
        if text not in ("yes", "no"):
            raise ValueError(f"binary answer must be yes/no, got {text!r}")
        return Answer.yesno(text == "yes")
    if kind == "value":
        value = parse_number(str(payload.get("answer_value", "")))
        if value is None:
            raise ValueError("value answer is not numeric")
        return Answer.number(value)
    if kind == "span":
        spans = [str(s.get("text", "")).strip() for s in payload.get("answer_spans", [])]
        spans = [s for s in spans if s]
        if not spans:
            raise ValueError("span answer with no spans")
        return Answer.spans(spans)
    raise ValueError(f"unknown answer type {kind!r}")


def _load_iirc(path: Path) -> list[InputRecord]:
    data = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(data, list):
        raise SchemaError(str(path), "expected a JSON list of articles")
    records: list[InputRecord] = []
    for article in data:
        try:
            base = str(article.get("text", ""))
            for q in article.get("questions", []):
                evidence = " ".join(
                    str(link.get("text", "")).strip()
                    for link in q.get("context", [])
                    if str(link.get("text", "")).strip()
                )
                context = f"{base} {evidence}".strip()
                records.append(
                    InputRecord(
                        id=str(q["qid"]),
                        question=str(q["question"]),
                        context=context,
                        answer=_iirc_answer(q.get("answer") or {}),
                        dataset="iirc",
                    )
                )
        except (KeyError, TypeError, ValueError) as error:
            raise SchemaError(str(path), f"article {article.get('title')!r}: {error}") from error
    return records


def _load_generic_jsonl(path: Path) -> list[InputRecord]:
    records: list[InputRecord] = []
    with path.open(encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
                decomposition = payload.get("decomposition")
                if isinstance(decomposition, list):
                    decomposition = " ;".join(
                        f"return {str(step).strip()}" for step in decomposition
                    )
                records.append(
                    InputRecord(
                        id=str(payload["id"]),
                        question=str(payload["question"]),
                        context=str(payload.get("context", "")),
                        answer=typed_answer(payload.get("answer")),
                        decomposition=decomposition,
                    )
                )
            except (KeyError, TypeError, ValueError) as error:
                raise SchemaError(str(path), f"line {line_no}: {error}") from error
    return records


_BREAK_COLUMNS = ("question_id", "question_text", "decomposition")


def _read_break_rows(path: Path) -> list[dict]:
    with path.open(encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in _BREAK_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise SchemaError(str(path), f"missing columns: {', '.join(missing)}")
        return list(reader)


def _load_break_csv(path: Path) -> list[InputRecord]:
    records: list[InputRecord] = []
    for row_no, row in enumerate(_read_break_rows(path), start=2):
        try:
            records.append(
                InputRecord(
                    id=str(row["question_id"]),
                    question=str(row["question_text"]),
                    decomposition=str(row["decomposition"]),
                )
            )
        except ValueError as error:
            raise SchemaError(str(path), f"row {row_no}: {error}") from error
    return records


def load_break_map(path: str | Path) -> dict[str, str]:
    """Decompositions keyed by question id and by normalized question text."""
    table: dict[str, str] = {}
    for row in _read_break_rows(Path(path)):
        decomposition = str(row["decomposition"])
        table.setdefault(str(row["question_id"]), decomposition)
        table.setdefault(normalize_text(str(row["question_text"])), decomposition)
    return table


_LOADERS = {
    "drop": _load_drop,
    "hotpotqa": _load_hotpotqa,
    "iirc": _load_iirc,
    "generic-jsonl": _load_generic_jsonl,
    "break-csv": _load_break_csv,
}


def load_dataset(path: str | Path, format: str) -> list[InputRecord]:
    """Load ``path`` in the named format; raises UnknownFormat/SchemaError."""
    loader = _LOADERS.get(format)
    if loader is None:
        raise UnknownFormat(format)
    file_path = Path(path)
    if not file_path.exists():
        raise SchemaError(str(file_path), "file does not exist")
    try:
        return loader(file_path)
    except json.JSONDecodeError as error:
        raise SchemaError(str(file_path), f"invalid JSON: {error}") from error
