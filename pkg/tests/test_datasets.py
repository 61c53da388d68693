"""Tests for dataset loading across the supported input formats."""

from __future__ import annotations

import json

import pytest

from bpb.answers import Answer, AnswerType
from bpb.datasets import (
    InputRecord,
    SchemaError,
    UnknownFormat,
    load_break_map,
    load_dataset,
    typed_answer,
)


def write(tmp_path, name: str, text: str):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_typed_answer_by_shape():
    assert typed_answer(None) is None
    assert typed_answer("") is None
    assert typed_answer("yes") == Answer.yesno(True)
    assert typed_answer("No") == Answer.yesno(False)
    assert typed_answer("23") == Answer.number(23)
    assert typed_answer(23.5) == Answer.number(23.5)
    assert typed_answer(True) == Answer.yesno(True)
    assert typed_answer("Jim Kerr") == Answer.span("Jim Kerr")
    assert typed_answer(["x", "y"]) == Answer.spans(["x", "y"])
    with pytest.raises(ValueError):
        typed_answer({"weird": 1})


def test_load_drop(tmp_path):
    payload = {
        "nfl_1": {
            "passage": "The Seahawks played the Rams. Hasselbeck threw 23 interceptions.",
            "qa_pairs": [
                {
                    "question": "How many interceptions did Matt Hasselbeck throw?",
                    "query_id": "q1",
                    "answer": {"number": "23", "spans": [], "date": {}},
                },
                {
                    "question": "Who threw interceptions?",
                    "query_id": "q2",
                    "answer": {"number": "", "spans": ["Hasselbeck"], "date": {}},
                },
                {
                    "question": "When did the game take place?",
                    "query_id": "q3",
                    "answer": {
                        "number": "",
                        "spans": [],
                        "date": {"day": "5", "month": "March", "year": "1987"},
                    },
                },
            ],
        }
    }
    path = write(tmp_path, "drop.json", json.dumps(payload))
    records = load_dataset(path, "drop")
    assert [r.id for r in records] == ["q1", "q2", "q3"]
    assert records[0].answer == Answer.number(23)
    assert records[0].context.startswith("The Seahawks")
    assert records[1].answer == Answer.span("Hasselbeck")
    assert records[2].answer == Answer.date(day=5, month=3, year=1987)


def test_load_drop_numeric_month(tmp_path):
    payload = {
        "p": {
            "passage": "text",
            "qa_pairs": [
                {
                    "question": "When?",
                    "query_id": "q",
                    "answer": {"number": "", "spans": [], "date": {"month": "3", "year": "2001"}},
                }
            ],
        }
    }
    records = load_dataset(write(tmp_path, "d.json", json.dumps(payload)), "drop")
    assert records[0].answer == Answer.date(month=3, year=2001)


def test_load_hotpotqa_keeps_gold_paragraphs(tmp_path):
    payload = [
        {
            "_id": "h1",
            "question": "Are Giuseppe Verdi and Ambroise Thomas both Opera composers?",
            "answer": "yes",
            "supporting_facts": [["Giuseppe Verdi", 0], ["Ambroise Thomas", 0]],
            "context": [
                ["Giuseppe Verdi", ["Verdi was an Italian opera composer."]],
                ["Ambroise Thomas", ["Thomas was a French opera composer."]],
                ["Red herring", ["This paragraph is about something else."]],
            ],
        }
    ]
    records = load_dataset(write(tmp_path, "h.json", json.dumps(payload)), "hotpotqa")
    assert records[0].answer == Answer.yesno(True)
    assert "Italian opera" in records[0].context
    assert "French opera" in records[0].context
    assert "something else" not in records[0].context


def test_load_iirc_concatenates_passage_and_evidence(tmp_path):
    payload = [
        {
            "title": "Madrugada",
            "text": "Madrugada was a Norwegian rock band.",
            "questions": [
                {
                    "qid": "i1",
                    "question": "How many years after the final concert did X become popular?",
                    "answer": {"type": "value", "answer_value": "2"},
                    "context": [
                        {"text": "The final concert took place in 2007."},
                        {"text": "Sunday Driver became popular in 2009."},
                    ],
                },
                {
                    "qid": "i2",
                    "question": "Was the band still active?",
                    "answer": {"type": "binary", "answer_value": "no"},
                    "context": [],
                },
                {
                    "qid": "i3",
                    "question": "Who fronted the band?",
                    "answer": {"type": "span", "answer_spans": [{"text": "Sivert Hoyem"}]},
                    "context": [],
                },
                {
                    "qid": "i4",
                    "question": "What cannot be answered?",
                    "answer": {"type": "none"},
                    "context": [],
                },
            ],
        }
    ]
    records = load_dataset(write(tmp_path, "i.json", json.dumps(payload)), "iirc")
    assert records[0].answer == Answer.number(2)
    assert records[0].context == (
        "Madrugada was a Norwegian rock band. "
        "The final concert took place in 2007. Sunday Driver became popular in 2009."
    )
    assert records[1].answer == Answer.yesno(False)
    assert records[2].answer == Answer.span("Sivert Hoyem")
    assert records[3].answer is None


def test_load_generic_jsonl(tmp_path):
    lines = [
        json.dumps(
            {
                "id": "g1",
                "question": "How many interceptions did Matt Hasselbeck throw?",
                "context": "Hasselbeck threw 23 interceptions.",
                "answer": "23",
                "decomposition": ["interceptions of Matt Hasselbeck", "number of #1"],
            }
        ),
        "",
        json.dumps({"id": "g2", "question": "Who won?", "answer": "Boston"}),
    ]
    path = write(tmp_path, "g.jsonl", "\n".join(lines))
    records = load_dataset(path, "generic-jsonl")
    assert len(records) == 2
    assert records[0].decomposition == (
        "return interceptions of Matt Hasselbeck ;return number of #1"
    )
    assert records[0].answer == Answer.number(23)
    assert records[1].context == ""
    assert records[1].decomposition is None


def test_load_break_csv_and_map(tmp_path):
    rows = (
        "question_id,question_text,decomposition\n"
        'b1,How many teams did he start with?,"return teams ;return number of #1"\n'
        'b2,Which was first?,"return events ;return which is first of #1"\n'
    )
    path = write(tmp_path, "break.csv", rows)
    records = load_dataset(path, "break-csv")
    assert records[0] == InputRecord(
        id="b1",
        question="How many teams did he start with?",
        decomposition="return teams ;return number of #1",
    )
    table = load_break_map(path)
    assert table["b1"] == "return teams ;return number of #1"
    assert table["how many teams did he start with"] == table["b1"]


def test_schema_errors(tmp_path):
    with pytest.raises(UnknownFormat):
        load_dataset(write(tmp_path, "x.json", "{}"), "squad")
    with pytest.raises(SchemaError):
        load_dataset(tmp_path / "missing.json", "drop")
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path, "bad.json", "not json"), "drop")
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path, "list.json", "[]"), "drop")
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path, "noid.jsonl", '{"question": "Q?"}'), "generic-jsonl")
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path, "cols.csv", "a,b\n1,2\n"), "break-csv")
    bad_binary = [
        {
            "title": "t",
            "text": "x",
            "questions": [
                {"qid": "q", "question": "Q?", "answer": {"type": "binary", "answer_value": "maybe"}}
            ],
        }
    ]
    with pytest.raises(SchemaError):
        load_dataset(write(tmp_path, "iirc.json", json.dumps(bad_binary)), "iirc")


def test_record_validation():
    with pytest.raises(ValueError):
        InputRecord(id="", question="Q?")
    with pytest.raises(ValueError):
        InputRecord(id="x", question="  ")


def test_answer_type_surface():
    record = InputRecord(id="x", question="Q?", answer=Answer.spans(["x", "y"]))
    assert record.answer.type is AnswerType.SPANS
