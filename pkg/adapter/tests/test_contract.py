"""Contract equivalence: the echo service must be indistinguishable from the
in-process stub backend the generation pipeline uses, for the same fixture
file — same hits, same scores, same lenient-miss replies, byte for byte."""

import json
import random
import time
from contextlib import contextmanager
from pathlib import Path

from fastapi.testclient import TestClient

from bpb.backends import context_digest, stub_backend
from bpb_adapter import echo_mode


@contextmanager
def criterion(label):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {label}")
        raise
    print(f"[PASS] {label} ({time.perf_counter() - start:.2f}s)")


def build_shared_fixtures(path):
    rng = random.Random(20260814)
    entries = [
        {"question": "When was Madrugada formed?", "context_sha256": "*", "answer": "2007"}
    ]
    contexts = {}
    for i in range(39):
        question = f"What is the {rng.choice(['size', 'age', 'rank'])} of item {i}?"
        answer = str(rng.randint(1, 500))
        if i % 2:
            entries.append(
                {"question": question, "context_sha256": "*", "answer": answer}
            )
            contexts[question] = f"Filler passage {rng.random():.6f}."
        else:
            context = f"Item {i} has measurements recorded on page {rng.randint(1, 99)}."
            entries.append(
                {
                    "question": question,
                    "context_sha256": context_digest(context),
                    "answer": answer,
                }
            )
            contexts[question] = context
    path.write_text(json.dumps(entries), encoding="utf-8")
    return entries, contexts, rng


def test_echo_mode_matches_stub_backend_over_100_queries(tmp_path):
    with criterion("contract equivalence: echo service == stub backend on 100 queries"):
        path = tmp_path / "shared_fixtures.json"
        entries, contexts, rng = build_shared_fixtures(path)

        stub = stub_backend(path)
        client = TestClient(echo_mode(path))

        queries = []
        for entry in entries:  # 40 straight hits with the recorded context
            question = entry["question"]
            queries.append((question, contexts.get(question, "anything at all")))
        for entry in rng.sample(entries, 20):  # case/spacing variants still hit
            question = entry["question"]
            queries.append(
                ("  " + question.upper().rstrip("?") + " ??", contexts.get(question, "x"))
            )
        for i in range(20):  # unknown questions -> lenient empty answers
            queries.append((f"Completely unknown question {i}?", "Some passage."))
        for entry in rng.sample([e for e in entries if e["context_sha256"] != "*"], 20):
            queries.append((entry["question"], "The wrong passage entirely."))

        assert len(queries) == 100
        for i, (question, context) in enumerate(queries):
            expected_answer, expected_score = stub.answer(question, context)
            reply = client.post(
                "/v1/answer",
                json={"id": f"q-{i}", "question": question, "context": context},
            )
            assert reply.status_code == 200, (question, reply.text)
            body = reply.json()
            assert body["id"] == f"q-{i}"
            assert body["answer"] == expected_answer, (question, context)
            assert body["answer"].encode() == expected_answer.encode()
            assert body["score"] == expected_score


def test_schema_violations_return_400(tmp_path):
    with criterion("contract schema guard: malformed requests are 400"):
        path = tmp_path / "shared_fixtures.json"
        build_shared_fixtures(path)
        client = TestClient(echo_mode(path))
        for payload in (
            {"id": "x", "question": "missing context"},
            {"id": 12, "question": "q", "context": "c"},
            {"question": "q", "context": "c"},
            {"id": "x", "question": ["not", "a", "string"], "context": "c"},
        ):
            assert client.post("/v1/answer", json=payload).status_code == 400


def test_generation_pipeline_is_self_contained():
    # The generation package must run without this service: nothing in its
    # sources or tests may import it.
    primary_root = Path(__file__).resolve().parents[2]
    assert (primary_root / "src" / "bpb").is_dir()
    for folder in ("src", "tests"):
        for source in (primary_root / folder).rglob("*.py"):
            assert "bpb_adapter" not in source.read_text(encoding="utf-8"), source
