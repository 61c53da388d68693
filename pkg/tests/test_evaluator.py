"""Tests for the step executor: typing, discards, and backend interplay."""

from __future__ import annotations

import random

import pytest

from bpb.answers import Answer
from bpb.backends import StubRCBackend
from bpb.evaluator import (
    DiscardReason,
    Evaluation,
    EvaluatorConfig,
    ValueKind,
    evaluate,
    parse_backend_reply,
    parse_comparison_phrase,
    substitute_refs,
)
from bpb.perturb import Comparator
from bpb.qdmr import Decomposition, Operator, OperatorKind, Step, parse_decomposition

from reference_interpreter import ScriptedBackend, random_evaluable, reference_evaluate


def stub(pairs: dict[str, str]) -> StubRCBackend:
    entries = [
        {"question": q, "context_sha256": "*", "answer": a} for q, a in pairs.items()
    ]
    return StubRCBackend(entries=entries)


# --------------------------------------------------------------------------
# Reply classification
# --------------------------------------------------------------------------


def test_parse_reply_yesno():
    assert parse_backend_reply("yes").kind is ValueKind.YESNO
    value = parse_backend_reply("No.")
    assert value.kind is ValueKind.YESNO and value.flag is False


def test_parse_reply_numbers():
    assert parse_backend_reply("23").number == 23.0
    assert parse_backend_reply("1,234").number == 1234.0
    value = parse_backend_reply("25 yards")
    assert value.kind is ValueKind.NUMBER and value.number == 25.0


def test_parse_reply_lists():
    value = parse_backend_reply("red, green and blue")
    assert value.kind is ValueKind.TEXT_LIST
    assert value.items == ("red", "green", "blue")
    assert parse_backend_reply("Tom and Jerry").items == ("Tom", "Jerry")
    assert parse_backend_reply("alpha; beta; gamma").items == ("alpha", "beta", "gamma")


def test_parse_reply_grouped_number_is_not_a_list():
    assert parse_backend_reply("1,234").kind is ValueKind.NUMBER
    assert parse_backend_reply("4, 8 and 15").kind is ValueKind.TEXT_LIST


def test_parse_reply_plain_text():
    assert parse_backend_reply("Boston").kind is ValueKind.TEXT


def test_parse_reply_discards():
    from bpb.evaluator import _Discard

    with pytest.raises(_Discard) as empty:
        parse_backend_reply("   ")
    assert empty.value.reason is DiscardReason.EMPTY_REPLY
    with pytest.raises(_Discard) as long_reply:
        parse_backend_reply("one two three four five six seven eight nine")
    assert long_reply.value.reason is DiscardReason.TOO_LONG
    assert parse_backend_reply("one two three four five six seven eight").kind is ValueKind.TEXT


# --------------------------------------------------------------------------
# Question formation
# --------------------------------------------------------------------------


def test_substitute_refs_wraps_descriptions():
    assert substitute_refs("teams that #1 started with", {1: "the league"}) == (
        "What is teams that the league started with?"
    )


def test_substitute_refs_keeps_interrogatives():
    assert substitute_refs("when was #1 founded", {1: "the gallery"}) == (
        "When was the gallery founded?"
    )
    assert substitute_refs("if #1 won the game", {1: "Boston"}) == "If Boston won the game?"


def test_substitute_refs_strips_trailing_punctuation():
    assert substitute_refs("what is #1?", {1: "the answer"}) == "What is the answer?"


# --------------------------------------------------------------------------
# Comparison phrase reading
# --------------------------------------------------------------------------


def test_parse_comparison_phrase_variants():
    assert parse_comparison_phrase("if #1 is higher than 23") == (Comparator.GT, 23.0)
    assert parse_comparison_phrase("if #1 is at least 1,200") == (Comparator.GEQ, 1200.0)
    assert parse_comparison_phrase("if #1 is lower than three") == (Comparator.LT, 3.0)
    assert parse_comparison_phrase("if #1 is not equal to 4") == (Comparator.NEQ, 4.0)
    assert parse_comparison_phrase("if #1 is equal to 4") == (Comparator.EQ, 4.0)
    assert parse_comparison_phrase("if #1 is mysterious") is None


# --------------------------------------------------------------------------
# End-to-end chains
# --------------------------------------------------------------------------


def test_difference_chain():
    dec = parse_decomposition(
        "return year of Madrugada's final concert "
        ";return year when Sunday Driver become popular "
        ";return the difference of #2 and #1"
    )
    backend = stub(
        {
            "What is year of Madrugada's final concert?": "2007",
            "What is year when Sunday Driver become popular?": "2009",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.number(2)
    assert result.queries == 2


def test_count_over_projected_list_then_compare():
    dec = parse_decomposition(
        "return league that Kadeem Jack is a player in "
        ";return teams that #1 started with "
        ";return number of #2 "
        ";return if #3 is higher than 2"
    )
    backend = stub(
        {
            "What is league that Kadeem Jack is a player in?": "American East Conference",
            "What is teams that American East Conference started with?": (
                "Vermont, Iona, Maine and Albany"
            ),
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.yesno(True)
    assert result.queries == 2
    assert result.values[1].kind is ValueKind.TEXT_LIST
    assert result.values[2].number == 4.0


def test_noisy_projection_blocks_arithmetic():
    dec = parse_decomposition(
        "return the home team ;return coach of #1 ;return points scored ;return sum of #2 and #3"
    )
    backend = stub(
        {
            "What is the home team?": "Boston",
            "What is coach of Boston?": "John Smith",
            "What is points scored?": "12",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.discarded
    assert result.reason is DiscardReason.NOISY_OPERAND


def test_noisy_projection_allowed_when_counting():
    dec = parse_decomposition("return the home team ;return rivals of #1 ;return number of #2")
    backend = stub(
        {
            "What is the home team?": "Boston",
            "What is rivals of Boston?": "New York, Hartford and Providence",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.number(3)


def test_noisy_projection_exempt_when_all_items_numeric():
    dec = parse_decomposition("return the games ;return scores of #1 ;return sum of #2")
    backend = stub(
        {
            "What is the games?": "the games",
            "What is scores of the games?": "4, 8 and 15",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.number(27)


def test_comparison_answers_with_winning_description():
    dec = parse_decomposition(
        "return when was Hughes-Donahue Gallery founded "
        ";return when was Art Euphoric founded "
        ";return which was first of #1 , #2"
    )
    backend = stub(
        {
            "When was Hughes-Donahue Gallery founded?": "1901",
            "When was Art Euphoric founded?": "1950",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.span("when was Hughes-Donahue Gallery founded")


def test_comparison_tie_picks_first_listed():
    dec = parse_decomposition(
        "return height of tower A ;return height of tower B ;return which is highest of #1, #2"
    )
    backend = stub(
        {
            "What is height of tower A?": "100",
            "What is height of tower B?": "100",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.span("height of tower A")


def test_boolean_same_as_numeric_and_text():
    dec = parse_decomposition(
        "return year A started ;return year B started ;return if #1 is the same as #2"
    )
    same = stub({"What is year A started?": "1999", "What is year B started?": "1999.0"})
    assert evaluate(dec, "ctx", same).answer == Answer.yesno(True)
    text = parse_decomposition(
        "return capital of Maine ;return capital of Vermont ;return if #1 is the same as #2"
    )
    différent = stub(
        {
            "What is capital of Maine?": "Augusta",
            "What is capital of Vermont?": "Montpelier",
        }
    )
    assert evaluate(text, "ctx", différent).answer == Answer.yesno(False)


def test_boolean_both_and_neither():
    dec = parse_decomposition(
        "return if ice is cold ;return if fire is cold ;return if both #1 and #2 are true"
    )
    backend = stub({"If ice is cold?": "yes", "If fire is cold?": "no"})
    assert evaluate(dec, "ctx", backend).answer == Answer.yesno(False)
    neither = parse_decomposition(
        "return if ice is cold ;return if fire is cold ;return if both #1 and #2 are false"
    )
    assert evaluate(neither, "ctx", backend).answer == Answer.yesno(False)
    both_false = stub({"If ice is cold?": "no", "If fire is cold?": "no"})
    assert evaluate(neither, "ctx", both_false).answer == Answer.yesno(True)


def test_boolean_over_non_yesno_is_type_mismatch():
    dec = parse_decomposition(
        "return color of the sky ;return if water is wet ;return if both #1 and #2 are true"
    )
    backend = stub({"What is color of the sky?": "blue", "If water is wet?": "yes"})
    result = evaluate(dec, "ctx", backend)
    assert result.reason is DiscardReason.TYPE_MISMATCH


def test_union_merges_and_counts():
    dec = parse_decomposition(
        "return rivers of the north ;return rivers of the south ;return #1 or #2 "
        ";return number of #3"
    )
    backend = stub(
        {
            "What is rivers of the north?": "Penobscot and Kennebec",
            "What is rivers of the south?": "Saco",
        }
    )
    result = evaluate(dec, "ctx", backend)
    assert result.answer == Answer.number(3)


def test_intersection_matches_normalized_and_empty_discards():
    dec = parse_decomposition(
        "return eastern teams ;return coastal teams ;return teams in both #1 and #2"
    )
    overlapping = stub(
        {
            "What is eastern teams?": "Boston, Hartford and Albany",
            "What is coastal teams?": "the Boston and Portland",
        }
    )
    result = evaluate(dec, "ctx", overlapping)
    assert result.answer == Answer.span("Boston")
    disjoint = stub(
        {
            "What is eastern teams?": "Boston and Hartford",
            "What is coastal teams?": "Portland and Savannah",
        }
    )
    assert evaluate(dec, "ctx", disjoint).reason is DiscardReason.EMPTY_RESULT


def test_discard_from_query_step():
    dec = parse_decomposition("return something unanswerable ;return number of #1")
    empty = stub({"What is something unanswerable?": ""})
    result = evaluate(dec, "ctx", empty)
    assert result.reason is DiscardReason.EMPTY_REPLY
    assert result.queries == 1
    rambling = stub(
        {"What is something unanswerable?": "well it is hard to say in under eight words"}
    )
    assert evaluate(dec, "ctx", rambling).reason is DiscardReason.TOO_LONG


def test_arithmetic_over_text_is_non_numeric():
    dec = parse_decomposition(
        "return first city ;return second city ;return sum of #1 and #2"
    )
    backend = stub({"What is first city?": "Boston", "What is second city?": "Hartford"})
    assert evaluate(dec, "ctx", backend).reason is DiscardReason.NON_NUMERIC


def test_malformed_comparison_step_discards():
    leaf = Step.from_text("points scored", step=1)
    broken = Step(
        text="if #1 is mysterious",
        refs=(1,),
        operator=Operator(OperatorKind.BOOLEAN, "compare-to-value"),
    )
    dec = Decomposition(steps=(leaf, broken))
    backend = stub({"What is points scored?": "12"})
    assert evaluate(dec, "ctx", backend).reason is DiscardReason.MALFORMED_STEP


def test_aggregate_count_of_single_value_is_one():
    dec = parse_decomposition("return the capital city ;return number of #1")
    backend = stub({"What is the capital city?": "Boston"})
    assert evaluate(dec, "ctx", backend).answer == Answer.number(1)


def test_word_number_replies_can_feed_arithmetic():
    dec = parse_decomposition(
        "return goals in the first half ;return goals in the second half "
        ";return sum of #1 and #2"
    )
    backend = stub(
        {
            "What is goals in the first half?": "three",
            "What is goals in the second half?": "2",
        }
    )
    assert evaluate(dec, "ctx", backend).answer == Answer.number(5)


def test_evaluation_shape_invariant():
    with pytest.raises(ValueError):
        Evaluation(answer=None, reason=None)
    with pytest.raises(ValueError):
        Evaluation(answer=Answer.number(1), reason=DiscardReason.TOO_LONG)


def test_max_answer_words_is_configurable():
    dec = parse_decomposition("return the starters ;return number of #1")
    backend = stub({"What is the starters?": "Ann, Bob, Cid, Dee, Eli"})
    tight = EvaluatorConfig(max_answer_words=4)
    assert evaluate(dec, "ctx", backend, tight).reason is DiscardReason.TOO_LONG
    assert evaluate(dec, "ctx", backend).answer == Answer.number(5)


# --------------------------------------------------------------------------
# Cross-check against the independent interpreter
# --------------------------------------------------------------------------


def comparable(result: Evaluation):
    if result.discarded:
        return result.reason.value, None, result.queries
    answer = result.answer
    if answer.type.value == "NUMBER":
        payload = ("number", answer.value)
    elif answer.type.value == "YESNO":
        payload = ("yesno", answer.value)
    elif answer.type.value == "SPANS":
        payload = ("spans", answer.value)
    else:
        payload = ("span", answer.value)
    return "answer", payload, result.queries


def test_matches_reference_interpreter_on_random_workloads():
    rng = random.Random(2024)
    agreements = 0
    for i in range(250):
        dec = random_evaluable(rng)
        tag = f"case-{i}:"
        mine = evaluate(dec, "ctx", ScriptedBackend(tag))
        theirs = reference_evaluate(dec, "ctx", ScriptedBackend(tag))
        assert comparable(mine) == theirs, f"case {i}: {dec}"
        agreements += 1
    assert agreements == 250
