"""Golden rewrite and realization fixtures shared across test modules.

Decompositions are written in the canonical delimited form. Each rewrite row
carries the named kind, the input, the expected output, and where needed the
original answer / condition that selects the candidate under test.
"""

from __future__ import annotations

from bpb.perturb import Comparator, PerturbationKind

# (kind, original, expected, original_answer, condition)
REWRITE_ROWS: list[tuple] = [
    (
        PerturbationKind.APPEND_BOOL,
        "return league that Kadeem Jack is a player in "
        ";return teams that #1 started with "
        ";return number of #2",
        "return league that Kadeem Jack is a player in "
        ";return teams that #1 started with "
        ";return number of #2 "
        ";return if #3 is higher than 2",
        4,
        (Comparator.GT, 2),
    ),
    (
        PerturbationKind.CHANGE_LAST_TO_ARITH,
        "return when was Hughes-Donahue Gallery founded "
        ";return when was Art Euphoric founded "
        ";return which was first of #1 , #2",
        "return when was Hughes-Donahue Gallery founded "
        ";return when was Art Euphoric founded "
        ";return the difference of #1 and #2",
        None,
        None,
    ),
    (
        PerturbationKind.CHANGE_LAST_TO_BOOL,
        "return year of Madrugada's final concert "
        ";return year when Sunday Driver become popular "
        ";return the difference of #2 and #1",
        "return year of Madrugada's final concert "
        ";return year when Sunday Driver become popular "
        ";return if #1 is the same as #2",
        None,
        None,
    ),
    (
        PerturbationKind.REPLACE_ARITH,
        "return native Hindi speakers "
        ";return native Kannada speakers "
        ";return number of #1 "
        ";return number of #2 "
        ";return difference of #3 and #4",
        "return native Hindi speakers "
        ";return native Kannada speakers "
        ";return number of #1 "
        ";return number of #2 "
        ";return sum of #3 and #4",
        None,
        None,
    ),
    (
        PerturbationKind.REPLACE_BOOL,
        "return if Stenocereus include tree like plants "
        ";return if Pachypodium include treelike plants "
        ";return if both #1 and #2 are true",
        "return if Stenocereus include tree like plants "
        ";return if Pachypodium include treelike plants "
        ";return if both #1 and #2 are false",
        None,
        None,
    ),
    (
        PerturbationKind.REPLACE_COMP,
        "return size of the people group in the county according to the census "
        ";return size of households group in the county according to the census "
        ";return which is smaller of #1, #2",
        "return size of the people group in the county according to the census "
        ";return size of households group in the county according to the census "
        ";return which is highest of #1, #2",
        None,
        None,
    ),
    (
        # The printed source row leaves a dangling reference after deletion;
        # rewiring the consumer onto the pruned step's input is the
        # documented resolution.
        PerturbationKind.PRUNE_STEP,
        "return adult population of Cunter "
        ";return #1 excluding seniors "
        ";return number of #2",
        "return adult population of Cunter ;return number of #1",
        None,
        None,
    ),
]

# (question, kind, condition, expected question, pattern id)
REALIZATION_ROWS: list[tuple] = [
    (
        "How many interceptions did Matt Hasselbeck throw?",
        PerturbationKind.APPEND_BOOL,
        (Comparator.LT, 23),
        "If Matt Hasselbeck throw less than 23 interceptions?",
        "HOWMANY_DID",
    ),
    (
        "How many touchdowns were there in the first quarter?",
        PerturbationKind.APPEND_BOOL,
        (Comparator.EQ, 2),
        "If there were two touchdowns in the first quarter?",
        "HOWMANY_WERE",
    ),
    (
        "Are Giuseppe Verdi and Ambroise Thomas both Opera composers?",
        PerturbationKind.REPLACE_BOOL,
        None,
        "Are neither Giuseppe Verdi nor Ambroise Thomas Opera composers?",
        "BOTH_TO_NEITHER",
    ),
    (
        "Which singer is younger, Shirley Manson or Jim Kerr?",
        PerturbationKind.REPLACE_COMP,
        None,
        "Which singer is older, Shirley Manson or Jim Kerr?",
        "SUPERLATIVE_ANTONYM",
    ),
]
