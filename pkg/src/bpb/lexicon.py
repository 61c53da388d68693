"""Word tables used for operator classification and question rewriting.

Everything in this module is data. Code that needs to reason about
comparatives, antonyms, or small numbers imports these tables rather than
hard-coding word lists inline.
"""

from __future__ import annotations

# Maps a comparative or superlative surface form to the comparison pole it
# selects. Used to decide whether "which is <word> of #1, #2" picks the
# larger or the smaller argument.
COMPARATIVE_POLARITY: dict[str, str] = {
    "highest": "highest",
    "higher": "highest",
    "largest": "highest",
    "larger": "highest",
    "biggest": "highest",
    "bigger": "highest",
    "most": "highest",
    "more": "highest",
    "older": "highest",
    "oldest": "highest",
    "longer": "highest",
    "longest": "highest",
    "later": "highest",
    "latest": "highest",
    "last": "highest",
    "greater": "highest",
    "greatest": "highest",
    "lowest": "lowest",
    "lower": "lowest",
    "smallest": "lowest",
    "smaller": "lowest",
    "least": "lowest",
    "fewest": "lowest",
    "fewer": "lowest",
    "less": "lowest",
    "younger": "lowest",
    "youngest": "lowest",
    "shorter": "lowest",
    "shortest": "lowest",
    "earlier": "lowest",
    "earliest": "lowest",
    "first": "lowest",
}

# Disjoint antonym pairs. The derived ANTONYMS mapping is bidirectional, so
# lookup is an involution: antonym(antonym(w)) == w for every listed word.
_ANTONYM_PAIRS: tuple[tuple[str, str], ...] = (
    ("younger", "older"),
    ("youngest", "oldest"),
    ("smaller", "larger"),
    ("smallest", "largest"),
    ("shorter", "longer"),
    ("shortest", "longest"),
    ("fewer", "more"),
    ("fewest", "most"),
    ("higher", "lower"),
    ("highest", "lowest"),
    ("earlier", "later"),
    ("earliest", "latest"),
    ("first", "last"),
    ("least", "greatest"),
    ("bigger", "littler"),
    ("biggest", "littlest"),
    ("better", "worse"),
    ("best", "worst"),
    ("faster", "slower"),
    ("fastest", "slowest"),
    ("heavier", "lighter"),
    ("heaviest", "lightest"),
    ("wider", "narrower"),
    ("widest", "narrowest"),
    ("deeper", "shallower"),
    ("deepest", "shallowest"),
    ("nearer", "farther"),
    ("nearest", "farthest"),
    ("warmer", "colder"),
    ("warmest", "coldest"),
)

ANTONYMS: dict[str, str] = {}
for _a, _b in _ANTONYM_PAIRS:
    ANTONYMS[_a] = _b
    ANTONYMS[_b] = _a

# Number words accepted when mining numbers out of passage text.
NUMBER_WORDS: dict[str, int] = {
    "one": 1,
    "two": 2,
    "three": 3,
    "four": 4,
    "five": 5,
    "six": 6,
    "seven": 7,
    "eight": 8,
    "nine": 9,
    "ten": 10,
    "eleven": 11,
    "twelve": 12,
    "thirteen": 13,
    "fourteen": 14,
    "fifteen": 15,
    "sixteen": 16,
    "seventeen": 17,
    "eighteen": 18,
    "nineteen": 19,
    "twenty": 20,
}

# Spelled-out forms used when a small count is rendered inside a question.
SPELLED_NUMBERS: dict[int, str] = {v: w for w, v in NUMBER_WORDS.items() if v <= 10}
