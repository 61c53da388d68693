"""Shared text normalization and number parsing.

Scoring, answer rules, and the step executor all need the same notion of
"the same answer up to formatting": case, articles, punctuation, and number
formatting ("23.0" vs "23", "1,234" vs "1234") should not matter. Keeping
the helpers here ensures every module normalizes identically.
"""

from __future__ import annotations

import re
import string

_ARTICLES = frozenset({"a", "an", "the"})
_PUNCT_TABLE = str.maketrans("", "", string.punctuation)
_NUMBER_RE = re.compile(r"[-+]?\d[\d,]*(?:\.\d+)?")
_FULL_NUMBER_RE = re.compile(rf"^{_NUMBER_RE.pattern}$")
_LEADING_NUMBER_RE = re.compile(rf"^\s*({_NUMBER_RE.pattern})")


def parse_number(text: str) -> float | None:
    """Parse ``text`` as a bare number, tolerating comma grouping.

    Returns None when the trimmed text is not wholly numeric.
    """
    t = text.strip()
    if not _FULL_NUMBER_RE.match(t):
        return None
    try:
        return float(t.replace(",", ""))
    except ValueError:  # pragma: no cover - guarded by the regex
        return None


def parse_leading_number(text: str) -> float | None:
    """Parse a number at the start of ``text``, allowing a unit tail.

    "25 yards" -> 25.0; "the 25 yards" -> None (must start with the numeral).
    """
    m = _LEADING_NUMBER_RE.match(text)
    if m is None:
        return None
    return float(m.group(1).replace(",", ""))


def format_number(value: float | int) -> str:
    """Canonical text for a number: integral values print without a decimal."""
    if isinstance(value, bool):  # bool is an int subclass; never wanted here
        raise TypeError("booleans are not numbers")
    f = float(value)
    if f == int(f) and abs(f) < 1e15:
        return str(int(f))
    return str(f)


def _canonical_number_token(token: str) -> str | None:
    stripped = token.strip(string.punctuation)
    value = parse_number(stripped)
    if value is None:
        return None
    return format_number(value)


def normalize_tokens(text: str) -> list[str]:
    """Lowercased tokens with articles and punctuation removed.

    Numeric tokens are canonicalized before punctuation stripping so that
    "23.0" -> "23" and "1,234" -> "1234" rather than "230" / "1234".
    """
    out: list[str] = []
    for token in text.lower().split():
        number = _canonical_number_token(token)
        if number is not None:
            out.append(number)
            continue
        bare = token.translate(_PUNCT_TABLE)
        if not bare or bare in _ARTICLES:
            continue
        out.append(bare)
    return out


def normalize_text(text: str) -> str:
    """Whitespace-joined form of :func:`normalize_tokens`."""
    return " ".join(normalize_tokens(text))


def word_count(text: str) -> int:
    return len(text.split())


# Commas that are digit grouping ("1,234") do not split a list.
_LIST_SPLIT_RE = re.compile(r"\s*,\s*(?!\d{3}\b)|\s+and\s+|\s*;\s*", re.IGNORECASE)


def split_list(text: str) -> list[str]:
    """Split an enumeration on commas, semicolons, and "and"."""
    return [part for part in _LIST_SPLIT_RE.split(text) if part]
