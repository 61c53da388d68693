"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from the rule statements alone,
with different mechanics than the library (plain loops, rounding-based
dedup), so that agreement is evidence rather than tautology.
"""

from __future__ import annotations


def oracle_flip_answer(
    numbers: list[float], original_value: float, original_op: str
) -> float | None:
    """Brute-force pair rule for arithmetic flips.

    ``original_op`` is "sum" when the original question added a unique pair
    (so the flipped question wants their absolute difference) and "diff"
    when it took a difference (flipped wants the sum). Returns None unless
    the original answer is at least 10 and exactly one unordered pair of
    distinct values produces it.
    """
    if original_op not in ("sum", "diff"):
        raise ValueError(original_op)
    a = float(original_value)
    if a < 10:
        return None
    by_key: dict[float, float] = {}
    for n in numbers:
        by_key.setdefault(round(float(n), 6), float(n))
    vals = sorted(by_key.values())
    hits: list[tuple[float, float]] = []
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            x, y = vals[i], vals[j]
            produced = x + y if original_op == "sum" else abs(x - y)
            if abs(produced - a) <= 1e-6:
                hits.append((x, y))
    if len(hits) != 1:
        return None
    x, y = hits[0]
    return abs(x - y) if original_op == "sum" else x + y
