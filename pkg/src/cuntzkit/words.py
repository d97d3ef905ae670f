"""Finite words over the alphabet {1, ..., N}.

Conventions used throughout the package:

* a word is a tuple of ints, read left to right; the empty word is ();
* ``tail(w)`` is the last letter, with ``None`` standing in for the
  "no letter" marker of the empty word, so a tail comparison between an
  empty and a nonempty word is never accidentally equal;
* the shift acts on the left, so the meet that matters is the longest
  common *suffix*; prefixes enter only through the boundary metric.

Enumeration order is (length, lexicographic) everywhere, which keeps
basis orderings and cache keys reproducible across runs.
"""

from __future__ import annotations

from itertools import product
from typing import Iterator

Word = tuple[int, ...]

EMPTY: Word = ()


def word(text: str) -> Word:
    """Parse a digit string such as "211" into a word ("" -> empty word)."""
    return tuple(int(ch) for ch in text)


def text(w: Word) -> str:
    """Render a word as a digit string; inverse of :func:`word` for letters <= 9."""
    return "".join(str(a) for a in w)


def tail(w: Word) -> int | None:
    """Last letter of ``w``, or None for the empty word."""
    return w[-1] if w else None


def common_parts(mu: Word, nu: Word) -> tuple[Word, Word]:
    """Return (longest common suffix, longest common prefix) of the two words."""
    s = 0
    while s < len(mu) and s < len(nu) and mu[-1 - s] == nu[-1 - s]:
        s += 1
    p = 0
    while p < len(mu) and p < len(nu) and mu[p] == nu[p]:
        p += 1
    return nu[len(nu) - s:], mu[:p]


def common_suffix(mu: Word, nu: Word) -> Word:
    return common_parts(mu, nu)[0]


def common_prefix(mu: Word, nu: Word) -> Word:
    return common_parts(mu, nu)[1]


def kappa_v(mu: Word, nu: Word) -> int:
    """Depth of ``nu`` beyond the suffix it shares with ``mu``: |nu| - |mu ^ nu|."""
    return len(nu) - len(common_suffix(mu, nu))


def strip(mu: Word, nu: Word) -> tuple[Word, int]:
    """Remove the common suffix: (mu, nu) -> (mu0, k) with k = kappa_v(mu, nu).

    mu = mu0 + s for the longest shared suffix s, so
    len(mu0) == len(mu) - len(nu) + k.  The stripped pair (mu0, nu minus s)
    has no common suffix left, which makes (mu0, k) a canonical sheet key.
    """
    s = len(common_suffix(mu, nu))
    return mu[: len(mu) - s], len(nu) - s


def prefix_compatible(u: Word, v: Word) -> bool:
    """True when one word is a prefix of the other (|u v^| = min(|u|, |v|))."""
    n = min(len(u), len(v))
    return u[:n] == v[:n]


def words_of_length(n_letters: int, length: int) -> Iterator[Word]:
    """All words of exactly ``length`` letters, in lexicographic order."""
    return iter(product(range(1, n_letters + 1), repeat=length))


def words_up_to(n_letters: int, max_length: int) -> Iterator[Word]:
    """All words of at most ``max_length`` letters, ordered by (length, lex)."""
    for length in range(max_length + 1):
        yield from words_of_length(n_letters, length)
