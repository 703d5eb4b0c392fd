"""Free-group word arithmetic.

Letters are signed integers: generator ``i`` is ``+i`` and its inverse is
``-i``.  A word is a plain tuple of letters.  Formal words (random-walk
trajectories) additionally use ``0`` for the identity symbol and are never
reduced implicitly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Word = tuple[int, ...]

EMPTY: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """``m`` numbered generators ``x1..xm`` plus optional named ones.

    Named generators (for example ``("a", "b")``) get the ids ``m+1, m+2, ...``
    and print as their lowercase name, with the uppercase name as inverse.
    """

    m: int
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.m < 0 or self.rank < 1:
            raise ValueError("alphabet needs at least one generator")
        for name in self.names:
            if len(name) != 1 or not name.islower() or name in ("x", "e"):
                raise ValueError(f"invalid generator name {name!r}")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate generator names")

    @property
    def rank(self) -> int:
        return self.m + len(self.names)

    def generators(self) -> list[int]:
        return list(range(1, self.rank + 1))

    def letters(self) -> list[int]:
        """All signed letters in canonical order (x1, X1, x2, X2, ...)."""
        out = []
        for g in self.generators():
            out.extend((g, -g))
        return out

    def named(self, *names: str) -> frozenset[int]:
        ids = []
        for name in names:
            if name not in self.names:
                raise ValueError(f"generator {name!r} not in alphabet")
            ids.append(self.m + 1 + self.names.index(name))
        return frozenset(ids)

    def contains(self, w: Iterable[int]) -> bool:
        return all(0 < abs(l) <= self.rank for l in w)

    def to_json(self) -> dict:
        return {"m": self.m, "names": list(self.names)}

    @classmethod
    def from_json(cls, data: dict) -> "Alphabet":
        return cls(int(data["m"]), tuple(data.get("names", ())))


def letter_key(l: int) -> int:
    """Sort key putting x1 < X1 < x2 < X2 < ... (identity symbol first)."""
    return 2 * abs(l) - (l > 0)


def word_key(w: Sequence[int]) -> tuple[int, ...]:
    return tuple(letter_key(l) for l in w)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-l for l in reversed(w))


def free_reduce(w: Iterable[int]) -> Word:
    """Cancel adjacent ``x x^-1`` pairs; identity symbols (0) are dropped."""
    out: list[int] = []
    for l in w:
        if l == 0:
            continue
        if out and out[-1] == -l:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def is_reduced(w: Sequence[int]) -> bool:
    return all(l != 0 for l in w) and all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def cyclic_reduce(w: Sequence[int]) -> tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``conjugator . core . conjugator^-1 == w``."""
    w = tuple(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j], w[:i]


def failure_function(s: Sequence) -> list[int]:
    """KMP border table: ``fail[k]`` is the longest proper border of ``s[:k]``."""
    n = len(s)
    fail = [0] * (n + 1)
    fail[0] = -1
    k = -1
    for i in range(n):
        while k >= 0 and s[k] != s[i]:
            k = fail[k]
        k += 1
        fail[i + 1] = k
    fail[0] = 0
    return fail


def smallest_period(s: Sequence) -> int:
    n = len(s)
    if n == 0:
        return 0
    return n - failure_function(s)[n]


def primitive_root(w: Sequence[int]) -> tuple[Word, int]:
    """Write ``w`` as ``root**k`` with ``root`` not a proper power and ``k`` maximal."""
    w = tuple(w)
    if not w:
        raise ValueError("the empty word has no primitive root")
    n = len(w)
    p = smallest_period(w)
    if n % p == 0:
        return w[:p], n // p
    return w, 1


def least_rotation(keys: Sequence[int]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    n = len(keys)
    if n == 0:
        return 0
    s = list(keys) * 2
    f = [-1] * (2 * n)
    k = 0
    for j in range(1, 2 * n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def rotate(w: Sequence[int], k: int) -> Word:
    w = tuple(w)
    if not w:
        return w
    k %= len(w)
    return w[k:] + w[:k]


def canonical_rotation(w: Sequence[int]) -> Word:
    return rotate(w, least_rotation(word_key(w)))


def conj_class_key(w: Sequence[int]) -> Word:
    """Least word among the cyclic shifts of the cyclic reduction of ``w`` and of its inverse."""
    core, _ = cyclic_reduce(free_reduce(w))
    if not core:
        return EMPTY
    a = canonical_rotation(core)
    b = canonical_rotation(inverse(core))
    return a if word_key(a) <= word_key(b) else b


def free_conjugate(u: Sequence[int], v: Sequence[int]) -> bool:
    cu, _ = cyclic_reduce(free_reduce(u))
    cv, _ = cyclic_reduce(free_reduce(v))
    if len(cu) != len(cv):
        return False
    return canonical_rotation(cu) == canonical_rotation(cv)


def periodic_word(a: Sequence[int], length: int) -> Word:
    """Length-``length`` prefix of ``a a a ...``."""
    a = tuple(a)
    if not a:
        raise ValueError("period must be nonempty")
    if length < 0:
        raise ValueError("length must be non-negative")
    reps = -(-length // len(a))
    return (a * reps)[:length]


def is_conjugate_into_subalphabet(
    w: Sequence[int], sub: Iterable[int], alphabet: Alphabet | None = None
) -> bool:
    """Whether ``w`` is conjugate (in the free group) into the subgroup on ``sub``.

    ``sub`` holds positive generator ids.
    """
    sub = {abs(g) for g in sub}
    if alphabet is not None and not sub <= set(alphabet.generators()):
        raise ValueError("sub-alphabet is not contained in the alphabet")
    core, _ = cyclic_reduce(free_reduce(w))
    return all(abs(l) in sub for l in core)


def power(w: Sequence[int], k: int) -> Word:
    if k < 0:
        return free_reduce(inverse(w) * (-k))
    return free_reduce(tuple(w) * k)


def multiply(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for l in w:
            if l == 0:
                continue
            if out and out[-1] == -l:
                out.pop()
            else:
                out.append(l)
    return tuple(out)


def iter_reduced_words(rank: int, length: int) -> Iterator[Word]:
    """All reduced words of the given length, in canonical letter order."""
    letters = []
    for g in range(1, rank + 1):
        letters.extend((g, -g))
    if length == 0:
        yield EMPTY
        return

    def extend(prefix: list[int]):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        last = prefix[-1] if prefix else 0
        for l in letters:
            if l != -last:
                prefix.append(l)
                yield from extend(prefix)
                prefix.pop()

    yield from extend([])


def count_reduced_words(rank: int, length: int) -> int:
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


# ---------------------------------------------------------------- text format

_TOKEN = re.compile(r"x(\d+)|X(\d+)|([a-wyz])|([A-WYZ])|(1)")


class WordSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def parse_word(text: str, alphabet: Alphabet | None = None, formal: bool = False) -> Word:
    """Parse ``x1X2a...``; whitespace is ignored.

    ``1`` (identity symbol) is accepted only when ``formal`` is set, and is
    kept as ``0`` in the result.  The text ``ε``, ``e`` or an empty string is
    the empty word.
    """
    text = text.strip()
    if text in ("", "ε", "e", "()"):
        return EMPTY
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        mt = _TOKEN.match(text, pos)
        if mt is None:
            raise WordSyntaxError(f"unexpected character {text[pos]!r}", pos)
        if mt.group(1) or mt.group(2):
            g = int(mt.group(1) or mt.group(2))
            if g < 1 or (alphabet is not None and g > alphabet.m):
                raise WordSyntaxError(f"generator x{g} out of range", pos)
            out.append(g if mt.group(1) else -g)
        elif mt.group(3) or mt.group(4):
            name = (mt.group(3) or mt.group(4)).lower()
            if alphabet is None or name not in alphabet.names:
                raise WordSyntaxError(f"unknown generator {name!r}", pos)
            g = alphabet.m + 1 + alphabet.names.index(name)
            out.append(g if mt.group(3) else -g)
        else:
            if not formal:
                raise WordSyntaxError("identity symbol only allowed in formal words", pos)
            out.append(0)
        pos = mt.end()
    return tuple(out)


def format_letter(l: int, alphabet: Alphabet | None = None) -> str:
    if l == 0:
        return "1"
    g = abs(l)
    if alphabet is not None and g > alphabet.m:
        name = alphabet.names[g - alphabet.m - 1]
        return name if l > 0 else name.upper()
    return f"x{g}" if l > 0 else f"X{g}"


def format_word(w: Sequence[int], alphabet: Alphabet | None = None) -> str:
    if len(w) == 0:
        return "e"
    return "".join(format_letter(l, alphabet) for l in w)
