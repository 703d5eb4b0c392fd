"""Periodic-run compression codes.

A code string is a tuple whose items are letters (nonzero ints) or the
digit strings ``"0"`` and ``"1"``.  A periodic run ``W`` with period ``A``
is written as the block ``0 A bin(|W|)`` with ``|W|`` in binary, most
significant digit first.  Everything else is copied letter by letter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence, Union

from ._runtime import BudgetExceeded, Counter, resolve_budget, shard_map
from .words import (
    Word,
    format_letter,
    is_cyclically_reduced,
    is_reduced,
    iter_reduced_words,
    periodic_word,
    primitive_root,
    smallest_period,
)

Item = Union[int, str]
CodeString = tuple  # tuple[Item, ...]

DIGITS = ("0", "1")


class PCodeError(ValueError):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class DecodeError(ValueError):
    """Malformed code string; ``offset`` indexes the offending item (or character for text input)."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def _binary(n: int) -> tuple[str, ...]:
    return tuple(format(n, "b"))


def block_cost(period_len: int, run_len: int) -> int:
    return 1 + period_len + run_len.bit_length()


def pcode(a: Sequence[int], w: Sequence[int]) -> CodeString:
    """The block ``0 A bin(|w|)`` for an ``A``-periodic word ``w``."""
    a, w = tuple(a), tuple(w)
    if not w:
        raise PCodeError("empty word")
    if not a:
        raise PCodeError("empty period")
    if len(a) >= len(w):
        raise PCodeError("period too long")
    if not is_cyclically_reduced(a):
        raise PCodeError("period not cyclically reduced")
    if primitive_root(a)[1] != 1:
        raise PCodeError("period is a proper power")
    if periodic_word(a, len(w)) != w:
        raise PCodeError("word is not periodic with this period")
    return ("0",) + a + _binary(len(w))


@dataclass(frozen=True)
class Run:
    """A periodic run ``w[start:start+length]`` encoded with ``period``."""

    start: int
    length: int
    period: Word

    @property
    def cost(self) -> int:
        return block_cost(len(self.period), self.length)


@dataclass(frozen=True)
class Encoding:
    word: Word
    code: CodeString
    runs: tuple[Run, ...]
    cln: int
    reduced: bool

    def segments(self) -> list[tuple[str, Word]]:
        """Alternating plain / periodic segments ``V0, W1, V1, ...`` (plain ones may be empty)."""
        out = []
        pos = 0
        for run in self.runs:
            out.append(("plain", self.word[pos : run.start]))
            out.append(("run", self.word[run.start : run.start + run.length]))
            pos = run.start + run.length
        out.append(("plain", self.word[pos:]))
        return out


_MATCH_RUN = re.compile(b"\x01{5,}")


@lru_cache(maxsize=1 << 16)
def _legal_period(a: Word) -> bool:
    return is_cyclically_reduced(a) and primitive_root(a)[1] == 1


def _candidate_runs(w: Word) -> dict[int, list[tuple[int, int]]]:
    """Map start ``i`` to ``(end, period)`` for every strictly profitable periodic run.

    A run of length ``L`` and period ``p`` beats plain letters only if
    ``1 + p + bitlen(L) < L``, which forces ``L - p >= 5``; so each such run
    contains a 5-gram repeated at distance ``p``.  Each candidate keeps the
    smallest period of its segment.  For each start only the longest run of
    each binary-length size is listed; shorter ones cost the same and leave a
    suffix that is no cheaper.
    """
    n = len(w)
    seen: dict[Word, list[int]] = {}
    distances = set()
    for k in range(n - 4):
        gram = w[k : k + 5]
        for k0 in seen.get(gram, ()):
            distances.add(k - k0)
        seen.setdefault(gram, []).append(k)
    best: dict[tuple[int, int], int] = {}
    found: list[tuple[int, int]] = []  # segments already known to have a smaller period
    for p in sorted(distances):
        # byte k is 1 when w[k] == w[k + p]; runs of at least 5 ones are the segments
        mask = bytes(a == b for a, b in zip(w, w[p:]))
        for hit in _MATCH_RUN.finditer(mask):
            s, x = hit.span()
            end = x + p  # maximal segment [s, end) with period p
            if any(s0 <= s and end <= e0 for s0, e0 in found):
                continue
            found.append((s, end))
            if smallest_period(w[s:end]) < p:
                continue
            for i in range(s, end - p - 4):
                # the block cost only changes with bitlen(L) and the suffix cost never
                # grows as the run ends later, so the longest L per bit length suffices
                top = end - i
                for b in range((p + 5).bit_length(), top.bit_length() + 1):
                    L = min(top, (1 << b) - 1)
                    if L >= p + 5 and block_cost(p, L) < L and (i, i + L) not in best:
                        best[(i, i + L)] = p
    out: dict[int, list[tuple[int, int]]] = {}
    # a reduced run longer than its smallest period p has a legal period, so the
    # check only matters for unreduced input
    check = not is_reduced(w)
    for (i, j), p in best.items():
        if not check or _legal_period(w[i : i + p]):
            out.setdefault(i, []).append((j, p))
    for lst in out.values():
        lst.sort(reverse=True)
    return out


def encode_min(w: Sequence[int]) -> Encoding:
    """Minimal-length code of ``w`` over all legal factorizations.

    Suffix DP on ``(cost, blocks)``; ties prefer starting a run as early as
    possible and making it as long as possible.
    """
    w = tuple(w)
    n = len(w)
    runs = _candidate_runs(w)
    best = [(0, 0)] * (n + 1)
    choice: list[tuple[int, int] | None] = [None] * (n + 1)
    for i in range(n - 1, -1, -1):
        c, b = best[i + 1]
        key = (c + 1, b)
        pick = None
        for j, p in runs.get(i, ()):
            c2, b2 = best[j]
            cand = (c2 + block_cost(p, j - i), b2 + 1)
            # runs come longest first, so on a tie the first run seen wins over plain
            if cand < key or (cand == key and pick is None):
                key, pick = cand, (j, p)
        best[i] = key
        choice[i] = pick
    code: list[Item] = []
    chosen = []
    i = 0
    while i < n:
        pick = choice[i]
        if pick is None:
            code.append(w[i])
            i += 1
        else:
            j, p = pick
            chosen.append(Run(i, j - i, w[i : i + p]))
            code.append("0")
            code.extend(w[i : i + p])
            code.extend(_binary(j - i))
            i = j
    return Encoding(w, tuple(code), tuple(chosen), best[0][0], is_reduced(w))


def cln(w: Sequence[int]) -> int:
    return encode_min(w).cln


def decode(c: Sequence[Item]) -> Word:
    """Inverse of the encoder, parsing from the end of the code string."""
    c = tuple(c)
    pieces: list[Word] = []
    k = len(c)
    while k > 0:
        if c[k - 1] not in DIGITS:
            _check_letter(c[k - 1], k - 1)
            pieces.append((c[k - 1],))
            k -= 1
            continue
        end = k
        while k > 0 and c[k - 1] in DIGITS:
            k -= 1
        digits = c[k:end]
        if digits[0] != "1":
            raise DecodeError("binary length has a leading zero or no letters before it", k)
        length = int("".join(digits), 2)
        a_end = k
        while k > 0 and c[k - 1] not in DIGITS:
            _check_letter(c[k - 1], k - 1)
            k -= 1
        period = tuple(c[k:a_end])
        if not period:
            raise DecodeError("dangling digits", k)
        if k == 0:
            raise DecodeError("missing marker", k)
        if c[k - 1] != "0":
            raise DecodeError("marker must be 0", k - 1)
        k -= 1
        if len(period) >= length:
            raise DecodeError("run length not larger than its period", a_end)
        if not is_cyclically_reduced(period) or primitive_root(period)[1] != 1:
            raise DecodeError("period not cyclically reduced and primitive", k + 1)
        pieces.append(periodic_word(period, length))
    out: list[int] = []
    for piece in reversed(pieces):
        out.extend(piece)
    return tuple(out)


def _check_letter(item, offset: int) -> None:
    if not isinstance(item, int) or isinstance(item, bool) or item == 0:
        raise DecodeError(f"invalid item {item!r}", offset)


# ------------------------------------------------------------ text form

_CODE_TOKEN = re.compile(r"x(\d+)|X(\d+)|([01])")


def parse_code(text: str) -> tuple[CodeString, list[int]]:
    """Parse the text form; returns the items and each item's character offset."""
    items: list[Item] = []
    offsets: list[int] = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        mt = _CODE_TOKEN.match(text, pos)
        if mt is None:
            raise DecodeError(f"unexpected character {text[pos]!r}", pos)
        if mt.group(3):
            items.append(mt.group(3))
        else:
            g = int(mt.group(1) or mt.group(2))
            if g < 1:
                raise DecodeError("generator index must be positive", pos)
            items.append(g if mt.group(1) else -g)
        offsets.append(pos)
        pos = mt.end()
    return tuple(items), offsets


def decode_text(text: str) -> Word:
    items, offsets = parse_code(text)
    try:
        return decode(items)
    except DecodeError as exc:
        at = offsets[exc.offset] if exc.offset < len(offsets) else len(text)
        raise DecodeError(str(exc).rsplit(" at offset", 1)[0], at) from None


def format_code(c: Sequence[Item]) -> str:
    """Space-separated groups, e.g. ``0 x1x2 10000``; a marker is always its own group."""
    groups: list[str] = []
    cur: list[str] = []
    cur_digit = None
    c = tuple(c)
    for idx, item in enumerate(c):
        is_digit = item in DIGITS
        marker = is_digit and item == "0" and idx + 1 < len(c) and c[idx + 1] not in DIGITS
        if marker:
            if cur:
                groups.append("".join(cur))
            groups.append("0")
            cur, cur_digit = [], None
            continue
        if cur and is_digit != cur_digit:
            groups.append("".join(cur))
            cur = []
        cur.append(item if is_digit else format_letter(item))
        cur_digit = is_digit
    if cur:
        groups.append("".join(cur))
    return " ".join(groups)


# ------------------------------------------------------------ census by code length


def _legal_periods(m: int, q: int) -> list[Word]:
    return [a for a in iter_reduced_words(m, q) if is_cyclically_reduced(a) and primitive_root(a)[1] == 1]


def iter_code_strings(m: int, k: int, first: int | None = None) -> Iterator[tuple[Word, ...]]:
    """All grammatical codes of cost exactly ``k``, as sequences of decoded pieces.

    With ``first`` set, only codes whose decoded word starts with that letter.
    """
    letters = [s * g for g in range(1, m + 1) for s in (1, -1)]
    periods = {q: _legal_periods(m, q) for q in range(1, max(k - 2, 0) + 1)}

    def rec(remaining: int, prefix: list[Word]):
        if remaining == 0:
            yield tuple(prefix)
            return
        for l in letters:
            if first is not None and not prefix and l != first:
                continue
            prefix.append((l,))
            yield from rec(remaining - 1, prefix)
            prefix.pop()
        # block: 1 + q + bitlen(L) <= remaining with L > q
        for q in range(1, remaining - 2):
            for bits in range(max(2, (q + 1).bit_length()), remaining - q):
                lo = max(q + 1, 1 << (bits - 1))
                hi = (1 << bits) - 1
                for length in range(lo, hi + 1):
                    for a in periods[q]:
                        if first is not None and not prefix and a[0] != first:
                            continue
                        prefix.append(periodic_word(a, length))
                        yield from rec(remaining - 1 - q - bits, prefix)
                        prefix.pop()

    yield from rec(k, [])


def _cln_shard(args) -> tuple[set, int]:
    m, k, first, limit = args
    counter = Counter(limit)
    found = set()
    for pieces in iter_code_strings(m, k, first):
        counter.tick()
        w = tuple(l for piece in pieces for l in piece)
        if w in found or not is_reduced(w):
            continue
        if cln(w) == k:
            found.add(w)
    return found, counter.used


def count_by_cln(m: int, k: int, budget: int | None = None, jobs: int = 1) -> int:
    """Number of reduced words whose minimal code length is exactly ``k``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return 1
    limit = resolve_budget(budget)
    firsts = [s * g for g in range(1, m + 1) for s in (1, -1)]
    parts = shard_map(_cln_shard, [(m, k, f, limit) for f in firsts], jobs)
    # shards are disjoint (first letter), so the union is a plain sum
    used = sum(n for _, n in parts)
    if used > limit:
        raise BudgetExceeded(used, limit)
    return sum(len(s) for s, _ in parts)
