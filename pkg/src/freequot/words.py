"""Free-group words: letters, free reduction, products and ball sizes in T_n.

A letter is stored as a signed integer code: ``+g`` is generator ``g`` (1-based)
and ``-g`` its inverse.  Transition tables index letters as
``2*(g-1)`` for ``+g`` and ``2*(g-1) + 1`` for ``-g``, so the inverse of
letter index ``i`` is ``i ^ 1`` and the column order is ``a, A, b, B, ...``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Sequence, Union


class InvalidInput(ValueError):
    """A letter, word or relator text that does not make sense for the rank."""


class RankMismatch(ValueError):
    pass


def check_rank(n: int) -> int:
    if int(n) != n or n < 2:
        raise InvalidInput(f"rank must be an integer >= 2, got {n!r}")
    return int(n)


class Letter(NamedTuple):
    gen: int
    sign: int

    def inverse(self) -> "Letter":
        return Letter(self.gen, -self.sign)

    @property
    def code(self) -> int:
        return self.gen * self.sign

    @property
    def index(self) -> int:
        return code_to_index(self.code)

    @classmethod
    def from_code(cls, code: int) -> "Letter":
        if code == 0:
            raise InvalidInput("0 is not a letter code")
        return cls(abs(code), 1 if code > 0 else -1)

    @classmethod
    def from_index(cls, index: int) -> "Letter":
        return cls.from_code(index_to_code(index))


def code_to_index(code: int) -> int:
    return 2 * (abs(code) - 1) + (1 if code < 0 else 0)


def index_to_code(index: int) -> int:
    g = index // 2 + 1
    return -g if index & 1 else g


LetterLike = Union[int, Letter]


def _as_code(x: LetterLike, n: int) -> int:
    code = x.code if isinstance(x, Letter) else int(x)
    if code == 0 or abs(code) > n:
        raise InvalidInput(f"letter {x!r} outside rank {n}")
    return code


@dataclass(frozen=True)
class ReducedWord:
    """Freely reduced word in F_n.  The empty word is the identity."""

    letters: tuple[int, ...]
    rank: int

    def __post_init__(self):
        check_rank(self.rank)
        prev = 0
        for c in self.letters:
            if c == 0 or abs(c) > self.rank:
                raise InvalidInput(f"letter code {c} outside rank {self.rank}")
            if c == -prev:
                raise InvalidInput(f"word {self.letters} is not freely reduced")
            prev = c

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return multiply(self, other)

    def __str__(self) -> str:
        return format_word(self.letters, self.rank)

    def inverse(self) -> "ReducedWord":
        return ReducedWord(tuple(-c for c in reversed(self.letters)), self.rank)

    def is_identity(self) -> bool:
        return not self.letters

    def as_letters(self) -> list[Letter]:
        return [Letter.from_code(c) for c in self.letters]

    def indices(self) -> list[int]:
        return [code_to_index(c) for c in self.letters]


def identity(n: int) -> ReducedWord:
    return ReducedWord((), n)


def _free_reduce(codes: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for c in codes:
        if stack and stack[-1] == -c:
            stack.pop()
        else:
            stack.append(c)
    return tuple(stack)


def reduce(raw: Union[str, Iterable[LetterLike]], n: int) -> ReducedWord:
    """Freely reduce a letter sequence (codes, ``Letter`` values or text)."""
    n = check_rank(n)
    if isinstance(raw, str):
        codes = parse_word(raw, n, reduced=False)
    else:
        codes = [_as_code(x, n) for x in raw]
    return ReducedWord(_free_reduce(codes), n)


def multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    if u.rank != v.rank:
        raise RankMismatch(f"rank {u.rank} word times rank {v.rank} word")
    a, b = u.letters, v.letters
    k = 0
    while k < len(a) and k < len(b) and a[-1 - k] == -b[k]:
        k += 1
    return ReducedWord(a[: len(a) - k] + b[k:], u.rank)


def invert(w: ReducedWord) -> ReducedWord:
    return w.inverse()


def cyclic_reduce(w: ReducedWord) -> ReducedWord:
    """Strip conjugating letters until first and last letters are not inverse."""
    ls = w.letters
    i, j = 0, len(ls) - 1
    while i < j and ls[i] == -ls[j]:
        i += 1
        j -= 1
    return ReducedWord(ls[i : j + 1], w.rank)


def is_cyclically_reduced(w: ReducedWord) -> bool:
    return len(w) < 2 or w.letters[0] != -w.letters[-1]


def ball_count(n: int, R: int) -> int:
    """Number of reduced words of length <= R in F_n (exact)."""
    n = check_rank(n)
    if R < 0:
        raise InvalidInput("radius must be >= 0")
    q = 2 * n - 1
    # 1 + 2n * (q^R - 1) / (q - 1)
    return 1 + 2 * n * (q**R - 1) // (q - 1)


def sphere_count(n: int, r: int) -> int:
    return 1 if r == 0 else 2 * n * (2 * n - 1) ** (r - 1)


def iter_reduced(n: int, length: int) -> Iterator[tuple[int, ...]]:
    """Yield every reduced word of exactly ``length`` letters as code tuples."""
    n = check_rank(n)
    alphabet = [c for g in range(1, n + 1) for c in (g, -g)]

    def rec(prefix: list[int]):
        if len(prefix) == length:
            yield tuple(prefix)
            return
        last = prefix[-1] if prefix else 0
        for c in alphabet:
            if c != -last:
                prefix.append(c)
                yield from rec(prefix)
                prefix.pop()

    yield from rec([])


def random_reduced(n: int, length: int, rng) -> ReducedWord:
    """Uniform random reduced word of the given length (``rng``: numpy Generator)."""
    codes: list[int] = []
    for _ in range(length):
        while True:
            g = int(rng.integers(1, n + 1))
            c = g if rng.random() < 0.5 else -g
            if not codes or codes[-1] != -c:
                break
        codes.append(c)
    return ReducedWord(tuple(codes), n)


# -- text format ---------------------------------------------------------

def letter_name(code: int, n: int) -> str:
    g = abs(code)
    if n <= 26:
        ch = chr(ord("a") + g - 1)
        return ch if code > 0 else ch.upper()
    return f"x{g}" if code > 0 else f"X{g}"


def format_word(codes: Sequence[int], n: int) -> str:
    if not codes:
        return "1" if n <= 26 else "e"
    sep = "" if n <= 26 else " "
    return sep.join(letter_name(c, n) for c in codes)


_TOKEN = re.compile(r"\s*(?:(?P<x>[xX]\d+)|(?P<l>[A-Za-z])|(?P<one>1)|(?P<op>[()])|(?P<pow>\^\s*-?\d+))")


def _tokens(text: str, n: int):
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise InvalidInput(f"cannot parse {text[pos:]!r}")
        pos = m.end()
        if m.group("x") and n > 26:
            tok = m.group("x")
            g = int(tok[1:])
            yield ("letter", g if tok[0] == "x" else -g)
        elif m.group("l") or m.group("x"):
            ch = (m.group("l") or m.group("x"))
            if m.group("x"):
                raise InvalidInput(f"x<k> letters need rank > 26, got {ch!r}")
            g = ord(ch.lower()) - ord("a") + 1
            yield ("letter", g if ch.islower() else -g)
        elif m.group("one"):
            yield ("one", 0)
        elif m.group("op"):
            yield (m.group("op"), 0)
        else:
            yield ("pow", int(m.group("pow")[1:].strip()))


def parse_word(text: str, n: int, reduced: bool = True):
    """Parse one word such as ``abAB``, ``(ab)^3`` or ``a^-2 b``.

    Returns a ``ReducedWord`` when ``reduced`` is true, else the raw code list.
    Whitespace inside the text is ignored.
    """
    n = check_rank(n)
    stack: list[list[int]] = [[]]
    last: list[int] | None = None
    for kind, val in _tokens(text, n):
        if kind == "letter":
            if abs(val) > n:
                raise InvalidInput(f"letter {letter_name(val, max(n, abs(val)))} outside rank {n}")
            last = [val]
            stack[-1].append(val)
        elif kind == "one":
            last = []
        elif kind == "(":
            stack.append([])
            last = None
        elif kind == ")":
            if len(stack) == 1:
                raise InvalidInput(f"unbalanced ')' in {text!r}")
            last = stack.pop()
            stack[-1].extend(last)
        else:
            if last is None:
                raise InvalidInput(f"'^' without a preceding letter or group in {text!r}")
            k = val
            del stack[-1][len(stack[-1]) - len(last):]
            block = last if k >= 0 else [-c for c in reversed(last)]
            stack[-1].extend(block * abs(k))
            last = None
    if len(stack) != 1:
        raise InvalidInput(f"unbalanced '(' in {text!r}")
    codes = stack[0]
    if reduced:
        return ReducedWord(_free_reduce(codes), n)
    return codes


def parse_relators(text: str, n: int) -> list[ReducedWord]:
    """Parse relator text: whitespace-separated words, ``#`` starts a comment.

    Groups may contain spaces, e.g. ``(a b)^3``; words are split only at the
    top level of parentheses.
    """
    words: list[str] = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        cur, depth = "", 0
        for ch in line:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            if ch.isspace() and depth == 0:
                if cur and not cur.endswith("^"):
                    words.append(cur)
                    cur = ""
                continue
            cur += ch
        if cur:
            words.append(cur)
    return [parse_word(w, n) for w in words]
