"""Reduced words over a fixed free-group basis.

A letter is a nonzero integer: ``+k`` is the k-th generator (1-indexed),
``-k`` is its inverse.  A :class:`Word` stores a freely reduced tuple of
letters; a :class:`CyclicWord` stores a cyclically reduced tuple in its
canonical rotation, so conjugacy-class comparison is plain equality.

Text form: generators are whitespace-separated symbols, with ``'`` or
``^-1`` marking an inverse, e.g. ``a b' c``.  When every generator name
is a single character, unspaced run-together tokens such as ``ab'c`` are
accepted too.  The empty word prints and parses as ``1``.

>>> F = basis("a b")
>>> w = F.parse("a b' a")
>>> w.letters
(1, -2, 1)
>>> str(concat(F.parse("a b"), F.parse("b' a")))
'a a'
>>> str(invert_word(F.parse("a b' c"), ))            # doctest: +SKIP
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


class BasisMismatchError(ValueError):
    """Operands live over different bases."""


class WordSyntaxError(ValueError):
    """Unparseable word literal."""


@dataclass(frozen=True)
class Basis:
    """An ordered tuple of distinct generator names."""

    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.names:
            raise ValueError("basis needs at least one generator")
        seen = set()
        for name in self.names:
            if not name or not name[0].isalpha() or not name.replace("_", "").isalnum():
                raise ValueError(f"bad generator name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate generator name {name!r}")
            seen.add(name)
        object.__setattr__(self, "_index", {n: i + 1 for i, n in enumerate(self.names)})

    @property
    def rank(self) -> int:
        return len(self.names)

    def letter(self, name: str, sign: int = 1) -> int:
        try:
            k = self._index[name]
        except KeyError:
            raise WordSyntaxError(f"unknown generator {name!r}") from None
        return k if sign > 0 else -k

    def symbol(self, letter: int) -> str:
        k = abs(letter)
        if not 1 <= k <= self.rank:
            raise ValueError(f"letter {letter} out of range")
        name = self.names[k - 1]
        return name if letter > 0 else name + "'"

    @property
    def letters(self) -> tuple[int, ...]:
        """All signed letters, positive then negative, by index."""
        pos = tuple(range(1, self.rank + 1))
        return pos + tuple(-k for k in pos)

    def parse(self, text: str) -> "Word":
        return Word(self, free_reduce(self._scan(text)))

    def _scan(self, text: str) -> list[int]:
        single = all(len(n) == 1 for n in self.names)
        out: list[int] = []
        for token in text.split():
            if token == "1":
                continue
            name, sign = _split_marker(token)
            if name in self._index:
                out.append(self.letter(name, sign))
                continue
            if not single:
                raise WordSyntaxError(f"unknown symbol {token!r}")
            # run-together single-character form, e.g. ab'c
            i = 0
            while i < len(token):
                ch = token[i]
                i += 1
                s = 1
                if token[i : i + 3] == "^-1":
                    s, i = -1, i + 3
                elif token[i : i + 1] == "'":
                    s, i = -1, i + 1
                if ch not in self._index:
                    raise WordSyntaxError(f"unknown symbol {ch!r} in {token!r}")
                out.append(self.letter(ch, s))
        return out


def basis(names: str | Sequence[str]) -> Basis:
    """Build a basis from ``"a b c"`` or a sequence of names."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    return Basis(tuple(names))


def _split_marker(token: str) -> tuple[str, int]:
    if token.endswith("^-1"):
        return token[:-3], -1
    if token.endswith("'"):
        return token[:-1], -1
    return token, 1


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    """Freely reduce a letter sequence (single stack pass).

    >>> free_reduce([1, 2, -2, -1, 3])
    (3,)
    """
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    """A freely reduced word.  Construct via ``Basis.parse`` or ``reduce``."""

    basis: Basis
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        r = self.basis.rank
        prev = 0
        for x in self.letters:
            if x == 0 or abs(x) > r:
                raise ValueError(f"letter {x} out of range for rank {r}")
            if x == -prev:
                raise ValueError("word is not freely reduced")
            prev = x

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        return " ".join(self.basis.symbol(x) for x in self.letters)

    def __repr__(self) -> str:
        return f"<word {self}>"

    def inverse(self) -> "Word":
        return Word(self.basis, tuple(-x for x in reversed(self.letters)))

    def compact(self) -> str:
        """Unspaced form, e.g. ``ab'c`` (used in labels and tags)."""
        if not self.letters:
            return "1"
        return "".join(self.basis.symbol(x) for x in self.letters)


def identity(b: Basis) -> Word:
    return Word(b, ())


def reduce(b: Basis, letters: Iterable[int]) -> Word:
    """Freely reduce a raw letter sequence into a Word."""
    return Word(b, free_reduce(letters))


def _same_basis(u: Word, v: Word) -> None:
    if u.basis != v.basis:
        raise BasisMismatchError("words over different bases")


def concat(u: Word, v: Word) -> Word:
    """Reduced product u·v.

    >>> F = basis("a b")
    >>> str(concat(F.parse("a b"), F.parse("b' a")))
    'a a'
    """
    _same_basis(u, v)
    if not u.letters:
        return v
    if not v.letters:
        return u
    a, b = list(u.letters), v.letters
    i = 0
    while a and i < len(b) and a[-1] == -b[i]:
        a.pop()
        i += 1
    return Word(u.basis, tuple(a) + b[i:])


def concat_all(b: Basis, parts: Iterable[Word]) -> Word:
    out: list[int] = []
    for p in parts:
        if p.basis != b:
            raise BasisMismatchError("words over different bases")
        for x in p.letters:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return Word(b, tuple(out))


def invert_word(w: Word) -> Word:
    return w.inverse()


def conjugate(w: Word, g: Word) -> Word:
    """g·w·g⁻¹, reduced."""
    return concat(concat(g, w), g.inverse())


def power(w: Word, n: int) -> Word:
    base = w if n >= 0 else w.inverse()
    out = identity(w.basis)
    for _ in range(abs(n)):
        out = concat(out, base)
    return out


def _rotation_key(letters: tuple[int, ...]) -> list[tuple[int, int]]:
    # order letters by (generator index, sign); sign -1 sorts first
    return [(abs(x), 1 if x > 0 else -1) for x in letters]


def _canonical_rotation(letters: tuple[int, ...]) -> tuple[tuple[int, ...], int]:
    """Lexicographically least rotation and its offset."""
    if not letters:
        return letters, 0
    best, offset = letters, 0
    best_key = _rotation_key(letters)
    for i in range(1, len(letters)):
        cand = letters[i:] + letters[:i]
        key = _rotation_key(cand)
        if key < best_key:
            best, best_key, offset = cand, key, i
    return best, offset


@dataclass(frozen=True)
class CyclicWord:
    """A conjugacy class: cyclically reduced letters in canonical rotation."""

    basis: Basis
    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        Word(self.basis, self.letters)  # validates free reduction
        if self.letters and self.letters[0] == -self.letters[-1]:
            raise ValueError("not cyclically reduced")
        canon, _ = _canonical_rotation(self.letters)
        if canon != self.letters:
            raise ValueError("not in canonical rotation; use cyclic_reduce")

    @property
    def length(self) -> int:
        return len(self.letters)

    def as_word(self) -> Word:
        return Word(self.basis, self.letters)

    def adjacent_pairs(self) -> list[tuple[int, int]]:
        """Ordered letter pairs, including the wraparound pair."""
        ls = self.letters
        if not ls:
            return []
        return [(ls[i], ls[(i + 1) % len(ls)]) for i in range(len(ls))]

    def __str__(self) -> str:
        return str(self.as_word())

    def __repr__(self) -> str:
        return f"<cyclic {self}>"


def cyclic_reduce(w: Word) -> tuple[CyclicWord, Word]:
    """Split ``w`` as conjugator·core·conjugator⁻¹.

    Returns ``(core, conjugator)`` with the core canonically rotated, so
    ``concat(concat(conjugator, core.as_word()), conjugator.inverse()) == w``.

    >>> F = basis("a b")
    >>> core, conj = cyclic_reduce(F.parse("a b a'"))
    >>> str(core), str(conj)
    ('b', 'a')
    """
    ls = w.letters
    lo, hi = 0, len(ls)
    while hi - lo >= 2 and ls[lo] == -ls[hi - 1]:
        lo += 1
        hi -= 1
    stripped = ls[lo:hi]
    canon, offset = _canonical_rotation(stripped)
    conj = Word(w.basis, free_reduce(ls[:lo] + stripped[:offset]))
    return CyclicWord(w.basis, canon), conj


def cyclic_word(w: Word) -> CyclicWord:
    return cyclic_reduce(w)[0]


def translation_length(w: Word | CyclicWord) -> int:
    """Cyclically reduced length (translation length on the tree)."""
    if isinstance(w, CyclicWord):
        return w.length
    ls = w.letters
    lo, hi = 0, len(ls)
    while hi - lo >= 2 and ls[lo] == -ls[hi - 1]:
        lo += 1
        hi -= 1
    return hi - lo
