"""Independent oracles used across the test suite.

Everything here is deliberately naive: direct substitution, bounded
enumeration, brute-force reduction.  None of it calls the package's
own folding or growth paths, so agreement is evidence rather than
tautology.
"""

from __future__ import annotations

import random
from itertools import product


def reduce_letters(letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def substitute(images: dict[int, tuple[int, ...]], letters) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        img = images[x] if x > 0 else tuple(-t for t in reversed(images[-x]))
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def image_table(phi) -> dict[int, tuple[int, ...]]:
    endo = getattr(phi, "endo", phi)
    return {j + 1: endo.images[j].letters for j in range(endo.basis.rank)}


def cyclic_trim(letters) -> tuple[int, ...]:
    ls = tuple(letters)
    lo, hi = 0, len(ls)
    while hi - lo >= 2 and ls[lo] == -ls[hi - 1]:
        lo += 1
        hi -= 1
    return ls[lo:hi]


def naive_length_sequence(phi, start, n: int, cap: int | None = None) -> list[int]:
    """Translation lengths of iterated images by direct substitution."""
    images = image_table(phi)
    cur = cyclic_trim(reduce_letters(start))
    seq = []
    for _ in range(n):
        cur = cyclic_trim(substitute(images, cur))
        seq.append(len(cur))
        if cap is not None and len(cur) > cap:
            break
    return seq


def finite_difference_degree(seq, max_degree: int = 6, tail: int = 5) -> int | None:
    """Least k with vanishing k-th differences on the tail, minus one."""
    d = list(seq)
    for k in range(1, max_degree + 1):
        d = [b - a for a, b in zip(d, d[1:])]
        if len(d) >= tail and all(t == 0 for t in d[-tail:]):
            return k - 1
    return None


def random_letters(rng: random.Random, rank: int, length: int) -> tuple[int, ...]:
    """Random freely reduced letter tuple of exactly ``length`` letters."""
    out: list[int] = []
    while len(out) < length:
        x = rng.choice([s * i for i in range(1, rank + 1) for s in (1, -1)])
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)


def bounded_products(gen_letters, max_factors: int) -> set[tuple[int, ...]]:
    """Reduced words of all products of at most ``max_factors`` of the
    given generators and their inverses."""
    factors = list(gen_letters) + [
        tuple(-t for t in reversed(g)) for g in gen_letters
    ]
    seen: set[tuple[int, ...]] = {()}
    frontier: set[tuple[int, ...]] = {()}
    for _ in range(max_factors):
        nxt: set[tuple[int, ...]] = set()
        for w in frontier:
            for f in factors:
                r = reduce_letters(w + f)
                if r not in seen:
                    seen.add(r)
                    nxt.add(r)
        frontier = nxt
    return seen


def torus_words(rank: int, max_len: int):
    """All words of length ≤ max_len over basis ∪ {t} letter alphabet.

    Letters are signed ints with rank+1 standing for t.
    """
    alphabet = [s * i for i in range(1, rank + 2) for s in (1, -1)]
    for n in range(max_len + 1):
        yield from product(alphabet, repeat=n)
