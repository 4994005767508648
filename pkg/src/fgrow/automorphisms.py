"""Endomorphisms and automorphisms of a finite-rank free group.

A map is stored by its generator images.  Inverting is done
constructively: fold the graph of the image subgroup while threading
witness expressions, check the result is the full rose (surjective
plus free-group Hopficity means bijective), then read each generator's
preimage off its loop expression.  The certificate is verified by
composing both ways before anything is returned.

>>> from .words import basis
>>> b = basis("a b")
>>> phi = parse_endomorphism("a -> a b; b -> a", b)
>>> str(phi.apply(b.parse("b a'")))
"a b' a'"
>>> inv = certify_automorphism(phi).inverse()
>>> [str(w) for w in inv.images]
['b', "b' a"]
"""

from __future__ import annotations

from dataclasses import dataclass

from .folding import StallingsGraph, witnessed_graph
from .words import (
    Basis,
    BasisMismatchError,
    Word,
    WordSyntaxError,
    basis as make_basis,
    free_reduce,
)


class NotSurjectiveError(ValueError):
    """Raised when a map's images generate a proper subgroup.

    ``witness`` is the folded graph of the image subgroup.
    """

    def __init__(self, message: str, witness: StallingsGraph):
        super().__init__(message)
        self.witness = witness


class NotInvariantError(ValueError):
    """Raised when a subgroup is not preserved by a map.

    ``generator`` is a subgroup basis element whose image (or
    preimage) ``offender`` escapes the subgroup.
    """

    def __init__(self, message: str, generator: Word, offender: Word):
        super().__init__(message)
        self.generator = generator
        self.offender = offender


@dataclass(frozen=True)
class Endomorphism:
    """Map of a free group given by generator images, in basis order."""

    basis: Basis
    images: tuple[Word, ...]

    def __post_init__(self) -> None:
        if len(self.images) != self.basis.rank:
            raise ValueError("one image per generator is required")
        for w in self.images:
            if w.basis != self.basis:
                raise BasisMismatchError("image over a different basis")

    def image(self, letter: int) -> Word:
        """Image of a single signed letter."""
        w = self.images[abs(letter) - 1]
        return w if letter > 0 else w.inverse()

    def apply(self, w: Word) -> Word:
        if w.basis != self.basis:
            raise BasisMismatchError("word over a different basis")
        out: list[int] = []
        for x in w.letters:
            img = self.images[abs(x) - 1].letters
            if x > 0:
                out.extend(img)
            else:
                out.extend(-t for t in reversed(img))
        return Word(self.basis, free_reduce(out))

    def is_identity(self) -> bool:
        return all(
            w.letters == (i,) for i, w in enumerate(self.images, start=1)
        )

    def __str__(self) -> str:
        return "; ".join(
            f"{self.basis.names[i]} -> {w}" for i, w in enumerate(self.images)
        )

    def __repr__(self) -> str:
        return f"<endomorphism {self}>"


@dataclass(frozen=True)
class Automorphism:
    """Invertible endomorphism bundled with its certified inverse images."""

    endo: Endomorphism
    inverse_images: tuple[Word, ...]

    @property
    def basis(self) -> Basis:
        return self.endo.basis

    @property
    def images(self) -> tuple[Word, ...]:
        return self.endo.images

    def apply(self, w: Word) -> Word:
        return self.endo.apply(w)

    def inverse(self) -> "Automorphism":
        return Automorphism(
            Endomorphism(self.basis, self.inverse_images), self.endo.images
        )

    def __str__(self) -> str:
        return str(self.endo)

    def __repr__(self) -> str:
        return f"<automorphism {self}>"


def identity_endomorphism(b: Basis) -> Endomorphism:
    return Endomorphism(b, tuple(Word(b, (i,)) for i in range(1, b.rank + 1)))


def identity_automorphism(b: Basis) -> Automorphism:
    e = identity_endomorphism(b)
    return Automorphism(e, e.images)


def inner_automorphism(b: Basis, g: Word) -> Automorphism:
    """Conjugation x ↦ g·x·g⁻¹."""
    if g.basis != b:
        raise BasisMismatchError("conjugator over a different basis")
    ginv = g.inverse()
    fwd = tuple(g * Word(b, (i,)) * ginv for i in range(1, b.rank + 1))
    bwd = tuple(ginv * Word(b, (i,)) * g for i in range(1, b.rank + 1))
    return Automorphism(Endomorphism(b, fwd), bwd)


def compose(f: Endomorphism | Automorphism, g: Endomorphism | Automorphism):
    """f after g.  Automorphism when both arguments are."""
    fe = f.endo if isinstance(f, Automorphism) else f
    ge = g.endo if isinstance(g, Automorphism) else g
    if fe.basis != ge.basis:
        raise BasisMismatchError("maps over different bases")
    endo = Endomorphism(fe.basis, tuple(fe.apply(w) for w in ge.images))
    if isinstance(f, Automorphism) and isinstance(g, Automorphism):
        ginv = g.inverse()
        return Automorphism(endo, tuple(ginv.apply(w) for w in f.inverse_images))
    return endo


def power(phi: Endomorphism | Automorphism, k: int):
    """k-fold composition; negative k inverts first (automorphisms only)."""
    if k < 0:
        if not isinstance(phi, Automorphism):
            raise ValueError("negative power of a non-invertible map")
        return power(phi.inverse(), -k)
    out: Endomorphism | Automorphism
    if isinstance(phi, Automorphism):
        out = identity_automorphism(phi.basis)
    else:
        out = identity_endomorphism(phi.basis)
    for _ in range(k):
        out = compose(phi, out)
    return out


def apply_power(phi: Endomorphism | Automorphism, k: int, w: Word) -> Word:
    """Φ^k(w) by repeated application."""
    if k < 0:
        if not isinstance(phi, Automorphism):
            raise ValueError("negative power of a non-invertible map")
        return apply_power(phi.inverse(), -k, w)
    for _ in range(k):
        w = phi.apply(w)
    return w


# ---------------------------------------------------------------------------
# inversion


def certify_automorphism(phi: Endomorphism) -> Automorphism:
    """Prove ``phi`` invertible and return it with explicit inverse images.

    Raises NotSurjectiveError (with the folded image subgroup as
    witness) when the images do not generate the whole group.
    """
    b = phi.basis
    wg = witnessed_graph(b, list(phi.images))
    if not wg.is_rose():
        raise NotSurjectiveError(
            "images generate a proper subgroup", wg.to_stallings()
        )
    inverse_images = []
    for i in range(1, b.rank + 1):
        expr = wg.express(Word(b, (i,)))
        if expr is None:
            raise NotSurjectiveError(
                "generator not expressible over the images", wg.to_stallings()
            )
        # expression indices name the images, so they substitute
        # directly as preimage letters
        inverse_images.append(Word(b, expr))
    auto = Automorphism(phi, tuple(inverse_images))
    inv = auto.inverse()
    for i in range(1, b.rank + 1):
        g = Word(b, (i,))
        if phi.apply(inv.apply(g)) != g or inv.apply(phi.apply(g)) != g:
            raise AssertionError("inverse readback failed verification")
    return auto


def is_automorphism(phi: Endomorphism) -> bool:
    try:
        certify_automorphism(phi)
        return True
    except NotSurjectiveError:
        return False


# ---------------------------------------------------------------------------
# restriction to an invariant subgroup


@dataclass(frozen=True)
class RestrictedAutomorphism:
    """An automorphism restricted to an invariant subgroup.

    ``auto`` acts on a fresh free basis x1..xk; ``embedding`` maps
    those generators to the subgroup's free basis words in the ambient
    group.
    """

    auto: Automorphism
    subgroup: StallingsGraph
    embedding: tuple[Word, ...]

    def to_ambient(self, w: Word) -> Word:
        if w.basis != self.auto.basis:
            raise BasisMismatchError("word over a different basis")
        out: list[int] = []
        for x in w.letters:
            img = self.embedding[abs(x) - 1].letters
            if x > 0:
                out.extend(img)
            else:
                out.extend(-t for t in reversed(img))
        return Word(self.subgroup.basis, free_reduce(out))

    def to_subgroup(self, w: Word) -> Word | None:
        expr = self.subgroup.express_in_free_basis(w)
        if expr is None:
            return None
        return Word(self.auto.basis, expr)


def restrict(
    phi: Automorphism,
    h: StallingsGraph,
    exponent: int = 1,
    conjugator: Word | None = None,
) -> RestrictedAutomorphism:
    """Restriction of (inner(conjugator) ∘ phi^exponent) to H.

    H must be invariant both ways; otherwise NotInvariantError names a
    failing basis element.
    """
    if h.basis != phi.basis:
        raise BasisMismatchError("subgroup over a different basis")
    theta = power(phi, exponent)
    if conjugator is not None:
        theta = compose(inner_automorphism(phi.basis, conjugator), theta)
    theta_inv = theta.inverse()
    free = h.free_basis()
    for w in free:
        fw = theta.apply(w)
        if not h.accepts(fw):
            raise NotInvariantError("image escapes the subgroup", w, fw)
        bw = theta_inv.apply(w)
        if not h.accepts(bw):
            raise NotInvariantError("preimage escapes the subgroup", w, bw)
    if not free:
        raise ValueError("cannot restrict to the trivial subgroup")
    fresh = make_basis([f"x{i}" for i in range(1, len(free) + 1)])
    images = []
    for w in free:
        expr = h.express_in_free_basis(theta.apply(w))
        images.append(Word(fresh, expr))
    endo = Endomorphism(fresh, tuple(images))
    return RestrictedAutomorphism(certify_automorphism(endo), h, tuple(free))


# ---------------------------------------------------------------------------
# parsing


def parse_endomorphism(text: str, b: Basis | None = None) -> Endomorphism:
    """Parse generator-image rules.

    One rule per line or semicolon-separated, each ``name -> word``;
    ``#`` starts a comment.  With no explicit basis the left-hand
    sides, in order of first appearance, define one.
    """
    rules: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines() or [""], start=1):
        line = raw.split("#", 1)[0]
        for part in line.split(";"):
            part = part.strip()
            if not part:
                continue
            if "->" not in part:
                raise WordSyntaxError(f"line {lineno}: expected 'name -> word' in {part!r}")
            lhs, rhs = part.split("->", 1)
            lhs = lhs.strip()
            if not lhs:
                raise WordSyntaxError(f"line {lineno}: missing generator name")
            rules.append((lhs, rhs.strip()))
    if not rules:
        raise WordSyntaxError("no rules found")
    names = [name for name, _ in rules]
    if len(set(names)) != len(names):
        dup = next(n for n in names if names.count(n) > 1)
        raise WordSyntaxError(f"duplicate rule for {dup!r}")
    if b is None:
        b = make_basis(names)
    missing = [n for n in b.names if n not in names]
    extra = [n for n in names if n not in b.names]
    if extra:
        raise WordSyntaxError(f"unknown generator {extra[0]!r}")
    if missing:
        raise WordSyntaxError(f"no rule for generator {missing[0]!r}")
    by_name = dict(rules)
    images = tuple(b.parse(by_name[n]) for n in b.names)
    return Endomorphism(b, images)


def parse_automorphism(text: str, b: Basis | None = None) -> Automorphism:
    """Parse rules and certify invertibility in one step."""
    return certify_automorphism(parse_endomorphism(text, b))


__all__ = [
    "Automorphism",
    "Endomorphism",
    "NotInvariantError",
    "NotSurjectiveError",
    "RestrictedAutomorphism",
    "apply_power",
    "certify_automorphism",
    "compose",
    "identity_automorphism",
    "identity_endomorphism",
    "inner_automorphism",
    "is_automorphism",
    "parse_automorphism",
    "parse_endomorphism",
    "power",
    "restrict",
]
