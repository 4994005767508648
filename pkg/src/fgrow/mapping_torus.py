"""Mapping torus arithmetic: G = F ⋊ Z over an automorphism.

Elements carry the unique normal form w·t^k with w a reduced word in
the fiber F and t the section letter; the relation t·a·t⁻¹ = Φ(a)
moves t past fiber letters, so multiplication is
(w₁, k₁)·(w₂, k₂) = (w₁·Φ^{k₁}(w₂), k₁+k₂).

``fiber_intersection`` computes H ∩ F for a finitely generated
H = ⟨gens⟩ ≤ G: take n = gcd of the generators' t-exponents, build an
explicit s ∈ H with exponent n by Euclidean combination, re-express
the generators as fiber seeds gᵢ·s^{-kᵢ/n}, and saturate the folded
seed subgroup under conjugation by s (the map a ↦ x·Φⁿ(a)·x⁻¹ when
s = x·tⁿ) until the subgroup is invariant both ways.  Stabilization
is guaranteed only when H ∩ F is finitely generated, so budgets are
enforced and exhaustion raises UnstabilizedError rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .automorphisms import (
    Automorphism,
    Endomorphism,
    apply_power,
    certify_automorphism,
    compose,
    inner_automorphism,
    power as map_power,
)
from .folding import (
    StallingsGraph,
    WitnessedGraph,
    is_invariant,
    stallings_graph,
    witnessed_graph,
)
from .words import Basis, BasisMismatchError, Word, basis as make_basis, identity


class UnstabilizedError(RuntimeError):
    """Saturation budget exhausted before the fiber subgroup stabilized.

    Signals either an intersection that is not finitely generated or
    an insufficient budget; no partial answer is returned.
    """

    def __init__(self, message: str, rounds: int, vertices: int):
        super().__init__(message)
        self.rounds = rounds
        self.vertices = vertices


SECTION_NAME = "t"


@dataclass(frozen=True)
class TorusGroup:
    """G = F ⋊ Z for a certified automorphism of F."""

    phi: Automorphism

    def __post_init__(self) -> None:
        if SECTION_NAME in self.phi.basis.names:
            raise ValueError("generator name 't' is reserved for the section letter")

    @property
    def basis(self) -> Basis:
        return self.phi.basis

    @property
    def extended_basis(self) -> Basis:
        return make_basis(list(self.basis.names) + [SECTION_NAME])

    # -- element construction -----------------------------------------

    def element(self, w: Word | str, k: int = 0) -> "TorusElement":
        if isinstance(w, str):
            w = self.basis.parse(w)
        return TorusElement(self, w, k)

    def identity_element(self) -> "TorusElement":
        return TorusElement(self, identity(self.basis), 0)

    def t(self, k: int = 1) -> "TorusElement":
        return TorusElement(self, identity(self.basis), k)

    def normalize(self, item: str | Word | Iterable[int]) -> "TorusElement":
        """Normal form of a word over basis ∪ {t}, by left-to-right
        accumulation."""
        if isinstance(item, Word):
            if item.basis == self.basis:
                return TorusElement(self, item, 0)
            if item.basis != self.extended_basis:
                raise BasisMismatchError("word over an unrelated basis")
            letters: Sequence[int] = item.letters
        elif isinstance(item, str):
            letters = self.extended_basis.parse(item).letters
        else:
            letters = tuple(item)
        section = self.basis.rank + 1
        acc = self.identity_element()
        for x in letters:
            if abs(x) == section:
                step = TorusElement(self, identity(self.basis), 1 if x > 0 else -1)
            else:
                step = TorusElement(self, Word(self.basis, (x,)), 0)
            acc = acc * step
        return acc

    # -- presentation ---------------------------------------------------

    def defining_relators(self) -> list["TorusElement"]:
        """t·a·t⁻¹·Φ(a)⁻¹ per generator, pushed through normalize."""
        section = self.basis.rank + 1
        out = []
        for i in range(1, self.basis.rank + 1):
            img = self.phi.images[i - 1]
            letters = (section, i, -section) + img.inverse().letters
            out.append(self.normalize(letters))
        return out

    def presentation(self) -> str:
        gens = ", ".join(list(self.basis.names) + [SECTION_NAME])
        rels = ", ".join(
            f"t {name} t^-1 = {img}"
            for name, img in zip(self.basis.names, self.phi.images)
        )
        return f"< {gens} | {rels} >"


def torus_group(phi: Automorphism | Endomorphism) -> TorusGroup:
    """Build the mapping torus, certifying the map when needed."""
    if not isinstance(phi, Automorphism):
        phi = certify_automorphism(phi)
    return TorusGroup(phi)


@dataclass(frozen=True)
class TorusElement:
    group: TorusGroup
    w: Word
    k: int

    def __post_init__(self) -> None:
        if self.w.basis != self.group.basis:
            raise BasisMismatchError("fiber word over a different basis")

    @property
    def in_fiber(self) -> bool:
        return self.k == 0

    def is_identity(self) -> bool:
        return self.k == 0 and not self.w.letters

    def projection(self) -> int:
        """Image under G → Z killing the fiber."""
        return self.k

    def __mul__(self, other: "TorusElement") -> "TorusElement":
        if self.group != other.group:
            raise BasisMismatchError("elements of different torus groups")
        w = self.w * apply_power(self.group.phi, self.k, other.w)
        return TorusElement(self.group, w, self.k + other.k)

    def inverse(self) -> "TorusElement":
        w = apply_power(self.group.phi, -self.k, self.w.inverse())
        return TorusElement(self.group, w, -self.k)

    def __pow__(self, m: int) -> "TorusElement":
        base = self if m >= 0 else self.inverse()
        out = self.group.identity_element()
        for _ in range(abs(m)):
            out = out * base
        return out

    def __str__(self) -> str:
        parts = [self.group.basis.symbol(x) for x in self.w.letters]
        parts += [SECTION_NAME if self.k > 0 else SECTION_NAME + "'"] * abs(self.k)
        return " ".join(parts) if parts else "1"

    def __repr__(self) -> str:
        return f"<torus element {self}>"


def multiply(g1: TorusElement, g2: TorusElement) -> TorusElement:
    return g1 * g2


def invert(g: TorusElement) -> TorusElement:
    return g.inverse()


# ---------------------------------------------------------------------------
# fiber intersection


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with x·a + y·b = g = gcd(a, b) ≥ 0."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        return -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def _inv_expr(e: Sequence[int]) -> tuple[int, ...]:
    return tuple(-t for t in reversed(e))


def _pow_expr(e: Sequence[int], m: int) -> tuple[int, ...]:
    if m >= 0:
        return tuple(e) * m
    return _inv_expr(e) * (-m)


@dataclass
class FiberIntersection:
    """H ∩ F for H = ⟨gens⟩, as a folded graph plus provenance.

    ``n`` is the gcd of the generators' t-exponents and ``s`` an
    explicit element of H with that exponent (None when every
    generator already lies in the fiber).  ``rounds`` counts the
    saturation steps that were needed.
    """

    group: TorusGroup
    gens: tuple[TorusElement, ...]
    graph: StallingsGraph
    n: int
    s: TorusElement | None
    rounds: int
    _witnessed: WitnessedGraph | None = field(default=None, repr=False)
    _entry_exprs: tuple[tuple[int, ...], ...] = field(default=(), repr=False)

    def contains(self, w: Word) -> bool:
        return self.graph.accepts(w)

    def witness(self, w: Word) -> tuple[int, ...] | None:
        """w as a signed product over ``gens`` (1-based), or None.

        Only available when the intersection was computed with
        with_witnesses=True.
        """
        if self._witnessed is None:
            raise ValueError("witnesses were not requested")
        expr = self._witnessed.express(w)
        if expr is None:
            return None
        out: list[int] = []
        for tix in expr:
            e = self._entry_exprs[abs(tix) - 1]
            out.extend(e if tix > 0 else _inv_expr(e))
        return tuple(out)

    def evaluate_witness(self, expr: Iterable[int]) -> TorusElement:
        """Multiply out a signed product over ``gens``."""
        acc = self.group.identity_element()
        for j in expr:
            g = self.gens[abs(j) - 1]
            acc = acc * (g if j > 0 else g.inverse())
        return acc

    def basis_witnesses(self) -> list[tuple[Word, tuple[int, ...]]]:
        out = []
        for w in self.graph.free_basis():
            expr = self.witness(w)
            if expr is None:
                raise AssertionError("free basis element lost by the witness graph")
            out.append((w, expr))
        return out


def fiber_intersection(
    group: TorusGroup,
    gens: Sequence[TorusElement],
    max_rounds: int = 64,
    max_vertices: int = 100_000,
    with_witnesses: bool = False,
) -> FiberIntersection:
    """Folded graph of ⟨gens⟩ ∩ F, saturated under conjugation by s."""
    gens = tuple(gens)
    for g in gens:
        if g.group != group:
            raise BasisMismatchError("generator from a different torus group")
    b = group.basis

    n = 0
    s = group.identity_element()
    s_expr: tuple[int, ...] = ()
    for i, g in enumerate(gens, start=1):
        if g.k == 0:
            continue
        if n == 0:
            if g.k > 0:
                n, s, s_expr = g.k, g, (i,)
            else:
                n, s, s_expr = -g.k, g.inverse(), (-i,)
            continue
        d, x, y = _ext_gcd(n, g.k)
        if d == n:
            continue
        s = (s ** x) * (g ** y)
        s_expr = _pow_expr(s_expr, x) + _pow_expr((i,), y)
        n = d

    entries: list[tuple[Word, tuple[int, ...]]] = []
    seen: set[Word] = set()

    def push(w: Word, expr: tuple[int, ...]) -> bool:
        if not w.letters or w in seen:
            return False
        seen.add(w)
        entries.append((w, expr))
        return True

    for i, g in enumerate(gens, start=1):
        if n:
            m = g.k // n
            h = g * (s ** (-m))
            expr = (i,) + _pow_expr(s_expr, -m)
        else:
            h, expr = g, (i,)
        if h.k != 0:
            raise AssertionError("seed failed to land in the fiber")
        push(h.w, expr)

    rounds = 0
    if n == 0:
        graph = stallings_graph(b, [w for w, _ in entries])
        s_out = None
    else:
        theta = compose(inner_automorphism(b, s.w), map_power(group.phi, n))
        theta_inv = theta.inverse()
        s_inv_expr = _inv_expr(s_expr)
        pos = list(entries)
        neg = list(entries)
        while True:
            graph = stallings_graph(b, [w for w, _ in entries])
            if graph.n_vertices > max_vertices:
                raise UnstabilizedError(
                    "fiber saturation exceeded the vertex budget",
                    rounds, graph.n_vertices,
                )
            if is_invariant(graph, theta):
                break
            rounds += 1
            if rounds > max_rounds:
                raise UnstabilizedError(
                    "fiber saturation exceeded the round budget",
                    rounds, graph.n_vertices,
                )
            new_pos = []
            for w, e in pos:
                cand = (theta.apply(w), s_expr + e + s_inv_expr)
                if push(*cand):
                    new_pos.append(cand)
            new_neg = []
            for w, e in neg:
                cand = (theta_inv.apply(w), s_inv_expr + e + s_expr)
                if push(*cand):
                    new_neg.append(cand)
            pos, neg = new_pos, new_neg
        s_out = s

    result = FiberIntersection(group, gens, graph, n, s_out, rounds)
    if with_witnesses:
        result._witnessed = witnessed_graph(b, [w for w, _ in entries])
        result._entry_exprs = tuple(e for _, e in entries)
    return result


__all__ = [
    "FiberIntersection",
    "TorusElement",
    "TorusGroup",
    "UnstabilizedError",
    "fiber_intersection",
    "invert",
    "multiply",
    "torus_group",
]
