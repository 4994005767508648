"""Folded core graphs for finitely generated subgroups of a free group.

A subgroup is represented by its folded based core graph: vertices are
integers with basepoint 0, and each edge ``(u, x, v)`` reads generator
``x`` from u to v.  Folded means no vertex has two outgoing or two
incoming edges with the same label, which makes membership a
deterministic trace.  Graphs are canonically numbered (breadth-first
from the basepoint, labels in order), so two graphs are equal as values
exactly when they present the same subgroup.

Two fold routines live here.  ``stallings_graph`` is the plain
union-find fold with a worklist.  ``witnessed_graph`` additionally
threads, through every fold, an expression for each edge as a word in
the original generators; tracing a member word and stitching the edge
expressions yields an explicit product certificate.  The plain fold is
the default; the witnessed one costs more per merge and is only pulled
in where a certificate is needed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .words import Basis, BasisMismatchError, Word, concat_all, free_reduce

Edge = tuple[int, int, int]  # (source, label, target), label positive


class StallingsGraph:
    """Immutable folded core graph with basepoint 0."""

    def __init__(self, basis: Basis, n_vertices: int, edges: Sequence[Edge]):
        self.basis = basis
        self.n_vertices = n_vertices
        self.edges = tuple(sorted(edges))
        self._succ: dict[tuple[int, int], int] = {}
        self._pred: dict[tuple[int, int], int] = {}
        for u, x, v in self.edges:
            if (u, x) in self._succ or (v, x) in self._pred:
                raise ValueError("edge set is not folded")
            self._succ[(u, x)] = v
            self._pred[(v, x)] = u

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, StallingsGraph)
            and self.basis == other.basis
            and self.n_vertices == other.n_vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.basis, self.n_vertices, self.edges))

    def __repr__(self) -> str:
        return f"<graph {self.n_vertices} vertices, {len(self.edges)} edges, rank {self.rank()}>"

    # -- structure ---------------------------------------------------

    def step(self, vertex: int, letter: int) -> int | None:
        """Follow one signed letter; None if the edge is absent."""
        if letter > 0:
            return self._succ.get((vertex, letter))
        return self._pred.get((vertex, -letter))

    def trace(self, letters: Iterable[int], start: int = 0) -> int | None:
        at = start
        for x in letters:
            nxt = self.step(at, x)
            if nxt is None:
                return None
            at = nxt
        return at

    def accepts(self, w: Word) -> bool:
        if w.basis != self.basis:
            raise BasisMismatchError("word over a different basis")
        return self.trace(w.letters) == 0

    def is_trivial(self) -> bool:
        return not self.edges

    def rank(self) -> int:
        return len(self.edges) - self.n_vertices + 1

    def is_full_cover(self) -> bool:
        r = self.basis.rank
        return all(
            (v, x) in self._succ and (v, x) in self._pred
            for v in range(self.n_vertices)
            for x in range(1, r + 1)
        )

    def index(self) -> int | None:
        """Subgroup index, or None when infinite."""
        return self.n_vertices if self.is_full_cover() else None

    # -- spanning tree and free basis --------------------------------

    def _tree(self) -> tuple[list[int | None], list[int], set[Edge]]:
        """BFS parents, parent letters, and the set of tree edges."""
        parent: list[int | None] = [None] * self.n_vertices
        letter = [0] * self.n_vertices
        tree: set[Edge] = set()
        seen = [False] * self.n_vertices
        seen[0] = True
        queue = deque([0])
        while queue:
            v = queue.popleft()
            for x in range(1, self.basis.rank + 1):
                for s, w in ((x, self._succ.get((v, x))), (-x, self._pred.get((v, x)))):
                    if w is None or seen[w]:
                        continue
                    seen[w] = True
                    parent[w] = v
                    letter[w] = s
                    tree.add((v, x, w) if s > 0 else (w, x, v))
                    queue.append(w)
        return parent, letter, tree

    def _path_from_base(self, parent, letter, v: int) -> tuple[int, ...]:
        out: list[int] = []
        while v != 0:
            out.append(letter[v])
            v = parent[v]
        return tuple(reversed(out))

    def free_basis(self) -> list[Word]:
        """One reduced word per non-tree edge (a free basis of the subgroup)."""
        parent, letter, tree = self._tree()
        paths = [self._path_from_base(parent, letter, v) for v in range(self.n_vertices)]
        out = []
        for u, x, v in self.edges:
            if (u, x, v) in tree:
                continue
            raw = paths[u] + (x,) + tuple(-t for t in reversed(paths[v]))
            out.append(Word(self.basis, free_reduce(raw)))
        return out

    def express_in_free_basis(self, w: Word) -> tuple[int, ...] | None:
        """Write an accepted word over the ``free_basis`` alphabet.

        Returns signed 1-based indices into ``free_basis()``, or None
        when the word is not a member.
        """
        if not self.accepts(w):
            return None
        _, _, tree = self._tree()
        nontree = [e for e in self.edges if e not in tree]
        slot = {e: j + 1 for j, e in enumerate(nontree)}
        out: list[int] = []
        at = 0
        for x in w.letters:
            nxt = self.step(at, x)
            edge = (at, x, nxt) if x > 0 else (nxt, -x, at)
            j = slot.get(edge)
            if j is not None:
                out.append(j if x > 0 else -j)
            at = nxt
        return free_reduce(out)


# ---------------------------------------------------------------------------
# plain fold: union-find vertex merging with a worklist


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def union(self, a: int, b: int) -> tuple[int, int]:
        """Returns (winner, loser); vertex 0 always wins."""
        a, b = self.find(a), self.find(b)
        if a == b:
            return a, a
        if b == 0 or (a != 0 and self.size[a] < self.size[b]):
            a, b = b, a
        self.parent[b] = a
        self.size[a] += self.size[b]
        return a, b


def _fold_edges(n: int, edges: Iterable[Edge]) -> tuple[_UnionFind, set[Edge]]:
    """Fold an edge list; returns the vertex union-find and folded edges."""
    uf = _UnionFind(n)
    out: list[dict[int, int]] = [dict() for _ in range(n)]
    inn: list[dict[int, int]] = [dict() for _ in range(n)]
    unions: deque[tuple[int, int]] = deque()

    def insert(u: int, x: int, v: int) -> None:
        u, v = uf.find(u), uf.find(v)
        t = out[u].get(x)
        if t is not None:
            t = uf.find(t)
            out[u][x] = t
            if t != v:
                unions.append((t, v))
            return  # absorbed into the existing edge
        s = inn[v].get(x)
        if s is not None:
            s = uf.find(s)
            inn[v][x] = s
            if s != u:
                unions.append((s, u))
            return
        out[u][x] = v
        inn[v][x] = u

    def drain() -> None:
        while unions:
            a, b = unions.popleft()
            a, b = uf.find(a), uf.find(b)
            if a == b:
                continue
            if b == 0 or (a != 0 and uf.size[a] < uf.size[b]):
                a, b = b, a
            winner, loser = a, b
            lo_out, lo_in = out[loser], inn[loser]
            out[loser], inn[loser] = {}, {}
            # Drop the moved edges' records held at other vertices first;
            # a stale record would make insert() mistake the edge being
            # re-homed for an already-present one and lose or keep it wrongly.
            for x, t in lo_out.items():
                r = uf.find(t)
                if x in inn[r] and uf.find(inn[r][x]) == loser:
                    del inn[r][x]
            for x, s in lo_in.items():
                r = uf.find(s)
                if x in out[r] and uf.find(out[r][x]) == loser:
                    del out[r][x]
            uf.union(winner, loser)
            for x, t in lo_out.items():
                insert(winner, x, t)
            for x, s in lo_in.items():
                insert(s, x, winner)

    for u, x, v in edges:
        insert(u, x, v)
        drain()
    folded = set()
    for u in range(n):
        if uf.find(u) != u:
            continue
        for x, t in out[u].items():
            folded.add((u, x, uf.find(t)))
    return uf, folded


def _core_and_canonical(
    basis: Basis, edges: set[Edge], base: int, protect: set[int] | None = None
) -> tuple[StallingsGraph, dict[int, int]]:
    """Prune hanging trees, drop unreachable parts, renumber canonically.

    Returns the graph and the old-id → new-id map for surviving vertices.
    """
    protect = {base} | (protect or set())
    adj: dict[int, set[Edge]] = {}
    for e in edges:
        adj.setdefault(e[0], set()).add(e)
        adj.setdefault(e[2], set()).add(e)
    for v in protect:
        adj.setdefault(v, set())
    leaves = deque(v for v, es in adj.items() if len(es) <= 1 and v not in protect)
    while leaves:
        v = leaves.popleft()
        if v not in adj or len(adj[v]) > 1 or v in protect:
            continue
        for e in list(adj[v]):
            other = e[2] if e[0] == v else e[0]
            adj[other].discard(e)
            if len(adj[other]) <= 1 and other not in protect:
                leaves.append(other)
        del adj[v]
    succ: dict[tuple[int, int], int] = {}
    pred: dict[tuple[int, int], int] = {}
    live = {e for es in adj.values() for e in es}
    for u, x, v in live:
        succ[(u, x)] = v
        pred[(v, x)] = u
    order: dict[int, int] = {base: 0}
    queue = deque([base])
    while queue:
        v = queue.popleft()
        for x in range(1, basis.rank + 1):
            for nbr in (succ.get((v, x)), pred.get((v, x))):
                if nbr is not None and nbr in adj and nbr not in order:
                    order[nbr] = len(order)
                    queue.append(nbr)
    kept = [
        (order[u], x, order[v]) for u, x, v in live if u in order and v in order
    ]
    return StallingsGraph(basis, len(order), kept), order


def _petals(b: Basis, gens: Iterable[Word], start: int = 1) -> tuple[int, list[Edge]]:
    """Wedge of loops at vertex 0 spelling the generators."""
    edges: list[Edge] = []
    n = start
    for g in gens:
        ls = free_reduce(g.letters)
        if not ls:
            continue
        prev = 0
        for i, x in enumerate(ls):
            nxt = 0 if i == len(ls) - 1 else n
            if nxt:
                n += 1
            if x > 0:
                edges.append((prev, x, nxt))
            else:
                edges.append((nxt, -x, prev))
            prev = nxt
    return n, edges


def stallings_graph(b: Basis, gens: Iterable[Word]) -> StallingsGraph:
    """Folded core graph of the subgroup generated by ``gens``."""
    gens = list(gens)
    for g in gens:
        if g.basis != b:
            raise BasisMismatchError("generator over a different basis")
    n, edges = _petals(b, gens)
    uf, folded = _fold_edges(n, edges)
    graph, _ = _core_and_canonical(b, folded, uf.find(0))
    return graph


def trivial_subgroup(b: Basis) -> StallingsGraph:
    return StallingsGraph(b, 1, [])


def full_group(b: Basis) -> StallingsGraph:
    return StallingsGraph(b, 1, [(0, x, 0) for x in range(1, b.rank + 1)])


def conjugate_subgroup(h: StallingsGraph, g: Word) -> StallingsGraph:
    """Graph of g·H·g⁻¹."""
    gens = [concat_all(h.basis, [g, w, g.inverse()]) for w in h.free_basis()]
    return stallings_graph(h.basis, gens)


def subgroup_equal(a: StallingsGraph, c: StallingsGraph) -> bool:
    """Graphs are canonical, so equality of graphs is equality of subgroups."""
    return a == c


def intersect(a: StallingsGraph, c: StallingsGraph) -> StallingsGraph:
    """Fiber product of the two based graphs (basepoint component, cored)."""
    if a.basis != c.basis:
        raise BasisMismatchError("subgroups over different bases")
    pair_id: dict[tuple[int, int], int] = {(0, 0): 0}
    queue = deque([(0, 0)])
    edges: set[Edge] = set()
    while queue:
        p, q = queue.popleft()
        here = pair_id[(p, q)]
        for x in range(1, a.basis.rank + 1):
            for sign in (x, -x):
                pn, qn = a.step(p, sign), c.step(q, sign)
                if pn is None or qn is None:
                    continue
                key = (pn, qn)
                if key not in pair_id:
                    pair_id[key] = len(pair_id)
                    queue.append(key)
                if sign > 0:
                    edges.add((here, x, pair_id[key]))
                else:
                    edges.add((pair_id[key], x, here))
    graph, _ = _core_and_canonical(a.basis, edges, 0)
    return graph


def is_invariant(h: StallingsGraph, theta) -> bool:
    """Whether θ(H) = H for an invertible map θ (checked on a free basis).

    ``theta`` needs ``apply(word)`` and ``inverse()``; both image and
    preimage of every basis element must be members.
    """
    inv = theta.inverse()
    for w in h.free_basis():
        if not h.accepts(theta.apply(w)):
            return False
        if not h.accepts(inv.apply(w)):
            return False
    return True


def _coset_automaton(
    g: StallingsGraph, tail: tuple[int, ...]
) -> tuple[dict, dict, int, int]:
    """Fold g together with a path spelling ``tail`` out of its base.

    Returns (succ, pred, base, end); the reduced words readable from
    base to end are exactly the coset ⟨g⟩·tail.
    """
    edges: list[Edge] = list(g.edges)
    n = g.n_vertices
    prev = 0
    for x in tail:
        nxt = n
        n += 1
        if x > 0:
            edges.append((prev, x, nxt))
        else:
            edges.append((nxt, -x, prev))
        prev = nxt
    uf, folded = _fold_edges(n, edges)
    succ: dict[tuple[int, int], int] = {}
    pred: dict[tuple[int, int], int] = {}
    for u, x, v in folded:
        succ[(u, x)] = v
        pred[(v, x)] = u
    return succ, pred, uf.find(0), uf.find(prev)


def double_coset_contains(
    left: StallingsGraph, s: Word, right: StallingsGraph, w: Word
) -> bool:
    """Whether w ∈ left·s·right.

    w is in the double coset iff the cosets left·s and w·right share an
    element, i.e. iff the accept pair is reachable in the product of the
    two coset automata.  Folding a single wedge instead would conflate
    the double coset with the span ⟨left ∪ s·right·s⁻¹⟩·s.
    """
    b = left.basis
    if right.basis != b or s.basis != b or w.basis != b:
        raise BasisMismatchError("operands over different bases")
    sa, pa, a_base, a_end = _coset_automaton(left, s.letters)
    winv = tuple(-x for x in reversed(w.letters))
    sb, pb, b_base, b_end = _coset_automaton(right, winv)
    start = (a_base, b_end)
    goal = (a_end, b_base)
    seen = {start}
    queue: deque[tuple[int, int]] = deque([start])
    while queue:
        pair = queue.popleft()
        if pair == goal:
            return True
        ua, ub = pair
        for j in range(1, b.rank + 1):
            for va, vb in (
                (sa.get((ua, j)), sb.get((ub, j))),
                (pa.get((ua, j)), pb.get((ub, j))),
            ):
                if va is not None and vb is not None and (va, vb) not in seen:
                    seen.add((va, vb))
                    queue.append((va, vb))
    return False


# ---------------------------------------------------------------------------
# witnessed fold: expressions threaded through every merge


class _WEdge:
    __slots__ = ("src", "lbl", "tgt", "expr")

    def __init__(self, src: int, lbl: int, tgt: int, expr: tuple[int, ...]):
        self.src = src
        self.lbl = lbl
        self.tgt = tgt
        self.expr = expr


class WitnessedGraph:
    """Folded graph whose edges carry generator-word expressions.

    Fixing one basepoint path word V(v) per vertex, every edge
    e = (u, x, v) stores an expression over the original generator
    alphabet (signed 1-based indices into ``gens``) whose value in the
    ambient group equals V(u)·x·V(v)⁻¹, an element of the subgroup.
    Concatenating expressions along an accepted basepoint loop yields
    the loop's product certificate in terms of ``gens``.
    """

    def __init__(self, b: Basis, gens: Sequence[Word]):
        self.basis = b
        self.gens = tuple(gens)
        self._out: dict[int, dict[int, list[_WEdge]]] = {0: {}}
        self._inn: dict[int, dict[int, list[_WEdge]]] = {0: {}}
        self._next = 1
        for j, g in enumerate(self.gens, start=1):
            ls = free_reduce(g.letters)
            if not ls:
                continue
            prev = 0
            for i, x in enumerate(ls):
                last = i == len(ls) - 1
                nxt = 0 if last else self._new_vertex()
                expr = (j,) if last else ()
                if x > 0:
                    self._add(_WEdge(prev, x, nxt, expr))
                else:
                    self._add(_WEdge(nxt, -x, prev, tuple(-t for t in reversed(expr))))
                prev = nxt
        self._fold()
        self._prune()

    # construction helpers -------------------------------------------

    def _new_vertex(self) -> int:
        v = self._next
        self._next += 1
        self._out[v] = {}
        self._inn[v] = {}
        return v

    def _add(self, e: _WEdge) -> None:
        self._out[e.src].setdefault(e.lbl, []).append(e)
        self._inn[e.tgt].setdefault(e.lbl, []).append(e)

    def _remove(self, e: _WEdge) -> None:
        self._out[e.src][e.lbl].remove(e)
        if not self._out[e.src][e.lbl]:
            del self._out[e.src][e.lbl]
        self._inn[e.tgt][e.lbl].remove(e)
        if not self._inn[e.tgt][e.lbl]:
            del self._inn[e.tgt][e.lbl]

    def _edges_at(self, v: int) -> list[_WEdge]:
        es = [e for lst in self._out[v].values() for e in lst]
        es += [e for lst in self._inn[v].values() for e in lst if e.src != e.tgt]
        return es

    def _fold(self) -> None:
        work = deque(self._out.keys())
        while work:
            v = work.popleft()
            if v not in self._out:
                continue
            hit = self._find_fold(v)
            if hit is None:
                continue
            shared_src, keep, merge = hit
            winner = keep.tgt if shared_src else keep.src
            loser = merge.tgt if shared_src else merge.src
            if loser == 0:
                winner, loser = loser, winner
                keep, merge = merge, keep
            if winner == loser:
                self._remove(merge)  # duplicate parallel edge
            else:
                self._merge_vertex(shared_src, keep, merge, winner, loser)
            work.append(winner)
            work.append(v)

    def _find_fold(self, v: int) -> tuple[bool, _WEdge, _WEdge] | None:
        for lst in self._out[v].values():
            if len(lst) >= 2:
                return True, lst[0], lst[1]
        for lst in self._inn[v].values():
            if len(lst) >= 2:
                return False, lst[0], lst[1]
        return None

    def _merge_vertex(
        self, shared_src: bool, keep: _WEdge, merge: _WEdge, winner: int, loser: int
    ) -> None:
        """Identify ``loser`` with ``winner``; fix up expressions.

        With e1 = keep and e2 = merge sharing a source, the correction
        d = V(loser)·V(winner)⁻¹ has expression e2⁻¹·e1; sharing a
        target it is e2·e1⁻¹.  Edges into the loser append d on the
        right, edges out of it prepend d⁻¹.
        """
        inv = lambda t: tuple(-u for u in reversed(t))  # noqa: E731
        if shared_src:
            right = tuple(free_reduce(inv(merge.expr) + keep.expr))
        else:
            right = tuple(free_reduce(merge.expr + inv(keep.expr)))
        left = inv(right)
        self._remove(merge)
        for e in self._edges_at(loser):
            self._remove(e)
            if e.tgt == loser:
                e.expr = tuple(free_reduce(e.expr + right))
                e.tgt = winner
            if e.src == loser:
                e.expr = tuple(free_reduce(left + e.expr))
                e.src = winner
            self._add(e)
        del self._out[loser]
        del self._inn[loser]

    def _prune(self) -> None:
        leaves = deque(v for v in self._out if v != 0 and len(self._edges_at(v)) <= 1)
        while leaves:
            v = leaves.popleft()
            if v == 0 or v not in self._out or len(self._edges_at(v)) > 1:
                continue
            for e in self._edges_at(v):
                other = e.tgt if e.src == v else e.src
                self._remove(e)
                if other != 0 and len(self._edges_at(other)) <= 1:
                    leaves.append(other)
            del self._out[v]
            del self._inn[v]

    # queries ----------------------------------------------------------

    def step(self, v: int, letter: int) -> _WEdge | None:
        table = self._out if letter > 0 else self._inn
        lst = table[v].get(abs(letter))
        return lst[0] if lst else None

    def accepts(self, w: Word) -> bool:
        at = 0
        for x in w.letters:
            e = self.step(at, x)
            if e is None:
                return False
            at = e.tgt if x > 0 else e.src
        return at == 0

    def express(self, w: Word) -> tuple[int, ...] | None:
        """w as a signed product over ``gens`` (1-based), or None."""
        at = 0
        out: list[int] = []
        for x in w.letters:
            e = self.step(at, x)
            if e is None:
                return None
            if x > 0:
                out.extend(e.expr)
                at = e.tgt
            else:
                out.extend(-t for t in reversed(e.expr))
                at = e.src
        if at != 0:
            return None
        return free_reduce(out)

    def evaluate(self, expr: Iterable[int]) -> Word:
        """Evaluate a signed product over ``gens`` back to a word."""
        parts = []
        for j in expr:
            g = self.gens[abs(j) - 1]
            parts.append(g if j > 0 else g.inverse())
        return concat_all(self.basis, parts)

    def is_rose(self) -> bool:
        if len(self._out) != 1:
            return False
        loops = self._out[0]
        return set(loops) == set(range(1, self.basis.rank + 1)) and all(
            len(v) == 1 for v in loops.values()
        )

    def to_stallings(self) -> StallingsGraph:
        edges = {
            (e.src, e.lbl, e.tgt)
            for table in self._out.values()
            for lst in table.values()
            for e in lst
        }
        graph, _ = _core_and_canonical(self.basis, edges, 0)
        return graph


def witnessed_graph(b: Basis, gens: Sequence[Word]) -> WitnessedGraph:
    """Folded graph of ⟨gens⟩ with membership certificates."""
    gens = list(gens)
    for g in gens:
        if g.basis != b:
            raise BasisMismatchError("generator over a different basis")
    return WitnessedGraph(b, gens)
