"""Exact Cayley balls of F ⋊ Z and an empirical divergence probe.

The ball is built by breadth-first search over the generating set
(fiber basis and the section letter t, with inverses), using the
normal form (w, k) with w·tᵏ·a = w·Φᵏ(a)·tᵏ to stay exact.  Balls are
all or nothing: exceeding the vertex budget raises instead of
returning a partial metric.

The divergence probe samples far-apart pairs on a sphere and measures
detour lengths around a forbidden inner ball, then fits a log-log
slope.  At desk-scale radii only orderings between maps are
trustworthy, not absolute exponents, and reports carry that caveat.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .automorphisms import apply_power
from .mapping_torus import TorusElement, TorusGroup
from .words import Word, free_reduce

State = tuple[tuple[int, ...], int]

FIT_MIN_RADIUS = 4
CAVEAT = "desk-scale radii: trust orderings between maps, not absolute exponents"


class BudgetExceededError(RuntimeError):
    """The ball would exceed the vertex budget; nothing is returned."""

    def __init__(self, budget: int, radius: int):
        super().__init__(
            f"ball of radius {radius} exceeds the budget of {budget} vertices"
        )
        self.budget = budget
        self.radius = radius


class BallGraph:
    """Metric ball B(r) in Cay(G, basis ∪ {t}) with exact distances."""

    def __init__(
        self,
        group: TorusGroup,
        radius: int,
        states: list[State],
        dist: list[int],
        adj: list[tuple[int, ...]],
        index: dict[State, int],
    ):
        self.group = group
        self.radius = radius
        self._states = states
        self._dist = dist
        self._adj = adj
        self._index = index

    def __len__(self) -> int:
        return len(self._states)

    def element(self, i: int) -> TorusElement:
        w, k = self._states[i]
        return TorusElement(self.group, Word(self.group.basis, w), k)

    def elements(self) -> list[TorusElement]:
        return [self.element(i) for i in range(len(self._states))]

    def index_of(self, g: TorusElement) -> int:
        key = (free_reduce(g.w.letters), g.k)
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(f"{g} lies outside the ball") from None

    def contains(self, g: TorusElement) -> bool:
        return (free_reduce(g.w.letters), g.k) in self._index

    def distance(self, g: TorusElement) -> int:
        return self._dist[self.index_of(g)]

    def distance_by_index(self, i: int) -> int:
        return self._dist[i]

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self._adj[i]

    def sphere_indices(self, k: int) -> list[int]:
        return [i for i, d in enumerate(self._dist) if d == k]

    def sphere(self, k: int) -> list[TorusElement]:
        return [self.element(i) for i in self.sphere_indices(k)]

    def sphere_sizes(self) -> list[int]:
        out = [0] * (self.radius + 1)
        for d in self._dist:
            out[d] += 1
        return out

    def ball_sizes(self) -> list[int]:
        sizes = self.sphere_sizes()
        total = 0
        out = []
        for s in sizes:
            total += s
            out.append(total)
        return out

    def distances_from(self, start: int, min_level: int | None = None) -> list[int | None]:
        """BFS distances inside the ball, restricted to vertices whose
        distance from the identity is at least ``min_level`` when given."""
        dist0 = self._dist
        allowed = (
            None
            if min_level is None or min_level <= 0
            else [d >= min_level for d in dist0]
        )
        out: list[int | None] = [None] * len(self._states)
        if allowed is not None and not allowed[start]:
            return out
        out[start] = 0
        queue = deque([start])
        while queue:
            i = queue.popleft()
            for j in self._adj[i]:
                if out[j] is None and (allowed is None or allowed[j]):
                    out[j] = out[i] + 1  # type: ignore[operator]
                    queue.append(j)
        return out


def cayley_ball(group: TorusGroup, r: int, max_vertices: int = 500_000) -> BallGraph:
    """Exact BFS ball of radius r; raises BudgetExceededError rather
    than returning a partial result."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    b = group.basis
    phi = group.phi
    twist_memo: dict[tuple[int, int], tuple[int, ...]] = {}

    def twisted(k: int, letter: int) -> tuple[int, ...]:
        key = (k, letter)
        got = twist_memo.get(key)
        if got is None:
            got = apply_power(phi, k, Word(b, (letter,))).letters
            twist_memo[key] = got
        return got

    fiber_letters = [s * i for i in range(1, b.rank + 1) for s in (1, -1)]

    def neighbor_states(w: tuple[int, ...], k: int) -> Iterable[State]:
        for x in fiber_letters:
            yield free_reduce(w + twisted(k, x)), k
        yield w, k + 1
        yield w, k - 1

    start: State = ((), 0)
    index: dict[State, int] = {start: 0}
    states: list[State] = [start]
    dist: list[int] = [0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if dist[i] == r:
            continue
        w, k = states[i]
        for st in neighbor_states(w, k):
            if st not in index:
                if len(states) >= max_vertices:
                    raise BudgetExceededError(max_vertices, r)
                index[st] = len(states)
                states.append(st)
                dist.append(dist[i] + 1)
                queue.append(len(states) - 1)
    adj_sets: list[set[int]] = [set() for _ in states]
    for i, (w, k) in enumerate(states):
        for st in neighbor_states(w, k):
            j = index.get(st)
            if j is not None and j != i:
                adj_sets[i].add(j)
                adj_sets[j].add(i)
    adj = [tuple(sorted(s)) for s in adj_sets]
    return BallGraph(group, r, states, dist, adj, index)


def free_times_z_ball_size(rank: int, r: int) -> int:
    """|B(r)| in F_rank × Z: sum over fiber spheres times the t-range."""
    total = 0
    for i in range(r + 1):
        sphere = 1 if i == 0 else 2 * rank * (2 * rank - 1) ** (i - 1)
        total += sphere * (2 * (r - i) + 1)
    return total


# ---------------------------------------------------------------------------
# divergence


@dataclass(frozen=True)
class DivergenceSample:
    radius: int
    p: TorusElement
    q: TorusElement
    distance: int
    detour: int | None

    @property
    def reachable(self) -> bool:
        return self.detour is not None


@dataclass(frozen=True)
class DivergenceReport:
    radii: tuple[int, ...]
    samples_per_radius: int
    seed: int
    samples: tuple[DivergenceSample, ...]
    mean_detour: tuple[tuple[int, float | None], ...]
    exponent: float | None
    residual: float | None
    low_confidence: bool
    note: str = CAVEAT

    def mean_at(self, r: int) -> float | None:
        for radius, mean in self.mean_detour:
            if radius == r:
                return mean
        raise KeyError(f"radius {r} was not sampled")


def divergence_estimate(
    group: TorusGroup,
    radii: Sequence[int],
    samples_per_radius: int = 32,
    seed: int = 0,
    max_vertices: int = 500_000,
    ball: BallGraph | None = None,
) -> DivergenceReport:
    """Sample sphere pairs at distance ≥ r, measure detours around the
    open ball of radius ⌊r/2⌋, and fit log(mean detour) against log(r).

    Unreachable pairs stay in the report with a flag.  The fit excludes
    radii below FIT_MIN_RADIUS; too few usable pairs or a sparse fit
    marks the report low-confidence.
    """
    rs = sorted(set(int(r) for r in radii))
    if not rs or rs[0] < 1:
        raise ValueError("radii must be positive")
    r_max = rs[-1]
    if ball is None:
        ball = cayley_ball(group, r_max, max_vertices)
    elif ball.radius < r_max:
        raise ValueError("supplied ball is smaller than the largest radius")
    rng = random.Random(seed)
    samples: list[DivergenceSample] = []
    means: list[tuple[int, float | None]] = []
    starved = False
    for r in rs:
        sphere = ball.sphere_indices(r)
        kept: list[DivergenceSample] = []
        dist_cache: dict[int, list[int | None]] = {}
        attempts = 0
        limit = 20 * samples_per_radius
        while len(kept) < samples_per_radius and attempts < limit:
            attempts += 1
            if len(sphere) < 2:
                break
            p = sphere[rng.randrange(len(sphere))]
            q = sphere[rng.randrange(len(sphere))]
            if p == q:
                continue
            if p not in dist_cache:
                dist_cache[p] = ball.distances_from(p)
            d = dist_cache[p][q]
            if d is None or d < r:
                continue
            detour = ball.distances_from(p, min_level=r // 2)[q]
            kept.append(
                DivergenceSample(r, ball.element(p), ball.element(q), d, detour)
            )
        samples.extend(kept)
        reachable = [s.detour for s in kept if s.detour is not None]
        means.append((r, sum(reachable) / len(reachable) if reachable else None))
        if len(reachable) < max(1, samples_per_radius // 2):
            starved = True
    fit_pts = [
        (r, m) for r, m in means if r >= FIT_MIN_RADIUS and m is not None and m > 0
    ]
    exponent = residual = None
    if len(fit_pts) >= 2:
        xs = np.array([math.log(r) for r, _ in fit_pts])
        ys = np.array([math.log(m) for _, m in fit_pts])
        a = np.stack([xs, np.ones_like(xs)], axis=1)
        coef, *_ = np.linalg.lstsq(a, ys, rcond=None)
        exponent = float(coef[0])
        residual = float(math.sqrt(np.mean((a @ coef - ys) ** 2)))
    low_confidence = starved or exponent is None
    return DivergenceReport(
        radii=tuple(rs),
        samples_per_radius=samples_per_radius,
        seed=seed,
        samples=tuple(samples),
        mean_detour=tuple(means),
        exponent=exponent,
        residual=residual,
        low_confidence=low_confidence,
    )


__all__ = [
    "BallGraph",
    "BudgetExceededError",
    "DivergenceReport",
    "DivergenceSample",
    "cayley_ball",
    "divergence_estimate",
    "free_times_z_ball_size",
]
