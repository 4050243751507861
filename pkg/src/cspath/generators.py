"""Instance builders.

* ``gen_grid``: nearest-neighbour lattices in up to four dimensions with
  seeded random passage times and weights (cube benchmark: water on the
  boundary, target at the centre).
* ``gen_speedway``: the half-plane with a fast vertical axis, whose active
  frontier has a closed form (``speedway_active_set``).
* ``gen_fractal``: the recursive triangle construction whose active
  frontier grows like t log t.
* ``mechanism_fixtures``: tiny graphs, each isolating one label-correcting
  event of the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .engine import SolverConfig
from .graph import ProblemInstance, build_graph, infinite_budget, instance_from_edges

__all__ = [
    "BadSpec",
    "GridSpec",
    "FractalSpec",
    "parse_rule",
    "lattice",
    "gen_grid",
    "gen_speedway",
    "speedway_active_set",
    "gen_fractal",
    "fractal_fast_edges",
    "fractal_expected_count",
    "FRACTAL_ALPHA",
    "Fixture",
    "mechanism_fixtures",
    "worked_example",
]

FRACTAL_ALPHA = 4 / (15 * math.log(2))


class BadSpec(ValueError):
    pass


def parse_rule(rule: str) -> tuple:
    """``'const:c'``, ``'uniform:lo:hi'`` or ``'bernoulli:p'`` (1 w.p. p, else 2)."""
    kind, *args = str(rule).split(":")
    try:
        if kind == "const" and len(args) == 1:
            c = int(args[0])
            if c < 1:
                raise BadSpec(f"constant must be >= 1 in {rule!r}")
            return ("const", c)
        if kind == "uniform" and len(args) == 2:
            lo, hi = int(args[0]), int(args[1])
            if not 1 <= lo <= hi:
                raise BadSpec(f"need 1 <= lo <= hi in {rule!r}")
            return ("uniform", lo, hi)
        if kind == "bernoulli" and len(args) == 1:
            p = float(args[0])
            if not 0 < p < 1:
                raise BadSpec(f"probability must be in (0, 1) in {rule!r}")
            return ("bernoulli", p)
    except ValueError as exc:
        if isinstance(exc, BadSpec):
            raise
        raise BadSpec(f"bad rule {rule!r}: {exc}") from exc
    raise BadSpec(f"unknown rule {rule!r}")


def _draw(rule: tuple, size: int, rng: np.random.Generator) -> np.ndarray:
    if rule[0] == "const":
        return np.full(size, rule[1], dtype=np.int64)
    if rule[0] == "uniform":
        return rng.integers(rule[1], rule[2] + 1, size=size, dtype=np.int64)
    return np.where(rng.random(size) < rule[1], 1, 2).astype(np.int64)


@dataclass(frozen=True)
class GridSpec:
    dims: tuple[int, ...]
    f1_rule: str = "const:1"
    f2_rule: str = "const:1"
    A_rule: str | Sequence[int] = "boundary"
    B_rule: str | Sequence[int] = "center"
    seed: int = 0
    M: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(s) for s in self.dims))
        if not 1 <= len(self.dims) <= 4:
            raise BadSpec(f"need 1 to 4 dimensions, got {len(self.dims)}")
        if any(s < 2 for s in self.dims):
            raise BadSpec(f"every side must be >= 2, got {self.dims}")
        parse_rule(self.f1_rule)
        parse_rule(self.f2_rule)
        if self.M is not None and self.M < 1:
            raise BadSpec("M must be >= 1")


def lattice(dims: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates (row-major ids) and nearest-neighbour edge pairs of a box."""
    dims = tuple(int(s) for s in dims)
    n = int(np.prod(dims))
    coords = np.indices(dims).reshape(len(dims), n).T
    ids = np.arange(n, dtype=np.int64).reshape(dims)
    pairs = []
    for axis in range(len(dims)):
        lo = [slice(None)] * len(dims)
        hi = [slice(None)] * len(dims)
        lo[axis] = slice(0, -1)
        hi[axis] = slice(1, None)
        pairs.append(np.column_stack([ids[tuple(lo)].ravel(), ids[tuple(hi)].ravel()]))
    return coords, np.concatenate(pairs)


def _center(dims: tuple[int, ...], strict: bool) -> tuple[int, ...]:
    if strict and any(s % 2 == 0 for s in dims):
        raise BadSpec(f"even side in {dims} has no centre vertex; use 'center_floor'")
    return tuple(s // 2 for s in dims)


def _select(rule, coords: np.ndarray, dims: tuple[int, ...], role: str) -> np.ndarray:
    if not isinstance(rule, str):
        ids = np.asarray(list(rule), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= coords.shape[0]):
            raise BadSpec(f"{role} set has ids outside the grid")
        return ids
    if rule == "boundary":
        return np.flatnonzero(((coords == 0) | (coords == np.asarray(dims) - 1)).any(axis=1))
    if rule == "axis_x":
        if len(dims) < 2:
            raise BadSpec("axis_x needs at least two dimensions")
        return np.flatnonzero(coords[:, 1] == 0)
    if rule in ("center", "center_floor"):
        c = _center(dims, strict=rule == "center")
        return np.flatnonzero((coords == np.asarray(c)).all(axis=1))
    raise BadSpec(f"unknown {role} rule {rule!r}")


def gen_grid(spec: GridSpec) -> ProblemInstance:
    coords, pairs = lattice(spec.dims)
    rng = np.random.default_rng(spec.seed)
    f1 = _draw(parse_rule(spec.f1_rule), pairs.shape[0], rng)
    f2 = _draw(parse_rule(spec.f2_rule), pairs.shape[0], rng)
    graph = build_graph(coords.shape[0], np.column_stack([pairs, f1, f2]))
    A = _select(spec.A_rule, coords, spec.dims, "A")
    B = _select(spec.B_rule, coords, spec.dims, "B")
    if np.intersect1d(A, B).size:
        raise BadSpec(f"sources and targets overlap on grid {spec.dims}")
    M = infinite_budget(graph) if spec.M is None else spec.M
    name = "x".join(map(str, spec.dims))
    return ProblemInstance(graph, A.tolist(), B.tolist(), M, coords=coords, name=name)


# -- half-plane constructions ----------------------------------------------


def _half_plane(n: int) -> tuple[np.ndarray, np.ndarray]:
    """V_n = [-n, n] x [0, n]; returns (x, y) coordinates and edge pairs."""
    coords, pairs = lattice((n + 1, 2 * n + 1))
    xy = np.column_stack([coords[:, 1] - n, coords[:, 0]])
    return xy, pairs


def _half_plane_instance(n: int, fast: set, name: str) -> ProblemInstance:
    xy, pairs = _half_plane(n)
    a, b = xy[pairs[:, 0]], xy[pairs[:, 1]]
    keys = zip(map(tuple, a.tolist()), map(tuple, b.tolist()))
    f1 = np.array([1 if frozenset(k) in fast else 2 for k in keys], dtype=np.int64)
    graph = build_graph(xy.shape[0], np.column_stack([pairs, f1, np.ones_like(f1)]))
    A = np.flatnonzero(xy[:, 1] == 0)
    B = np.flatnonzero((xy[:, 0] == 0) & (xy[:, 1] == n))
    return ProblemInstance(graph, A.tolist(), B.tolist(), infinite_budget(graph), coords=xy, name=name)


def _axis_edges(n: int) -> set:
    return {frozenset({(0, y), (0, y + 1)}) for y in range(n)}


def gen_speedway(n: int) -> ProblemInstance:
    """Fast (time 1) edges along the y-axis, time 2 elsewhere, water on y = 0."""
    if n < 4:
        raise BadSpec("speedway needs n >= 4")
    return _half_plane_instance(n, _axis_edges(n), f"speedway-{n}")


def speedway_active_set(T: int, n: int | None = None) -> set[tuple[int, int]]:
    """Closed-form active set of the speedway at clock T, clipped to V_n."""
    if T < 2:
        raise ValueError("T must be >= 2")
    K = (T + 1) // 4
    pts = {(0, T), (0, T - 1)}
    for k in range(1, K + 1):
        pts |= {(-k, T - 2 * k), (k, T - 2 * k)}
    width = n if n is not None else 2 * T + K + 1
    pts |= {(z, T // 2) for z in range(-width, width + 1) if abs(z) > K}
    if n is not None:
        pts = {(x, y) for x, y in pts if -n <= x <= n and 0 <= y <= n}
    return pts


@dataclass(frozen=True)
class FractalSpec:
    k: int
    n: int | None = None

    def __post_init__(self):
        if self.k < 1:
            raise BadSpec("k must be >= 1")
        if self.n is not None and self.n < self.t:
            raise BadSpec(f"n={self.n} must be >= t={self.t}")

    @property
    def t(self) -> int:
        return 2**self.k

    @property
    def half_width(self) -> int:
        return self.n if self.n is not None else self.t + 1


def _vertical(x: int, y0: int, y1: int) -> set:
    return {frozenset({(x, y), (x, y + 1)}) for y in range(y0, y1)}


def _staircase(x0: int, y0: int, length: int) -> set:
    """Lattice path from (x0, y0) to (x0 + length, y0 + length), right then up."""
    out = set()
    x, y = x0, y0
    for _ in range(length):
        out.add(frozenset({(x, y), (x + 1, y)}))
        out.add(frozenset({(x + 1, y), (x + 1, y + 1)}))
        x, y = x + 1, y + 1
    return out


def _mirror(edges: set) -> set:
    return {frozenset((-x, y) for x, y in e) for e in edges}


def fractal_fast_edges(k: int) -> list[set]:
    """Fast edge sets of omega_1 .. omega_k for t = 2**k.

    A triangle is kept as its lower-left corner L and size s, with
    O = L + (s/2, s/2) and T = L + (s/2, s).  Refining it makes L0-X
    (vertical) and X-T0 (diagonal) fast, where L0, T0, X are the midpoints of
    LO, OT and LT, and recurses into (L, L0, X) and (X, T0, T).
    """
    t = 2**k
    left = _staircase(-t // 2, 0, t // 2)
    levels = [_axis_edges(t) | left | _mirror(left)]
    triangles = [(-t // 2, 0, t)]
    for _ in range(k - 1):
        new, children = set(), []
        for lx, ly, s in triangles:
            q = s // 4
            new |= _vertical(lx + q, ly + q, ly + 2 * q)
            new |= _staircase(lx + q, ly + 2 * q, q)
            children += [(lx, ly, s // 2), (lx + q, ly + 2 * q, s // 2)]
        triangles = children
        levels.append(levels[-1] | new | _mirror(new))
    return levels


def gen_fractal(spec: FractalSpec) -> tuple[ProblemInstance, list[ProblemInstance]]:
    """The omega_k environment and every intermediate omega_j (j = 1..k)."""
    n = spec.half_width
    axis = _axis_edges(n)
    levels = [
        _half_plane_instance(n, fast | axis, f"fractal-k{spec.k}-level{j + 1}")
        for j, fast in enumerate(fractal_fast_edges(spec.k))
    ]
    return levels[-1], levels


def fractal_expected_count(k: int, t: int | None = None) -> Fraction:
    """Continuum lower bound k * (4/15) * t on the windowed active count."""
    t = 2**k if t is None else t
    if t != 2**k:
        raise ValueError(f"t must equal 2**k, got t={t}, k={k}")
    return Fraction(4 * k * t, 15)


# -- worked-example fixtures -----------------------------------------------


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: ProblemInstance
    checkpoints: dict = field(default_factory=dict)
    note: str = ""
    # M = 19 exceeds the total weight of these graphs, which would switch the
    # solver to plain first-passage rules; the events need the weighted rules.
    config: SolverConfig = field(default_factory=lambda: SolverConfig(reach_only=False))


def mechanism_fixtures() -> list[Fixture]:
    """Four small graphs, one per label-correcting event.

    Checkpoints map a clock value to the expected facts after the cycle
    that ends there (jump mode).  Vertex/edge pairs are ``(start, end)``.
    """
    M = 19
    first_arrival = instance_from_edges(
        3, [(0, 1, 2, 5), (1, 2, 5, 1)], [0], [2], M, name="first-arrival"
    )
    resource = instance_from_edges(
        5,
        [(0, 2, 2, 5), (1, 3, 6, 2), (2, 3, 7, 2), (3, 4, 20, 1)],
        [0, 1], [4], M, name="re-source",
    )
    release = instance_from_edges(
        5,
        [(0, 2, 6, 2), (1, 3, 4, 1), (2, 3, 4, 3), (2, 4, 20, 1)],
        [0, 1], [4], M, name="release",
    )
    phantom = instance_from_edges(
        4,
        [(0, 1, 1, 8), (0, 2, 5, 13), (1, 2, 12, 2), (2, 3, 10, 1)],
        [0], [3], M, name="phantom",
    )
    return [
        Fixture("first-arrival", first_arrival, {
            2: {"label": {1: 14}, "active": {1}, "inactive": {0}, "used": [(0, 1)]},
        }, "first water reaches vertex 1 with quality 19 - 5"),
        Fixture("re-source", resource, {
            2: {"label": {2: 14}, "active_edges": [(2, 3)]},
            6: {"label": {3: 17}, "active_edges": [(3, 2)], "passive": [(2, 3)],
                "remaining": {(3, 2): 7}, "flow_label": {(3, 2): 17}},
        }, "better water at 3 reverses the in-flight edge 2-3 and restores its time to f1 = 7"),
        Fixture("release", release, {
            4: {"label": {3: 18}, "active_edges": [(3, 2)]},
            6: {"label": {2: 17}, "not_active": [(2, 3), (3, 2)], "inactive": {3}},
        }, "neither direction of 2-3 can improve its far end, so the edge goes idle"),
        Fixture("phantom", phantom, {
            5: {"label": {2: 6}, "active": {2}},
            13: {"label": {2: 6}, "phantoms": [(2, 3, 9, 10)]},
        }, "water of quality 11 - 2 = 9 reaches active vertex 2, which keeps label 6"),
    ]


def worked_example() -> ProblemInstance:
    """A 12-vertex graph replaying the narrated walkthrough (ids are the
    narrated labels minus one: sources 0, 1, 2, target 11, budget 19)."""
    edges = [
        (0, 3, 2, 5),    # 1-4: first arrival, 19 - 5 = 14
        (1, 4, 6, 2),    # 2-5: 5 gets 17 at second 6
        (3, 4, 7, 2),    # 4-5: reversed, time restored to 7
        (2, 8, 3, 6),    # 3-9
        (4, 8, 5, 2),    # 5-9: reversed as well
        (2, 5, 4, 1),    # 3-6
        (4, 5, 4, 3),    # 5-6: goes idle at second 6
        (2, 6, 3, 8),    # 3-7: L(7) = 11
        (2, 10, 5, 13),  # 3-11: L(11) = 6
        (6, 10, 10, 2),  # 7-11: phantom 11' with label 9 at second 13
        (10, 11, 10, 1),  # 11-12
        (1, 9, 3, 4),    # 2-10
        (9, 11, 20, 1),  # 10-12
        (3, 7, 9, 1),    # 4-8
        (7, 11, 9, 1),   # 8-12
    ]
    return instance_from_edges(12, edges, [0, 1, 2], [11], 19, name="worked-example")
