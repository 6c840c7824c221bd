"""Quantum-behaved particle swarm optimisation over a mixed continuous/integer box.

Maximises a black-box objective. Discrete dimensions are snapped to their
nearest grid vertex before every evaluation; evaluated vertices are cached,
so ``evaluations`` counts distinct points.

Random numbers come from per-particle streams keyed on
``(seed, restart, iteration, particle)``, which makes a run independent of
how objective calls are spread over worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import OptimizationError

CONTINUOUS = "continuous"
INTEGER = "integer"


@dataclass(frozen=True)
class Dimension:
    name: str
    lower: float
    upper: float
    kind: str = CONTINUOUS
    step: float = 1.0

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, INTEGER):
            raise ValueError(f"{self.name}: unknown kind {self.kind!r}")
        if self.lower > self.upper or (self.kind == CONTINUOUS and self.lower == self.upper):
            raise ValueError(f"{self.name}: lower bound must be below upper bound")
        if self.step <= 0:
            raise ValueError(f"{self.name}: step must be positive")

    @property
    def n_vertices(self) -> int:
        return int(math.floor((self.upper - self.lower) / self.step + 1e-9)) + 1

    @property
    def top(self) -> float:
        """Largest on-grid value."""
        return self.lower + (self.n_vertices - 1) * self.step

    def snap(self, x: float) -> float:
        """Nearest grid vertex; exact half-steps go to the vertex farther from zero."""
        if self.kind == CONTINUOUS:
            return min(max(x, self.lower), self.upper)
        r = (x - self.lower) / self.step
        k = math.floor(r)
        frac = r - k
        if frac > 0.5:
            k += 1
        elif frac == 0.5:
            lo = self.lower + k * self.step
            if abs(lo + self.step) > abs(lo):
                k += 1
        k = min(max(k, 0), self.n_vertices - 1)
        return self.lower + k * self.step

    def grid(self) -> np.ndarray:
        return self.lower + self.step * np.arange(self.n_vertices)


@dataclass(frozen=True)
class SearchSpace:
    dimensions: tuple

    def __post_init__(self):
        object.__setattr__(self, "dimensions", tuple(self.dimensions))
        if not self.dimensions:
            raise ValueError("search space needs at least one dimension")

    @property
    def lower(self) -> np.ndarray:
        return np.array([d.lower for d in self.dimensions])

    @property
    def upper(self) -> np.ndarray:
        return np.array([d.top if d.kind == INTEGER else d.upper for d in self.dimensions])

    def snap(self, x) -> tuple:
        return tuple(d.snap(float(v)) for d, v in zip(self.dimensions, x))

    def contains(self, x) -> bool:
        for d, v in zip(self.dimensions, x):
            if not d.lower <= v <= d.upper:
                return False
            if d.kind == INTEGER and d.snap(v) != v:
                return False
        return True

    @property
    def n_vertices(self):
        """Vertex count when every dimension is discrete, else None."""
        if any(d.kind == CONTINUOUS for d in self.dimensions):
            return None
        return math.prod(d.n_vertices for d in self.dimensions)

    def vertices(self):
        """Iterate over every grid point of an all-discrete space."""
        grids = [d.grid() for d in self.dimensions]
        for idx in np.ndindex(*(len(g) for g in grids)):
            yield tuple(float(g[i]) for g, i in zip(grids, idx))


@dataclass(frozen=True)
class SwarmConfig:
    swarm_size: int = 40
    max_iterations: int = 300
    ce_start: float = 1.0
    ce_end: float = 0.5
    rng_seed: int = 0
    restarts: int = 3
    stall_iterations: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.ce_start <= 0 or self.ce_end <= 0:
            raise ValueError("contraction-expansion coefficients must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.stall_iterations < 0:
            raise ValueError("stall_iterations must be >= 0")


@dataclass
class OptimizationResult:
    best_position: tuple
    best_value: float
    history: list = field(default_factory=list)
    evaluations: int = 0


def _stream(seed, restart, iteration, particle):
    return np.random.default_rng([seed, restart, iteration, particle])


def optimize(objective, space: SearchSpace, config: SwarmConfig = SwarmConfig(), *,
             threads: int = 1, initial_positions=()) -> OptimizationResult:
    """Maximise ``objective(position_tuple) -> float`` over ``space``.

    ``initial_positions`` replace the first random particles of the first
    restart, which lets a caller warm-start from a known good design.
    ``stall_iterations > 0`` ends a restart early once the incumbent has not
    improved for that many iterations.
    """
    cache = {}
    lo = space.lower
    hi = space.upper
    dim = len(space.dimensions)
    n = config.swarm_size
    executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    def evaluate(points):
        todo = []
        for p in points:
            if p not in cache and p not in todo:
                todo.append(p)

        def call(p):
            try:
                return float(objective(p))
            except Exception as exc:
                raise OptimizationError(f"objective failed at {dict(zip((d.name for d in space.dimensions), p))}: {exc}") from exc

        values = list(executor.map(call, todo)) if executor and len(todo) > 1 else [call(p) for p in todo]
        for p, v in zip(todo, values):
            if math.isnan(v):
                raise OptimizationError(f"objective returned NaN at {p}")
            cache[p] = v
        return np.array([cache[p] for p in points])

    best_pos = None
    best_val = -math.inf
    history = []
    try:
        for restart in range(config.restarts):
            x = np.empty((n, dim))
            for i in range(n):
                x[i] = lo + (hi - lo) * _stream(config.rng_seed, restart, 0, i).random(dim)
            if restart == 0:
                for i, p in enumerate(list(initial_positions)[:n]):
                    x[i] = np.asarray(p, dtype=float)
            x = np.clip(x, lo, hi)
            snapped = [space.snap(row) for row in x]
            fx = evaluate(snapped)
            pbest = np.array(snapped, dtype=float)
            pbest_f = fx.copy()
            g = int(np.argmax(pbest_f))
            if pbest_f[g] > best_val:
                best_val, best_pos = float(pbest_f[g]), snapped[g]
            history.append(best_val)
            stall = 0

            for it in range(1, config.max_iterations + 1):
                frac = (it - 1) / max(config.max_iterations - 1, 1)
                alpha = config.ce_start + (config.ce_end - config.ce_start) * frac
                mbest = pbest.mean(axis=0)
                gbest = pbest[int(np.argmax(pbest_f))]
                for i in range(n):
                    rng = _stream(config.rng_seed, restart, it, i)
                    phi = rng.random(dim)
                    u = 1.0 - rng.random(dim)  # (0, 1]
                    sign = np.where(rng.random(dim) < 0.5, -1.0, 1.0)
                    attractor = phi * pbest[i] + (1.0 - phi) * gbest
                    x[i] = attractor + sign * alpha * np.abs(mbest - x[i]) * np.log(1.0 / u)
                x = np.clip(x, lo, hi)
                snapped = [space.snap(row) for row in x]
                fx = evaluate(snapped)
                improved = fx > pbest_f
                pbest[improved] = np.array(snapped, dtype=float)[improved]
                pbest_f[improved] = fx[improved]
                g = int(np.argmax(pbest_f))
                if pbest_f[g] > best_val:
                    best_val, best_pos = float(pbest_f[g]), tuple(float(v) for v in pbest[g])
                    stall = 0
                else:
                    stall += 1
                history.append(best_val)
                if config.stall_iterations and stall >= config.stall_iterations:
                    break
    finally:
        if executor:
            executor.shutdown()
    return OptimizationResult(best_pos, best_val, history, len(cache))


def enumerate_optimum(objective, space: SearchSpace, *, threads: int = 1):
    """Brute-force maximum over every vertex of an all-discrete space: ``(position, value)``.

    Ties resolve to the first vertex in lexicographic grid order.
    """
    if space.n_vertices is None:
        raise ValueError("enumeration needs an all-discrete space")
    points = list(space.vertices())
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            values = list(ex.map(lambda p: float(objective(p)), points))
    else:
        values = [float(objective(p)) for p in points]
    k = int(np.argmax(values))
    return points[k], values[k]
