"""Seeded, reproducible simulation of the resampled graph and its walkers.

Every step draws a fresh graph (each potential edge present with probability
``p``, independently of everything else), then moves each walker: at a
vertex with ``k`` current neighbors a walker stays with probability
1/(k+1), otherwise it jumps to a uniformly chosen neighbor.  Only the
occupancy counts per vertex are recorded.

The RNG stream layout is part of the contract: per step, first one uniform
per potential edge (upper-triangle order), then one uniform per walker in
walker order.  A single uniform decides a walker's move — value ``u`` maps
to index ``floor(u * (k+1))`` into (stay, 1st neighbor, ..., k-th neighbor).
``simulate`` consumes exactly that stream, so the same seed gives the same
series whether steps are run one by one through :func:`sample_graph` /
:func:`step` or through the internal batched engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .moment_kernel import ModelDims

__all__ = [
    "SimConfig",
    "GraphSample",
    "WalkerPositions",
    "ObservationSeries",
    "sample_graph",
    "step",
    "simulate",
]

# Steps whose uniforms are pre-drawn per batch round; affects speed only,
# never the stream layout.
_STEP_CHUNK = 256


@dataclass(frozen=True, eq=False)
class GraphSample:
    """One sampled graph: symmetric boolean adjacency with empty diagonal."""

    n: int
    adj: np.ndarray

    def __post_init__(self) -> None:
        adj = np.asarray(self.adj, dtype=bool)
        if adj.shape != (self.n, self.n):
            raise ValueError(f"adjacency shape {adj.shape} does not match n={self.n}")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency must be symmetric")
        object.__setattr__(self, "adj", adj)

    @property
    def degrees(self) -> np.ndarray:
        return self.adj.sum(axis=1)


@dataclass(frozen=True, eq=False)
class WalkerPositions:
    """Current walker locations: 0-based vertex indices, one per walker."""

    n: int
    x: np.ndarray

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.int64)
        if x.ndim != 1:
            raise ValueError(f"positions must be a 1-d vector, got shape {x.shape}")
        if x.size == 0:
            raise ValueError("at least one walker is required")
        if ((x < 0) | (x >= self.n)).any():
            raise ValueError(f"positions must lie in [0, {self.n})")
        object.__setattr__(self, "x", x)


@dataclass(frozen=True, eq=False)
class ObservationSeries:
    """The observed data: a T x n matrix of per-vertex walker counts."""

    dims: ModelDims
    counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[1] != self.dims.n:
            raise ValueError(
                f"counts shape {counts.shape} does not match n={self.dims.n}"
            )
        if counts.shape[0] < 1:
            raise ValueError("series must contain at least one time step")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        sums = counts.sum(axis=1)
        if (sums != self.dims.m).any():
            bad = int(np.nonzero(sums != self.dims.m)[0][0])
            raise ValueError(
                f"row {bad} sums to {int(sums[bad])}, expected m={self.dims.m} "
                "(walker conservation violated)"
            )
        object.__setattr__(self, "counts", counts)

    @property
    def T(self) -> int:
        return self.counts.shape[0]

    def to_csv(self, path: str) -> None:
        """Write `t,v1,...,vn` rows with integer cells, LF line endings."""
        n = self.dims.n
        with open(path, "w", newline="") as fh:
            fh.write("t," + ",".join(f"v{i + 1}" for i in range(n)) + "\n")
            for t, row in enumerate(self.counts, start=1):
                fh.write(f"{t}," + ",".join(str(int(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path: str) -> "ObservationSeries":
        with open(path, "r", newline="") as fh:
            header = fh.readline().strip().split(",")
            if header[0] != "t" or header[1:] != [f"v{i + 1}" for i in range(len(header) - 1)]:
                raise ValueError(f"unexpected series header {header!r}")
            n = len(header) - 1
            rows = []
            for line_no, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                cells = [int(v) for v in line.split(",")]
                if len(cells) != n + 1:
                    raise ValueError(f"row {line_no} has {len(cells)} cells, expected {n + 1}")
                if cells[0] != line_no:
                    raise ValueError(f"row {line_no} carries time index {cells[0]}")
                rows.append(cells[1:])
        if not rows:
            raise ValueError("series file contains no data rows")
        counts = np.asarray(rows, dtype=np.int64)
        m = int(counts[0].sum())
        return cls(ModelDims(n, m), counts)


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines one simulation run, including the seed.

    ``init`` selects the starting placement: "uniform" (each walker placed
    independently and uniformly at random; consumes one uniform per walker),
    "vertex1" (all walkers at the first vertex), or an explicit tuple of
    0-based vertex indices.  The defaults record from an approximately
    stationary state: the model mixes geometrically, and 1000 burn-in steps
    are generous for desk-scale instances with p >= 0.05 — raise ``burn_in``
    explicitly for very small p.
    """

    dims: ModelDims
    p: float
    T: int
    burn_in: int = 1000
    seed: int = 0
    init: str | tuple[int, ...] = "uniform"

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"edge probability must lie in [0, 1], got {self.p!r}")
        if self.T < 2:
            raise ValueError(f"series length must be >= 2, got {self.T}")
        if self.burn_in < 0:
            raise ValueError(f"burn-in must be >= 0, got {self.burn_in}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if isinstance(self.init, str):
            if self.init not in ("uniform", "vertex1"):
                raise ValueError(f"unknown init mode {self.init!r}")
        else:
            positions = tuple(int(v) for v in self.init)
            if len(positions) != self.dims.m:
                raise ValueError(
                    f"explicit init has {len(positions)} positions, expected m={self.dims.m}"
                )
            if any(not 0 <= v < self.dims.n for v in positions):
                raise ValueError(f"explicit init positions must lie in [0, {self.dims.n})")
            object.__setattr__(self, "init", positions)


def sample_graph(n: int, p: float, rng: np.random.Generator) -> GraphSample:
    """Draw one graph; consumes exactly n(n-1)/2 uniforms."""
    if n < 2:
        raise ValueError(f"vertex count must be >= 2, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p!r}")
    iu, ju = np.triu_indices(n, 1)
    present = rng.random(iu.size) < p
    adj = np.zeros((n, n), dtype=bool)
    adj[iu, ju] = present
    adj[ju, iu] = present
    return GraphSample(n, adj)


def step(
    positions: WalkerPositions, g: GraphSample, rng: np.random.Generator
) -> WalkerPositions:
    """Move every walker one step on graph ``g``; consumes one uniform per walker."""
    if positions.n != g.n:
        raise ValueError(f"positions are for n={positions.n}, graph has n={g.n}")
    x = positions.x
    deg = g.adj.sum(axis=1)
    d = deg[x]
    u = rng.random(x.size)
    j = (u * (d + 1)).astype(np.int64)  # 0 = stay, else index into sorted neighbors
    cum = np.cumsum(g.adj[x], axis=1)
    target = (cum < j[:, None]).sum(axis=1)
    return WalkerPositions(g.n, np.where(j == 0, x, target))


def _counts_of(x: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros((x.shape[0], n), dtype=np.int64)
    np.add.at(out, (np.arange(x.shape[0])[:, None], x), 1)
    return out


def _simulate_batch(
    dims: ModelDims,
    p: float,
    T: int,
    burn_in: int,
    seeds: Sequence[int],
    init: str | tuple[int, ...] = "uniform",
) -> np.ndarray:
    """Run one independent replication per seed; returns (len(seeds), T, n) counts.

    Row r is a pure function of ``seeds[r]`` alone — identical to running
    :func:`simulate` with that seed — so replications can be grouped into
    batches of any size without changing any result.  The recorded window
    starts at the state reached after ``burn_in`` steps and spans T
    consecutive states (burn_in + T - 1 steps in total).
    """
    n, m = dims.n, dims.m
    reps = len(seeds)
    gens = [np.random.default_rng(s) for s in seeds]
    iu, ju = np.triu_indices(n, 1)
    npairs = iu.size
    draws = npairs + m

    if init == "uniform":
        u0 = np.stack([g.random(m) for g in gens])
        x = (u0 * n).astype(np.int64)
    elif init == "vertex1":
        x = np.zeros((reps, m), dtype=np.int64)
    else:
        x = np.broadcast_to(np.asarray(init, dtype=np.int64), (reps, m)).copy()

    rec = np.empty((reps, T, n), dtype=np.int64)
    if burn_in == 0:
        rec[:, 0] = _counts_of(x, n)
    rid = np.arange(reps)[:, None]
    steps_total = burn_in + T - 1
    done = 0
    while done < steps_total:
        k = min(_STEP_CHUNK, steps_total - done)
        u = np.stack([g.random((k, draws)) for g in gens])
        for s in range(k):
            present = u[:, s, :npairs] < p
            adj = np.zeros((reps, n, n), dtype=bool)
            adj[:, iu, ju] = present
            adj[:, ju, iu] = present
            deg = adj.sum(axis=2)
            d = np.take_along_axis(deg, x, axis=1)
            j = (u[:, s, npairs:] * (d + 1)).astype(np.int64)
            cum = np.cumsum(adj[rid, x, :], axis=2)
            target = (cum < j[:, :, None]).sum(axis=2)
            x = np.where(j == 0, x, target)
            done += 1
            t_rec = done - burn_in
            if t_rec >= 0:
                rec[:, t_rec] = _counts_of(x, n)
    return rec


def simulate(cfg: SimConfig) -> ObservationSeries:
    """Run burn-in, then record T consecutive count vectors.

    Identical configs (including the seed) produce bit-identical series.
    """
    counts = _simulate_batch(cfg.dims, cfg.p, cfg.T, cfg.burn_in, [cfg.seed], cfg.init)
    return ObservationSeries(cfg.dims, counts[0])
