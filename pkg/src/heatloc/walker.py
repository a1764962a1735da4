"""Collision-probability oracle for Q(t, x) from continuous-time random walks.

A walker at cell i waits an exponential time of rate deg(i)/h^2 and then
jumps to a uniformly chosen included neighbour. Its law at time t is exactly
row x of exp(-tL), so two independent walkers started at x meet at time t
with probability sum_y P_xy^2 = Q(t, x) h^2.

Randomness: pair ``p`` uses the Philox stream keyed by ``(seed, p)``; the
two walkers of a pair use counter words 0 and 1. Results do not depend on
how pairs are scheduled across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numba as nb
import numpy as np

from .discretization import GridMask, NeumannOperator, assemble_neumann_laplacian
from .errors import InvalidSpec, WalkRunaway
from .rng import _ONE, philox_block, to_unit


@dataclass(frozen=True)
class WalkConfig:
    t: float
    n_pairs: int
    seed: int
    x: int

    def __post_init__(self):
        if not (self.t > 0 and math.isfinite(self.t)):
            raise InvalidSpec("t", f"must be positive, got {self.t}")
        if self.n_pairs < 1:
            raise InvalidSpec("n_pairs", f"must be at least 1, got {self.n_pairs}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpec("seed", "must fit in an unsigned 64-bit integer")


@dataclass(frozen=True)
class CollisionEstimate:
    x: int
    t: float
    n_pairs: int
    seed: int
    collisions: int
    q_hat: float
    std_error: float

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


@dataclass(frozen=True)
class WalkStream:
    """Address of one walker's random stream."""

    seed: int
    pair: int = 0
    walker: int = 0


@nb.njit(cache=True)
def _walk(x, t, h2, indptr, indices, seed, pair, walker, cap):
    """Position at time t, or -1 if the jump cap was exceeded."""
    pos = x
    clock = 0.0
    jumps = 0
    k0 = np.uint64(seed)
    k1 = np.uint64(pair)
    c0 = np.uint64(0)
    c1 = np.uint64(walker)
    zero = np.uint64(0)
    while True:
        deg = indptr[pos + 1] - indptr[pos]
        if deg == 0:
            return pos
        c0 = c0 + _ONE
        b0, b1, b2, b3 = philox_block(c0, c1, zero, zero, k0, k1)
        # two jumps per Philox block
        for step in range(2):
            u_time = to_unit(b0) if step == 0 else to_unit(b2)
            u_nbr = to_unit(b1) if step == 0 else to_unit(b3)
            deg = indptr[pos + 1] - indptr[pos]
            clock += -math.log1p(-u_time) * h2 / deg
            if clock > t:
                return pos
            pos = indices[indptr[pos] + int(u_nbr * deg)]
            jumps += 1
            if jumps > cap:
                return -1


@nb.njit(cache=True, parallel=True)
def _collide(x, t, h2, indptr, indices, seed, n_pairs, cap):
    hits = np.zeros(n_pairs, dtype=np.int8)
    for p in nb.prange(n_pairs):
        a = _walk(x, t, h2, indptr, indices, seed, p, 0, cap)
        b = _walk(x, t, h2, indptr, indices, seed, p, 1, cap)
        if a < 0 or b < 0:
            hits[p] = -1
        elif a == b:
            hits[p] = 1
    return hits


@nb.njit(cache=True, parallel=True)
def _endpoints(x, t, h2, indptr, indices, seed, n, walker, cap):
    out = np.empty(n, dtype=np.int64)
    for p in nb.prange(n):
        out[p] = _walk(x, t, h2, indptr, indices, seed, p, walker, cap)
    return out


def _adjacency(op: NeumannOperator):
    adj = op.stencil.copy().tocsr()
    adj.setdiag(0)
    adj.eliminate_zeros()
    adj.sort_indices()
    return adj.indptr.astype(np.int64), adj.indices.astype(np.int64)


def _operator(graph) -> NeumannOperator:
    return graph if isinstance(graph, NeumannOperator) else assemble_neumann_laplacian(graph)


def _cap(op: NeumannOperator, t: float) -> int:
    expected = t * max(int(op.degrees().max(initial=0)), 1) / op.cell_area
    return int(100 * expected) + 100


def walk(graph: GridMask | NeumannOperator, x: int, t: float, stream: WalkStream) -> int:
    """Sample the walker position at time ``t`` started from dof ``x``."""
    op = _operator(graph)
    if not 0 <= x < op.N:
        raise InvalidSpec("x", f"dof {x} out of range 0..{op.N - 1}")
    if not t > 0:
        raise InvalidSpec("t", f"must be positive, got {t}")
    indptr, indices = _adjacency(op)
    y = _walk(x, float(t), op.cell_area, indptr, indices, stream.seed, stream.pair, stream.walker, _cap(op, t))
    if y < 0:
        raise WalkRunaway(f"walk from {x} exceeded the jump cap")
    return int(y)


def sample_endpoints(
    graph: GridMask | NeumannOperator, x: int, t: float, n: int, seed: int, walker: int = 0, threads: int | None = None
) -> np.ndarray:
    """Endpoints of ``n`` independent walks (streams ``(seed, 0..n-1)``)."""
    op = _operator(graph)
    indptr, indices = _adjacency(op)
    with _threads(threads):
        out = _endpoints(x, float(t), op.cell_area, indptr, indices, seed, n, walker, _cap(op, t))
    if (out < 0).any():
        raise WalkRunaway("a walk exceeded the jump cap")
    return out


class _threads:
    def __init__(self, n):
        self.n = n

    def __enter__(self):
        self.prev = nb.get_num_threads()
        if self.n is not None:
            nb.set_num_threads(max(1, min(int(self.n), nb.config.NUMBA_NUM_THREADS)))

    def __exit__(self, *exc):
        nb.set_num_threads(self.prev)


def collision_estimate(
    graph: GridMask | NeumannOperator, config: WalkConfig, threads: int | None = None
) -> CollisionEstimate:
    op = _operator(graph)
    if not 0 <= config.x < op.N:
        raise InvalidSpec("x", f"dof {config.x} out of range 0..{op.N - 1}")
    indptr, indices = _adjacency(op)
    with _threads(threads):
        hits = _collide(
            config.x, float(config.t), op.cell_area, indptr, indices, config.seed, config.n_pairs, _cap(op, config.t)
        )
    if (hits < 0).any():
        raise WalkRunaway("a walk exceeded the jump cap")
    collisions = int(hits.sum(dtype=np.int64))
    f = collisions / config.n_pairs
    h2 = op.cell_area
    return CollisionEstimate(
        x=config.x,
        t=config.t,
        n_pairs=config.n_pairs,
        seed=config.seed,
        collisions=collisions,
        q_hat=f / h2,
        std_error=math.sqrt(f * (1 - f) / config.n_pairs) / h2,
    )
