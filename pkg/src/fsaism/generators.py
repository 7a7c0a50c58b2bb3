"""
Desk-scale singular irreducible M-matrices from Markov chains and graphs.

Markov families are returned as ``A = -Q^T`` for a continuous-time generator
``Q`` (zero row sums), so ``A pi = 0`` for the stationary distribution and
every column of ``A`` sums to zero.
"""
from __future__ import annotations

from collections import defaultdict

import numpy as np

from .errors import DisconnectedGraph, InvalidParam
from .mmatrix import is_irreducible
from .sparse_core import SparseMatrix, from_triplets


def from_rates(rates, n: int) -> SparseMatrix:
    """``-Q^T`` for a generator given as ``{(src, dst): rate}`` with ``src != dst``."""
    out = np.zeros(n)
    entries = []
    for (i, j), r in rates.items():
        if r <= 0 or i == j:
            raise InvalidParam(f"rate {r} on ({i}, {j}) is not a positive off-diagonal rate")
        out[i] += r
        entries.append((j, i, -r))
    entries.extend((i, i, out[i]) for i in range(n))
    return from_triplets(entries, n)


def gen_lattice2d(nx: int, ny: int, drift: float = 0.0, seed=None) -> SparseMatrix:
    """
    Walk on an ``nx x ny`` grid with east, north and south-west moves.

    State ``(x, y)`` has index ``x + nx*y``.  Base rates count the unit
    triangles ``E,N,SW`` / ``N,E,SW`` through each edge, a circulation, so the
    chain is doubly stochastic (uniform stationary vector) at ``drift = 0``.
    ``drift`` scales every eastward rate by ``1 + drift``; a non-None
    ``seed`` multiplies each rate by an independent factor from
    ``U(0.5, 1.5)``.  For 11 x 11 the matrix has 121 rows and 441 nonzeros.
    """
    if nx < 2 or ny < 2:
        raise InvalidParam("lattice needs nx, ny >= 2")
    if not 0.0 <= drift < 1.0:
        raise InvalidParam("drift must lie in [0, 1)")

    def idx(x, y):
        return x + nx * y

    rates = defaultdict(float)
    for y in range(ny - 1):
        for x in range(nx - 1):
            a, e, nn, ne = idx(x, y), idx(x + 1, y), idx(x, y + 1), idx(x + 1, y + 1)
            for first, mid in ((a, e), (a, nn)):
                rates[(first, mid)] += 1.0
                rates[(mid, ne)] += 1.0
                rates[(ne, a)] += 1.0
    for (i, j) in rates:
        if j == i + 1:
            rates[(i, j)] *= 1.0 + drift
    if seed is not None:
        rng = np.random.default_rng(seed)
        for key in sorted(rates):
            rates[key] *= rng.uniform(0.5, 1.5)
    return from_rates(rates, nx * ny)


def gen_birth_death(n: int, lam: float, mu: float) -> SparseMatrix:
    """Birth-death chain; the null vector is proportional to ``(lam/mu)**k``."""
    if n < 2:
        raise InvalidParam("birth-death chain needs n >= 2")
    if lam <= 0 or mu <= 0:
        raise InvalidParam("rates must be positive")
    rates = {}
    for k in range(n - 1):
        rates[(k, k + 1)] = float(lam)
        rates[(k + 1, k)] = float(mu)
    return from_rates(rates, n)


def gen_ncd(num_blocks: int, block_size: int, coupling: float, seed=0,
            density: float = 0.6) -> SparseMatrix:
    """
    Nearly completely decomposable chain.

    Each block is a strongly connected random chain (a directed ring plus
    pairs kept with probability ``density``, rates from ``U(0.1, 1)``).
    Blocks are linked by a cycle of rate ``coupling`` (last state of block
    ``k`` to first state of block ``k+1``) and by one extra random
    cross-block edge per block with rate ``coupling * U(0.5, 1.5)``.
    """
    if num_blocks < 2 or block_size < 2:
        raise InvalidParam("gen_ncd needs num_blocks >= 2 and block_size >= 2")
    if coupling <= 0:
        raise InvalidParam("coupling must be positive")
    rng = np.random.default_rng(seed)
    n = num_blocks * block_size
    rates = {}
    for b in range(num_blocks):
        base = b * block_size
        for i in range(block_size):
            for j in range(block_size):
                if i == j:
                    continue
                ring = j == (i + 1) % block_size
                keep = rng.random() < density
                rate = rng.uniform(0.1, 1.0)
                if ring or keep:
                    rates[(base + i, base + j)] = rate
    for b in range(num_blocks):
        nxt = (b + 1) % num_blocks
        rates[(b * block_size + block_size - 1, nxt * block_size)] = float(coupling)
    for b in range(num_blocks):
        other = int(rng.integers(num_blocks - 1))
        other += other >= b
        src = b * block_size + int(rng.integers(block_size))
        dst = other * block_size + int(rng.integers(block_size))
        key = (src, dst)
        rates[key] = rates.get(key, 0.0) + coupling * rng.uniform(0.5, 1.5)
    return from_rates(rates, n)


def gen_graph_laplacian(edges, n: int) -> SparseMatrix:
    """Weighted Laplacian ``D - W`` of a connected undirected graph."""
    entries = []
    deg = np.zeros(n)
    for i, j, w in edges:
        if w <= 0:
            raise InvalidParam(f"edge ({i}, {j}) has non-positive weight {w}")
        if i == j:
            raise InvalidParam(f"self-loop at vertex {i}")
        if not (0 <= i < n and 0 <= j < n):
            raise InvalidParam(f"edge ({i}, {j}) outside {n} vertices")
        entries += [(i, j, -w), (j, i, -w)]
        deg[i] += w
        deg[j] += w
    entries.extend((i, i, deg[i]) for i in range(n))
    L = from_triplets(entries, n)
    if not is_irreducible(L):
        raise DisconnectedGraph("graph is not connected")
    return L


def random_connected_edges(n: int, extra: int, seed=0):
    """Random spanning tree plus ``extra`` random edges, weights from U(0.5, 2)."""
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    edges = {}
    for k in range(1, n):
        i, j = int(order[k]), int(order[rng.integers(k)])
        edges[(min(i, j), max(i, j))] = rng.uniform(0.5, 2.0)
    for _ in range(extra):
        i, j = (int(v) for v in rng.choice(n, size=2, replace=False))
        edges[(min(i, j), max(i, j))] = rng.uniform(0.5, 2.0)
    return [(i, j, w) for (i, j), w in sorted(edges.items())]


def gen_random_laplacian(n: int, extra: int = 0, seed=0) -> SparseMatrix:
    return gen_graph_laplacian(random_connected_edges(n, extra, seed), n)


# name -> (factory, default parameters), used by the CLI and the benchmark
FAMILIES = {
    "lattice2d": (gen_lattice2d, {"nx": 11, "ny": 11, "drift": 0.0, "seed": None}),
    "birth_death": (gen_birth_death, {"n": 530, "lam": 0.8, "mu": 1.0}),
    "ncd": (gen_ncd, {"num_blocks": 4, "block_size": 8, "coupling": 1e-4, "seed": 0}),
    "laplacian": (gen_random_laplacian, {"n": 100, "extra": 100, "seed": 0}),
}


def generate(family: str, **params) -> SparseMatrix:
    if family not in FAMILIES:
        raise InvalidParam(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    factory, defaults = FAMILIES[family]
    unknown = set(params) - set(defaults)
    if unknown:
        raise InvalidParam(f"unknown parameters for {family}: {sorted(unknown)}")
    return factory(**{**defaults, **params})
