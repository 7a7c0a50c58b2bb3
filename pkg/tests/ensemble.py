"""Seeded ensemble of singular irreducible M-matrices shared by the property suites."""
import numpy as np

from fsaism.generators import (from_rates, gen_birth_death, gen_lattice2d, gen_ncd,
                               gen_random_laplacian)
from fsaism.krylov import make_patterns


def random_chain(n, rng, density=0.3):
    """Random sparse CTMC with a directed ring for irreducibility."""
    rates = {}
    for i in range(n):
        rates[(i, (i + 1) % n)] = rng.uniform(0.2, 1.0)
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                rates[(i, j)] = rates.get((i, j), 0.0) + rng.uniform(0.2, 1.0)
    return from_rates(rates, n)


SMALLEST = {
    0: ("birth_death(n=2)", lambda: gen_birth_death(2, 1.5, 0.5)),
    1: ("lattice2d(2x2)", lambda: gen_lattice2d(2, 2, 0.5, seed=1)),
    2: ("ncd(2x2)", lambda: gen_ncd(2, 2, 0.1, seed=2)),
    3: ("laplacian(n=2)", lambda: gen_random_laplacian(2, seed=3)),
}


def make_matrix(k):
    """The k-th ensemble member as ``(label, A)``; orders range over 2..200."""
    if k in SMALLEST:
        label, factory = SMALLEST[k]
        return label, factory()
    rng = np.random.default_rng(1000 + k)
    family = k % 5
    if family == 0:
        n = int(rng.integers(2, 201))
        # keep the stationary vector's dynamic range (lam/mu)**(n-1) within 1e4
        log_ratio = rng.uniform(-1, 1) * min(0.35, np.log(1e4) / n)
        mu = rng.uniform(0.5, 2.0)
        return f"birth_death(n={n})", gen_birth_death(n, mu * np.exp(log_ratio), mu)
    if family == 1:
        nx, ny = (int(v) for v in rng.integers(2, 15, 2))
        return f"lattice2d({nx}x{ny})", gen_lattice2d(nx, ny, rng.uniform(0, 0.9), seed=k)
    if family == 2:
        nb, bs = int(rng.integers(2, 7)), int(rng.integers(2, 11))
        return f"ncd({nb}x{bs})", gen_ncd(nb, bs, 10 ** rng.uniform(-2, 0), seed=k)
    if family == 3:
        n = int(rng.integers(2, 201))
        return f"laplacian(n={n})", gen_random_laplacian(n, extra=n // 2, seed=k)
    n = int(rng.integers(2, 61))
    return f"random_chain(n={n})", random_chain(n, rng)


PATTERN_KINDS = ("diag", "matrix", "band", "complete")


def patterns_for(A, kind, k=0):
    if kind == "band":
        return make_patterns(A, f"band:{1 + k % 6}")
    return make_patterns(A, kind)
