import numpy as np
import pytest
import scipy.linalg as sla

from fsaism.errors import DisconnectedGraph, InvalidParam
from fsaism.generators import (FAMILIES, from_rates, gen_birth_death, gen_graph_laplacian,
                               gen_lattice2d, gen_ncd, gen_random_laplacian, generate)
from fsaism.krylov import solve
from fsaism.mmatrix import Verdict, classify, positive_null_vector


def dense_null(A):
    v = sla.null_space(A.to_dense(), rcond=1e-12)[:, 0]
    return v / v.sum()


def assert_singular_irreducible(A):
    assert classify(A).verdict is Verdict.SINGULAR_IRREDUCIBLE_M


def test_lattice_examples():
    A = gen_lattice2d(11, 11)
    assert (A.n, A.nnz) == (121, 441)
    B = gen_lattice2d(2, 2)
    assert_singular_irreducible(B)
    np.testing.assert_allclose(positive_null_vector(B), [0.25] * 4, atol=1e-12)
    C = gen_lattice2d(5, 4, drift=0.3)
    assert_singular_irreducible(C)
    np.testing.assert_allclose(positive_null_vector(C), dense_null(C), atol=1e-10)


def test_lattice_uniform_stationary_vector_without_drift():
    A = gen_lattice2d(6, 9)
    np.testing.assert_allclose(positive_null_vector(A), np.full(54, 1 / 54), atol=1e-12)


def test_birth_death_examples():
    np.testing.assert_allclose(positive_null_vector(gen_birth_death(3, 1, 1)), [1 / 3] * 3, atol=1e-12)
    closed = 2.0 ** np.arange(10)
    np.testing.assert_allclose(positive_null_vector(gen_birth_death(10, 2, 1)), closed / closed.sum(),
                               atol=1e-12)
    assert_singular_irreducible(gen_birth_death(530, 0.8, 1.0))


def test_ncd_examples():
    assert_singular_irreducible(gen_ncd(2, 2, 1.0))
    A = gen_ncd(4, 8, 1e-5, seed=0)
    assert not solve(A, "none").converged
    assert solve(A, "matrix").converged
    for seed in range(5):
        B = gen_ncd(3, 6, 1e-3, seed=seed)
        np.testing.assert_allclose(positive_null_vector(B), dense_null(B), atol=1e-8)


def test_laplacian_examples():
    np.testing.assert_array_equal(gen_graph_laplacian([(0, 1, 3.0)], 2).to_dense(), [[3, -3], [-3, 3]])
    T = gen_graph_laplacian([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], 3)
    np.testing.assert_array_equal(T.to_dense(), [[2, -1, -1], [-1, 2, -1], [-1, -1, 2]])
    np.testing.assert_allclose(positive_null_vector(T), [1 / 3] * 3, atol=1e-12)
    assert_singular_irreducible(gen_random_laplacian(30, extra=15, seed=2))


def test_parameter_errors():
    with pytest.raises(DisconnectedGraph):
        gen_graph_laplacian([(0, 1, 1.0)], 3)
    with pytest.raises(InvalidParam):
        gen_graph_laplacian([(0, 1, -1.0)], 2)
    with pytest.raises(InvalidParam):
        gen_birth_death(1, 1, 1)
    with pytest.raises(InvalidParam):
        gen_ncd(1, 4, 0.1)
    with pytest.raises(InvalidParam):
        gen_lattice2d(1, 5)
    with pytest.raises(InvalidParam):
        from_rates({(0, 0): 1.0}, 2)
    with pytest.raises(InvalidParam):
        generate("torus")
    with pytest.raises(InvalidParam):
        generate("ncd", blocks=3)


CASES = [
    ("lattice2d", dict(nx=2, ny=2)), ("lattice2d", dict(nx=24, ny=25, drift=0.6, seed=3)),
    ("lattice2d", dict(nx=13, ny=7, seed=1)),
    ("birth_death", dict(n=2, lam=1, mu=3)), ("birth_death", dict(n=600, lam=0.9, mu=1.0)),
    ("ncd", dict(num_blocks=2, block_size=2, coupling=0.5)),
    ("ncd", dict(num_blocks=74, block_size=8, coupling=1e-2)),
    ("ncd", dict(num_blocks=5, block_size=20, coupling=1e-6, seed=4)),
    ("laplacian", dict(n=2, extra=0)), ("laplacian", dict(n=600, extra=300, seed=5)),
]


@pytest.mark.parametrize("family,params", CASES)
def test_family_outputs_are_singular_irreducible_m(family, params):
    A = generate(family, **params)
    assert_singular_irreducible(A)
    D = A.to_dense()
    # A = -Q^T for Markov families: columns sum to zero; Laplacians are symmetric
    assert np.abs(D.sum(axis=0)).max() <= 1e-12 * A.norm_inf()
    if family == "laplacian":
        assert np.abs(D.sum(axis=1)).max() <= 1e-12 * A.norm_inf()


@pytest.mark.parametrize("family", sorted(FAMILIES))
def test_fixed_seed_is_bitwise_identical(family):
    params = {"seed": 7} if "seed" in FAMILIES[family][1] else {}
    assert generate(family, **params) == generate(family, **params)


def test_lattice_seed_changes_rates():
    assert gen_lattice2d(4, 4, seed=1) != gen_lattice2d(4, 4, seed=2)
