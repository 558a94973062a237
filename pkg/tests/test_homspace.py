from fractions import Fraction

import numpy as np
import pytest
from support import pair, pair_names, random_function, random_symmetric_classes

from gelfand_turan import (
    BiInvariantFunction,
    Kernel,
    as_subgroup,
    coset_space,
    cyclic,
    dihedral,
    flatten_J,
    is_positive_definite,
    kernel_convolve,
    kernel_diagnostics,
    lift_J,
    symmetric,
    trivial_subgroup,
    whole_group,
)
from gelfand_turan.gelfand import NotGelfandPairError
from gelfand_turan.homspace import check_J_intertwines, kernel_pd

PAIRS = pair_names()


def test_coset_space_examples():
    G = cyclic(6)
    assert coset_space(G, trivial_subgroup(G)).m == 6
    assert coset_space(G, whole_group(G)).m == 1
    D = dihedral(3)
    S = coset_space(D, as_subgroup(D, [0, 3]))
    assert S.m == 3
    assert all(len(c) == 2 for c in S.cosets)
    assert sorted(x for c in S.cosets for x in c) == list(range(6))
    assert all(S.representative[i] == min(c) for i, c in enumerate(S.cosets))


@pytest.mark.parametrize("name", PAIRS)
def test_weyl_formula(name):
    G, K, P, T = pair(name)
    S = coset_space(G, K)
    rng = np.random.default_rng(0)
    for _ in range(10):
        assert S.weyl_residual(rng.normal(size=G.order)) < 1e-14


def test_lift_examples():
    G, K, P, T = pair("S3/S2")
    S = coset_space(G, K)
    assert np.array_equal(lift_J(np.ones(6), S).values, np.ones((3, 3)))
    assert np.array_equal(lift_J(P.expand(np.array([1.0, 0.0])), S).values, np.eye(3))
    k = lift_J(T.as_function(1), S).values
    assert np.allclose(k, np.where(np.eye(3) == 1, 1.0, -0.5))


def test_lift_rejects_non_biinvariant():
    G, K, P, T = pair("S3/S2")
    S = coset_space(G, K)
    f = np.zeros(6)
    f[int(np.flatnonzero([x not in K for x in range(6)])[0])] = 1.0
    with pytest.raises(ValueError):
        lift_J(f, S)


def test_flatten_examples():
    G, K, P, T = pair("S3/S2")
    S = coset_space(G, K)
    assert np.array_equal(flatten_J(Kernel(S, np.ones((3, 3)))), np.ones(6))
    assert np.array_equal(flatten_J(Kernel(S, np.eye(3))), P.expand(np.array([1.0, 0.0])))
    bad = np.eye(3)
    bad[0, 1] = 5
    with pytest.raises(ValueError):
        flatten_J(Kernel(S, bad))


@pytest.mark.parametrize("name", PAIRS)
def test_bijection_exact(name):
    G, K, P, T = pair(name)
    S = coset_space(G, K)
    rng = np.random.default_rng(1)
    for _ in range(20):
        f = random_function(T, rng, "pd").expand()
        k = lift_J(f, S)
        assert np.array_equal(flatten_J(k), f)
        assert np.array_equal(lift_J(flatten_J(k), S).values, k.values)
        assert k.is_G_invariant(0.0)
        assert np.all(np.diag(k.values) == f[0])
    # exact rational values too
    vals = [Fraction(int(x), 7) for x in rng.integers(-5, 6, P.n_classes)]
    f = P.expand(np.array(vals, dtype=object))
    k = lift_J(f, S)
    assert all(a == b for a, b in zip(flatten_J(k), f))


@pytest.mark.parametrize("name", PAIRS)
def test_pd_transfers(name):
    G, K, P, T = pair(name)
    S = coset_space(G, K)
    rng = np.random.default_rng(2)
    for i in range(40):
        f = random_symmetric_classes(P, rng) if i % 2 else random_function(T, rng, "pd")
        g = f.expand()
        big = is_positive_definite(G, g).verdict
        small = kernel_pd(lift_J(g, S))[0]
        assert big == small


def test_kernel_convolve_examples():
    G, K, P, T = pair("S4/S3")
    S = coset_space(G, K)
    rng = np.random.default_rng(3)
    k = lift_J(random_function(T, rng, "pd").expand(), S)
    unit = Kernel(S, S.m * np.eye(S.m))
    assert np.allclose(kernel_convolve(k, unit).values, k.values)
    ones = Kernel(S, np.ones((S.m, S.m)))
    assert np.allclose(kernel_convolve(ones, ones).values, 1.0)
    assert kernel_convolve(k, k).is_G_invariant(1e-12)


@pytest.mark.parametrize("name", PAIRS)
def test_intertwining(name):
    G, K, P, T = pair(name)
    S = coset_space(G, K)
    rng = np.random.default_rng(4)
    assert check_J_intertwines(np.ones(G.order), np.ones(G.order), S) == 0
    for _ in range(10):
        a = random_function(T, rng, "pd")
        b = random_function(T, rng, "pd")
        assert check_J_intertwines(a, b, S, P) < 1e-10


def test_intertwining_refuses_non_gelfand():
    G = symmetric(3)
    S = coset_space(G, trivial_subgroup(G))
    with pytest.raises(NotGelfandPairError):
        check_J_intertwines(np.ones(6), np.ones(6), S)


def test_diagnostics_examples():
    G, K, P, T = pair("S3/S2")
    S = coset_space(G, K)
    d = kernel_diagnostics(Kernel(S, np.ones((3, 3))))
    assert d.is_G_invariant and d.is_pd and d.base_integral == 1
    assert d.support_set == tuple(range(6))
    d = kernel_diagnostics(Kernel(S, np.eye(3)))
    assert d.base_integral == pytest.approx(1 / 3)
    assert d.support_set == K.elements


@pytest.mark.parametrize("name", PAIRS)
def test_integral_identity_exact(name):
    G, K, P, T = pair(name)
    S = coset_space(G, K)
    rng = np.random.default_rng(5)
    for _ in range(10):
        vals = [Fraction(int(x), int(y)) for x, y in zip(rng.integers(-9, 10, P.n_classes),
                                                         rng.integers(1, 9, P.n_classes))]
        f = P.expand(np.array(vals, dtype=object))
        k = lift_J(f, S)
        lhs = sum(f) / G.order
        assert kernel_diagnostics(k).base_integral == lhs
        rows = [sum(r) for r in k.values]
        assert all(r == rows[0] for r in rows)
