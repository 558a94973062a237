"""Shared fixtures data: the Gelfand pair test set and random function generators."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from gelfand_turan import (
    BiInvariantFunction,
    SphericalCoeffs,
    as_subgroup,
    cyclic,
    dihedral,
    double_cosets,
    inverse_spherical_transform,
    spherical_functions,
    symmetric,
    trivial_subgroup,
    whole_group,
)

# acceptance criterion number -> (passed, detail), filled by test_acceptance
RESULTS: dict[int, tuple[bool, str]] = {}


def _s_n_stabilizer(n: int):
    G = symmetric(n)
    # permutations fixing the last point
    K = as_subgroup(G, [i for i, p in enumerate(G.labels) if p[-1] == n - 1])
    return G, K


def pair_names() -> list[str]:
    names = ["S3/S2", "S4/S3"]
    names += [f"D{n}/refl" for n in range(3, 9)]
    names += [f"Z{n}/e" for n in range(3, 17)]
    names += ["D4/D4", "S3/S3"]
    return names


@lru_cache(maxsize=None)
def pair(name: str):
    """(G, K, partition, table) for a named pair of the test set."""
    if name == "S3/S2":
        G, K = _s_n_stabilizer(3)
    elif name == "S4/S3":
        G, K = _s_n_stabilizer(4)
    elif name.startswith("D") and name.endswith("/refl"):
        n = int(name[1:-5])
        G = dihedral(n)
        K = as_subgroup(G, [0, n])
    elif name.startswith("Z"):
        G = cyclic(int(name[1:-2]))
        K = trivial_subgroup(G)
    elif name == "D4/D4":
        G = dihedral(4)
        K = whole_group(G)
    elif name == "S3/S3":
        G = symmetric(3)
        K = whole_group(G)
    else:
        raise KeyError(name)
    P = double_cosets(G, K)
    T = spherical_functions(G, K, seed=0, partition=P)
    return G, K, P, T


def orbit_coeffs(T, rng, kind: str) -> np.ndarray:
    """Spherical coefficients constant on conjugation orbits, so the function is real.

    kind "pd": all >= 0 (some exactly zero); "indefinite": at least one
    clearly negative; "any": uniform in [-1, 1] away from zero.
    """
    c = np.zeros(T.size)
    orbits = T.conjugation_orbits()
    for o in orbits:
        if kind == "pd":
            v = 0.0 if rng.random() < 0.25 else rng.random()
        else:
            v = rng.uniform(-1, 1)
            v = np.sign(v) * max(abs(v), 1e-3)
        c[list(o)] = v
    if kind == "indefinite" and c.min() > -1e-3:
        o = orbits[rng.integers(len(orbits))]
        c[list(o)] = -rng.uniform(1e-3, 1)
    if kind == "pd" and c.max() == 0:
        c[T.trivial_index] = 1.0
    return c


def random_function(T, rng, kind: str) -> BiInvariantFunction:
    f = inverse_spherical_transform(SphericalCoeffs(T, orbit_coeffs(T, rng, kind)))
    coeffs = np.real(f.coeffs) if np.iscomplexobj(f.coeffs) else f.coeffs
    return BiInvariantFunction(T.partition, coeffs)


def random_symmetric_classes(P, rng) -> BiInvariantFunction:
    """Random real class values with f(D^-1) = f(D)."""
    v = rng.uniform(-1, 1, P.n_classes)
    v = 0.5 * (v + v[P.inverse_class])
    v[0] = abs(v[0]) + 0.5
    return BiInvariantFunction(P, v)
