"""Coset spaces G/K, kernels on them, and the correspondence with bi-invariant functions.

Cosets are left cosets gK with their minimal element as representative; the
coset K itself is always index 0.  The invariant measure on G/K gives every
coset mass 1/m, so that Weyl's formula holds with Haar masses 1 on G and K.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gelfand import BiInvariantFunction, DoubleCosetPartition, NotGelfandPairError, double_cosets, is_gelfand_pair
from .groups import FiniteGroup, Subgroup, as_subgroup, convolve, psd_test

REPRESENTATIVE_DRAWS = 8


@dataclass(eq=False)
class CosetSpace:
    group: FiniteGroup
    subgroup: Subgroup
    cosets: tuple[tuple[int, ...], ...]
    representative: np.ndarray
    coset_of: np.ndarray

    @property
    def m(self) -> int:
        return len(self.cosets)

    @property
    def action(self) -> np.ndarray:
        """action[g, i] = index of the coset g x_i K."""
        return self.coset_of[self.group.table[:, self.representative]]

    def weyl_residual(self, f) -> float:
        """|int_G f - sum_cosets (1/m) (1/|K|) sum_k f(x k)|."""
        f = np.asarray(f)
        G, ks = self.group, self.subgroup.as_array()
        lhs = f.sum() / G.order
        xk = G.table[self.representative[:, None], ks[None, :]]
        rhs = f[xk].mean(axis=1).sum() / self.m
        return float(abs(lhs - rhs))


def coset_space(G: FiniteGroup, K: Subgroup) -> CosetSpace:
    K = as_subgroup(G, K.elements)
    ks = K.as_array()
    coset_of = np.full(G.order, -1, dtype=np.int64)
    cosets, reps = [], []
    for g in range(G.order):
        if coset_of[g] >= 0:
            continue
        members = np.sort(G.table[g, ks])
        coset_of[members] = len(cosets)
        cosets.append(tuple(members.tolist()))
        reps.append(g)
    space = CosetSpace(G, K, tuple(cosets), np.array(reps, dtype=np.int64), coset_of)
    basis_residual = max(space.weyl_residual(np.eye(G.order)[g]) for g in range(G.order))
    if basis_residual > 1e-14:
        raise RuntimeError(f"Weyl integration formula fails on G/K (residual {basis_residual:.3g})")
    return space


@dataclass(eq=False)
class Kernel:
    space: CosetSpace
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values)
        m = self.space.m
        if self.values.shape != (m, m):
            raise ValueError(f"kernel must be {m}x{m}")

    def is_G_invariant(self, tol: float = 0.0) -> bool:
        act = self.space.action
        moved = self.values[act[:, :, None], act[:, None, :]]  # [g, i, j]
        diff = moved - self.values[None]
        if diff.dtype == object:
            return all(x == 0 for x in diff.ravel())
        return bool(np.abs(diff).max(initial=0.0) <= tol)


def _group_values(phi, space: CosetSpace) -> np.ndarray:
    if isinstance(phi, BiInvariantFunction):
        return phi.expand()
    return np.asarray(phi)


def _check_bi_invariant(f: np.ndarray, space: CosetSpace, tol: float) -> None:
    G, ks = space.group, space.subgroup.as_array()
    kgk = G.table[G.table[ks][:, :, None], ks[None, None, :]]  # [k, g, k']
    diff = f[kgk] - f[None, :, None]
    bad = any(x != 0 for x in diff.ravel()) if diff.dtype == object else np.abs(diff).max() > tol
    if bad:
        raise ValueError("function is not K-bi-invariant")


def lift_J(phi, space: CosetSpace, seed: int = 0, tol: float = 0.0) -> Kernel:
    """Kernel Phi(xK, yK) = phi(x^-1 y) of a bi-invariant function.

    Independence of the representatives is re-checked on random draws,
    exactly unless ``tol`` is positive.
    """
    f = _group_values(phi, space)
    _check_bi_invariant(f, space, tol)
    G, reps = space.group, space.representative
    values = f[G.table[G.inverse[reps][:, None], reps[None, :]]]
    rng = np.random.default_rng(seed)
    size = len(space.subgroup.elements)
    cos = np.array(space.cosets)
    for _ in range(REPRESENTATIVE_DRAWS):
        xs = cos[np.arange(space.m), rng.integers(0, size, space.m)]
        ys = cos[np.arange(space.m), rng.integers(0, size, space.m)]
        redo = f[G.table[G.inverse[xs][:, None], ys[None, :]]]
        same = np.array_equal(redo, values) if tol == 0 else np.abs(redo - values).max() <= tol
        if not same:
            raise RuntimeError("lifted kernel depends on the choice of coset representatives")
    return Kernel(space, values)


def flatten_J(kernel: Kernel, tol: float = 0.0) -> np.ndarray:
    """phi(g) = Phi(K, gK); the kernel must be G-invariant."""
    if not kernel.is_G_invariant(tol):
        raise ValueError("kernel is not G-invariant; the associated function is ill-defined")
    return kernel.values[0, kernel.space.coset_of]


def kernel_convolve(k1: Kernel, k2: Kernel) -> Kernel:
    """(Phi1*Phi2)(xK, yK) = (1/m) sum_z Phi1(xK, zK) Phi2(zK, yK)."""
    if k1.space is not k2.space and k1.values.shape != k2.values.shape:
        raise ValueError("kernels live on different coset spaces")
    if k1.values.shape != k2.values.shape:
        raise ValueError("kernel size mismatch")
    return Kernel(k1.space, k1.values @ k2.values / k1.space.m)


def check_J_intertwines(phi1, phi2, space: CosetSpace, partition: DoubleCosetPartition | None = None) -> float:
    """max |J(phi1 * phi2) - J(phi1) * J(phi2)|, computed along two independent routes."""
    P = partition or double_cosets(space.group, space.subgroup)
    if not is_gelfand_pair(space.group, space.subgroup, P):
        raise NotGelfandPairError("the intertwining identity is stated for Gelfand pairs")
    f1, f2 = _group_values(phi1, space), _group_values(phi2, space)
    lhs = lift_J(convolve(space.group, f1, f2), space, tol=1e-12)
    rhs = kernel_convolve(lift_J(f1, space), lift_J(f2, space))
    return float(np.abs(lhs.values - rhs.values).max())


class KernelDiagnostics(NamedTuple):
    is_G_invariant: bool
    is_pd: bool
    min_eigenvalue: float
    support_set: tuple[int, ...]
    base_integral: object


def base_integral(kernel: Kernel):
    """(1/m) sum_j Phi(K, x_j K); exact for rational (object) kernels."""
    row = kernel.values[0]
    return row.sum() / kernel.space.m


def kernel_pd(kernel: Kernel, tol: float | None = None):
    v = np.asarray(kernel.values, dtype=complex if np.iscomplexobj(kernel.values) else float)
    if tol is None:
        tol = 1e-9 * kernel.space.m * max(float(np.abs(v).max(initial=0.0)), 1e-300)
    if np.abs(v - v.conj().T).max(initial=0.0) > tol:
        return False, float("nan")
    return psd_test(v, tol)


def kernel_diagnostics(kernel: Kernel, tol: float | None = None) -> KernelDiagnostics:
    space = kernel.space
    invariant = kernel.is_G_invariant(0.0 if kernel.values.dtype == object else 1e-12)
    verdict, lam = kernel_pd(kernel, tol)
    row = kernel.values[0]
    nonzero = [j for j in range(space.m) if row[j] != 0]
    support = tuple(sorted(x for j in nonzero for x in space.cosets[j]))
    return KernelDiagnostics(invariant, bool(verdict), lam, support, base_integral(kernel))
