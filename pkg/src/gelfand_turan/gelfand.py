"""Double cosets, Gelfand pairs and spherical harmonic analysis on finite groups.

Spherical functions are obtained by diagonalizing a generic element of the
commutative double-coset algebra, so no character tables are needed.
Bi-invariant functions are stored by their values on double cosets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .groups import FiniteGroup, Subgroup, as_subgroup, default_pd_tol, is_positive_definite

MAX_SEPARATION_RETRIES = 32
COLLISION_TOL = 1e-8


class NotGelfandPairError(ValueError):
    pass


class SphericalSeparationError(RuntimeError):
    """A random element of the Hecke algebra repeatedly failed to separate characters."""


class NotPositiveDefiniteError(ValueError):
    def __init__(self, index: int, value: float):
        super().__init__(f"spherical coefficient {index} is negative ({value:.6g}); not positive definite")
        self.index = index
        self.value = value


@dataclass(eq=False)
class DoubleCosetPartition:
    group: FiniteGroup
    subgroup: Subgroup
    classes: tuple[tuple[int, ...], ...]
    class_of: np.ndarray
    sizes: np.ndarray
    inverse_class: np.ndarray

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """N[a, b, c] = #{y in D_a : y^-1 x_c in D_b} for a representative x_c of D_c.

        With the 1/n convolution, e_a * e_b = sum_c N[a, b, c] / n * e_c.
        """
        G, s = self.group, self.n_classes
        N = np.zeros((s, s, s), dtype=np.int64)
        for a, cls in enumerate(self.classes):
            inv = G.inverse[np.array(cls)]
            for c, rep in enumerate(self.classes):
                hits = self.class_of[G.table[inv, rep[0]]]
                N[a, :, c] = np.bincount(hits, minlength=s)
        return N

    def expand(self, coeffs) -> np.ndarray:
        """Class values -> function on G."""
        return np.asarray(coeffs)[self.class_of]

    def restrict(self, f, tol: float = 0.0) -> np.ndarray:
        """Function on G -> class values; raises if f is not constant on classes."""
        f = np.asarray(f)
        out = f[[c[0] for c in self.classes]]
        spread = f - out[self.class_of]
        if f.dtype == object:
            bad = any(x != 0 for x in spread)
        else:
            bad = np.abs(spread).max(initial=0.0) > tol
        if bad:
            raise ValueError("function is not K-bi-invariant")
        return out

    def convolve(self, f, g) -> np.ndarray:
        """Convolution of class-value vectors via the structure constants."""
        f, g = np.asarray(f), np.asarray(g)
        return np.einsum("a,b,abc->c", f, g, self.structure_constants) / self.group.order

    def unit(self) -> np.ndarray:
        """Class vector of the algebra unit (n/|K|) 1_K."""
        u = np.zeros(self.n_classes)
        u[0] = self.group.order / self.subgroup.order
        return u


def double_cosets(G: FiniteGroup, K: Subgroup) -> DoubleCosetPartition:
    """Orbits of (k, k') . g = k g k', ordered by minimal element (class 0 is K)."""
    K = as_subgroup(G, K.elements)
    ks = K.as_array()
    class_of = np.full(G.order, -1, dtype=np.int64)
    classes = []
    for g in range(G.order):
        if class_of[g] >= 0:
            continue
        kg = G.table[ks, g]
        orbit = np.unique(G.table[kg[:, None], ks[None, :]])
        class_of[orbit] = len(classes)
        classes.append(tuple(orbit.tolist()))
    sizes = np.array([len(c) for c in classes], dtype=np.int64)
    inverse_class = class_of[G.inverse[[c[0] for c in classes]]]
    for arr in (class_of, sizes, inverse_class):
        arr.setflags(write=False)
    return DoubleCosetPartition(G, K, tuple(classes), class_of, sizes, inverse_class)


def is_gelfand_pair(G: FiniteGroup, K: Subgroup, partition: DoubleCosetPartition | None = None) -> bool:
    """True iff the class indicators commute under convolution."""
    P = partition or double_cosets(G, K)
    N = P.structure_constants
    return bool(np.array_equal(N, N.transpose(1, 0, 2)))


@dataclass(eq=False)
class BiInvariantFunction:
    partition: DoubleCosetPartition
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs)
        if self.coeffs.shape != (self.partition.n_classes,):
            raise ValueError("one coefficient per double coset expected")

    @classmethod
    def from_function(cls, partition: DoubleCosetPartition, f, tol: float = 1e-12) -> "BiInvariantFunction":
        return cls(partition, partition.restrict(f, tol))

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.coeffs) or not np.any(np.imag(self.coeffs))

    def expand(self) -> np.ndarray:
        return self.partition.expand(self.coeffs)

    def integral(self):
        return (self.partition.sizes * self.coeffs).sum() / self.partition.group.order

    def __mul__(self, other: "BiInvariantFunction") -> "BiInvariantFunction":
        """Convolution."""
        if other.partition is not self.partition:
            raise ValueError("partition mismatch")
        return BiInvariantFunction(self.partition, self.partition.convolve(self.coeffs, other.coeffs))


@dataclass(eq=False)
class SphericalTable:
    """omega[i, j] is the i-th spherical function on class j."""

    partition: DoubleCosetPartition
    omega: np.ndarray
    weights: np.ndarray
    trivial_index: int
    conjugate_index: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.weights)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.omega)

    def expanded(self, i: int) -> np.ndarray:
        return self.partition.expand(self.omega[i])

    def as_function(self, i: int) -> BiInvariantFunction:
        return BiInvariantFunction(self.partition, self.omega[i].copy())

    def conjugation_orbits(self) -> list[tuple[int, ...]]:
        """Groups {i, conj(i)}; a real function has equal coefficients on each orbit."""
        seen, orbits = set(), []
        for i in range(self.size):
            if i in seen:
                continue
            j = int(self.conjugate_index[i])
            orbit = (i,) if i == j else (i, j)
            seen.update(orbit)
            orbits.append(orbit)
        return orbits

    def functional_equation_residual(self) -> float:
        """max |(1/|K|) sum_k w(x k y) - w(x) w(y)| over all i, x, y."""
        G = self.partition.group
        ks = self.partition.subgroup.as_array()
        xky = G.table[G.table[:, ks][:, :, None], np.arange(G.order)[None, None, :]]  # [x, k, y]
        worst = 0.0
        for i in range(self.size):
            w = self.expanded(i)
            lhs = w[xky].mean(axis=1)
            worst = max(worst, float(np.abs(lhs - np.outer(w, w)).max()))
        return worst

    def orthogonality_residual(self) -> float:
        """max |<w_i, w_j> - delta_ij / weight_i|."""
        P = self.partition
        gram = (self.omega * P.sizes) @ self.omega.conj().T / P.group.order
        return float(np.abs(gram - np.diag(1.0 / self.weights)).max())

    def export(self) -> dict:
        omega = self.omega
        if np.iscomplexobj(omega):
            values = [[[float(z.real), float(z.imag)] for z in row] for row in omega]
        else:
            values = omega.tolist()
        return {
            "classes": [list(c) for c in self.partition.classes],
            "omega": values,
            "weights": self.weights.tolist(),
        }


def _clean(values: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    if np.iscomplexobj(values) and np.abs(values.imag).max(initial=0.0) <= tol:
        return np.ascontiguousarray(values.real)
    return values


def spherical_functions(G: FiniteGroup, K: Subgroup, seed: int = 0,
                        partition: DoubleCosetPartition | None = None) -> SphericalTable:
    """All spherical functions of a finite Gelfand pair.

    A random combination of the left-multiplication operators of the
    double-coset algebra is diagonalized; its eigenvectors are the minimal
    idempotents, which are multiples of the spherical functions.  The
    operators are normal for the inner product weighted by class sizes, so
    the diagonalization is done on the symmetrically scaled matrix.
    """
    P = partition or double_cosets(G, K)
    if not is_gelfand_pair(G, K, P):
        raise NotGelfandPairError(f"({G.name}, K of order {K.order}) is not a Gelfand pair")
    s, n = P.n_classes, G.order
    L = P.structure_constants.transpose(0, 2, 1) / n  # L[a][c, b] = N[a, b, c] / n
    root = np.sqrt(P.sizes.astype(float))
    rng = np.random.default_rng(seed)
    for _ in range(MAX_SEPARATION_RETRIES):
        r = rng.standard_normal(s)
        A = np.tensordot(r, L, axes=1)
        B = root[:, None] * A / root[None, :]
        vals, vecs = np.linalg.eig(B)
        radius = max(np.abs(vals).max(), 1e-300)
        gaps = np.abs(vals[:, None] - vals[None, :])
        np.fill_diagonal(gaps, np.inf)
        if s == 1 or gaps.min() > COLLISION_TOL * radius:
            break
    else:
        raise SphericalSeparationError(f"eigenvalues collided in {MAX_SEPARATION_RETRIES} attempts")
    vecs = vecs / root[:, None]
    omega = (vecs / vecs[0]).T  # row i: spherical function normalized to 1 at e
    omega = _clean(omega)
    omega = _sort_rows(omega)
    weights = n / ((np.abs(omega) ** 2) @ P.sizes)
    trivial = int(np.argmin(np.abs(omega - 1).max(axis=1)))
    conj = np.array([int(np.argmin(np.abs(omega - np.conj(row)).max(axis=1))) for row in omega])
    for arr in (omega, weights, conj):
        arr.setflags(write=False)
    return SphericalTable(P, omega, weights, trivial, conj)


def _sort_rows(omega: np.ndarray) -> np.ndarray:
    # Descending lexicographic on rounded (re, im) puts the trivial function first.
    def key(row):
        return tuple(v for z in row for v in (round(float(np.real(z)), 8), round(float(np.imag(z)), 8)))
    order = sorted(range(len(omega)), key=lambda i: key(omega[i]), reverse=True)
    return np.ascontiguousarray(omega[order])


@dataclass(eq=False)
class SphericalCoeffs:
    table: SphericalTable
    values: np.ndarray


def _check_partition(f: BiInvariantFunction, T: SphericalTable) -> None:
    a, b = f.partition, T.partition
    same = a is b or (a.classes == b.classes and np.array_equal(a.group.table, b.group.table))
    if not same:
        raise ValueError("function and spherical table use different partitions")


def spherical_transform(f: BiInvariantFunction, T: SphericalTable) -> SphericalCoeffs:
    """f^(w_i) = (1/n) sum_g f(g) w_i(g^-1), evaluated classwise."""
    _check_partition(f, T)
    P = T.partition
    vals = T.omega[:, P.inverse_class] @ (P.sizes * f.coeffs) / P.group.order
    return SphericalCoeffs(T, _clean(vals))


def inverse_spherical_transform(c: SphericalCoeffs) -> BiInvariantFunction:
    """f = sum_i weight_i c_i w_i."""
    T = c.table
    return BiInvariantFunction(T.partition, _clean((T.weights * np.asarray(c.values)) @ T.omega))


def bochner_check(f: BiInvariantFunction, T: SphericalTable, tol: float | None = None) -> bool:
    """True iff every spherical coefficient is (numerically) real and nonnegative."""
    c = np.asarray(spherical_transform(f, T).values)
    if tol is None:
        tol = 1e-9 * max(float(np.abs(f.coeffs).max(initial=0.0)), 1e-300)
    return bool(np.all(np.real(c) >= -tol) and np.all(np.abs(np.imag(c)) <= tol))


def gram_check(f: BiInvariantFunction, tol: float | None = None) -> bool:
    """The n x n Gram verdict for a bi-invariant function, tolerance aligned with bochner_check."""
    g = f.expand()
    G = f.partition.group
    return is_positive_definite(G, g, tol if tol is None else tol * G.order).verdict


@dataclass(eq=False)
class ConvolutionRoot:
    root: BiInvariantFunction
    clamped: tuple[int, ...]
    residual: float


def convolution_root(f: BiInvariantFunction, T: SphericalTable, tol: float | None = None) -> ConvolutionRoot:
    """Bi-invariant positive definite g with g * g = f, via square roots of f^.

    Coefficients below ``-tol`` reject the input; those in ``[-tol, 0)`` are
    clamped to zero and listed in ``clamped``.
    """
    if not f.is_real:
        raise ValueError("convolution roots are computed for real functions")
    c = np.asarray(spherical_transform(f, T).values)
    cmax = float(np.abs(c).max(initial=0.0))
    if tol is None:
        tol = 1e-9 * max(cmax, 1e-300)
    bad_imag = np.flatnonzero(np.abs(np.imag(c)) > tol)
    if len(bad_imag):
        i = int(bad_imag[0])
        raise NotPositiveDefiniteError(i, float(np.real(c[i])))
    c = np.real(c)
    negative = np.flatnonzero(c < -tol)
    if len(negative):
        i = int(negative[0])
        raise NotPositiveDefiniteError(i, float(c[i]))
    clamped = tuple(np.flatnonzero(c < 0).tolist())
    h = np.sqrt(np.maximum(c, 0.0))
    g = inverse_spherical_transform(SphericalCoeffs(T, h))
    g = BiInvariantFunction(g.partition, np.real(g.coeffs) if np.iscomplexobj(g.coeffs) else g.coeffs)
    residual = float(np.abs((g * g).coeffs - f.coeffs).max(initial=0.0))
    return ConvolutionRoot(g, clamped, residual)


# ---------------------------------------------------------------------------
# exact rational data for the LP


def rational_orbit_functions(T: SphericalTable, max_denominator: int = 10**6):
    """Exact class values of the real orbit functions rho_o = sum_{i in o} w_i, or None.

    The candidate rational idempotents are certified exactly: pairwise
    orthogonal, idempotent, and summing to the algebra unit.  A complete
    system of orthogonal idempotents in a commutative semisimple algebra is
    unique, so passing the check makes the rational values exact.
    """
    P = T.partition
    orbits = T.conjugation_orbits()
    N = P.structure_constants
    n = P.group.order
    idems = []
    for orbit in orbits:
        real = np.real(sum(T.weights[i] * np.asarray(T.omega[i]) for i in orbit))
        rat = [Fraction(float(x)).limit_denominator(max_denominator) for x in real]
        if max(abs(float(r) - x) for r, x in zip(rat, real)) > 1e-9:
            return None
        idems.append(rat)
    s = P.n_classes

    def conv(f, g):
        out = [Fraction(0)] * s
        for a in range(s):
            if f[a] == 0:
                continue
            for b in range(s):
                if g[b] == 0:
                    continue
                fg = f[a] * g[b]
                for c in range(s):
                    if N[a, b, c]:
                        out[c] += fg * int(N[a, b, c])
        return [x / n for x in out]

    total = [Fraction(0)] * s
    for i, p in enumerate(idems):
        total = [t + x for t, x in zip(total, p)]
        for j, q in enumerate(idems[i:], start=i):
            prod = conv(p, q)
            target = p if i == j else [Fraction(0)] * s
            if prod != target:
                return None
    unit = [Fraction(n, P.subgroup.order)] + [Fraction(0)] * (s - 1)
    if total != unit:
        return None
    return orbits, [[len(o) * x / p[0] for x in p] for o, p in zip(orbits, idems)]
