"""Finite groups given by Cayley tables, and functions on them.

Functions on a group of order ``n`` are plain length-``n`` numpy arrays indexed
by element.  Integration is against normalized counting measure, so every
convolution carries a factor ``1/n`` and ``integrate(ones) == 1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, NamedTuple, Sequence

import numpy as np

# Exhaustive associativity check up to this order; sampled above it.
EXHAUSTIVE_ASSOCIATIVITY_LIMIT = 512


class GroupError(ValueError):
    """A table or element set violates a group axiom."""


class AsymmetricFunctionError(ValueError):
    """The Gram matrix of a function is not Hermitian, i.e. f(g) != conj(f(g^-1))."""


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A validated finite group; element 0 is always the identity."""

    table: np.ndarray
    name: str = ""
    labels: tuple = ()
    inverse: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64, copy=True)
        _validate_table(table)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        n = table.shape[0]
        inverse = np.argmin(table, axis=1)  # identity is 0, the smallest index
        inverse.setflags(write=False)
        object.__setattr__(self, "inverse", inverse)
        labels = tuple(self.labels) if self.labels else tuple(range(n))
        if len(labels) != n:
            raise GroupError(f"{len(labels)} labels for a group of order {n}")
        object.__setattr__(self, "labels", labels)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @property
    def identity(self) -> int:
        return 0

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def index(self, label: Hashable) -> int:
        return self.labels.index(label)

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    def center(self) -> list[int]:
        return [a for a in range(self.order) if np.array_equal(self.table[a], self.table[:, a])]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mul(x, a)
            k += 1
        return k


def _validate_table(table: np.ndarray) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise GroupError(f"Cayley table must be a non-empty square array, got shape {table.shape}")
    n = table.shape[0]
    if table.min() < 0 or table.max() >= n:
        raise GroupError("Cayley table entries must lie in 0..n-1")
    expected = np.arange(n)
    for a in range(n):
        row = np.sort(table[a])
        if not np.array_equal(row, expected):
            b, c = _first_repeat(table[a])
            raise GroupError(f"not a Latin square: row {a} has {a}*{b} = {a}*{c} = {table[a, b]}")
        col = np.sort(table[:, a])
        if not np.array_equal(col, expected):
            b, c = _first_repeat(table[:, a])
            raise GroupError(f"not a Latin square: column {a} has {b}*{a} = {c}*{a} = {table[b, a]}")
    if not (np.array_equal(table[0], expected) and np.array_equal(table[:, 0], expected)):
        raise GroupError("element 0 is not the identity")
    _check_associative(table)


def _first_repeat(values: np.ndarray) -> tuple[int, int]:
    seen: dict[int, int] = {}
    for i, v in enumerate(values.tolist()):
        if v in seen:
            return seen[v], i
        seen[v] = i
    return 0, 0


def _check_associative(table: np.ndarray) -> None:
    n = table.shape[0]
    if n <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT:
        for a in range(n):
            lhs = table[table[a]]  # lhs[b, c] = (a b) c
            rhs = table[a][table]  # rhs[b, c] = a (b c)
            bad = np.argwhere(lhs != rhs)
            if len(bad):
                b, c = map(int, bad[0])
                raise GroupError(f"not associative: ({a}*{b})*{c} != {a}*({b}*{c})")
        return
    rng = np.random.default_rng(0)
    count = 10 * n * n
    a, b, c = rng.integers(0, n, size=(3, count))
    bad = np.flatnonzero(table[table[a, b], c] != table[a, table[b, c]])
    if len(bad):
        i = bad[0]
        raise GroupError(f"not associative: ({a[i]}*{b[i]})*{c[i]} != {a[i]}*({b[i]}*{c[i]})")


# ---------------------------------------------------------------------------
# constructors


def from_table(table, name: str = "", labels: Sequence = ()) -> FiniteGroup:
    """Build a group from an explicit Cayley table.

    If the identity is not element 0 the elements are relabelled so that it
    is (identity first, the rest in input order).
    """
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0] if table.ndim == 2 else 0
    if table.ndim == 2 and table.shape[0] == table.shape[1] and n:
        ident = [e for e in range(n) if np.array_equal(table[e], np.arange(n))
                 and np.array_equal(table[:, e], np.arange(n))]
        if ident and ident[0] != 0:
            e = ident[0]
            order = [e] + [x for x in range(n) if x != e]
            new_of_old = np.empty(n, dtype=np.int64)
            new_of_old[order] = np.arange(n)
            table = new_of_old[table[np.ix_(order, order)]]
            if labels:
                labels = [labels[i] for i in order]
    return FiniteGroup(table, name=name, labels=tuple(labels))


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError("cyclic group order must be positive")
    idx = np.arange(n)
    return FiniteGroup((idx[:, None] + idx[None, :]) % n, name=f"cyclic({n})")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the regular n-gon, order 2n.

    Element ``k`` is the rotation r^k and element ``n + k`` is r^k s, with
    s a reflection.  So ``n`` is a reflection and ``1`` the generating rotation.
    """
    if n < 1:
        raise GroupError("dihedral parameter must be positive")
    table = np.empty((2 * n, 2 * n), dtype=np.int64)
    for x in range(2 * n):
        a, i = x % n, x // n
        for y in range(2 * n):
            b, j = y % n, y // n
            rot = (a + (b if i == 0 else -b)) % n
            table[x, y] = rot + n * ((i + j) % 2)
    labels = [f"r^{k}" for k in range(n)] + [f"r^{k} s" for k in range(n)]
    return FiniteGroup(table, name=f"dihedral({n})", labels=tuple(labels))


def symmetric(n: int) -> FiniteGroup:
    """S_n on points 0..n-1, elements in lexicographic order of their image tuples.

    Labels are the image tuples; the product ``p*q`` is the composition
    ``x -> p(q(x))``.
    """
    if not 1 <= n <= 6:
        raise GroupError("symmetric(n) is supported for 1 <= n <= 6")
    perms = list(itertools.permutations(range(n)))
    index = {p: i for i, p in enumerate(perms)}
    table = np.array([[index[tuple(p[q[x]] for x in range(n))] for q in perms] for p in perms])
    return FiniteGroup(table, name=f"symmetric({n})", labels=tuple(perms))


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Pairs (a, b) stored at index ``a * |h| + b``."""
    ng, nh = g.order, h.order
    a = np.repeat(np.arange(ng), nh)
    b = np.tile(np.arange(nh), ng)
    table = g.table[a[:, None], a[None, :]] * nh + h.table[b[:, None], b[None, :]]
    labels = tuple((x, y) for x in g.labels for y in h.labels)
    return FiniteGroup(table, name=f"product({g.name},{h.name})", labels=labels)


def build_group(descriptor) -> FiniteGroup:
    """Build a group from a descriptor.

    Accepted forms: strings such as ``"cyclic(4)"``, ``"dihedral(3)"``,
    ``"symmetric(4)"``, ``"product(cyclic(2),dihedral(3))"``; dicts with a
    ``"type"`` key (``cyclic``/``dihedral``/``symmetric`` with ``"n"``,
    ``product`` with ``"factors"``, ``table`` with ``"table"``); or a dict in
    the group-file format ``{"name", "order", "table"}``.
    """
    if isinstance(descriptor, FiniteGroup):
        return descriptor
    if isinstance(descriptor, str):
        return _parse_descriptor(descriptor.replace(" ", ""))
    if isinstance(descriptor, dict):
        kind = descriptor.get("type")
        if kind is None and "table" in descriptor:
            kind = "table"
        if kind == "table":
            table = descriptor["table"]
            if "order" in descriptor and descriptor["order"] != len(table):
                raise GroupError(f"order {descriptor['order']} does not match table size {len(table)}")
            return from_table(table, name=descriptor.get("name", ""))
        if kind in ("cyclic", "dihedral", "symmetric"):
            return _SIMPLE[kind](int(descriptor["n"]))
        if kind == "product":
            factors = [build_group(f) for f in descriptor["factors"]]
            return _product_all(factors)
        raise GroupError(f"unknown group descriptor type {kind!r}")
    raise GroupError(f"cannot build a group from {descriptor!r}")


_SIMPLE = {"cyclic": cyclic, "dihedral": dihedral, "symmetric": symmetric}


def _product_all(factors: list[FiniteGroup]) -> FiniteGroup:
    if not factors:
        raise GroupError("product needs at least one factor")
    out = factors[0]
    for f in factors[1:]:
        out = direct_product(out, f)
    return out


def _parse_descriptor(text: str) -> FiniteGroup:
    head, sep, rest = text.partition("(")
    if not sep or not rest.endswith(")"):
        raise GroupError(f"malformed group descriptor {text!r}")
    body = rest[:-1]
    if head in _SIMPLE:
        try:
            return _SIMPLE[head](int(body))
        except ValueError:
            raise GroupError(f"malformed group descriptor {text!r}") from None
    if head == "product":
        parts, depth, start = [], 0, 0
        for i, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                parts.append(body[start:i])
                start = i + 1
        parts.append(body[start:])
        return _product_all([_parse_descriptor(p) for p in parts])
    raise GroupError(f"unknown group descriptor {head!r}")


# ---------------------------------------------------------------------------
# subgroups and subsets


@dataclass(frozen=True)
class Subgroup:
    elements: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self.elements

    def __iter__(self):
        return iter(self.elements)

    def as_array(self) -> np.ndarray:
        return np.array(self.elements, dtype=np.int64)


def subgroup_from_generators(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Smallest subgroup of ``G`` containing ``gens``."""
    gens = [int(g) for g in gens]
    for g in gens:
        if not 0 <= g < G.order:
            raise GroupError(f"generator {g} is not an element of a group of order {G.order}")
    found = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = G.mul(x, g)
                if y not in found:
                    found.add(y)
                    nxt.append(y)
        frontier = nxt
    return Subgroup(tuple(sorted(found)))


def as_subgroup(G: FiniteGroup, elements: Iterable[int]) -> Subgroup:
    """Validate that ``elements`` is a subgroup of ``G``."""
    elems = sorted({int(x) for x in elements})
    if not elems or any(not 0 <= x < G.order for x in elems):
        raise GroupError("subgroup elements must be a non-empty set of group elements")
    s = set(elems)
    if 0 not in s:
        raise GroupError("subgroup does not contain the identity")
    arr = np.array(elems)
    if not set(G.table[np.ix_(arr, arr)].ravel().tolist()) <= s:
        raise GroupError(f"{elems} is not closed under multiplication")
    return Subgroup(tuple(elems))


def trivial_subgroup(G: FiniteGroup) -> Subgroup:
    return Subgroup((0,))


def whole_group(G: FiniteGroup) -> Subgroup:
    return Subgroup(tuple(range(G.order)))


def subgroup_as_group(G: FiniteGroup, H: Subgroup) -> tuple[FiniteGroup, np.ndarray]:
    """Return ``H`` as a standalone group plus the map from its indices to ``G``'s."""
    elems = H.as_array()
    pos = {int(x): i for i, x in enumerate(elems)}
    sub = G.table[np.ix_(elems, elems)]
    table = np.vectorize(pos.__getitem__)(sub)
    labels = tuple(G.labels[x] for x in elems)
    return FiniteGroup(table, name=f"{G.name}|{len(elems)}", labels=labels), elems


@dataclass(frozen=True)
class GroupSubset:
    members: tuple[int, ...]
    symmetric: bool
    bi_invariant: bool

    def __contains__(self, x) -> bool:
        return x in self.members

    def indicator(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        out[list(self.members)] = 1.0
        return out


def _double_sided(G: FiniteGroup, K: Subgroup, members: Iterable[int]) -> set[int]:
    ks = K.as_array()
    m = np.array(sorted(members), dtype=np.int64)
    if len(m) == 0:
        return set()
    left = G.table[ks[:, None], m[None, :]]  # k s
    return set(G.table[left[:, :, None], ks[None, None, :]].ravel().tolist())


def validate_subset(G: FiniteGroup, K: Subgroup, S: Iterable[int]) -> GroupSubset:
    members = sorted({int(x) for x in S})
    if any(not 0 <= x < G.order for x in members):
        raise GroupError("subset contains indices outside the group")
    s = set(members)
    symmetric = {int(G.inverse[x]) for x in members} == s
    bi_inv = _double_sided(G, K, members) == s
    return GroupSubset(tuple(members), symmetric, bi_inv)


def biinvariant_symmetric_closure(G: FiniteGroup, K: Subgroup, S: Iterable[int]) -> GroupSubset:
    """Smallest symmetric K-bi-invariant superset, K (S u S^-1) K."""
    s = {int(x) for x in S}
    s |= {int(G.inverse[x]) for x in s}
    return validate_subset(G, K, _double_sided(G, K, s))


# ---------------------------------------------------------------------------
# functions on G


def integrate(f) -> complex | float:
    """Integral against normalized Haar (counting) measure."""
    f = np.asarray(f)
    return f.sum() / len(f)


def _check_size(G: FiniteGroup, *fs) -> None:
    for f in fs:
        if np.shape(f) != (G.order,):
            raise ValueError(f"function of shape {np.shape(f)} on a group of order {G.order}")


def convolve(G: FiniteGroup, f, g) -> np.ndarray:
    """(f*g)(x) = (1/n) sum_y f(y) g(y^-1 x)."""
    f, g = np.asarray(f), np.asarray(g)
    _check_size(G, f, g)
    shifted = g[G.table[G.inverse]]  # shifted[y, x] = g(y^-1 x)
    return f @ shifted / G.order


def involution(G: FiniteGroup, f) -> np.ndarray:
    """f*(x) = conj(f(x^-1)); finite groups are unimodular."""
    f = np.asarray(f)
    _check_size(G, f)
    return np.conj(f[G.inverse])


def autocorrelate(G: FiniteGroup, f) -> np.ndarray:
    """f * f*, always positive definite."""
    return convolve(G, f, involution(G, f))


def project_K(G: FiniteGroup, K: Subgroup, f) -> np.ndarray:
    """K-bi-invariant average f^K(g) = |K|^-2 sum_{k,k'} f(k g k')."""
    f = np.asarray(f)
    _check_size(G, f)
    ks = as_subgroup(G, K.elements).as_array()
    kg = G.table[ks]  # kg[k, g]
    kgk = G.table[kg[:, :, None], ks[None, None, :]]  # [k, g, k']
    return f[kgk].mean(axis=(0, 2))


def gram_matrix(G: FiniteGroup, f) -> np.ndarray:
    """M[i, j] = f(g_i^-1 g_j) over all elements."""
    f = np.asarray(f)
    _check_size(G, f)
    return f[G.table[G.inverse]]


class PDResult(NamedTuple):
    verdict: bool
    min_eigenvalue: float


def default_pd_tol(f, size: int) -> float:
    scale = float(np.max(np.abs(np.asarray(f, dtype=complex)))) if len(f) else 0.0
    return 1e-9 * size * max(scale, 1e-300)


def psd_test(M, tol: float, exact: bool = False) -> PDResult:
    """Positive semidefiniteness of a Hermitian matrix, float or exact rational."""
    if exact:
        verdict = _psd_exact([[Fraction(x) for x in row] for row in np.asarray(M, dtype=object)])
        lam = float(np.linalg.eigvalsh(np.asarray(M, dtype=float)).min())
        return PDResult(verdict, lam)
    M = np.asarray(M)
    herm = 0.5 * (M + M.conj().T)
    lam = float(np.linalg.eigvalsh(herm).min())
    return PDResult(lam >= -tol, lam)


def _psd_exact(A: list[list[Fraction]]) -> bool:
    """Symmetric pivoted elimination (LDL^T with diagonal pivoting) over Q."""
    n = len(A)
    if any(A[i][j] != A[j][i] for i in range(n) for j in range(i)):
        return False
    active = list(range(n))
    while active:
        diag = [A[i][i] for i in active]
        if min(diag) < 0:
            return False
        pivots = [i for i in active if A[i][i] > 0]
        if not pivots:
            return all(A[i][j] == 0 for i in active for j in active)
        p = pivots[0]
        active.remove(p)
        d = A[p][p]
        for i in active:
            if A[i][p] == 0:
                continue
            r = A[i][p] / d
            for j in active:
                A[i][j] -= r * A[p][j]
    return True


def is_positive_definite(G: FiniteGroup, f, tol: float | None = None, exact: bool = False) -> PDResult:
    """Test f by PSD-ness of its full n x n Gram matrix.

    Raises AsymmetricFunctionError when the Gram matrix is not Hermitian:
    such an f cannot be positive definite, and is reported separately.
    ``exact=True`` runs a pivoted LDL^T test in rational arithmetic (real
    rational-valued ``f`` only).
    """
    f = np.asarray(f)
    _check_size(G, f)
    if exact:
        values = [Fraction(x) for x in f.tolist()]
        sym = [values[int(G.inverse[x])] == values[x] for x in range(G.order)]
        if not all(sym):
            bad = sym.index(False)
            raise AsymmetricFunctionError(f"f({bad}) != f({bad}^-1)")
        return psd_test(np.array(values, dtype=object)[G.table[G.inverse]], 0.0, exact=True)
    if tol is None:
        tol = default_pd_tol(f, G.order)
    asym = np.abs(f - np.conj(f[G.inverse]))
    if asym.max(initial=0.0) > max(tol, 1e-12 * np.abs(f).max(initial=0.0)):
        bad = int(np.argmax(asym))
        raise AsymmetricFunctionError(f"f({bad}) != conj(f({bad}^-1)) (deviation {asym[bad]:.3g})")
    return psd_test(gram_matrix(G, f), tol)


def quadratic_form(G: FiniteGroup, f, phi) -> float:
    """Integral of (phi* * phi) f, nonnegative for every phi iff f is positive definite."""
    f, phi = np.asarray(f), np.asarray(phi)
    _check_size(G, f, phi)
    val = integrate(convolve(G, involution(G, phi), phi) * f)
    return float(np.real(val))


class SignParts(NamedTuple):
    positive_part: np.ndarray
    negative_part: np.ndarray
    support_plus: tuple[int, ...]
    support_minus: tuple[int, ...]


def sign_decompose(f) -> SignParts:
    f = np.asarray(f)
    if np.iscomplexobj(f):
        if np.any(np.imag(f) != 0):
            raise ValueError("sign decomposition needs a real-valued function")
        f = np.real(f)
    pos = np.maximum(f, 0)
    neg = np.maximum(-f, 0)
    return SignParts(pos, neg, tuple(np.flatnonzero(f > 0).tolist()), tuple(np.flatnonzero(f < 0).tolist()))
