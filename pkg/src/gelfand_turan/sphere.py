"""Isotropic positive definite functions on S^d and the Turan problem for a spherical cap.

An isotropic function is stored by its expansion psi(t) = sum_n b_n G_n(cos t)
in ultraspherical polynomials normalized to G_n(1) = 1.  Integrals use the
unnormalized surface measure, so constants are reported both absolutely and
as b_0 = value / omega_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import integrate

from .gelfand import NotPositiveDefiniteError
from .lp import LPProblem, LPSolution, solve_lp, verify_certificate

MIN_DEGREE = 8
MIN_GRID = 16


def sphere_area(d: int) -> float:
    """Surface area of S^d, 2 pi^((d+1)/2) / Gamma((d+1)/2)."""
    return 2 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def harmonic_dimension(n: int, d: int) -> int:
    """Dimension of degree-n spherical harmonics on S^d."""
    def comb(a, b):
        return math.comb(a, b) if a >= 0 else 0
    return comb(n + d, d) - comb(n + d - 2, d)


def convolution_factors(d: int, N: int) -> np.ndarray:
    """kappa_n = omega_d / dim_n: G_n * G_m = delta_nm kappa_n G_n under surface-measure convolution."""
    return np.array([sphere_area(d) / harmonic_dimension(n, d) for n in range(N + 1)])


def gegenbauer_values(d: int, N: int, t) -> np.ndarray:
    """Matrix of G_n(cos t_j), n = 0..N, via the three-term recurrence with lambda = (d-1)/2."""
    if d < 1:
        raise ValueError("sphere dimension must be at least 1")
    x = np.cos(np.atleast_1d(np.asarray(t, dtype=float)))
    lam = (d - 1) / 2
    out = np.empty((N + 1, len(x)))
    out[0] = 1.0
    if N >= 1:
        out[1] = x
    for n in range(2, N + 1):
        out[n] = (2 * (n + lam - 1) * x * out[n - 1] - (n - 1) * out[n - 2]) / (n + 2 * lam - 1)
    return out


@dataclass
class IsotropicCoeffs:
    d: int
    N: int
    b: np.ndarray

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=float)
        if self.b.shape != (self.N + 1,):
            raise ValueError(f"expected {self.N + 1} coefficients, got {self.b.shape}")

    def evaluate(self, t) -> np.ndarray:
        return self.b @ gegenbauer_values(self.d, self.N, t)

    def is_schoenberg(self, tol: float = 1e-12) -> bool:
        """Member of the normalized Schoenberg class: b >= 0 and psi(0) = 1."""
        return bool(np.all(self.b >= -tol) and abs(self.b.sum() - 1) <= tol)

    def sphere_integral(self) -> float:
        """int_{S^d} psi(theta(x, y)) dy = omega_d b_0."""
        return sphere_area(self.d) * float(self.b[0])


def cap_volume(d: int, r: float) -> float:
    """Surface measure of a cap of angular radius r on S^d."""
    if not 0 <= r <= math.pi + 1e-15:
        raise ValueError("cap radius must lie in [0, pi]")
    r = min(r, math.pi)
    if d == 1:
        return 2 * r
    val, _ = integrate.quad(lambda t: math.sin(t) ** (d - 1), 0.0, r, epsabs=1e-14, epsrel=1e-13)
    return sphere_area(d - 1) * val


def _gauss_on(a: float, b: float, nodes: int):
    x, w = npleg.leggauss(nodes)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def cap_indicator_coeffs(d: int, N: int, r: float) -> np.ndarray:
    """Ultraspherical coefficients of the zonal indicator 1[t <= r].

    h_n = dim_n omega_{d-1} / omega_d * int_0^r G_n(cos t) sin^(d-1) t dt,
    by Gauss-Legendre quadrature in t.
    """
    nodes = max(4 * N, 64)
    t, w = _gauss_on(0.0, r, nodes)
    G = gegenbauer_values(d, N, t)
    lateral = sphere_area(d - 1)
    moments = G @ (w * np.sin(t) ** (d - 1))
    dims = np.array([harmonic_dimension(n, d) for n in range(N + 1)])
    return dims * lateral / sphere_area(d) * moments


@dataclass
class LowerBound:
    value: float
    witness: IsotropicCoeffs
    tail_mass: float


def turan_lower_bound(d: int, c: float, N: int = 40) -> LowerBound:
    """Normalized autocorrelation of the cap of radius c/2.

    Its support is the cap of radius c and its sphere integral is the cap
    volume, so ``value = cap_volume(d, c/2)`` is attained by an admissible
    function.  The witness holds the first N+1 coefficients; ``tail_mass`` is
    what they miss of psi(0) = 1.
    """
    if not 0 < c <= math.pi:
        raise ValueError("cap parameter must lie in (0, pi]")
    vol = cap_volume(d, c / 2)
    h = cap_indicator_coeffs(d, N, c / 2)
    b = convolution_factors(d, N) * h ** 2 / vol
    return LowerBound(vol, IsotropicCoeffs(d, N, b), float(1.0 - b.sum()))


@dataclass
class TuranSphereInstance:
    d: int
    c: float
    N: int = 40
    M: int = 64
    tol: float = 1e-9

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not 0 < self.c <= math.pi:
            raise ValueError("c must lie in (0, pi]")
        if self.N < MIN_DEGREE:
            raise ValueError(f"truncation degree must be at least {MIN_DEGREE}")
        if self.M < MIN_GRID:
            raise ValueError(f"grid size must be at least {MIN_GRID}")

    def grid(self) -> np.ndarray:
        """Chebyshev-Lobatto points on [c, pi]; M intervals, nested under M -> 2M."""
        j = np.arange(self.M + 1)
        t = 0.5 * (self.c + math.pi) - 0.5 * (math.pi - self.c) * np.cos(j * math.pi / self.M)
        t[0], t[-1] = self.c, math.pi
        return np.unique(t)


@dataclass
class SphereBounds:
    lower: float
    upper: float
    lower_witness: IsotropicCoeffs
    upper_solution: LPSolution = field(repr=False)
    upper_coeffs: np.ndarray = field(repr=False, default=None)
    tail_mass: float = 0.0
    omega_d: float = 0.0
    extrapolated: bool = False

    @property
    def gap(self) -> float:
        return self.upper - self.lower

    @property
    def b0_upper(self) -> float:
        return self.upper / self.omega_d

    @property
    def b0_lower(self) -> float:
        return self.lower / self.omega_d


def turan_upper_lp(inst: TuranSphereInstance) -> LPProblem:
    """Relaxation with explicit tail mass r.

    Variables b_0..b_N, r >= 0 with sum b + r = 1 and |sum_n b_n G_n(cos t)| <= r
    on the grid; every discarded term is bounded by its own mass, so the
    optimum of b_0 bounds the true constant from above.
    """
    N = inst.N
    G = gegenbauer_values(inst.d, N, inst.grid()).T  # rows: grid points
    k = len(G)
    ones = np.ones((k, 1))
    A_le = np.vstack([np.hstack([G, -ones]), np.hstack([-G, -ones])])
    c = np.zeros(N + 2)
    c[0] = 1.0
    return LPProblem(c=c, A_eq=np.ones((1, N + 2)), b_eq=[1.0], A_le=A_le, b_le=np.zeros(2 * k))


def _dual_form(p: LPProblem) -> LPProblem:
    """min y_eq . b_eq + y_le . b_le  s.t.  A^T y >= c, y_le >= 0, written as a maximization.

    The free equality multiplier is split as u+ - u-.  The dual has one row per
    primal variable, far fewer than the grid constraints, which keeps Bland's
    rule short on this heavily degenerate problem.
    """
    A = np.hstack([p.A_eq.T, -p.A_eq.T, p.A_le.T])
    obj = -np.concatenate([p.b_eq, -p.b_eq, p.b_le])
    return LPProblem(c=obj, A_le=-A, b_le=-p.c)


def _solve_via_dual(p: LPProblem, tol: float) -> LPSolution:
    """Solve ``p`` through its dual and return an LPSolution for ``p`` itself."""
    q = _dual_form(p)
    ds = solve_lp(q, "float")
    if ds.status != "optimal":
        raise RuntimeError(f"sphere dual LP ended with status {ds.status}")
    k = len(p.b_eq)
    y = np.asarray(ds.x, dtype=float)
    x = np.maximum(np.asarray(ds.dual_le, dtype=float), 0.0)
    sol = LPSolution("optimal", x=x, dual_eq=y[:k] - y[k:2 * k], dual_le=y[2 * k:],
                     objective_value=float(p.c @ x), mode="float", iterations=ds.iterations)
    if not verify_certificate(p, sol, tol):
        raise RuntimeError("sphere LP certificate failed verification")
    return sol


def solve_turan_sphere(inst: TuranSphereInstance) -> SphereBounds:
    problem = turan_upper_lp(inst)
    sol = _solve_via_dual(problem, inst.tol)
    omega = sphere_area(inst.d)
    low = turan_lower_bound(inst.d, inst.c, inst.N)
    b = np.asarray(sol.x, dtype=float)
    return SphereBounds(
        lower=low.value,
        upper=omega * float(b[0]),
        lower_witness=low.witness,
        upper_solution=sol,
        upper_coeffs=b[:-1],
        tail_mass=float(b[-1]),
        omega_d=omega,
        extrapolated=inst.d < 2,
    )


def _same_shape(a: IsotropicCoeffs, b: IsotropicCoeffs) -> None:
    if a.d != b.d or a.N != b.N:
        raise ValueError("isotropic coefficients must share d and N")


def isotropic_convolve(a: IsotropicCoeffs, b: IsotropicCoeffs) -> IsotropicCoeffs:
    """Coefficients of int_{S^d} psi_a(theta(x, z)) psi_b(theta(z, y)) dz."""
    _same_shape(a, b)
    return IsotropicCoeffs(a.d, a.N, convolution_factors(a.d, a.N) * a.b * b.b)


def quadrature_convolve(a: IsotropicCoeffs, b: IsotropicCoeffs, t_grid) -> np.ndarray:
    """Direct quadrature of the S^2 convolution at angular separations ``t_grid``.

    z is parametrized by its polar angle from x (Gauss-Legendre in cos) and
    azimuth (trapezoid, exact for the trigonometric polynomials involved).
    Legendre values come from numpy's own series evaluation.
    """
    _same_shape(a, b)
    if a.d != 2:
        raise ValueError("the quadrature oracle covers d = 2 only")
    N = a.N
    u, wu = npleg.leggauss(N + 2)
    nb = 2 * N + 4
    beta = 2 * math.pi * np.arange(nb) / nb
    out = []
    for t in np.atleast_1d(t_grid):
        cosz = u[:, None] * math.cos(t) + np.sqrt(1 - u[:, None] ** 2) * math.sin(t) * np.cos(beta)[None, :]
        inner = npleg.legval(np.clip(cosz, -1, 1), b.b).mean(axis=1) * 2 * math.pi
        out.append(float(np.sum(wu * npleg.legval(u, a.b) * inner)))
    return np.array(out)


def sphere_convolution_root(a: IsotropicCoeffs, tol: float = 1e-12) -> IsotropicCoeffs:
    """Isotropic g with g * g = a: root_n = sqrt(a_n / kappa_n)."""
    neg = np.flatnonzero(a.b < -tol)
    if len(neg):
        i = int(neg[0])
        raise NotPositiveDefiniteError(i, float(a.b[i]))
    kappa = convolution_factors(a.d, a.N)
    return IsotropicCoeffs(a.d, a.N, np.sqrt(np.maximum(a.b, 0.0) / kappa))
