"""The Delsarte extremal constant for bi-invariant positive definite functions.

For a finite Gelfand pair (G, K) every real positive definite bi-invariant
function is a nonnegative combination of spherical functions, so the
supremum of the integral over the admissible class is a finite linear
program in the spherical coefficients.  Conjugate spherical functions share
one variable, which keeps the function real.

Support conventions (discrete topology, closures are no-ops): an admissible
f has f(e) = 1, f <= 0 off U and f >= 0 off V.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import numpy as np

from .gelfand import (
    BiInvariantFunction,
    DoubleCosetPartition,
    NotGelfandPairError,
    SphericalCoeffs,
    SphericalTable,
    bochner_check,
    double_cosets,
    is_gelfand_pair,
    rational_orbit_functions,
    spherical_functions,
)
from .groups import (
    FiniteGroup,
    GroupSubset,
    Subgroup,
    as_subgroup,
    autocorrelate,
    biinvariant_symmetric_closure,
    is_positive_definite,
    project_K,
    subgroup_as_group,
    validate_subset,
)
from .homspace import base_integral, coset_space, lift_J
from .lp import LPProblem, LPSolution, solve_lp, verify_certificate

VALUE_TOL = 1e-10


class InstanceError(ValueError):
    pass


@dataclass(eq=False)
class DelsarteInstance:
    group: FiniteGroup
    subgroup: Subgroup
    U: GroupSubset
    V: GroupSubset
    gelfand: bool
    partition: DoubleCosetPartition = field(repr=False)

    def classes_outside(self, S: GroupSubset) -> list[int]:
        """Double cosets disjoint from S, one per inverse pair."""
        P = self.partition
        out = []
        for j, cls in enumerate(P.classes):
            if cls[0] not in S and j <= P.inverse_class[j]:
                out.append(j)
        return out


def make_instance(G: FiniteGroup, K: Subgroup, U_raw: Iterable[int], V_raw="U", close: bool = False) -> DelsarteInstance:
    """Validate (or, with ``close=True``, close) U and V into symmetric K-bi-invariant sets.

    ``V_raw`` may be a list of elements, ``"ALL"``, ``"NONE"`` or ``"U"``
    (the Turan case V = U).
    """
    K = as_subgroup(G, K.elements)
    U_raw = [int(x) for x in U_raw]
    if 0 not in U_raw:
        raise InstanceError("U must contain the identity")
    if isinstance(V_raw, str):
        key = V_raw.upper()
        if key == "ALL":
            V_raw = range(G.order)
        elif key == "NONE":
            V_raw = []
        elif key == "U":
            V_raw = U_raw
        else:
            raise InstanceError(f"unknown V value {V_raw!r}")
    elif V_raw is None:
        V_raw = []
    sets = []
    for name, raw in (("U", U_raw), ("V", V_raw)):
        if close:
            S = biinvariant_symmetric_closure(G, K, raw)
        else:
            S = validate_subset(G, K, raw)
            if not S.symmetric:
                raise InstanceError(f"{name} is not symmetric")
            if not S.bi_invariant:
                raise InstanceError(f"{name} is not K-bi-invariant")
        sets.append(S)
    P = double_cosets(G, K)
    return DelsarteInstance(G, K, sets[0], sets[1], is_gelfand_pair(G, K, P), P)


# ---------------------------------------------------------------------------
# feasible witnesses


def greedy_square_root_set(inst: DelsarteInstance) -> tuple[int, ...]:
    """Grow a symmetric W containing e, smallest element first, keeping W W inside U."""
    G = inst.group
    U = set(inst.U.members)
    W = {0}
    for x in range(1, G.order):
        if x in W:
            continue
        trial = W | {x, int(G.inverse[x])}
        arr = np.array(sorted(trial))
        if set(G.table[np.ix_(arr, arr)].ravel().tolist()) <= U:
            W = trial
    return tuple(sorted(W))


def feasible_autocorrelation(inst: DelsarteInstance, W: Iterable[int] | None = None) -> BiInvariantFunction:
    """K-average of 1_W * 1_W, rescaled to f(e) = 1; it lies in the admissible class."""
    G = inst.group
    if W is None:
        W = greedy_square_root_set(inst)
    W = sorted({int(x) for x in W})
    arr = np.array(W)
    if 0 not in W:
        raise InstanceError("W must contain the identity")
    if {int(G.inverse[x]) for x in W} != set(W):
        raise InstanceError("W must be symmetric")
    if not set(G.table[np.ix_(arr, arr)].ravel().tolist()) <= set(inst.U.members):
        raise InstanceError("W W is not contained in U")
    ind = np.zeros(G.order)
    ind[arr] = 1.0
    f = project_K(G, inst.subgroup, autocorrelate(G, ind))
    f = f / f[0]
    return BiInvariantFunction.from_function(inst.partition, f, tol=1e-12)


# ---------------------------------------------------------------------------
# the linear program


@dataclass
class ReducedLP:
    orbits: list[tuple[int, ...]]
    rho: np.ndarray  # rho[o, j]: sum of the spherical functions of orbit o on class j
    exact: bool
    rows: list[tuple[str, int]]  # ("U", j): f(D_j) <= 0; ("V", j): f(D_j) >= 0
    problem: LPProblem


def _orbit_rho_float(T: SphericalTable):
    orbits = T.conjugation_orbits()
    rho = np.array([np.real(sum(np.asarray(T.omega[i]) for i in o)) for o in orbits], dtype=float)
    return orbits, rho


def reduced_lp(inst: DelsarteInstance, T: SphericalTable, exact: bool | None = None) -> ReducedLP:
    """Variables a_o >= 0 per conjugation orbit; f = sum_o a_o rho_o.

    ``exact=None`` picks rational arithmetic when the orbit functions are
    certified rational, floats otherwise.
    """
    rational = None
    if exact is None or exact:
        rational = rational_orbit_functions(T)
        if exact and rational is None:
            raise ValueError("spherical data are not rational; rational mode unavailable")
    if rational is not None:
        orbits, rho_rows = rational
        rho = np.array(rho_rows, dtype=object)
    else:
        orbits, rho = _orbit_rho_float(T)
    k = len(orbits)
    dtype = object if rational is not None else float
    one = Fraction(1) if rational is not None else 1.0
    zero = one * 0
    trivial = next(i for i, o in enumerate(orbits) if T.trivial_index in o)
    c = np.array([one if i == trivial else zero for i in range(k)], dtype=dtype)
    A_eq = np.array([[one * len(o) for o in orbits]], dtype=dtype)
    rows, A_le = [], []
    for j in inst.classes_outside(inst.U):
        rows.append(("U", j))
        A_le.append(rho[:, j])
    for j in inst.classes_outside(inst.V):
        rows.append(("V", j))
        A_le.append(-rho[:, j])
    A_le = np.array(A_le, dtype=dtype).reshape(len(rows), k)
    b_le = np.array([zero] * len(rows), dtype=dtype)
    problem = LPProblem(c=c, A_eq=A_eq, b_eq=np.array([one], dtype=dtype), A_le=A_le, b_le=b_le)
    return ReducedLP(orbits, rho, rational is not None, rows, problem)


@dataclass(eq=False)
class DelsarteSolution:
    value: float
    extremal: BiInvariantFunction
    coeffs: SphericalCoeffs
    dual_certificate: dict
    kernel_value: float
    lp: LPSolution = field(repr=False)
    mode: str = "float"
    exact_value: Fraction | None = None
    exact_extremal: list[Fraction] | None = None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def report(self) -> dict:
        P = self.extremal.partition
        out = {
            "value": float(self.value),
            "mode": self.mode,
            "extremal": {
                "classes": [list(c) for c in P.classes],
                "values": [float(x) for x in self.extremal.coeffs],
            },
            "spherical_coefficients": [float(np.real(x)) for x in self.coeffs.values],
            "dual_certificate": self.dual_certificate,
            "kernel_value": float(self.kernel_value),
            "checks": {k: bool(v) for k, v in self.checks.items()},
        }
        if self.exact_value is not None:
            out["exact_value"] = str(self.exact_value)
            out["extremal"]["exact_values"] = [str(x) for x in self.exact_extremal]
        return out


def _dual_json(lp: ReducedLP, sol: LPSolution) -> dict:
    def enc(x):
        return str(x) if isinstance(x, Fraction) else float(x)
    return {
        "normalization": enc(sol.dual_eq[0]),
        "constraints": [
            {"set": kind, "class": int(j), "multiplier": enc(y)}
            for (kind, j), y in zip(lp.rows, sol.dual_le)
        ],
    }


def solve_delsarte(inst: DelsarteInstance, mode: str = "auto", seed: int = 0,
                   table: SphericalTable | None = None) -> DelsarteSolution:
    """Exact Delsarte constant of a finite Gelfand-pair instance.

    ``mode`` is ``"auto"`` (rational when the spherical data are certified
    rational), ``"rational"`` or ``"float"``.
    """
    if not inst.gelfand:
        raise NotGelfandPairError("optimization needs a Gelfand pair; use verify_candidate for other pairs")
    T = table or spherical_functions(inst.group, inst.subgroup, seed=seed, partition=inst.partition)
    exact = {"auto": None, "rational": True, "float": False}[mode]
    red = reduced_lp(inst, T, exact)
    sol = solve_lp(red.problem, "rational" if red.exact else "float")
    if sol.status != "optimal":
        raise RuntimeError(f"internal error: Delsarte LP reported {sol.status}")
    a = sol.x
    G, P = inst.group, inst.partition
    class_values = a @ red.rho
    value_exact = sol.objective_value if red.exact else None
    f_float = np.array([float(x) for x in class_values])
    extremal = BiInvariantFunction(P, f_float)

    coeff = np.zeros(T.size)
    for o, ao in zip(red.orbits, a):
        for i in o:
            coeff[i] = float(ao) / T.weights[i]
    coeffs = SphericalCoeffs(T, coeff)

    space = coset_space(G, inst.subgroup)
    expanded = P.expand(np.array(list(class_values), dtype=object) if red.exact else f_float)
    kernel_value = base_integral(lift_J(expanded, space))
    integral = (P.sizes * np.array(list(class_values), dtype=object if red.exact else float)).sum() / G.order

    value = float(sol.objective_value)
    scale = max(1.0, float(np.abs(f_float).max()))
    out_U = [j for j, cls in enumerate(P.classes) if cls[0] not in inst.U]
    out_V = [j for j, cls in enumerate(P.classes) if cls[0] not in inst.V]
    checks = {
        "certificate": verify_certificate(red.problem, sol),
        "normalized": abs(f_float[0] - 1.0) <= VALUE_TOL,
        "sign_off_U": all(f_float[j] <= VALUE_TOL * scale for j in out_U),
        "sign_off_V": all(f_float[j] >= -VALUE_TOL * scale for j in out_V),
        "bochner": bochner_check(extremal, T),
        "gram_pd": is_positive_definite(G, extremal.expand()).verdict,
        "integral_matches_value": abs(float(integral) - value) <= VALUE_TOL,
        "kernel_value_matches": abs(float(kernel_value) - value) <= VALUE_TOL,
    }
    if red.exact:
        checks["exact_kernel_value"] = kernel_value == value_exact
        checks["exact_normalized"] = class_values[0] == 1
    checks = {k: bool(v) for k, v in checks.items()}
    return DelsarteSolution(
        value=value,
        extremal=extremal,
        coeffs=coeffs,
        dual_certificate=_dual_json(red, sol),
        kernel_value=float(kernel_value),
        lp=sol,
        mode="rational" if red.exact else "float",
        exact_value=value_exact,
        exact_extremal=list(class_values) if red.exact else None,
        checks=checks,
    )


def brute_force_delsarte(inst: DelsarteInstance, seed: int = 0, table: SphericalTable | None = None,
                         max_dim: int = 6) -> float:
    """Delsarte constant by enumerating every vertex of the LP polytope.

    Shares no code with the simplex solver: each choice of active
    inequalities gives a square system, solved directly; feasible solutions
    are compared by objective.
    """
    if not inst.gelfand:
        raise NotGelfandPairError("brute force needs a Gelfand pair")
    T = table or spherical_functions(inst.group, inst.subgroup, seed=seed, partition=inst.partition)
    orbits, rho = _orbit_rho_float(T)
    k = len(orbits)
    if k > max_dim:
        raise ValueError(f"{k} LP variables exceed the brute-force limit {max_dim}")
    eq = np.array([float(len(o)) for o in orbits])
    trivial = next(i for i, o in enumerate(orbits) if T.trivial_index in o)
    G_rows = [-np.eye(k)[i] for i in range(k)]
    G_rows += [rho[:, j] for j in inst.classes_outside(inst.U)]
    G_rows += [-rho[:, j] for j in inst.classes_outside(inst.V)]
    Gm = np.array(G_rows)
    best = -np.inf
    for active in itertools.combinations(range(len(Gm)), k - 1):
        M = np.vstack([eq[None, :], Gm[list(active)]]) if active else eq[None, :]
        rhs = np.zeros(k)
        rhs[0] = 1.0
        if np.linalg.matrix_rank(M, tol=1e-10) < k:
            continue
        x = np.linalg.solve(M, rhs)
        if np.all(Gm @ x <= 1e-9):
            best = max(best, float(x[trivial]))
    if best == -np.inf:
        raise RuntimeError("no feasible vertex found")
    return best


def verify_candidate(inst: DelsarteInstance, f, tol: float = 1e-9) -> dict:
    """Admissibility checks and integral of a candidate; works for any pair."""
    G = inst.group
    f = np.asarray(f, dtype=float)
    scale = max(1.0, float(np.abs(f).max(initial=0.0)))
    off_U = [x for x in range(G.order) if x not in inst.U]
    off_V = [x for x in range(G.order) if x not in inst.V]
    bi = np.abs(project_K(G, inst.subgroup, f) - f).max() <= tol * scale
    return {
        "bi_invariant": bool(bi),
        "normalized": bool(abs(f[0] - 1) <= tol),
        "sign_off_U": bool(all(f[x] <= tol * scale for x in off_U)),
        "sign_off_V": bool(all(f[x] >= -tol * scale for x in off_V)),
        "positive_definite": is_positive_definite(G, f).verdict,
        "integral": float(f.sum() / G.order),
    }


# ---------------------------------------------------------------------------
# restriction to a subgroup and trivial extension


@dataclass
class RestrictExtendReport:
    value_G: float
    value_H: float
    value_H_in_G_measure: float
    extension_feasible: bool
    extension_value: float
    inequality_holds: bool
    equality_holds: bool


def restrict_extend_roundtrip(inst: DelsarteInstance, H: Subgroup, seed: int = 0) -> RestrictExtendReport:
    """Solve inside H and inside G; extend the H-extremal by zero and check it in G.

    Integrals on H use the mass-1 Haar measure of H, so ``value_H`` is
    rescaled by |H|/|G| before comparing with the G constant.
    """
    G = inst.group
    H = as_subgroup(G, H.elements)
    hs = set(H.elements)
    if not set(inst.subgroup.elements) <= hs:
        raise InstanceError("K must be contained in H")
    if not set(inst.U.members) <= hs:
        raise InstanceError("U must be contained in H")
    Hg, emb = subgroup_as_group(G, H)
    pos = {int(x): i for i, x in enumerate(emb)}
    KH = Subgroup(tuple(sorted(pos[x] for x in inst.subgroup.elements)))
    UH = [pos[x] for x in inst.U.members]
    VH = [pos[x] for x in inst.V.members if x in hs]
    inst_H = make_instance(Hg, KH, UH, VH)
    sol_H = solve_delsarte(inst_H, mode="float", seed=seed)
    sol_G = solve_delsarte(inst, mode="float", seed=seed)
    ext = np.zeros(G.order)
    ext[emb] = sol_H.extremal.expand()
    check = verify_candidate(inst, ext)
    feasible = all(v for k, v in check.items() if k != "integral")
    scaled = sol_H.value * Hg.order / G.order
    return RestrictExtendReport(
        value_G=sol_G.value,
        value_H=sol_H.value,
        value_H_in_G_measure=scaled,
        extension_feasible=feasible,
        extension_value=check["integral"],
        inequality_holds=sol_G.value >= check["integral"] - 1e-9,
        equality_holds=abs(sol_G.value - scaled) <= 1e-9,
    )
