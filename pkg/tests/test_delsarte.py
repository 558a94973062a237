from fractions import Fraction

import numpy as np
import pytest
from support import pair, pair_names

from gelfand_turan import (
    InstanceError,
    NotGelfandPairError,
    as_subgroup,
    brute_force_delsarte,
    bochner_check,
    cyclic,
    feasible_autocorrelation,
    make_instance,
    restrict_extend_roundtrip,
    solve_delsarte,
    symmetric,
    trivial_subgroup,
    verify_candidate,
    whole_group,
)
from gelfand_turan.delsarte import greedy_square_root_set


def random_instance(name, rng):
    """U, V as unions of inverse-closed double cosets; U always contains K."""
    G, K, P, T = pair(name)
    reps = [j for j in range(P.n_classes) if j <= P.inverse_class[j]]

    def pick(p, base=()):
        chosen = set(base)
        for j in reps:
            if rng.random() < p:
                chosen |= {j, int(P.inverse_class[j])}
        return sorted(x for j in chosen for x in P.classes[j])

    U = pick(rng.uniform(0.1, 0.7), base=(0,))
    r = rng.random()
    V = "ALL" if r < 0.15 else "NONE" if r < 0.3 else pick(rng.uniform(0.0, 0.8))
    return make_instance(G, K, U, V)


SMALL_PAIRS = [n for n in pair_names() if pair(n)[3].size and len(pair(n)[3].conjugation_orbits()) <= 6]


def test_make_instance_examples():
    G = cyclic(4)
    e = trivial_subgroup(G)
    make_instance(G, e, [0], [0])
    inst = make_instance(G, e, [0, 1, 3], "U")
    assert inst.gelfand and inst.V.members == (0, 1, 3)
    with pytest.raises(InstanceError):
        make_instance(G, e, [0, 1])
    with pytest.raises(InstanceError):
        make_instance(G, e, [1, 3])
    closed = make_instance(G, e, [0, 1], close=True)
    assert closed.U.members == (0, 1, 3)
    S = symmetric(3)
    K = as_subgroup(S, [i for i, p in enumerate(S.labels) if p[-1] == 2])
    with pytest.raises(InstanceError):
        make_instance(S, K, [0, 1])


def test_feasible_autocorrelation_examples():
    G, K, P, T = pair("S4/S3")
    inst = make_instance(G, K, K.elements, "U")
    f = feasible_autocorrelation(inst)
    assert np.allclose(f.coeffs, [1, 0]) and abs(f.integral() - K.order / G.order) < 1e-12
    inst = make_instance(G, K, range(G.order), "ALL")
    assert np.allclose(feasible_autocorrelation(inst).coeffs, 1)
    C = cyclic(4)
    inst = make_instance(C, trivial_subgroup(C), [0, 1, 3])
    assert greedy_square_root_set(inst) == (0,)
    assert abs(feasible_autocorrelation(inst).integral() - 0.25) < 1e-12
    with pytest.raises(InstanceError):
        feasible_autocorrelation(inst, W=[0, 1, 3])


def test_solve_examples_exact():
    for n in (3, 4, 6):
        G = cyclic(n)
        e = trivial_subgroup(G)
        s = solve_delsarte(make_instance(G, e, range(n), "ALL"), mode="rational")
        assert s.exact_value == 1 and all(x == 1 for x in s.exact_extremal)
        s = solve_delsarte(make_instance(G, e, [0], "NONE"), mode="rational")
        assert s.exact_value == Fraction(1, n)
    G = cyclic(4)
    s = solve_delsarte(make_instance(G, trivial_subgroup(G), [0, 1, 3], "U"), mode="rational")
    assert s.exact_value == Fraction(1, 2)
    assert s.exact_extremal == [1, Fraction(1, 2), 0, Fraction(1, 2)]
    assert s.ok


def test_solution_invariants_and_report():
    G, K, P, T = pair("S4/S3")
    s = solve_delsarte(make_instance(G, K, K.elements, "ALL"))
    assert s.mode == "rational" and s.ok
    assert abs(s.value - 0.25) < 1e-12
    rep = s.report()
    assert set(rep) >= {"value", "extremal", "dual_certificate", "kernel_value", "checks"}
    assert all(isinstance(v, bool) for v in s.checks.values())


def test_non_gelfand_refused():
    G = symmetric(3)
    inst = make_instance(G, trivial_subgroup(G), [0], "NONE")
    with pytest.raises(NotGelfandPairError):
        solve_delsarte(inst)
    out = verify_candidate(inst, np.eye(6)[0])
    assert out["positive_definite"] and out["integral"] == pytest.approx(1 / 6)


@pytest.mark.parametrize("name", SMALL_PAIRS)
def test_oracle_agreement(name):
    rng = np.random.default_rng(hash(name) % 2**32)
    for _ in range(15):
        inst = random_instance(name, rng)
        s = solve_delsarte(inst)
        assert s.ok, s.checks
        assert abs(s.value - brute_force_delsarte(inst)) < 1e-10
        assert abs(s.kernel_value - s.value) < 1e-10
        low = feasible_autocorrelation(inst).integral()
        assert low <= s.value + 1e-12 and s.value <= 1 + 1e-12
        f = s.extremal
        assert bochner_check(f, pair(name)[3])


def test_empty_V_instances():
    for n in (5, 6, 8):
        G = cyclic(n)
        inst = make_instance(G, trivial_subgroup(G), [0, 1, n - 1], "NONE")
        s = solve_delsarte(inst)
        assert abs(s.value - brute_force_delsarte(inst)) < 1e-10


def test_monotone_in_U():
    G, K, P, T = pair("D8/refl")
    V = "NONE"
    prev = 0.0
    U = list(K.elements)
    for j in range(1, P.n_classes):
        U = sorted(set(U) | set(P.classes[j]) | set(P.classes[P.inverse_class[j]]))
        v = solve_delsarte(make_instance(G, K, U, V)).value
        assert v >= prev - 1e-12
        prev = v


def test_float_and_rational_agree():
    G, K, P, T = pair("D6/refl")
    rng = np.random.default_rng(3)
    for _ in range(10):
        inst = random_instance("D6/refl", rng)
        a = solve_delsarte(inst, mode="float")
        b = solve_delsarte(inst, mode="rational")
        assert abs(a.value - float(b.exact_value)) < 1e-10


def test_brute_force_dimension_limit():
    G = cyclic(16)
    inst = make_instance(G, trivial_subgroup(G), [0], "NONE")
    with pytest.raises(ValueError):
        brute_force_delsarte(inst)


def test_restrict_extend():
    G = cyclic(8)
    H = as_subgroup(G, [0, 2, 4, 6])
    inst = make_instance(G, trivial_subgroup(G), [0, 2, 6], "ALL")
    r = restrict_extend_roundtrip(inst, H)
    assert r.extension_feasible and r.inequality_holds and r.equality_holds
    assert abs(r.value_H - 0.5) < 1e-12 and abs(r.value_G - 0.25) < 1e-12
    r = restrict_extend_roundtrip(inst, whole_group(G))
    assert abs(r.value_G - r.value_H) < 1e-12
    with pytest.raises(InstanceError):
        restrict_extend_roundtrip(make_instance(G, trivial_subgroup(G), [0, 1, 7]), H)


def test_extension_by_zero_stays_pd():
    from gelfand_turan import autocorrelate, is_positive_definite
    G = cyclic(12)
    H = [0, 3, 6, 9]
    rng = np.random.default_rng(4)
    for _ in range(100):
        h = rng.normal(size=4)
        small = np.real(autocorrelate(cyclic(4), h))
        ext = np.zeros(12)
        ext[H] = small
        assert is_positive_definite(G, ext).verdict
