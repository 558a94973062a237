"""Command-line front end.  Every command runs in-process and is deterministic given its inputs and seed.

Exit codes: 0 when every internal cross-check passed, 1 when a check failed
or the input was refused, 2 for malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .delsarte import brute_force_delsarte, make_instance, solve_delsarte
from .gelfand import (
    BiInvariantFunction,
    NotPositiveDefiniteError,
    convolution_root,
    double_cosets,
    is_gelfand_pair,
    spherical_functions,
)
from .groups import GroupError, as_subgroup
from .homspace import coset_space, lift_J
from .sphere import (
    IsotropicCoeffs,
    TuranSphereInstance,
    isotropic_convolve,
    solve_turan_sphere,
    sphere_area,
    sphere_convolution_root,
)

DEFAULT_TOL = 1e-9


class InputError(ValueError):
    pass


def _header(args, **extra) -> dict:
    conv = dict(io.CONVENTIONS)
    conv.update(extra.pop("conventions", {}))
    out = {"command": args.command, "seed": args.seed, "mode": args.mode or "auto", "tol": args.tol, "conventions": conv}
    out.update(extra)
    return out


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _finish(args, report: dict, ok: bool) -> int:
    report["ok"] = bool(ok)
    text = io.dumps(report)
    _emit(args, f"{args.command}.json", text)
    sys.stdout.write(text)
    return 0 if ok else 1


def _elements(text: str) -> list[int]:
    if text.endswith(".json"):
        return io.subset_from_json(io.read_json(text))
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"cannot parse element list {text!r}") from None


# ---------------------------------------------------------------------------


def cmd_group_inspect(args) -> int:
    G = io.load_group(args.group)
    n = G.order
    inv_ok = bool(np.all(G.table[np.arange(n), G.inverse] == 0))
    report = _header(
        args,
        name=G.name,
        order=n,
        abelian=G.is_abelian(),
        center=G.center(),
        element_orders=[G.element_order(a) for a in range(n)],
        invariants={"latin_square": True, "identity_at_0": True, "associative": True, "inverses": inv_ok},
    )
    return _finish(args, report, inv_ok)


def cmd_gelfand(args) -> int:
    G = io.load_group(args.group)
    K = as_subgroup(G, _elements(args.K))
    P = double_cosets(G, K)
    gelfand = is_gelfand_pair(G, K, P)
    report = _header(
        args,
        group=G.name,
        order=G.order,
        subgroup=list(K.elements),
        double_cosets=[list(c) for c in P.classes],
        s=P.n_classes,
        gelfand=gelfand,
    )
    ok = True
    if gelfand:
        T = spherical_functions(G, K, seed=args.seed, partition=P)
        fe, orth = T.functional_equation_residual(), T.orthogonality_residual()
        report["spherical_table"] = T.export()
        report["residuals"] = {"functional_equation": fe, "orthogonality": orth}
        ok = fe <= args.tol and orth <= args.tol
        _emit(args, "spherical_table.json", io.dumps(T.export()))
    return _finish(args, report, ok)


def cmd_delsarte(args) -> int:
    data = io.load_instance_file(args.instance)
    G, K = data["group"], data["K"]
    inst = make_instance(G, K, data["U"], data["V"], close=args.close)
    sol = solve_delsarte(inst, mode=args.mode or "auto", seed=args.seed)
    body = sol.report()
    checks = dict(body["checks"])
    try:
        oracle = brute_force_delsarte(inst, seed=args.seed)
        checks["brute_force_agrees"] = abs(oracle - sol.value) <= 1e-10
        body["brute_force_value"] = oracle
    except ValueError:
        body["brute_force_value"] = None
    body["checks"] = checks
    report = _header(
        args,
        group=G.name,
        order=G.order,
        subgroup=list(K.elements),
        U=list(inst.U.members),
        V=list(inst.V.members),
        solution=body,
    )
    P = sol.extremal.partition
    _emit(args, "extremal.csv", io.extremal_csv(P.classes, sol.extremal.coeffs, sol.exact_extremal))
    space = coset_space(G, K)
    kern = lift_J(sol.extremal.expand(), space, tol=1e-9)
    _emit(args, "kernel.csv", io.kernel_csv(kern.values, G.name, K))
    return _finish(args, report, all(checks.values()))


def cmd_sphere_turan(args) -> int:
    cs = sorted(io.parse_angle(x) for x in args.c.split(","))
    rows, witnesses, ok = [], {}, True
    for c in cs:
        b = solve_turan_sphere(TuranSphereInstance(args.d, c, N=args.N, M=args.M, tol=args.tol))
        rows.append({"c": c, "d": args.d, "N": args.N, "M": args.M, "lower": b.lower, "upper": b.upper,
                     "gap": b.gap, "b0_lower": b.b0_lower, "b0_upper": b.b0_upper})
        ok &= -args.tol <= b.lower <= b.upper + args.tol <= b.omega_d + 2 * args.tol
        key = f"{c!r}"
        witnesses[key] = {"lower_witness": b.lower_witness.b, "upper_coeffs": b.upper_coeffs,
                          "tail_mass": b.tail_mass}
        t = np.linspace(0.0, np.pi, args.plot_points)
        _emit(args, f"psi_lower_c{len(rows) - 1}.csv", io.plot_data_csv(t, b.lower_witness.evaluate(t)))
    ups = [r["upper"] for r in rows]
    lows = [r["lower"] for r in rows]
    monotone = all(a <= b + args.tol for a, b in zip(ups, ups[1:])) and all(a < b for a, b in zip(lows, lows[1:]))
    ok &= monotone
    _emit(args, "sphere_bounds.csv", io.sphere_csv(rows))
    _emit(args, "witnesses.json", io.dumps(witnesses))
    report = _header(args, conventions={"omega_d": sphere_area(args.d)}, d=args.d, N=args.N, M=args.M,
                     rows=rows, monotone=monotone)
    return _finish(args, report, ok)


def cmd_conv_root(args) -> int:
    data = io.read_json(args.input)
    if "coefficients" in data:
        a = IsotropicCoeffs(int(data["d"]), len(data["coefficients"]) - 1, data["coefficients"])
        try:
            root = sphere_convolution_root(a, tol=args.tol)
        except NotPositiveDefiniteError as e:
            return _refuse(args, e)
        residual = float(np.abs(isotropic_convolve(root, root).b - a.b).max())
        report = _header(args, conventions={"omega_d": sphere_area(a.d)}, kind="sphere", d=a.d,
                         root=root.b, residual=residual)
        return _finish(args, report, residual <= 1e-8)
    base = Path(args.input).parent
    G = io.load_group(data["group"], base=base)
    K = io.load_subgroup(G, data["K"], base=base)
    P = double_cosets(G, K)
    if not is_gelfand_pair(G, K, P):
        raise InputError("convolution roots are computed on Gelfand pairs")
    T = spherical_functions(G, K, seed=args.seed, partition=P)
    f = np.asarray(data["function"], dtype=float)
    if f.shape == (G.order,):
        f = BiInvariantFunction.from_function(P, f, tol=1e-12)
    elif f.shape == (P.n_classes,):
        f = BiInvariantFunction(P, f)
    else:
        raise InputError(f"function needs {G.order} element values or {P.n_classes} class values")
    try:
        r = convolution_root(f, T)
    except NotPositiveDefiniteError as e:
        return _refuse(args, e)
    report = _header(args, kind="group", group=G.name, subgroup=list(K.elements),
                     root=r.root.coeffs, clamped=list(r.clamped), residual=r.residual)
    return _finish(args, report, r.residual < 1e-9)


def _refuse(args, e: NotPositiveDefiniteError) -> int:
    sys.stderr.write(f"refused: input is not positive definite; coefficient {e.index} = {e.value!r}\n")
    report = _header(args, refused=True, offending_index=e.index, offending_value=e.value)
    return _finish(args, report, False)


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--mode", choices=["float", "rational"], default=None,
                        help="LP arithmetic; by default rational when the spherical data are rational")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--out", default=None, help="directory for report files")

    p = argparse.ArgumentParser(prog="gelfand-turan", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group-inspect", parents=[common], help="validate and summarize a group")
    g.add_argument("group", help="group file or descriptor such as dihedral(4)")
    g.set_defaults(func=cmd_group_inspect)

    g = sub.add_parser("gelfand", parents=[common], help="double cosets, Gelfand test, spherical table")
    g.add_argument("group")
    g.add_argument("--K", required=True, help="comma-separated elements or a subset file")
    g.set_defaults(func=cmd_gelfand)

    g = sub.add_parser("delsarte", parents=[common], help="solve a Delsarte instance file")
    g.add_argument("instance")
    g.add_argument("--close", action="store_true", help="close U and V to symmetric bi-invariant sets")
    g.set_defaults(func=cmd_delsarte)

    g = sub.add_parser("sphere-turan", parents=[common], help="bounds for the spherical cap problem")
    g.add_argument("--d", type=int, default=2)
    g.add_argument("--c", default="pi", help="comma-separated angles, e.g. pi/4,pi/2,pi")
    g.add_argument("--N", type=int, default=40)
    g.add_argument("--M", type=int, default=64)
    g.add_argument("--plot-points", type=int, default=129)
    g.set_defaults(func=cmd_sphere_turan)

    g = sub.add_parser("conv-root", parents=[common], help="convolution root of a positive definite input")
    g.add_argument("input", help="JSON with group/K/function or d/coefficients")
    g.set_defaults(func=cmd_conv_root)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (GroupError, InputError, ValueError, KeyError, OSError) as e:
        sys.stderr.write(f"error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
