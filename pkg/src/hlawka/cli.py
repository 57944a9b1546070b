"""Command-line workbench: `hlawka GROUP COMMAND [options]`.

Exit codes: 0 success, 1 computational refusal (caps, failed search or check), 2 usage.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import cyclotomic as cyc
from . import effective as eff
from . import ensemble as ens
from . import quaternion as qt
from . import selftest
from .config import CapExceeded
from .functions import parse_function
from .galois import FreeMatCode, LinearCode, random_function
from .lattice import IntLattice, count_points, density_report, shortest_vector, theta_series
from .reduction import Reduction, kernel_lattice, lift_code, natural_reduction

VERSION = f"hlawka {__version__}"


class UsageError(Exception):
    pass


PRESETS = {
    "a2": ((2, -1), (-1, 2)),
    "d4": ((2, 0, 0, -1), (0, 2, 0, 1), (0, 0, 2, 1), (-1, 1, 1, 2)),
}


def _load_json(path: str):
    return json.loads(Path(path).read_text())


def load_lattice(args) -> IntLattice:
    if getattr(args, "gram", None):
        obj = _load_json(args.gram)
        if isinstance(obj, list):
            return IntLattice(obj)
        return IntLattice.from_json(obj)
    preset = getattr(args, "preset", None)
    if not preset:
        raise UsageError("give --gram FILE or --preset NAME")
    kind, *rest = preset.split(":")
    if kind in PRESETS:
        return IntLattice(PRESETS[kind])
    if kind == "zn":
        return IntLattice.identity(int(rest[0]))
    if kind == "craig":
        return cyc.craig_lattice(int(rest[0]), int(rest[1]))
    raise UsageError(f"unknown preset {preset!r}")


def load_reduction(args) -> Reduction:
    if getattr(args, "reduction", None):
        return Reduction.from_json(_load_json(args.reduction))
    if args.p is None:
        raise UsageError("give --reduction FILE or a lattice with --p")
    return natural_reduction(load_lattice(args), args.p)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing " + ", ".join("--" + n.replace("_", "-") for n in missing))


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


# lattice


def cmd_lattice_svp(args):
    lat = load_lattice(args)
    pt, l1sq = shortest_vector(lat)
    return {"lambda1_sq": l1sq, "vector": list(pt.coords), "hermite": math.sqrt(float(l1sq)) / lat.volume ** (1 / lat.m)}, 0


def cmd_lattice_theta(args):
    _require(args, "tau")
    return {"tau": args.tau, "theta": theta_series(load_lattice(args), args.tau)}, 0


def cmd_lattice_density(args):
    return density_report(load_lattice(args), args.successive).as_dict(), 0


def cmd_lattice_count(args):
    _require(args, "r")
    lat = load_lattice(args)
    return {"r": args.r, "primitive": args.primitive, "count": count_points(lat, args.r, args.primitive)}, 0


# reduce


def cmd_reduce_natural(args):
    _require(args, "p")
    return natural_reduction(load_lattice(args), args.p).to_json(), 0


def cmd_reduce_lift(args):
    _require(args, "code")
    red = load_reduction(args)
    code = LinearCode.from_json(_load_json(args.code))
    lat = lift_code(red, code)
    _, l1sq = shortest_vector(lat)
    out = lat.to_json()
    out.update({"volume": lat.volume, "lambda1_sq": l1sq})
    return out, 0


def cmd_reduce_kernel(args):
    red = load_reduction(args)
    ker, cert = kernel_lattice(red, args.c, args.alpha, args.k)
    out = cert.as_dict()
    out["volume"] = ker.volume
    return out, 0 if cert.theorem_ok in (None, True) else 1


# cyclo


def cmd_cyclo_craig(args):
    _require(args, "q", "l")
    lat = cyc.craig_lattice(args.q, args.l)
    out = {"q": args.q, "l": args.l, "gram": [list(r) for r in lat.gram], "scale": lat.scale, "volume": lat.volume}
    if args.report:
        out.update(density_report(lat).as_dict())
        out["bounds"] = eff.craig_bounds(args.q, args.l)
    return out, 0


def cmd_cyclo_split(args):
    _require(args, "q")
    return [{"p": p, "g": g} for p, g in cyc.split_primes(args.q, args.count, args.start)], 0


def cmd_cyclo_ideal(args):
    _require(args, "q", "p")
    g = args.g if args.g is not None else cyc.root_of_order(args.q, args.p)
    red = cyc.ideal_reduction(args.q, args.t, args.p, g)
    ker, cert = kernel_lattice(red)
    n = cyc.CycField(args.q).n
    bound = 4 * math.sqrt(args.p) if args.t == 1 else None
    count, closed = cyc.minimal_vector_orbits(ker, args.q)
    out = cert.as_dict()
    out.update({"g": g, "volume": ker.volume, "n": n, "min_vectors": count, "closed_under_roots": closed})
    if bound is not None:
        out["lambda1_sq_vs_4sqrt_p"] = float(cert.lambda1_sq) >= bound
    return out, 0


def cmd_cyclo_rogers(args):
    _require(args, "q", "p", "seed")
    primes = [int(x) for x in str(args.p).split(",")]
    res = cyc.rogers_density_search(args.q, args.t, primes, args.k, args.trials, args.seed, args.eps)
    rows = [dict(r, lambda_K_sq=";".join(f"{v:.12g}" for v in r["lambda_K_sq"])) for r in res.rows]
    return rows, 0 if res.found else 1


# quat


def cmd_quat_iso(args):
    _require(args, "p")
    iso = qt.hurwitz_iso(args.p)
    ring = iso.ring
    one, i, j, ij = iso.images
    neg = tuple((-x) % args.p for x in one)
    rel = {
        "i2": ring.mul(i, i) == neg,
        "j2": ring.mul(j, j) == neg,
        "anticommute": ring.mul(i, j) == tuple((-x) % args.p for x in ring.mul(j, i)),
        "det_nrd_units": all(ring.det(iso(u)) == int(u.nrd) % args.p for u in qt.hurwitz_units()),
    }
    out = {"p": args.p, "a": iso.a, "b": iso.b, "phi_1": one, "phi_i": i, "phi_j": j, "phi_ij": ij, "relations": rel}
    return out, 0 if all(rel.values()) else 1


def cmd_quat_lemma1(args):
    _require(args, "p")
    rep = qt.noninvertible_norm_check(args.p, args.bound)
    return rep, 0 if rep["pass"] else 1


def cmd_quat_balanced(args):
    _require(args, "p", "m", "k", "seed")
    rep = qt.balanced_check(args.p, args.m, args.k, args.seed, args.random)
    return rep, 0 if rep["balanced"] and rep["bound_ok"] else 1


def cmd_quat_lift(args):
    _require(args, "p", "m", "code")
    red = qt.hurwitz_reduction(args.p, args.m) if args.order == "hurwitz" else qt.lipschitz_reduction(args.p, args.m)
    code = FreeMatCode.from_json(_load_json(args.code))
    lat = qt.lift_matrix_code(red, code)
    _, l1sq = shortest_vector(lat)
    out = lat.to_json()
    out.update({"volume": lat.volume, "lambda1_sq": l1sq, "code_size": code.cardinality})
    return out, 0


# ensemble


def load_spec(args) -> ens.EnsembleSpec:
    if args.spec:
        obj = _load_json(args.spec)
        if args.mode:
            obj["mode"] = args.mode
        return ens.EnsembleSpec.from_json(obj)
    _require(args, "zn", "p", "k")
    red = natural_reduction(IntLattice.identity(args.zn), args.p)
    return ens.EnsembleSpec.parse_mode(red, args.k, args.V, args.mode or "exhaustive")


def cmd_ensemble_loeliger(args):
    _require(args, "p", "n", "k")
    if args.g == "ones":
        g = lambda v: 1  # noqa: E731
    elif args.g.startswith("random"):
        _, _, seed = args.g.partition(":")
        if not seed:
            raise UsageError("random g needs a seed: --g random:SEED")
        g = random_function(args.p, args.n, int(seed), 0, 10)
    else:
        target = tuple(int(x) for x in args.g.split(","))
        g = lambda v: int(tuple(v) == target)  # noqa: E731
    lhs, rhs = ens.loeliger_lhs_rhs(args.p, args.n, args.k, g)
    return {"p": args.p, "n": args.n, "k": args.k, "lhs": lhs, "rhs": rhs, "equal": lhs == rhs}, 0 if lhs == rhs else 1


def _report_row(spec, rep) -> dict:
    d = rep.as_dict()
    d["seed"] = spec.seed
    return d


def cmd_ensemble_avg(args):
    spec = load_spec(args)
    f = parse_function(args.f)
    rep = ens.average_sum_f(spec, f, args.primitive, args.threads)
    return [_report_row(spec, rep)], 0


def cmd_ensemble_theta(args):
    _require(args, "tau")
    spec = load_spec(args)
    rep = ens.theta_average(spec, args.tau, args.threads)
    return [_report_row(spec, rep)], 0


def cmd_ensemble_mh(args):
    spec = load_spec(args)
    res = ens.mh_search(spec, args.eps, args.L)
    return res.as_dict(), 0 if res.found and res.certified else 1


# effective


def cmd_effective_plan(args):
    _require(args, "n")
    kw = dict(nu=args.nu, c1=args.c1, c2=args.c2, eps=args.eps, l=args.l)
    if args.delta is None or args.optimize:
        delta, plan = eff.optimal_rate(args.base, args.n, **kw)
    else:
        plan = eff.effective_plan(args.base, args.n, args.delta, **kw)
    return plan.as_dict(), 0


def cmd_effective_table1(args):
    _require(args, "n")
    ns = [int(float(x)) for x in args.n.split(",")]
    return eff.table1_rows(ns), 0


def cmd_effective_craig(args):
    _require(args, "q", "l")
    return eff.craig_bounds(args.q, args.l, args.verify), 0


def cmd_effective_sandwich(args):
    _require(args, "r")
    return eff.point_sandwich(load_lattice(args), args.r, args.l0), 0


# parser


def _lattice_opts(p):
    p.add_argument("--gram", help="JSON Gram matrix or lattice file")
    p.add_argument("--preset", help="zn:M, a2, d4 or craig:q:l")


def _spec_opts(p):
    p.add_argument("--spec", help="ensemble spec JSON")
    p.add_argument("--zn", type=int, help="use the natural reduction of Z^m")
    p.add_argument("--p", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--V", type=float, default=1.0)
    p.add_argument("--mode", help="exhaustive or mc:TRIALS:SEED")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "table"), default="json")
    common.add_argument("--out", help="write output here instead of stdout")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--selftest", action="store_true", help="run this module's sanity checks")

    parser = argparse.ArgumentParser(prog="hlawka", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=VERSION)
    groups = parser.add_subparsers(dest="group", required=True)

    def add(group, name, fn, help_text):
        sp = group.add_parser(name, parents=[common], help=help_text)
        sp.set_defaults(fn=fn)
        return sp

    g = groups.add_parser("lattice", help="inspect a lattice").add_subparsers(dest="cmd", required=True)
    sp = add(g, "svp", cmd_lattice_svp, "shortest vector")
    _lattice_opts(sp)
    sp = add(g, "theta", cmd_lattice_theta, "theta series")
    _lattice_opts(sp)
    sp.add_argument("--tau", type=float)
    sp = add(g, "density", cmd_lattice_density, "packing density report")
    _lattice_opts(sp)
    sp.add_argument("--successive", type=int)
    sp = add(g, "count", cmd_lattice_count, "points in a ball")
    _lattice_opts(sp)
    sp.add_argument("--r", type=float)
    sp.add_argument("--primitive", action="store_true")

    g = groups.add_parser("reduce", help="reductions and lifts").add_subparsers(dest="cmd", required=True)
    sp = add(g, "natural", cmd_reduce_natural, "natural reduction mod p")
    _lattice_opts(sp)
    sp.add_argument("--p", type=int)
    for name, fn in (("lift", cmd_reduce_lift), ("kernel", cmd_reduce_kernel)):
        sp = add(g, name, fn, f"{name} lattice")
        _lattice_opts(sp)
        sp.add_argument("--reduction", help="reduction JSON")
        sp.add_argument("--p", type=int)
        if name == "lift":
            sp.add_argument("--code", help="code JSON")
        else:
            sp.add_argument("--c", type=float, default=1.0)
            sp.add_argument("--alpha", type=float)
            sp.add_argument("--k", type=int)

    g = groups.add_parser("cyclo", help="cyclotomic constructions").add_subparsers(dest="cmd", required=True)
    sp = add(g, "craig", cmd_cyclo_craig, "Craig lattice")
    sp.add_argument("--q", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--report", action="store_true")
    sp = add(g, "split", cmd_cyclo_split, "split primes")
    sp.add_argument("--q", type=int)
    sp.add_argument("--count", type=int, default=3)
    sp.add_argument("--start", type=int, default=2)
    sp = add(g, "ideal", cmd_cyclo_ideal, "split-prime ideal kernel")
    sp.add_argument("--q", type=int)
    sp.add_argument("--t", type=int, default=1)
    sp.add_argument("--p", type=int)
    sp.add_argument("--g", type=int)
    sp = add(g, "rogers", cmd_cyclo_rogers, "Rogers-function density search")
    sp.add_argument("--q", type=int)
    sp.add_argument("--t", type=int, default=2)
    sp.add_argument("--p", help="prime or comma-separated primes")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--eps", type=float, default=0.5)

    g = groups.add_parser("quat", help="quaternion orders").add_subparsers(dest="cmd", required=True)
    sp = add(g, "iso", cmd_quat_iso, "explicit Hurwitz isomorphism")
    sp.add_argument("--p", type=int)
    sp = add(g, "lemma1", cmd_quat_lemma1, "non-invertible images have norm divisible by p")
    sp.add_argument("--p", type=int)
    sp.add_argument("--bound", type=int)
    sp = add(g, "balanced", cmd_quat_balanced, "balancedness of free codes")
    sp.add_argument("--p", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--random", type=int, default=10, help="number of random g")
    sp = add(g, "lift", cmd_quat_lift, "lift a matrix code")
    sp.add_argument("--p", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--code", help="free module JSON")
    sp.add_argument("--order", choices=("hurwitz", "lipschitz"), default="hurwitz")

    g = groups.add_parser("ensemble", help="ensemble averages").add_subparsers(dest="cmd", required=True)
    sp = add(g, "loeliger", cmd_ensemble_loeliger, "balancedness identity")
    sp.add_argument("--p", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--g", default="ones", help="ones, random:SEED or a vector a,b,...")
    sp = add(g, "avg", cmd_ensemble_avg, "average of a test function sum")
    _spec_opts(sp)
    sp.add_argument("--f", default="ball:1.0", help="ball:R, gauss:TAU or rogers:R:T:N")
    sp.add_argument("--primitive", action="store_true")
    sp = add(g, "theta", cmd_ensemble_theta, "average theta series")
    _spec_opts(sp)
    sp.add_argument("--tau", type=float)
    sp = add(g, "mh", cmd_ensemble_mh, "Minkowski-Hlawka search")
    _spec_opts(sp)
    sp.add_argument("--eps", type=float, default=0.3)
    sp.add_argument("--L", type=float, default=2)

    g = groups.add_parser("effective", help="alphabet-size planning").add_subparsers(dest="cmd", required=True)
    sp = add(g, "plan", cmd_effective_plan, "alphabet-size plan")
    sp.add_argument("--base", choices=("zn", "craig"), default="zn")
    sp.add_argument("--n", type=int)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--optimize", action="store_true", help="grid-search the rate in [0.2, 0.5]")
    sp.add_argument("--nu", type=float, default=0.01)
    sp.add_argument("--c1", type=float, default=1.0)
    sp.add_argument("--c2", type=float, default=1.0)
    sp.add_argument("--eps", type=float, default=0.3)
    sp.add_argument("--l", type=int)
    sp = add(g, "table1", cmd_effective_table1, "comparison table rows")
    sp.add_argument("--n", help="comma-separated dimensions, e.g. 1e3,1e4")
    sp = add(g, "craig", cmd_effective_craig, "Craig lattice bounds")
    sp.add_argument("--q", type=int)
    sp.add_argument("--l", type=int)
    sp.add_argument("--verify", action="store_true")
    sp = add(g, "sandwich", cmd_effective_sandwich, "point-count sandwich")
    _lattice_opts(sp)
    sp.add_argument("--r", type=float)
    sp.add_argument("--l0", type=float)
    return parser


def _seed_of(args):
    if args.seed is not None:
        return args.seed
    mode = getattr(args, "mode", None)
    if mode and mode.startswith("mc:"):
        return int(mode.split(":")[2])
    return None


def render(result, args, status: str = "ok") -> str:
    header = {"version": VERSION, "command": f"{args.group} {args.cmd}", "seed": _seed_of(args), "status": status}
    result = _jsonable(result)
    if args.format == "json":
        return json.dumps({**header, "result": result}, indent=2) + "\n"
    rows = result if isinstance(result, list) else [result]
    rows = [{k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()} for r in rows]
    buf = io.StringIO()
    buf.write("# " + " ".join(f"{k}={v}" for k, v in header.items()) + "\n")
    if args.format == "csv":
        keys = list(dict.fromkeys(k for r in rows for k in r))
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    else:
        for r in rows:
            width = max(len(k) for k in r)
            for k, v in r.items():
                buf.write(f"{k.ljust(width)}  {v}\n")
            buf.write("\n")
    return buf.getvalue()


def _emit(text: str, args) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.selftest:
        checks = selftest.run(args.group)
        code = 0 if all(c["ok"] for c in checks) else 1
        _emit(render(checks, args, "ok" if code == 0 else "selftest-failed"), args)
        return code
    try:
        result, code = args.fn(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(json.dumps({"error": "usage", "message": str(exc)}), file=sys.stderr)
        return 2
    except CapExceeded as exc:
        print(json.dumps(_jsonable({"error": "cap-exceeded", "message": str(exc), "estimate": exc.estimate})), file=sys.stderr)
        return 1
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(json.dumps({"error": "invalid-parameters", "message": str(exc)}), file=sys.stderr)
        return 2
    _emit(render(result, args, "ok" if code == 0 else "refused"), args)
    return code


if __name__ == "__main__":
    sys.exit(main())
