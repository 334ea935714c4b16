"""Command-line driver.

Every subcommand prints a JSON report (sorted keys, two-space indent) and
exits 0 once the verdicts are computed, 1 on bad input and 2 on numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bridgeland as br
from . import charges as ch
from . import lg
from . import minangle as ma
from .chow import CohClass, DivisorClass, chern_character
from .fan import Fan, FanError, load_fan, preset_fan
from .numbers import QComplex, QuadSurd

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2

NUMERICAL_ERRORS = (lg.CriticalPointError, lg.SingularHessian, lg.DivergenceError,
                    np.linalg.LinAlgError, FloatingPointError, OverflowError)


# ---------------------------------------------------------------------------
# parsing


_CLASS = re.compile(r"^\s*(?P<vals>[^@]*?)\s*(?:@\s*(?P<kind>rays|basis)\s*(?:\((?P<labels>[^)]*)\))?)?\s*$")


def parse_class(f: Fan, text: str) -> DivisorClass:
    """"2,-1@basis(h,e)", "1,0,0,1@rays", or bare coefficients (basis or rays by length)."""
    m = _CLASS.match(text)
    if not m or not m.group("vals"):
        raise ValueError(f"cannot parse class {text!r}")
    try:
        vals = [Fraction(v.strip()) for v in m.group("vals").split(",")]
    except ValueError as exc:
        raise ValueError(f"bad coefficient in {text!r}") from exc
    kind = m.group("kind")
    if kind is None:
        if len(vals) == f.n_rays:
            kind = "rays"
        elif f.basis and len(vals) == len(f.basis):
            kind = "basis"
        else:
            raise ValueError(f"{len(vals)} coefficients match neither the {f.n_rays} rays nor the basis")
    if kind == "rays":
        if len(vals) != f.n_rays:
            raise ValueError(f"expected {f.n_rays} ray coefficients, got {len(vals)}")
        return DivisorClass(vals)
    if not f.basis:
        raise ValueError("this fan declares no named basis")
    labels = [s.strip() for s in m.group("labels").split(",")] if m.group("labels") else list(f.basis_labels())
    if len(labels) != len(vals):
        raise ValueError("number of labels and coefficients differ")
    return DivisorClass.from_basis(f, dict(zip(labels, vals)))


def parse_k_range(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", text)
    if not m:
        raise ValueError(f"k range must look like 1..10, got {text!r}")
    lo, hi = int(m.group(1)), int(m.group(2))
    if lo < 1 or hi < lo:
        raise ValueError("empty k range")
    return lo, hi


_VAR = re.compile(r"^(x|y|z|x(\d+))(?:\^(-?\d+))?$")


def parse_laurent(text: str, n: int) -> dict:
    """"2*x*y^-1 + 3" -> {(1, -1): 2, (0, 0): 3}; variables x, y, z or x1..xn."""
    out: dict = {}
    s = text.replace(" ", "").replace("-", "+-").replace("^+-", "^-")
    for term in filter(None, s.split("+")):
        coeff = 1.0
        expo = [0] * n
        sign = -1.0 if term.startswith("-") else 1.0
        term = term.lstrip("-")
        for factor in filter(None, term.split("*")):
            vm = _VAR.match(factor)
            if vm:
                idx = {"x": 0, "y": 1, "z": 2}.get(vm.group(1))
                if idx is None:
                    idx = int(vm.group(2)) - 1
                if not 0 <= idx < n:
                    raise ValueError(f"variable {factor!r} out of range for dimension {n}")
                expo[idx] += int(vm.group(3) or 1)
            else:
                try:
                    coeff *= complex(factor.replace("i", "j")) if "i" in factor else float(factor)
                except ValueError as exc:
                    raise ValueError(f"bad Laurent term {factor!r}") from exc
        key = tuple(expo)
        out[key] = out.get(key, 0) + sign * coeff
    if not out:
        raise ValueError("empty Laurent polynomial")
    return out


def _fan(args) -> Fan:
    if args.fan_file:
        return load_fan(Path(args.fan_file).read_text())
    if not args.preset:
        raise ValueError("give --preset or --fan-file")
    return preset_fan(args.preset)


def _kclass(f: Fan, args, omega_key="omega") -> ch.ComplexifiedClass:
    omega = parse_class(f, getattr(args, omega_key))
    beta = parse_class(f, args.beta) if getattr(args, "beta", None) else None
    if args.unit_volume:
        return ch.ComplexifiedClass.unit_volume(f, omega, beta)
    return ch.ComplexifiedClass(omega, beta, 1, Fraction(args.omega_scale_sq))


def _novikov(f: Fan, args):
    if args.q is not None:
        vals = [float(v) for v in args.q.split(",")]
        return vals[0] if len(vals) == 1 else vals
    if args.omega:
        return _kclass(f, args)
    raise ValueError("give --q or --omega")


# ---------------------------------------------------------------------------
# JSON


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (Fraction, QuadSurd)):
        return str(x)
    if isinstance(x, QComplex):
        return [str(x.re), str(x.im)]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def dumps(doc) -> str:
    return json.dumps(_jsonable(doc), sort_keys=True, indent=2) + "\n"


def _fan_record(f: Fan) -> dict:
    return {"name": f.name, "rays": [list(r) for r in f.rays], "max_cones": [list(c) for c in f.max_cones]}


# ---------------------------------------------------------------------------
# subcommands


def cmd_check_dhym(args) -> dict:
    f = _fan(args)
    c = _kclass(f, args)
    alpha = parse_class(f, args.alpha)
    rep = ch.dhym_nakai_moishezon(f, c, alpha, tol=args.tol)
    return {"report": rep.to_dict(), "summary": ch.summarize([r.verdict for r in rep.strata])}


def cmd_phase_form(args) -> dict:
    f = _fan(args)
    c = _kclass(f, args)
    rep = ch.phase_inequality_form(f, c, parse_class(f, args.L), tol=args.tol)
    return {"report": rep.to_dict()}


def cmd_bridgeland(args) -> dict:
    f = _fan(args)
    c = _kclass(f, args)
    L = parse_class(f, args.L)
    if args.k_scan:
        lo, hi = parse_k_range(args.k_scan)
        res = br.k_scan(f, c, L, hi, lo)
        return {"verdicts": [{"k": k, **v.to_dict()} for k, v in res["verdicts"]],
                "flips": [list(p) for p in res["flips"]]}
    return {"verdict": br.arcara_miles_scan(f, c, L, args.k).to_dict()}


def cmd_min_angle(args) -> dict:
    f = _fan(args)
    omega, alpha = parse_class(f, args.omega), parse_class(f, args.alpha)
    r = ma.minimal_angle(f, omega, alpha, seed=args.seed, certify_samples=args.samples)
    return {"result": r.to_dict(), "semipositivity": ma.semipositivity_check(f, omega, alpha)}


def cmd_higher_rank(args) -> dict:
    f = _fan(args)
    c = _kclass(f, args)
    L1, L2 = parse_class(f, args.L1), parse_class(f, args.L2)
    out = {"inequalities": ch.higher_rank_inequalities(f, c, L1, L2, args.k).to_dict()}
    try:
        out["instability"] = br.higher_rank_instability(f, c, L1, L2, args.k).to_dict()
    except (ch.PreconditionError, br.HeartError) as exc:
        out["instability"] = {"skipped": str(exc)}
    return out


def cmd_jacob_sheu(args) -> dict:
    f = _fan(args)
    c = _kclass(f, args)
    res = ch.jacob_sheu_check(f, c, parse_class(f, args.L))
    return {"theta_hat": res["theta_hat"], "report": res["report"].to_dict()}


def cmd_lg_build(args) -> dict:
    f = _fan(args)
    m = lg.build_lg(f, _novikov(f, args))
    return {"model": m.to_dict(), "potential": m.describe()}


def cmd_gamma_check(args) -> dict:
    f = _fan(args)
    q = _novikov(f, args)
    E = chern_character(parse_class(f, args.E), f.dim) if args.E else CohClass.one(f.dim)
    g = lg.gamma_lhs_result(f, q, args.z, E, args.N)
    p = lg.positive_cycle_period(lg.build_lg(f, q), args.z)
    rel = abs(g.value - p.value) / abs(p.value)
    tol = args.tol if args.tol > 0 else 1e-6
    return {"gamma_lhs": g.to_dict(), "period": p.to_dict(), "relative_discrepancy": rel,
            "tolerance": tol, "agrees": rel <= tol}


def cmd_period(args) -> dict:
    f = _fan(args)
    m = lg.build_lg(f, _novikov(f, args))
    return {"period": lg.positive_cycle_period(m, args.z).to_dict()}


def cmd_residue(args) -> dict:
    f = _fan(args)
    m = lg.build_lg(f, _novikov(f, args))
    pts = lg.critical_points(m, seed=args.seed)
    fp, gp = parse_laurent(args.f, f.dim), parse_laurent(args.g, f.dim)
    val = lg.residue_pairing(m, fp, gp, pts)
    return {"value": val, "critical_points": [list(p) for p in pts], "count": len(pts),
            "expected": len(f.max_cones)}


def cmd_examples(args) -> dict:
    paths = emit_examples(args.outdir)
    return {"written": [str(p) for p in paths]}


# ---------------------------------------------------------------------------
# reproduction reports


def collins_shi_report() -> dict:
    f = preset_fan("blp_p2")
    omega = DivisorClass.from_basis(f, {"h": 2, "e": -1})
    L = DivisorClass.from_basis(f, {"h": 2})
    c = ch.ComplexifiedClass.unit_volume(f, omega)
    scan = br.k_scan(f, c, L, 10)
    return {
        "fan": _fan_record(f),
        "class": c.describe(),
        "L": L.to_dict(),
        "arcara_miles": [{"k": k, **v.to_dict()} for k, v in scan["verdicts"]],
        "flips": [list(p) for p in scan["flips"]],
        "dhym": ch.dhym_nakai_moishezon(f, c, L).to_dict(),
    }


def min_angle_report() -> dict:
    f = preset_fan("blp_p2")
    omega = DivisorClass.from_basis(f, {"h": 2, "e": -1})
    alpha = DivisorClass.from_basis(f, {"h": 5, "e": -1})
    r = ma.minimal_angle(f, omega, alpha, seed=0)
    return {"fan": _fan_record(f), "omega": omega.to_dict(), "alpha": alpha.to_dict(),
            "result": r.to_dict(), "rational_representative_Q1000": ma.rationality_round(r, 1000, f, omega, alpha),
            "semipositivity": ma.semipositivity_check(f, omega, alpha)}


def keller_scarpa_report() -> dict:
    f = preset_fan("blp_p2")
    p, q, r = 2, 1, 1
    L1 = DivisorClass.from_basis(f, {"h": r * q, "e": -r * p})
    L2 = DivisorClass.zero(f)
    omega = DivisorClass.from_basis(f, {"h": p, "e": -q})
    beta = DivisorClass.from_basis(f, {"h": 2, "e": -2})
    c = ch.ComplexifiedClass(omega, beta)
    rows = []
    for k in (1, 4, 16):
        rows.append({"k": k, "inequalities": ch.higher_rank_inequalities(f, c, L1, L2, k).to_dict(),
                     "instability": br.higher_rank_instability(f, c, L1, L2, k).to_dict()})
    return {"fan": _fan_record(f), "parameters": {"p": p, "q": q, "r": r}, "class": c.describe(),
            "L1": L1.to_dict(), "L2": L2.to_dict(), "runs": rows}


def emit_examples(outdir) -> list[Path]:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, fn in (("collins_shi", collins_shi_report), ("min_angle", min_angle_report),
                     ("keller_scarpa", keller_scarpa_report)):
        path = out / f"{name}.json"
        path.write_text(dumps(fn()))
        paths.append(path)
    return paths


# ---------------------------------------------------------------------------
# argument parser


COMMANDS = {
    "check-dhym": cmd_check_dhym,
    "phase-form": cmd_phase_form,
    "bridgeland": cmd_bridgeland,
    "min-angle": cmd_min_angle,
    "higher-rank": cmd_higher_rank,
    "jacob-sheu": cmd_jacob_sheu,
    "lg-build": cmd_lg_build,
    "gamma-check": cmd_gamma_check,
    "period": cmd_period,
    "residue": cmd_residue,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--preset", help="preset fan, e.g. p2, blp_p2, hirzebruch(2), blp_pn(3)")
    src.add_argument("--fan-file", help="JSON fan document")
    common.add_argument("--tol", type=float, default=0.0, help="verdict tolerance (0 = exact)")
    common.add_argument("--json-out", help="also write the report here")
    common.add_argument("--seed", type=int, default=0)

    kclass = argparse.ArgumentParser(add_help=False)
    kclass.add_argument("--omega", help="Kähler class, e.g. '2,-1@basis(h,e)'")
    kclass.add_argument("--beta", help="B-field class")
    kclass.add_argument("--unit-volume", action="store_true", help="rescale omega to volume 1")
    kclass.add_argument("--omega-scale-sq", default="1", help="multiply omega by sqrt of this rational")

    novikov = argparse.ArgumentParser(add_help=False)
    novikov.add_argument("--q", help="Novikov values, one per Mori generator (comma separated)")

    p = argparse.ArgumentParser(prog="toricslag", description="Stability criteria on toric manifolds and their mirrors.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("check-dhym", parents=[common, kclass])
    s.add_argument("--alpha", required=True)
    s = sub.add_parser("phase-form", parents=[common, kclass])
    s.add_argument("--L", required=True)
    s = sub.add_parser("bridgeland", parents=[common, kclass])
    s.add_argument("--L", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--k", type=int, default=1)
    g.add_argument("--k-scan", help="range like 1..10")
    s = sub.add_parser("min-angle", parents=[common])
    s.add_argument("--omega", required=True)
    s.add_argument("--alpha", required=True)
    s.add_argument("--samples", type=int, default=10000)
    s = sub.add_parser("higher-rank", parents=[common, kclass])
    s.add_argument("--L1", required=True)
    s.add_argument("--L2", required=True)
    s.add_argument("--k", type=int, default=1)
    s = sub.add_parser("jacob-sheu", parents=[common, kclass])
    s.add_argument("--L", required=True)
    sub.add_parser("lg-build", parents=[common, kclass, novikov])
    s = sub.add_parser("gamma-check", parents=[common, kclass, novikov])
    s.add_argument("--z", type=float, default=1.0)
    s.add_argument("--N", type=int, default=20)
    s.add_argument("--E", help="line bundle class (default: trivial)")
    s = sub.add_parser("period", parents=[common, kclass, novikov])
    s.add_argument("--z", type=float, default=1.0)
    s = sub.add_parser("residue", parents=[common, kclass, novikov])
    s.add_argument("--f", default="1")
    s.add_argument("--g", default="1")
    s = sub.add_parser("examples", parents=[common])
    s.add_argument("--outdir", default="reports")
    return p


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        result = COMMANDS[args.command](args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError, OSError, FanError) as exc:
        print(f"input error: {exc}", file=stderr)
        return EXIT_INPUT
    doc = {"command": args.command, "result": result}
    text = dumps(doc)
    stdout.write(text)
    if args.json_out:
        Path(args.json_out).write_text(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
