"""Command-line front end.

Subcommands: analyze, roots, construct, brownian, project, verify.  Output is
JSON (CSV for analyze) on stdout or to --out; identical invocations produce
byte-identical output.  Exit codes: 0 success, 1 precondition/usage error,
2 internal error.  Stochastic subcommands require an explicit --seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import gen
from .brownian import RectangleSpec, WosConfig, estimate_exit_rectangle, estimate_exit_sector, mean_value_check
from .clt import verify_normal_approx
from .construct import construct_ball_sharp, construct_sector_sharp, poisson_scaled
from .cumulants import negcos_extrema
from .errors import PreconditionError
from .harmonic import (
    BallSpec,
    GridSpec,
    SectorSpec,
    b_decreasing_check,
    ball_gives_modulus_argument,
    exp_ball_in_ball,
    harnack_segment_bound,
    modulus_argument_gives_ball,
    money_check,
    poisson_density_ball,
    weak_positivity_check,
)
from .errors import InapplicableCheckError
from .multivar import MultiPGF, all_directions, project, projection_sector_check
from .roots import PGFPoly, find_roots, log_potential, normalize, poly_from_roots, root_geometry


class _Parser(argparse.ArgumentParser):
    # usage errors are caller errors, not internal ones
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_coeffs(text: str) -> PGFPoly:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"field --coeffs is not valid JSON: {exc}") from exc
    if not isinstance(raw, list) or not raw:
        raise PreconditionError("field --coeffs must be a nonempty JSON array")
    try:
        values = [float(x) for x in raw]
    except (TypeError, ValueError) as exc:
        raise PreconditionError(f"field --coeffs holds a non-numeric entry: {exc}") from exc
    return normalize(np.array(values))


def _emit(obj, args) -> None:
    if getattr(args, "format", "json") == "csv":
        text = obj  # callers pass a prepared CSV string
    else:
        text = json.dumps(obj, sort_keys=True, indent=2)
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_analyze(args) -> int:
    poly = _parse_coeffs(args.coeffs)
    report = verify_normal_approx(poly)
    if args.format == "csv":
        _emit(report.CSV_HEADER + "\n" + report.csv_row(), args)
    else:
        _emit(report.to_json(), args)
    return 0


def _cmd_roots(args) -> int:
    poly = _parse_coeffs(args.coeffs)
    rs = find_roots(poly, tol=args.tol)
    geo = root_geometry(rs)
    out = rs.to_json()
    out["delta_ball"] = geo.delta_ball
    out["delta_sector"] = geo.delta_sector
    _emit(out, args)
    return 0


def _cmd_construct(args) -> int:
    if args.family == "sector":
        result = construct_sector_sharp(args.sigma, args.delta)
    elif args.family == "ball":
        result = construct_ball_sharp(args.n, args.delta, args.sigma, c_k=args.ck)
    else:
        result = poisson_scaled(args.sigma, args.kappa, args.tail_tol)
    _emit(result.to_json(), args)
    return 0


def _cmd_brownian(args) -> int:
    cfg = WosConfig(seed=args.seed, epsilon_abs=args.eps_abs, max_steps=args.max_steps)
    if args.domain == "square":
        est = estimate_exit_rectangle(
            complex(0.0, args.start_im), RectangleSpec(b=args.delta, delta=args.delta), cfg, args.samples
        )
    elif args.domain == "rectangle":
        est = estimate_exit_rectangle(
            complex(args.start_re, args.start_im), RectangleSpec(b=args.b, delta=args.delta), cfg, args.samples
        )
    else:
        R = math.exp(args.logRr)
        sector = SectorSpec.symmetric(args.delta, R)
        est = estimate_exit_sector(
            complex(args.start_re, args.start_im), sector, cfg, args.samples, route=args.route
        )
    _emit(est.to_json(), args)
    return 0


def _cmd_project(args) -> int:
    if args.input:
        with open(args.input) as fh:
            payload = json.load(fh)
    else:
        try:
            payload = json.loads(args.json)
        except json.JSONDecodeError as exc:
            raise PreconditionError(f"field --json is not valid JSON: {exc}") from exc
    mpgf = MultiPGF.from_json(payload)
    v = tuple(int(x) for x in args.v.split(","))
    proj = project(mpgf, v)
    out = {"v": list(v), "projection": proj.to_json()}
    if mpgf.constructively_stable:
        out["sector_check"] = projection_sector_check(mpgf, v).to_json()
    _emit(out, args)
    return 0


# --- named verification suites ---------------------------------------------


def _suite_weak_positivity(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(10):
        poly = gen.random_seed_product(rng, rng.integers(2, 6), np.pi / 2)
        grid = GridSpec(region=SectorSpec.symmetric(np.pi, 2.0), n_radial=64, n_angular=256)
        rep = weak_positivity_check(poly, grid)
        worst = min(worst, rep.min_slack)
        if not rep.passed:
            return {"pass": False, "min_slack": worst}
    return {"pass": True, "min_slack": worst}


def _suite_b_decreasing(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(10):
        poly = gen.random_seed_product(rng, rng.integers(2, 6), np.pi / 2)
        region = SectorSpec.symmetric(np.pi / 4, 2.0)
        rep = b_decreasing_check(poly, region, 0.0, GridSpec(region=region, n_radial=64, n_angular=256))
        worst = min(worst, rep.min_slack)
        if not rep.passed:
            return {"pass": False, "min_slack": worst}
    return {"pass": True, "min_slack": worst}


def _suite_money(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    applicable = 0
    for _ in range(10):
        poly = gen.random_seed_product(rng, rng.integers(2, 6), np.pi / 2)
        try:
            rep = money_check(poly, eps=0.12, eta=0.12)
        except InapplicableCheckError:
            continue
        applicable += 1
        if not rep.passed:
            return {"pass": False, "applicable": applicable}
    return {"pass": True, "applicable": applicable}


def _suite_fact_negcos(seed: int) -> dict:
    for j in range(3, 51):
        lo, hi = negcos_extrema(j)
        if not (lo < -0.5 and hi > 0.5):
            return {"pass": False, "j": j, "min": lo, "max": hi}
    return {"pass": True, "j_range": [3, 50]}


def _suite_planar(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    n = 100_000
    for eps in (0.01, 0.1, 0.4):
        r = eps * np.sqrt(rng.random(n))
        phi = rng.uniform(0, 2 * np.pi, n)
        zs = 1.0 + r * np.exp(1j * phi)
        if not ball_gives_modulus_argument(zs, eps).all():
            return {"pass": False, "lemma": "ball->modarg", "eps": eps}
        mod = rng.uniform(1 - eps, 1 + eps, n)
        arg = rng.uniform(-eps, eps, n)
        if not modulus_argument_gives_ball(mod * np.exp(1j * arg), eps).all():
            return {"pass": False, "lemma": "modarg->ball", "eps": eps}
        ws = r * np.exp(1j * phi)
        if not exp_ball_in_ball(ws, eps).all():
            return {"pass": False, "lemma": "exp-ball", "eps": eps}
    return {"pass": True, "samples_per_case": n}


def _suite_poisson_density(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    thetas = np.linspace(0, 2 * np.pi, 20_001)
    for _ in range(5):
        radius = rng.uniform(0.5, 3.0)
        center = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        # ratio bound P_z/P_center <= 3 holds for z within half the radius
        r0 = 0.5 * radius * math.sqrt(rng.random())
        z = center + r0 * np.exp(1j * rng.uniform(0, 2 * np.pi))
        dens = np.array(
            [poisson_density_ball(z, center + radius * np.exp(1j * t), center, radius) for t in thetas]
        )
        integral = np.trapezoid(dens, thetas) * radius
        if abs(integral - 1.0) > 1e-8:
            return {"pass": False, "integral": float(integral)}
        uniform = 1.0 / (2 * np.pi * radius)
        if np.max(dens) / uniform > 3.0 * (1 + 1e-9):
            return {"pass": False, "ratio": float(np.max(dens) / uniform)}
    return {"pass": True}


def _suite_harnack(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    for _ in range(20):
        eps = rng.uniform(0.05, 0.5)
        coeffs = rng.normal(size=6) + 1j * rng.normal(size=6)

        def g(z):
            return sum(c * z**k for k, c in enumerate(coeffs))

        thetas = np.linspace(0, 2 * np.pi, 512)
        boundary = 2 * eps * np.exp(1j * thetas)
        floor = np.real(g(boundary)).min()
        span = np.real(g(boundary)).max() - floor + 1e-9

        def v(z):
            return np.real(g(z)) - floor + 0.05 * span

        zs = eps * np.sqrt(rng.random(200)) * np.exp(1j * rng.uniform(0, 2 * np.pi, 200))
        ratios = v(zs) / v(0.0)
        if ratios.max() > 3 * (1 + 1e-9) or ratios.min() < 1 / 3 * (1 - 1e-9):
            return {"pass": False, "ratio_range": [float(ratios.min()), float(ratios.max())]}
    return {"pass": True, "bound_example": harnack_segment_bound(1.0, 0.25)}


def _suite_mean_value(seed: int) -> dict:
    from .roots import log_potential_grid

    poly = PGFPoly(np.array([0.5, 0.5]))
    rep = mean_value_check(
        lambda z: log_potential_grid(poly, np.atleast_1d(z)),
        1.0 + 0j,
        1.0 + 0j,
        0.5,
        WosConfig(seed=seed),
        20_000,
    )
    return {"pass": rep.passed, "z_score": rep.z_score, "mc_mean": rep.mc_mean}


def _suite_root_roundtrip(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(25):
        poly = gen.random_pgf(rng, int(rng.integers(2, 16)))
        rebuilt = poly_from_roots(find_roots(poly))
        err = float(np.max(np.abs(rebuilt.coeffs - poly.coeffs)))
        worst = max(worst, err)
        if err > 1e-8:
            return {"pass": False, "max_coeff_error": worst}
    return {"pass": True, "max_coeff_error": worst}


_SUITES = {
    "weak-positivity": _suite_weak_positivity,
    "b-decreasing": _suite_b_decreasing,
    "money": _suite_money,
    "fact-negcos": _suite_fact_negcos,
    "planar": _suite_planar,
    "poisson-density": _suite_poisson_density,
    "harnack": _suite_harnack,
    "mean-value": _suite_mean_value,
    "root-roundtrip": _suite_root_roundtrip,
}


def _cmd_verify(args) -> int:
    if args.suite not in _SUITES:
        raise PreconditionError(f"unknown suite {args.suite!r}; choose from {sorted(_SUITES)}")
    result = _SUITES[args.suite](args.seed)
    result = {"suite": args.suite, "seed": args.seed, **result}
    _emit(result, args)
    return 0 if result["pass"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pgfclt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", help="write output to this path instead of stdout")

    p = sub.add_parser("analyze", help="distance report for a PGF")
    p.add_argument("--coeffs", required=True, help="JSON array of coefficients (decimal strings ok)")
    common(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("roots", help="root set and geometry of a PGF")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    common(p)
    p.set_defaults(func=_cmd_roots)

    p = sub.add_parser("construct", help="sharpness families")
    fam = p.add_subparsers(dest="family", required=True)
    ps = fam.add_parser("sector")
    ps.add_argument("--sigma", type=float, required=True)
    ps.add_argument("--delta", type=float, required=True)
    common(ps)
    ps.set_defaults(func=_cmd_construct)
    pb = fam.add_parser("ball")
    pb.add_argument("--n", type=int, required=True)
    pb.add_argument("--delta", type=float, required=True)
    pb.add_argument("--sigma", type=float, required=True)
    pb.add_argument("--ck", type=float, default=100.0)
    common(pb)
    pb.set_defaults(func=_cmd_construct)
    pp = fam.add_parser("poisson")
    pp.add_argument("--sigma", type=float, required=True)
    pp.add_argument("--kappa", type=float, required=True)
    pp.add_argument("--tail-tol", type=float, default=1e-12)
    common(pp)
    pp.set_defaults(func=_cmd_construct)

    p = sub.add_parser("brownian", help="exit probability estimates")
    dom = p.add_subparsers(dest="domain", required=True)
    for name in ("square", "rectangle", "sector"):
        pd = dom.add_parser(name)
        pd.add_argument("--seed", type=int, required=True)
        pd.add_argument("--samples", type=int, required=True)
        pd.add_argument("--delta", type=float, required=True)
        pd.add_argument("--eps-abs", type=float, default=None)
        pd.add_argument("--max-steps", type=int, default=100_000)
        pd.add_argument("--start-re", type=float, default=1.0 if name == "sector" else 0.0)
        pd.add_argument("--start-im", type=float, default=0.0)
        if name == "rectangle":
            pd.add_argument("--b", type=float, required=True)
        if name == "sector":
            pd.add_argument("--logRr", type=float, required=True, help="log(R/r) with r = 1")
            pd.add_argument("--route", choices=["direct", "conformal"], default="direct")
        common(pd)
        pd.set_defaults(func=_cmd_brownian)

    p = sub.add_parser("project", help="multivariate projection")
    p.add_argument("--input", help="path to a MultiPGF JSON file")
    p.add_argument("--json", help="inline MultiPGF JSON")
    p.add_argument("--v", required=True, help="comma-separated direction, e.g. 1,2")
    common(p)
    p.set_defaults(func=_cmd_project)

    p = sub.add_parser("verify", help="named invariant suites")
    p.add_argument("--suite", required=True)
    p.add_argument("--seed", type=int, required=True)
    common(p)
    p.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"pgfclt: precondition error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failures
        print(f"pgfclt: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
