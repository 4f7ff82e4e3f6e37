"""Command line interface: energy, incidence, charsum, verify, campaign, presets.

Exit codes: 0 success, 1 precondition violation, 2 invariant failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
import warnings
from pathlib import Path

from . import charsum as cs
from .energy import (
    difference_set, dyadic_profile, energy_bound_large, energy_bound_small, energy_regime,
    histogram2, histogram3,
)
from .errors import InvariantError, PreconditionError
from .ff_core import FieldCtx, MultChar
from .harness import ExperimentConfig, parse_sets_arg, run_campaign, write_report
from .incidence import (
    MAX_COLLINEAR_POINTS, IncidenceConfig, build_config, count_incidences, max_collinear,
    rudnev_bound, vinh_bound,
)
from .quadpoly import PRESETS3, QuadPoly3, classify3, format_literal, parse_poly
from .verify import run_verify

log = logging.getLogger("charlab")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise PreconditionError("missing " + ", ".join("--" + n for n in missing))


def _poly_and_sets(args, roles):
    _require(args, "p", "poly", "sets")
    f = parse_poly(args.poly, args.p)
    sets = parse_sets_arg(args.sets, args.p, args.seed)
    need = [r for r in roles if r != "W" or isinstance(f, QuadPoly3)]
    missing = [r for r in need if r not in sets]
    if missing:
        raise PreconditionError(f"--sets lacks {', '.join(missing)}")
    return f, sets


def cmd_energy(args) -> int:
    f, sets = _poly_and_sets(args, "UVW")
    lines = [f"poly: {f}"]
    if isinstance(f, QuadPoly3):
        U, V, W = sets["U"], sets["V"], sets["W"]
        hist = histogram3(f, U, V, W)
        lines.append(f"class: {classify3(f).tag}")
        sizes = (len(U), len(V), len(W))
        regime = energy_regime(*sizes, args.p)
        bound = energy_bound_small(*sizes) if regime == "small" else energy_bound_large(*sizes, args.p)
        extra = {"regime": regime, "energy_bound": bound}
    else:
        U, V = sets["U"], sets["V"]
        hist = histogram2(f, U, V)
        extra = {"diff_size": len(difference_set(V, U, args.p))}
    prof = dyadic_profile(hist)
    lines += [
        f"E={hist.energy}",
        f"sum_N={int(hist.counts.sum())}",
        "dyadic: " + " ".join(f"k_{1 << j}={k}" for j, k in prof.levels),
        f"dyadic_sums: cumulative={prof.cumulative_sum} band={prof.band_sum}",
    ]
    lines += [f"{k}: {v}" for k, v in extra.items()]
    # structured output to stdout replaces the summary, so it stays machine-readable
    if not args.format or args.out:
        print("\n".join(lines))
    if args.format == "csv":
        _emit(hist.to_csv(), args.out)
    elif args.format == "json":
        doc = {"poly": format_literal(f), "sets": {k: list(v) for k, v in sets.items()},
               "histogram": hist.to_dict(), "dyadic": prof.to_dict(), **extra}
        _emit(json.dumps(doc, indent=1), args.out)
    return 0


def cmd_incidence(args) -> int:
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise PreconditionError(f"config file not found: {path}")
        cfg = IncidenceConfig.from_text(path.read_text())
        E = None
    else:
        f, sets = _poly_and_sets(args, "UVW")
        if not isinstance(f, QuadPoly3):
            raise PreconditionError("incidence needs a three-variable polynomial")
        U, V, W = sets["U"], sets["V"], sets["W"]
        cfg = build_config(f, U, V, W)
        E = histogram3(f, U, V, W).energy
    unweighted, weighted = count_incidences(cfg)
    report = {"p": cfg.p, "case": cfg.case_tag, "n_points": cfg.n_points, "n_planes": cfg.n_planes,
              "point_mass": int(cfg.point_mult.sum()), "plane_mass": int(cfg.plane_mult.sum()),
              "I_unweighted": unweighted, "I_weighted": weighted}
    if E is not None:
        report["E"] = E
    if cfg.n_points <= MAX_COLLINEAR_POINTS:
        k = max_collinear(cfg.points, cfg.p)
        report["max_collinear"] = k
        report["rudnev"] = rudnev_bound(cfg.n_points, cfg.n_planes, k)
    report["vinh"] = vinh_bound(cfg.n_points, cfg.n_planes, cfg.p, 3)
    for k, v in report.items():
        print(f"{k}: {v}")
    if args.out:
        _emit(cfg.to_text(), args.out)
    if E is not None and weighted != E:
        raise InvariantError(f"weighted incidences {weighted} != energy {E}")
    return 0


def cmd_charsum(args) -> int:
    f, sets = _poly_and_sets(args, "TUVW")
    ctx = FieldCtx(args.p)
    chi = MultChar.legendre(ctx) if args.chi is None else MultChar(ctx, args.chi)
    seed = args.seed
    T = cs.weighted_set(sets["T"], args.weights, None if seed is None else seed + 101)
    if isinstance(f, QuadPoly3):
        U, V, W = sets["U"], sets["V"], sets["W"]
        beta = cs.make_weights(args.weights, (len(U), len(V), len(W)), None if seed is None else seed + 202)
        S = cs.char_sum3(T, U, V, W, beta, chi, f)
        certs = [cs.holder_chain(T, U, V, W, beta, chi, f, n) for n in args.n]
        sizes = dict(U=len(U), V=len(V), W=len(W))
        regime = cs.regime_thm14(len(U), len(V), len(W), args.p)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", cs.RegimeWarning)
            bounds = {n: cs.bound_thm14(len(U), len(V), len(W), len(T), args.p, n, regime) for n in args.n}
    else:
        U, V = sets["U"], sets["V"]
        beta = cs.make_weights(args.weights, (len(U), len(V)), None if seed is None else seed + 202)
        S = cs.char_sum2(T, U, V, beta, chi, f)
        certs = [cs.holder_chain2(T, U, V, beta, chi, f, n) for n in args.n]
        diff = len(difference_set(V, U, args.p))
        sizes = dict(U=len(U), V=len(V), diff=diff)
        regime = cs.regime_thm17(len(V), diff, args.p)
        k = diff / len(U)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", cs.RegimeWarning)
            bounds = {n: cs.bound_thm17(len(U), len(V), len(T), args.p, k, n, regime) for n in args.n}
    doc = {
        "p": args.p, "poly": format_literal(f), "chi": chi.m, "weights": args.weights, "seed": seed,
        "sets": {k: list(v) for k, v in sets.items()}, "sizes": sizes, "regime": regime,
        "S": [S.real, S.imag], "S_abs": abs(S),
        "certificates": [dict(c.to_dict(), bound=bounds[c.n]) for c in certs],
    }
    if args.format == "json":
        _emit(json.dumps(doc, indent=1), args.out)
    else:
        print(f"S={S.real:.12g}{S.imag:+.12g}j |S|={abs(S):.12g} chi={chi.m} regime={regime}")
        for c in certs:
            print(f"n={c.n} M2n={c.moment:.12g} lhs={c.lhs:.12g} mid={c.mid:.12g} rhs={c.rhs:.12g} "
                  f"holds={c.holds} bound={bounds[c.n]:.12g}")
        if args.out:
            _emit(json.dumps(doc, indent=1), args.out)
    if not all(c.holds for c in certs):
        raise InvariantError("Hoelder chain violated")
    return 0


def cmd_verify(args) -> int:
    _require(args, "p")
    t0 = time.perf_counter()
    results = run_verify(args.p, quick=args.quick, seed=args.seed or 0)
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'} {r.name:<18} {r.seconds:6.2f}s  {r.detail}")
    ok = all(r.ok for r in results)
    print(f"{'all checks passed' if ok else 'INVARIANT FAILURE'} in {time.perf_counter() - t0:.1f}s")
    return 0 if ok else 2


def cmd_campaign(args) -> int:
    cfg = ExperimentConfig.from_toml(args.config)
    report = run_campaign(cfg, workers=args.workers)
    csv_path, json_path = cfg.csv_path, cfg.json_path
    if args.out:
        out = Path(args.out)
        stem = cfg.name
        csv_path, json_path = str(out / f"{stem}.csv"), str(out / f"{stem}.json")
    if args.format == "csv":
        json_path = None
    elif args.format == "json":
        csv_path = None
    if not csv_path and not json_path:
        sys.stdout.write(report.to_csv())
    write_report(report, csv_path, json_path)
    print(f"{len(report.rows)} rows, {report.n_errors} errors, {report.n_failures} invariant failures",
          file=sys.stderr)
    return 2 if report.n_failures else 0


PRESET_TEXT = """\
polynomials (coefficients a,b,c,d,e,g,h,i,j,const):
{polys}
corollary regimes (U ~ V ~ W ~ N unless noted):
  three-variable, n=1, T ~ N, p^(2/5+d) << N << p^(2/3):  |S| << N^(11/4) p^(1/2)
  three-variable, n=1, T ~ N, N >> p^(2/3):               |S| << N^(7/2)
  three-variable, T >= p^e, n > floor(1/2e)+1, p^(1/3+d) << N << p^(2/3):  |S| << N^(3-3/4n) T p^(1/4n)
  three-variable, T >= p^e, n > floor(1/2e)+1, N >> p^(2/3):               |S| << N^3 T / p^(1/4n)
  two-variable, |U-V| ~ U, T >= p^e, n > floor(1/2e)+1, p^(1/3+d) << N << p^(2/3):  |S| <~ N^(2-3/4n) T p^(1/4n)
  two-variable, |U-V| ~ U, T >= p^e, n > floor(1/2e)+1, N >> p^(2/3):               |S| <~ N^2 T / p^(1/4n)
"""


def cmd_presets(args) -> int:
    polys = "\n".join(f"  {name:<8} {','.join(map(str, c))}" for name, c in PRESETS3.items())
    sys.stdout.write(PRESET_TEXT.format(polys=polys))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="odd prime >= 5")
    common.add_argument("--poly", help='"a,b,c,d,e,g,h,i,j,const[ @ p]", six coefficients for two variables, or a preset name')
    common.add_argument("--sets", help='e.g. "T=1,2;U=1,2;V=random:5;W=ap:1:2:4"')
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--n", type=int, nargs="+", default=[1])
    common.add_argument("--out", help="output file (directory for campaign)")
    common.add_argument("--format", choices=("csv", "json"))

    parser = argparse.ArgumentParser(prog="charlab", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("energy", parents=[common], help="histogram, energy and dyadic profile")
    p.set_defaults(func=cmd_energy)
    p = sub.add_parser("incidence", parents=[common], help="build and count a point-plane configuration")
    p.add_argument("--config", help="read a serialized configuration instead of building one")
    p.set_defaults(func=cmd_incidence)
    p = sub.add_parser("charsum", parents=[common], help="character sum, moments, Hoelder certificate")
    p.add_argument("--chi", type=int, default=None, help="character index (default: Legendre)")
    p.add_argument("--weights", choices=cs.WEIGHT_SCHEMES, default="unit")
    p.set_defaults(func=cmd_charsum)
    p = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=cmd_verify)
    p = sub.add_parser("campaign", parents=[common], help="run a TOML campaign config")
    p.add_argument("config")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_campaign)
    p = sub.add_parser("presets", help="list preset polynomials and corollary regimes")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
