"""Set generation, configuration-driven campaigns and report emission."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import charsum as cs
from .energy import (
    BRUTEFORCE_LIMIT, difference_set, dyadic_profile, energy2_bound_large, energy2_bound_small,
    energy3_bruteforce, energy2_bruteforce, energy_bound_large, energy_bound_small, energy_regime,
    histogram2, histogram3,
)
from .errors import InvariantError, PreconditionError
from .ff_core import FieldCtx, MultChar
from .incidence import (
    MAX_COLLINEAR_POINTS, build_config, count_incidences, max_collinear, rudnev_bound,
    rudnev_hypotheses,
)
from .quadpoly import QuadPoly3, classify3, parse_poly

log = logging.getLogger(__name__)

SET_KINDS = ("random", "interval", "arithmetic_progression", "geometric_progression", "explicit")
ROLES = ("T", "U", "V", "W")
CSV_VERSION = "charlab-campaign-csv v1"
COLUMNS = (
    "instance", "seed", "p", "poly", "nvars", "case", "n", "T", "U", "V", "W", "diff", "k",
    "weights", "chi", "regime", "flag", "E", "E_check", "I_weighted", "I_unweighted",
    "max_collinear", "rudnev", "rudnev_ratio", "dyadic_band_sum", "energy_bound", "energy_ratio",
    "S_re", "S_im", "S_abs", "majorant", "M2n", "moment_bound", "moment_ratio",
    "holder_lhs", "holder_mid", "holder_rhs", "holder_ok", "charsum_bound", "charsum_ratio",
    "status",
)
RATIO_COLUMNS = ("energy_ratio", "rudnev_ratio", "moment_ratio", "charsum_ratio")


@dataclass(frozen=True)
class SetSpec:
    kind: str
    size: int = 0
    seed: int | None = None
    start: int = 1
    step: int = 1
    elements: tuple[int, ...] = ()

    @classmethod
    def from_dict(cls, d: dict) -> "SetSpec":
        d = dict(d)
        if "ratio" in d:
            d["step"] = d.pop("ratio")
        if "elements" in d:
            d["elements"] = tuple(int(v) for v in d["elements"])
            d.setdefault("size", len(d["elements"]))
        unknown = set(d) - {"kind", "size", "seed", "start", "step", "elements"}
        if unknown:
            raise PreconditionError(f"unknown set spec keys {sorted(unknown)}")
        return cls(**d)


def generate_set(p: int, spec: SetSpec) -> tuple[int, ...]:
    """A set of exactly spec.size distinct elements of F_p^*, a pure function of (p, spec)."""
    if spec.kind not in SET_KINDS:
        raise PreconditionError(f"unknown set kind {spec.kind!r}")
    size = spec.size
    if spec.kind == "explicit":
        vals = [int(v) % p for v in spec.elements]
        size = len(vals)
    if not 1 <= size <= p - 1:
        raise PreconditionError(f"set size must lie in [1, {p - 1}], got {size}")
    if spec.kind == "random":
        rng = np.random.default_rng(spec.seed)
        vals = (rng.choice(p - 1, size=size, replace=False) + 1).tolist()
    elif spec.kind == "interval":
        vals = [(spec.start + k) % p for k in range(size)]
    elif spec.kind == "arithmetic_progression":
        vals = [(spec.start + k * spec.step) % p for k in range(size)]
    elif spec.kind == "geometric_progression":
        vals = [spec.start * pow(spec.step, k, p) % p for k in range(size)]
    if 0 in vals or len(set(vals)) != len(vals):
        raise PreconditionError(f"{spec.kind} spec does not give {size} distinct nonzero residues mod {p}")
    return tuple(sorted(vals))


def parse_set_arg(text: str, p: int, seed: int | None = None) -> tuple[int, ...]:
    """Parse one set from the CLI: "1,2,4", "random:10", "interval:START:SIZE",
    "ap:START:STEP:SIZE" or "gp:START:RATIO:SIZE"."""
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        args = [int(v) for v in rest.split(":")] if rest else []
        if head == "random":
            return generate_set(p, SetSpec("random", size=args[0], seed=seed))
        if head == "interval":
            return generate_set(p, SetSpec("interval", start=args[0], size=args[1]))
        if head == "ap":
            return generate_set(p, SetSpec("arithmetic_progression", start=args[0], step=args[1], size=args[2]))
        if head == "gp":
            return generate_set(p, SetSpec("geometric_progression", start=args[0], step=args[1], size=args[2]))
        return generate_set(p, SetSpec("explicit", elements=tuple(int(v) for v in text.split(","))))
    except (ValueError, IndexError):
        raise PreconditionError(f"cannot parse set {text!r}") from None


def parse_sets_arg(text: str, p: int, seed: int | None = None) -> dict[str, tuple[int, ...]]:
    """Parse "U=1,2;V=random:5;W=ap:1:2:4" into role -> set."""
    out = {}
    for k, part in enumerate(filter(None, (s.strip() for s in text.split(";")))):
        role, eq, body = part.partition("=")
        role = role.strip()
        if not eq or role not in ROLES:
            raise PreconditionError(f"bad set assignment {part!r}; expected ROLE=... with ROLE in {ROLES}")
        out[role] = parse_set_arg(body, p, None if seed is None else seed + k)
    return out


@dataclass(frozen=True)
class PolySpec:
    name: str
    literal: str


@dataclass
class ExperimentConfig:
    name: str = "campaign"
    primes: list[int] = field(default_factory=lambda: [101])
    polys: list[PolySpec] = field(default_factory=list)
    sets: dict[str, SetSpec] = field(default_factory=dict)
    weights: str = "unit"
    character: str | int = "legendre"
    n_values: list[int] = field(default_factory=lambda: [1])
    trials: int = 1
    seed: int = 0
    regime: str = "auto"
    incidence_limit: int = 1728
    bruteforce_limit: int = 4096
    csv_path: str | None = None
    json_path: str | None = None
    workers: int = 1

    @classmethod
    def from_toml(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.is_file():
            raise PreconditionError(f"config file not found: {path}")
        try:
            doc = tomllib.loads(path.read_text())
        except tomllib.TOMLDecodeError as exc:
            raise PreconditionError(f"{path}: {exc}") from None
        cfg = cls.from_dict(doc)
        base = path.parent
        if cfg.csv_path and not os.path.isabs(cfg.csv_path):
            cfg.csv_path = str(base / cfg.csv_path)
        if cfg.json_path and not os.path.isabs(cfg.json_path):
            cfg.json_path = str(base / cfg.json_path)
        return cfg

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        camp = dict(doc.get("campaign", {}))
        polys = []
        for k, entry in enumerate(doc.get("poly", [])):
            if "preset" in entry:
                lit = entry["preset"]
            elif "coeffs" in entry:
                lit = entry["coeffs"]
            else:
                raise PreconditionError(f"poly #{k} needs 'preset' or 'coeffs'")
            polys.append(PolySpec(entry.get("name", lit), lit))
        sets = {role: SetSpec.from_dict(spec) for role, spec in doc.get("sets", {}).items()}
        bad = set(sets) - set(ROLES)
        if bad:
            raise PreconditionError(f"unknown set roles {sorted(bad)}")
        cfg = cls(
            name=camp.get("name", "campaign"),
            primes=[int(p) for p in camp.get("primes", [101])],
            polys=polys,
            sets=sets,
            weights=camp.get("weights", "unit"),
            character=camp.get("character", "legendre"),
            n_values=[int(n) for n in camp.get("n", [1])],
            trials=int(camp.get("trials", 1)),
            seed=int(camp.get("seed", 0)),
            regime=camp.get("regime", "auto"),
            incidence_limit=int(camp.get("incidence_limit", 1728)),
            bruteforce_limit=int(camp.get("bruteforce_limit", 4096)),
            csv_path=camp.get("csv"),
            json_path=camp.get("json"),
            workers=int(camp.get("workers", 1)),
        )
        if cfg.weights not in cs.WEIGHT_SCHEMES:
            raise PreconditionError(f"unknown weight scheme {cfg.weights!r}")
        if cfg.regime not in ("auto", "small", "large"):
            raise PreconditionError(f"regime must be auto, small or large, got {cfg.regime!r}")
        if any(n < 1 for n in cfg.n_values):
            raise PreconditionError("every n must be >= 1")
        return cfg

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sets"] = {k: asdict(v) for k, v in self.sets.items()}
        return d


@dataclass(frozen=True)
class InstanceSpec:
    """Everything needed to recompute one campaign instance."""

    index: int
    seed: int
    p: int
    poly_name: str
    poly_literal: str
    sets: dict
    weights: str
    character: str | int
    n_values: tuple[int, ...]
    regime: str
    incidence_limit: int
    bruteforce_limit: int


def _derive(seed: int, *keys: int) -> int:
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])


def expand_instances(cfg: ExperimentConfig) -> list[InstanceSpec]:
    out = []
    idx = 0
    for p in cfg.primes:
        for poly in cfg.polys:
            for _ in range(cfg.trials):
                out.append(InstanceSpec(
                    idx, _derive(cfg.seed, idx), p, poly.name, poly.literal,
                    {r: asdict(s) for r, s in cfg.sets.items()}, cfg.weights, cfg.character,
                    tuple(cfg.n_values), cfg.regime, cfg.incidence_limit, cfg.bruteforce_limit,
                ))
                idx += 1
    return out


def _instance_sets(spec: InstanceSpec) -> dict[str, tuple[int, ...]]:
    out = {}
    for k, role in enumerate(ROLES):
        if role not in spec.sets:
            continue
        s = SetSpec(**{**spec.sets[role], "elements": tuple(spec.sets[role].get("elements", ()))})
        if s.kind == "random" and s.seed is None:
            s = SetSpec(s.kind, s.size, _derive(spec.seed, 1000 + k), s.start, s.step, s.elements)
        out[role] = generate_set(spec.p, s)
    return out


def _character(spec: InstanceSpec, ctx: FieldCtx) -> MultChar:
    if spec.character == "legendre":
        return MultChar.legendre(ctx)
    if spec.character == "random":
        return MultChar(ctx, 1 + _derive(spec.seed, 2000) % (ctx.p - 2))
    return MultChar(ctx, int(spec.character))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        if math.isnan(v):
            return ""
        return format(v, ".10g")
    return str(v)


def _pick_regime(spec: InstanceSpec, actual: str) -> tuple[str, str]:
    if spec.regime == "auto":
        return actual, ""
    return spec.regime, "" if spec.regime == actual else "regime-mismatch"


def run_instance(spec: InstanceSpec) -> list[dict]:
    """Rows (one per n) for one instance; failures become a status, never an exception."""
    base = {"instance": spec.index, "seed": spec.seed, "p": spec.p, "poly": spec.poly_name,
            "weights": spec.weights}
    try:
        return _run_instance(spec, base)
    except InvariantError as exc:
        return [dict(base, status=f"invariant-failure: {exc}")]
    except Exception as exc:  # noqa: BLE001 - recorded per row, campaign continues
        log.warning("instance %d failed: %s", spec.index, exc)
        return [dict(base, status=f"error: {type(exc).__name__}: {exc}")]


def _run_instance(spec: InstanceSpec, base: dict) -> list[dict]:
    p = spec.p
    ctx = FieldCtx(p)
    chi = _character(spec, ctx)
    f = parse_poly(spec.poly_literal, p)
    sets = _instance_sets(spec)
    if "T" not in sets:
        raise PreconditionError("set spec for T is required")
    T = cs.weighted_set(sets["T"], spec.weights, _derive(spec.seed, 3000))
    common = dict(base, chi=chi.m, T=len(T))
    failures = []

    if isinstance(f, QuadPoly3):
        U, V, W = (sets[r] for r in "UVW")
        uvw = len(U) * len(V) * len(W)
        hist = histogram3(f, U, V, W)
        E = hist.energy
        cls = classify3(f)
        row = dict(common, nvars=3, case=cls.tag, U=len(U), V=len(V), W=len(W), E=E)
        if uvw <= min(spec.bruteforce_limit, BRUTEFORCE_LIMIT):
            ok = energy3_bruteforce(f, U, V, W) == E
            row["E_check"] = "ok" if ok else "FAIL"
            if not ok:
                failures.append("energy3 != brute force")
        if cls.is_case and uvw <= spec.incidence_limit:
            cfg = build_config(f, U, V, W, cls)
            unweighted, weighted = count_incidences(cfg)
            row.update(I_weighted=weighted, I_unweighted=unweighted)
            if weighted != E:
                failures.append("weighted incidences != energy")
            if cfg.n_points <= MAX_COLLINEAR_POINTS:
                k = max_collinear(cfg.points, p)
                row["max_collinear"] = k
                if rudnev_hypotheses(cfg.n_points, cfg.n_planes, p):
                    rb = rudnev_bound(cfg.n_points, cfg.n_planes, k)
                    row.update(rudnev=rb, rudnev_ratio=unweighted / rb)
        actual = energy_regime(len(U), len(V), len(W), p)
        regime, flag = _pick_regime(spec, actual)
        eb = energy_bound_small(len(U), len(V), len(W)) if regime == "small" \
            else energy_bound_large(len(U), len(V), len(W), p)
        row.update(regime=regime, flag=flag, energy_bound=eb, energy_ratio=E / eb)
        beta = cs.make_weights(spec.weights, (len(U), len(V), len(W)), _derive(spec.seed, 4000))

        def cert(n):
            return cs.holder_chain(T, U, V, W, beta, chi, f, n)

        def charsum_bound(n):
            return _quiet(cs.bound_thm14)(len(U), len(V), len(W), len(T), p, n, regime)

        S = cs.char_sum3(T, U, V, W, beta, chi, f)
    else:
        U, V = sets["U"], sets["V"]
        hist = histogram2(f, U, V)
        E = hist.energy
        diff = len(difference_set(V, U, p))
        k = diff / len(U)
        row = dict(common, nvars=2, case="", U=len(U), V=len(V), diff=diff, k=k, E=E)
        if len(U) * len(V) <= spec.bruteforce_limit:
            ok = energy2_bruteforce(f, U, V) == E
            row["E_check"] = "ok" if ok else "FAIL"
            if not ok:
                failures.append("energy2 != brute force")
        prof = dyadic_profile(hist)
        row["dyadic_band_sum"] = prof.band_sum
        if not (E <= prof.band_sum <= 4 * E and E <= prof.cumulative_sum):
            failures.append("dyadic sums out of range")
        actual = cs.regime_thm17(len(V), diff, p)
        regime, flag = _pick_regime(spec, actual)
        eb = energy2_bound_small(len(V), diff) if regime == "small" \
            else energy2_bound_large(len(V), diff, p)
        row.update(regime=regime, flag=flag, energy_bound=eb, energy_ratio=E / eb)
        beta = cs.make_weights(spec.weights, (len(U), len(V)), _derive(spec.seed, 4000))

        def cert(n):
            return cs.holder_chain2(T, U, V, beta, chi, f, n)

        def charsum_bound(n):
            return _quiet(cs.bound_thm17)(len(U), len(V), len(T), p, k, n, regime)

        S = cs.char_sum2(T, U, V, beta, chi, f)

    rows = []
    for n in spec.n_values:
        c = cert(n)
        if not c.holds:
            failures.append(f"Hoelder chain fails at n={n}")
        mb = cs.moment_bound(len(T), p, n)
        sb = charsum_bound(n)
        rows.append(dict(
            row, n=n, S_re=S.real, S_im=S.imag, S_abs=abs(S), majorant=c.majorant, M2n=c.moment,
            moment_bound=mb, moment_ratio=c.moment / mb, holder_lhs=c.lhs, holder_mid=c.mid,
            holder_rhs=c.rhs, holder_ok=c.holds, charsum_bound=sb, charsum_ratio=abs(S) / sb,
        ))
    status = "ok" if not failures else "invariant-failure: " + "; ".join(failures)
    for r in rows:
        r["status"] = status
    return rows


def _quiet(fn):
    def inner(*args):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", cs.RegimeWarning)
            return fn(*args)
    return inner


@dataclass
class CampaignReport:
    rows: list[dict]
    summary: dict
    config: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {CSV_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow([_fmt(r.get(c)) for c in COLUMNS])
        return buf.getvalue()

    def to_json(self) -> str:
        def clean(v):
            if isinstance(v, (np.integer,)):
                return int(v)
            if isinstance(v, (np.floating,)):
                return float(v)
            return v
        rows = [{k: clean(v) for k, v in r.items()} for r in self.rows]
        return json.dumps({"version": CSV_VERSION, "config": self.config, "rows": rows,
                           "summary": self.summary}, indent=1, sort_keys=True)

    @property
    def n_failures(self) -> int:
        return sum(1 for r in self.rows if str(r.get("status", "")).startswith("invariant-failure"))

    @property
    def n_errors(self) -> int:
        return sum(1 for r in self.rows if str(r.get("status", "")).startswith("error"))


def summarize(rows: list[dict]) -> dict:
    """Max and mean of every bound ratio, per polynomial family."""
    out: dict[str, dict] = {}
    for r in rows:
        fam = out.setdefault(str(r.get("poly")), {})
        for col in RATIO_COLUMNS:
            v = r.get(col)
            if v is None:
                continue
            fam.setdefault(col, []).append(float(v))
    return {fam: {col: {"max": max(v), "mean": sum(v) / len(v), "count": len(v)}
                  for col, v in cols.items()} for fam, cols in out.items()}


def run_campaign(cfg: ExperimentConfig, workers: int | None = None) -> CampaignReport:
    instances = expand_instances(cfg)
    workers = cfg.workers if workers is None else workers
    if workers > 1 and len(instances) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_instance, instances))
    else:
        results = [run_instance(s) for s in instances]
    rows = [r for rs in results for r in rs]
    return CampaignReport(rows, summarize(rows), cfg.to_dict())


def write_report(report: CampaignReport, csv_path=None, json_path=None) -> None:
    if csv_path:
        Path(csv_path).parent.mkdir(parents=True, exist_ok=True)
        Path(csv_path).write_text(report.to_csv())
    if json_path:
        Path(json_path).parent.mkdir(parents=True, exist_ok=True)
        Path(json_path).write_text(report.to_json())


def replay_row(row: dict, cfg: ExperimentConfig) -> list[dict]:
    """Recompute the instance a report row came from."""
    spec = next(s for s in expand_instances(cfg) if s.index == int(row["instance"]))
    if spec.seed != int(row["seed"]):
        raise PreconditionError("row seed does not match the configuration")
    return run_instance(spec)
