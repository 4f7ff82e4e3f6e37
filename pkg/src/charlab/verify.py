"""Desk-scale invariant suite behind `charlab verify`."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

import numpy as np

from . import charsum as cs
from .energy import (
    dyadic_profile, energy2, energy2_bruteforce, energy3_bruteforce, histogram2,
    histogram3, shear_count, shear_energy,
)
from .ff_core import FieldCtx, MultChar, legendre_oracle
from .generators import degenerate_family, energy_corpus, random_quadratic, random_set
from .incidence import build_config, count_incidences
from .oracles import degenerate_by_value_table
from .quadpoly import QuadPoly2, eval2, eval3, is_degenerate2, is_degenerate3, shear_2_to_3

TOL = 1e-9


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    seconds: float = 0.0


def _small_primes(p: int) -> list[int]:
    return sorted({5, 7} | ({p} if p <= 13 else set()))


def check_characters(p: int, rng: random.Random, count: int) -> str:
    ctx = FieldCtx(p)
    if sorted(ctx.exp.tolist()) != list(range(1, p)):
        raise AssertionError("primitive root does not generate F_p^*")
    for m in rng.sample(range(1, p - 1), min(count, p - 2)):
        chi = MultChar(ctx, m)
        t = chi.table
        a = np.arange(1, p) if p < 300 else np.array(rng.sample(range(1, p), 300))
        prod = t[(a[:, None] * a[None, :]) % p]
        if np.max(np.abs(prod - t[a][:, None] * t[a][None, :])) > TOL:
            raise AssertionError(f"multiplicativity fails for m={m}")
        if np.max(np.abs(np.abs(t[1:]) - 1)) > TOL:
            raise AssertionError(f"|chi| != 1 for m={m}")
        for c in (range(p) if p < 300 else rng.sample(range(p), 10)):
            if abs(t[(np.arange(p) + c) % p].sum()) > TOL:
                raise AssertionError(f"orthogonality fails for m={m}, shift {c}")
    leg = MultChar.legendre(ctx).table
    for a in range(p):
        if abs(leg[a].real - legendre_oracle(a, p)) > TOL or abs(leg[a].imag) > TOL:
            raise AssertionError(f"Legendre character disagrees with Euler criterion at {a}")
    return f"{min(count, p - 2)} characters + Legendre at p={p}"


def check_energy_and_incidence(p: int, rng: random.Random, count: int) -> str:
    primes = sorted({5, 7, 11, p})
    corpus = energy_corpus(rng, primes, count, max_size=8)
    for f, U, V, W in corpus:
        hist = histogram3(f, U, V, W)
        E = hist.energy
        if int(hist.counts.sum()) != len(U) * len(V) * len(W):
            raise AssertionError(f"histogram mass wrong for {f}")
        if E != energy3_bruteforce(f, U, V, W):
            raise AssertionError(f"energy3 != brute force for {f}")
        _, weighted = count_incidences(build_config(f, U, V, W))
        if weighted != E:
            raise AssertionError(f"weighted incidences {weighted} != energy {E} for {f}")
    return f"{len(corpus)} instances, energy = brute force = weighted incidences"


def _random_poly2(rng: random.Random, p: int) -> QuadPoly2:
    while True:
        f = QuadPoly2.from_coeffs([rng.randrange(p) for _ in range(6)], p)
        if f.is_quadratic() and f.depends_on(0) and f.depends_on(1) and not is_degenerate2(f):
            return f


def check_dyadic(p: int, rng: random.Random, count: int) -> str:
    for _ in range(count):
        q = rng.choice(sorted({7, 11, p}))
        f = _random_poly2(rng, q)
        U = random_set(rng, q, rng.randint(1, 8))
        V = random_set(rng, q, rng.randint(1, 8))
        E = energy2(f, U, V)
        if E != energy2_bruteforce(f, U, V):
            raise AssertionError("energy2 != brute force")
        prof = dyadic_profile(histogram2(f, U, V))
        if not (E <= prof.band_sum <= 4 * E and E <= prof.cumulative_sum):
            raise AssertionError("dyadic sums out of range")
        Eh = shear_energy(f, U, V)
        for j, k in prof.levels:
            n_h = shear_count(f, U, V, prof.level_sets[j])
            if n_h < (1 << j) * k * len(V) or n_h * n_h > k * Eh:
                raise AssertionError(f"shear bounds fail at level {j}")
    return f"{count} two-variable instances"


def check_holder(p: int, rng: random.Random, count: int) -> str:
    q = max(p, 11)
    ctx = FieldCtx(q)
    for _ in range(count):
        chi = MultChar(ctx, rng.randint(1, q - 2))
        f = random_quadratic(rng, q)
        U, V, W = (random_set(rng, q, rng.randint(1, 6)) for _ in range(3))
        T = cs.weighted_set(random_set(rng, q, rng.randint(1, 8)), "random_modulus", rng.randrange(1 << 30))
        beta = cs.make_weights("random_phase", (len(U), len(V), len(W)), rng.randrange(1 << 30))
        for n in (1, 2, 3):
            if not cs.holder_chain(T, U, V, W, beta, chi, f, n).holds:
                raise AssertionError(f"Hoelder chain fails at n={n}")
    return f"{count} weighted instances x n in (1, 2, 3) at p={q}"


def check_degeneracy(p: int, rng: random.Random, count: int) -> str:
    checked = 0
    for q in _small_primes(p):
        polys = [random_quadratic(rng, q) for _ in range(count)] + degenerate_family(q)
        for f in polys:
            if is_degenerate3(f) != degenerate_by_value_table(f):
                raise AssertionError(f"degeneracy disagreement for {f}")
            checked += 1
    return f"{checked} polynomials vs value-table search"


def check_shear(p: int, rng: random.Random, count: int) -> str:
    for q in _small_primes(p):
        r = np.arange(q)
        x, y, z = r[:, None, None], r[None, :, None], r[None, None, :]
        for _ in range(count):
            f = QuadPoly2.from_coeffs([rng.randrange(q) for _ in range(6)], q)
            if not np.array_equal(eval3(shear_2_to_3(f), x, y, z), eval2(f, (x - z) % q, y + 0 * z)):
                raise AssertionError(f"shear identity fails for {f}")
    return "full value tables"


def run_verify(p: int, quick: bool = False, seed: int = 0) -> list[CheckResult]:
    scale = 1 if quick else 4
    checks = [
        ("characters", check_characters, 5),
        ("energy-incidence", check_energy_and_incidence, 30 * scale),
        ("dyadic-shear", check_dyadic, 15 * scale),
        ("holder-chain", check_holder, 20 * scale),
        ("degeneracy", check_degeneracy, 25 * scale),
        ("shear-eval", check_shear, 5 * scale),
    ]
    out = []
    for name, fn, count in checks:
        rng = random.Random(f"{seed}:{name}")
        t0 = time.perf_counter()
        try:
            detail = fn(p, rng, count)
            ok = True
        except AssertionError as exc:
            detail, ok = str(exc), False
        out.append(CheckResult(name, ok, detail, time.perf_counter() - t0))
    return out
