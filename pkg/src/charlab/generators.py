"""Random polynomials and instances used by `verify` and the test-suite."""

from __future__ import annotations

import random

from .quadpoly import QuadPoly3, classify3, permute3, preset

CASES = ("Case1", "Case2", "Case3", "Case4")


def _nz(rng: random.Random, p: int) -> int:
    return rng.randrange(1, p)


def _any(rng: random.Random, p: int) -> int:
    return rng.randrange(p) if rng.random() < 0.6 else 0


def random_case_poly(rng: random.Random, p: int, case: str, shuffle: bool = True) -> QuadPoly3:
    """A polynomial that classify3 tags with ``case``, variables shuffled at random."""
    while True:
        if case == "Case1":
            kw = dict(a=_nz(rng, p), b=_any(rng, p), gz=_nz(rng, p), j=_any(rng, p),
                      d=_any(rng, p), e=_any(rng, p), h=_any(rng, p), i=_any(rng, p))
        elif case == "Case2":
            # e = 0 so that swapping y and z cannot produce a Case 1 template
            kw = dict(a=_nz(rng, p), b=_any(rng, p), j=_nz(rng, p),
                      d=_any(rng, p), h=_any(rng, p), i=_any(rng, p))
        elif case == "Case3":
            kw = dict(a=_nz(rng, p), b=_nz(rng, p), d=_any(rng, p), h=_any(rng, p))
        elif case == "Case4":
            kw = dict(a=_nz(rng, p), b=_nz(rng, p), c=_nz(rng, p), d=_any(rng, p), e=_any(rng, p),
                      gz=_any(rng, p), h=_any(rng, p), i=_any(rng, p), j=_any(rng, p))
        else:
            raise ValueError(case)
        f = QuadPoly3(p, const=rng.randrange(p), **kw)
        if shuffle:
            perm = [0, 1, 2]
            rng.shuffle(perm)
            f = permute3(f, perm)
        if classify3(f).tag == case:
            return f


def random_quadratic(rng: random.Random, p: int) -> QuadPoly3:
    """Sparse random quadratic, or c L^2 + lam L (+ perturbation) for a random linear form L."""
    while True:
        if rng.random() < 0.35:
            u, v, w = (rng.randrange(p) for _ in range(3))
            c, lam = _nz(rng, p), rng.randrange(p)
            f = QuadPoly3(p, a=2 * c * u * v, b=2 * c * u * w, c=2 * c * v * w,
                          d=c * u * u, e=c * v * v, gz=c * w * w,
                          h=lam * u, i=lam * v, j=lam * w, const=rng.randrange(p))
            if rng.random() < 0.5:
                name = rng.choice(("h", "i", "j", "a", "d"))
                f = f.replace(**{name: getattr(f, name) + rng.randrange(1, p)})
        else:
            f = QuadPoly3.from_coeffs([_any(rng, p) for _ in range(10)], p)
        if f.is_quadratic():
            return f


def random_set(rng: random.Random, p: int, size: int) -> list[int]:
    return sorted(rng.sample(range(1, p), min(size, p - 1)))


def energy_corpus(rng: random.Random, primes, count: int, max_size: int = 12):
    """(f, U, V, W) instances spanning Cases 1-4 and both presets.

    Case 2 instances get the exceptional element -m/b planted in the set
    playing the canonical x role whenever b != 0.
    """
    kinds = CASES + ("x+yz", "x(y+z)")
    out = []
    for k in range(count):
        p = rng.choice(primes)
        kind = kinds[k % len(kinds)]
        f = preset(kind, p) if kind in ("x+yz", "x(y+z)") else random_case_poly(rng, p, kind)
        sets = [random_set(rng, p, rng.randint(1, max_size)) for _ in range(3)]
        cls = classify3(f)
        if cls.tag == "Case2":
            g = permute3(f, cls.permutation)
            if g.b:
                u = (-g.j * pow(g.b, p - 2, p)) % p
                role = cls.permutation[0]
                if u not in sets[role]:
                    sets[role] = sorted(sets[role][: max_size - 1] + [u])
        out.append((f, *sets))
    return out


def degenerate_family(p: int) -> list[QuadPoly3]:
    """(x + y + z + c)^2 for every c in F_p."""
    return [QuadPoly3(p, a=2, b=2, c=2, d=1, e=1, gz=1, h=2 * c, i=2 * c, j=2 * c, const=c * c)
            for c in range(p)]

