"""Exhaustive value-table oracles, independent of the algebraic decision procedures.

Only meant for tiny primes (p <= 7 or so).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .quadpoly import QuadPoly3, eval3


@lru_cache(maxsize=4)
def _split_tables(p: int) -> np.ndarray:
    """S[b] = h_b(x) + k_b(y) + l_b(z) over F_p^3 for every additive split.

    h, k, l range over polynomials of degree <= 2 without constant term (a
    constant is absorbed by g). The coefficient vector is normalized so its
    first nonzero entry is 1, since S and cS induce the same fibres and g(s)
    composed with s -> s/c keeps degree <= 2.
    """
    s = np.arange(p, dtype=np.int64)
    vecs = []
    for flat in range(p ** 6):
        digits = []
        t = flat
        for _ in range(6):
            digits.append(t % p)
            t //= p
        nz = next((dd for dd in digits if dd), None)
        if nz != 1:
            continue
        vecs.append(digits)
    vecs = np.array(vecs, dtype=np.int64)
    one = lambda c2, c1: (c2[:, None] * s * s + c1[:, None] * s) % p  # noqa: E731
    hx = one(vecs[:, 0], vecs[:, 1])
    ky = one(vecs[:, 2], vecs[:, 3])
    lz = one(vecs[:, 4], vecs[:, 5])
    tab = (hx[:, :, None, None] + ky[:, None, :, None] + lz[:, None, None, :]) % p
    return tab.reshape(len(vecs), p ** 3).astype(np.int16)


@lru_cache(maxsize=4)
def _scaled_keys(p: int) -> tuple[np.ndarray, np.ndarray]:
    S = _split_tables(p)
    return S.astype(np.int32) * p, np.arange(S.shape[0])[:, None]


def value_table3(f: QuadPoly3) -> np.ndarray:
    r = np.arange(f.p, dtype=np.int64)
    return eval3(f, r[:, None, None], r[None, :, None], r[None, None, :]).reshape(-1)


def _fits_degree2(points: dict[int, int], p: int) -> bool:
    if len(points) <= 3:
        return True
    xs = sorted(points)
    base = xs[:3]
    for x in xs[3:]:
        # Lagrange interpolation through the three base points, evaluated at x
        acc = 0
        for k, xk in enumerate(base):
            num, den = 1, 1
            for m, xm in enumerate(base):
                if m != k:
                    num = num * (x - xm) % p
                    den = den * (xk - xm) % p
            acc = (acc + points[xk] * num * pow(den, p - 2, p)) % p
        if acc != points[x]:
            return False
    return True


def degenerate_by_value_table(f: QuadPoly3) -> bool:
    """Exhaustively decide whether f's value table equals g(h(x) + k(y) + l(z)).

    g, h, k, l range over one-variable polynomials of degree <= 2.
    """
    p = f.p
    F = value_table3(f)
    S = _split_tables(p)
    nb = S.shape[0]
    scaled, rows = _scaled_keys(p)
    occ = np.zeros((nb, p * p), dtype=bool)
    occ[rows, scaled + F[None, :].astype(np.int32)] = True
    pairs = occ.sum(axis=1)
    images = occ.reshape(nb, p, p).any(axis=2).sum(axis=1)
    for b in np.nonzero(pairs == images)[0]:
        g = {}
        for s_val, f_val in zip(S[b].tolist(), F.tolist()):
            g[s_val] = f_val
        if _fits_degree2(g, p):
            return True
    return False
