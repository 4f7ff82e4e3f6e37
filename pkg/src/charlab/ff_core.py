"""Prime field arithmetic, primitive roots, discrete logs and multiplicative characters."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n, ascending."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _check_prime(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise PreconditionError(f"{p} is not prime")
    if p < 5:
        raise PreconditionError(f"p must be an odd prime >= 5, got {p}")


def find_primitive_root(p: int) -> int:
    """Smallest positive generator of F_p^*.

    A candidate g is accepted when g^((p-1)/q) != 1 for every prime q | p-1.
    """
    _check_prime(p)
    qs = prime_factors(p - 1)
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in qs):
            return g
    raise AssertionError("unreachable: F_p^* is cyclic")


def legendre_oracle(a: int, p: int) -> int:
    """Euler criterion: a^((p-1)/2) mod p mapped to -1, 0 or +1."""
    r = pow(a % p, (p - 1) // 2, p)
    if r == 0:
        return 0
    return 1 if r == 1 else -1


@dataclass(frozen=True)
class FieldCtx:
    p: int
    g: int = field(init=False)
    dlog: np.ndarray = field(init=False, repr=False, compare=False)
    exp: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_prime(self.p)
        p = int(self.p)
        object.__setattr__(self, "p", p)
        g = find_primitive_root(p)
        exp = np.empty(p - 1, dtype=np.int64)
        dlog = np.full(p, -1, dtype=np.int64)
        x = 1
        for k in range(p - 1):
            exp[k] = x
            dlog[x] = k
            x = x * g % p
        exp.setflags(write=False)
        dlog.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "exp", exp)
        object.__setattr__(self, "dlog", dlog)

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return pow(a, self.p - 2, self.p)

    def inverse_table(self) -> np.ndarray:
        """inv[a] for a in F_p, with inv[0] = 0."""
        p = self.p
        out = np.zeros(p, dtype=np.int64)
        k = self.dlog[1:]
        out[1:] = self.exp[(-k) % (p - 1)]
        return out

    def is_square(self, a: int) -> bool:
        a %= self.p
        return a == 0 or self.dlog[a] % 2 == 0


@dataclass(frozen=True)
class MultChar:
    """A non-trivial multiplicative character chi(g^k) = exp(2 pi i m k / (p-1)), chi(0) = 0."""

    ctx: FieldCtx
    m: int
    table: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p = self.ctx.p
        if not 1 <= self.m <= p - 2:
            raise PreconditionError(f"character index must lie in [1, {p - 2}], got {self.m}")
        t = np.zeros(p, dtype=np.complex128)
        k = self.ctx.dlog[1:]
        t[1:] = np.exp(2j * np.pi * ((self.m * k) % (p - 1)) / (p - 1))
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @classmethod
    def legendre(cls, ctx: FieldCtx) -> "MultChar":
        return cls(ctx, (ctx.p - 1) // 2)

    @property
    def order(self) -> int:
        n = self.ctx.p - 1
        return n // math.gcd(n, self.m)

    def __call__(self, a: int) -> complex:
        return char_eval(self, a)


def char_eval(chi: MultChar, a: int) -> complex:
    p = chi.ctx.p
    a %= p
    if a == 0:
        return 0j
    k = int(chi.ctx.dlog[a])
    return cmath.exp(2j * math.pi * ((chi.m * k) % (p - 1)) / (p - 1))
