"""Quadratic polynomials in two and three variables over F_p.

Three-variable coefficients follow the order (a, b, c, d, e, gz, h, i, j, const) for

    f(x, y, z) = a xy + b xz + c yz + d x^2 + e y^2 + gz z^2 + h x + i y + j z + const

and two-variable coefficients the order (a, d, e, h, i, const) for

    f(x, y) = a xy + d x^2 + e y^2 + h x + i y + const.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .ff_core import _check_prime

COEFFS3 = ("a", "b", "c", "d", "e", "gz", "h", "i", "j", "const")
COEFFS2 = ("a", "d", "e", "h", "i", "const")

# index pair of a mixed monomial -> coefficient name
_MIXED = {(0, 1): "a", (0, 2): "b", (1, 2): "c"}
_SQUARE = ("d", "e", "gz")
_LINEAR = ("h", "i", "j")

TAGS = ("Degenerate", "Case1", "Case2", "Case3", "Case4", "NotQuadratic", "MissingVariable")


@dataclass(frozen=True)
class QuadPoly3:
    p: int
    a: int = 0
    b: int = 0
    c: int = 0
    d: int = 0
    e: int = 0
    gz: int = 0
    h: int = 0
    i: int = 0
    j: int = 0
    const: int = 0

    def __post_init__(self):
        _check_prime(self.p)
        for name in COEFFS3:
            object.__setattr__(self, name, int(getattr(self, name)) % self.p)

    @classmethod
    def from_coeffs(cls, coeffs, p: int) -> "QuadPoly3":
        coeffs = list(coeffs)
        if len(coeffs) != 10:
            raise PreconditionError(f"expected 10 coefficients, got {len(coeffs)}")
        return cls(p, *coeffs)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(getattr(self, n) for n in COEFFS3)

    def replace(self, **kw) -> "QuadPoly3":
        vals = {n: getattr(self, n) for n in COEFFS3}
        vals.update(kw)
        return QuadPoly3(self.p, **vals)

    def mixed(self, u: int, v: int) -> int:
        return getattr(self, _MIXED[tuple(sorted((u, v)))])

    def square(self, u: int) -> int:
        return getattr(self, _SQUARE[u])

    def linear(self, u: int) -> int:
        return getattr(self, _LINEAR[u])

    def is_quadratic(self) -> bool:
        return any((self.a, self.b, self.c, self.d, self.e, self.gz))

    def depends_on(self, u: int) -> bool:
        others = [w for w in range(3) if w != u]
        return bool(self.square(u) or self.linear(u) or any(self.mixed(u, w) for w in others))

    def quadratic_matrix(self) -> list[list[int]]:
        """Symmetric matrix M with f_quad(X) = X^T M X / 2, entries mod p."""
        p = self.p
        return [
            [2 * self.d % p, self.a, self.b],
            [self.a, 2 * self.e % p, self.c],
            [self.b, self.c, 2 * self.gz % p],
        ]

    def __call__(self, x, y, z):
        return eval3(self, x, y, z)

    def __str__(self) -> str:
        return format_poly(self)


@dataclass(frozen=True)
class QuadPoly2:
    p: int
    a: int = 0
    d: int = 0
    e: int = 0
    h: int = 0
    i: int = 0
    const: int = 0

    def __post_init__(self):
        _check_prime(self.p)
        for name in COEFFS2:
            object.__setattr__(self, name, int(getattr(self, name)) % self.p)

    @classmethod
    def from_coeffs(cls, coeffs, p: int) -> "QuadPoly2":
        coeffs = list(coeffs)
        if len(coeffs) != 6:
            raise PreconditionError(f"expected 6 coefficients, got {len(coeffs)}")
        return cls(p, *coeffs)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple(getattr(self, n) for n in COEFFS2)

    def is_quadratic(self) -> bool:
        return any((self.a, self.d, self.e))

    def depends_on(self, u: int) -> bool:
        if u == 0:
            return bool(self.a or self.d or self.h)
        return bool(self.a or self.e or self.i)

    def __call__(self, x, y):
        return eval2(self, x, y)

    def __str__(self) -> str:
        return format_poly(self)


@dataclass(frozen=True)
class PolyClass3:
    tag: str
    permutation: tuple[int, int, int] = (0, 1, 2)

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown tag {self.tag!r}")
        if sorted(self.permutation) != [0, 1, 2]:
            raise ValueError(f"not a permutation of (0, 1, 2): {self.permutation}")

    @property
    def is_case(self) -> bool:
        return self.tag.startswith("Case")


def eval3(f: QuadPoly3, x, y, z):
    """f(x, y, z) mod p. Works on ints or broadcastable int64 arrays."""
    p = f.p
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray) or isinstance(z, np.ndarray):
        x, y, z = (np.asarray(t, dtype=np.int64) % p for t in (x, y, z))
        v = (f.a * x * y) % p
        v = (v + f.b * x * z) % p
        v = (v + f.c * y * z) % p
        v = (v + (f.d * x + f.h) * x) % p
        v = (v + (f.e * y + f.i) * y) % p
        v = (v + (f.gz * z + f.j) * z + f.const) % p
        return v
    return (f.a * x * y + f.b * x * z + f.c * y * z + f.d * x * x + f.e * y * y
            + f.gz * z * z + f.h * x + f.i * y + f.j * z + f.const) % p


def eval2(f: QuadPoly2, x, y):
    p = f.p
    if isinstance(x, np.ndarray) or isinstance(y, np.ndarray):
        x, y = (np.asarray(t, dtype=np.int64) % p for t in (x, y))
        v = (f.a * x * y) % p
        v = (v + (f.d * x + f.h) * x) % p
        v = (v + (f.e * y + f.i) * y + f.const) % p
        return v
    return (f.a * x * y + f.d * x * x + f.e * y * y + f.h * x + f.i * y + f.const) % p


def rank_mod_p(rows, p: int) -> int:
    """Rank of an integer matrix over F_p by Gaussian elimination."""
    m = [[v % p for v in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [v * inv % p for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                fac = m[r][col]
                m[r] = [(vr - fac * vp) % p for vr, vp in zip(m[r], m[rank])]
        rank += 1
    return rank


def _rank_one_aligned(matrix, linear, p: int) -> bool:
    if rank_mod_p(matrix, p) != 1:
        return False
    direction = next(r for r in matrix if any(r))
    return rank_mod_p([direction, list(linear)], p) == 1


def is_degenerate3(f: QuadPoly3) -> bool:
    """True iff f = g(h(x) + k(y) + l(z)) for one-variable polynomials g, h, k, l.

    With no mixed terms f is already an additive split. Otherwise f must be
    c * L(x, y, z)^2 + lam * L(x, y, z) + const for a linear form L, i.e. the
    quadratic part has rank 1 and (h, i, j) is proportional to its direction.
    """
    if not f.is_quadratic():
        raise PreconditionError("is_degenerate3 needs a quadratic polynomial")
    if not (f.a or f.b or f.c):
        return True
    return _rank_one_aligned(f.quadratic_matrix(), (f.h, f.i, f.j), f.p)


def is_degenerate2(f: QuadPoly2) -> bool:
    """True iff f = g(alpha x + beta y) for a one-variable polynomial g."""
    if not f.is_quadratic():
        raise PreconditionError("is_degenerate2 needs a quadratic polynomial")
    p = f.p
    matrix = [[2 * f.d % p, f.a], [f.a, 2 * f.e % p]]
    return _rank_one_aligned(matrix, (f.h, f.i), p)


def permute3(f: QuadPoly3, perm) -> QuadPoly3:
    """Relabel variables: canonical variable k is the original variable perm[k]."""
    kw = {}
    for (u, v), name in _MIXED.items():
        kw[name] = f.mixed(perm[u], perm[v])
    for k in range(3):
        kw[_SQUARE[k]] = f.square(perm[k])
        kw[_LINEAR[k]] = f.linear(perm[k])
    return QuadPoly3(f.p, const=f.const, **kw)


def _template_case(g: QuadPoly3):
    """Case tag if g literally matches a Case 1-3 template, else None."""
    if g.c or not g.a:
        return None
    if g.gz:
        return "Case1"
    if g.j:
        return "Case2"
    if g.b:
        return "Case3"
    return None


def classify3(f: QuadPoly3) -> PolyClass3:
    """Tag f with the Case 1-4 taxonomy used by the incidence constructions.

    Among the permutations that fit a Case 1-3 template the lowest case number
    wins; ties go to the first permutation in lexicographic order.
    """
    if not f.is_quadratic():
        return PolyClass3("NotQuadratic")
    if not all(f.depends_on(u) for u in range(3)):
        return PolyClass3("MissingVariable")
    if is_degenerate3(f):
        return PolyClass3("Degenerate")
    if f.a and f.b and f.c:
        return PolyClass3("Case4")
    best = None
    for perm in itertools.permutations(range(3)):
        tag = _template_case(permute3(f, perm))
        if tag is not None and (best is None or tag < best[0]):
            best = (tag, perm)
    if best is None:
        raise AssertionError(f"no case template fits non-degenerate {f}")
    return PolyClass3(best[0], best[1])


def shear_2_to_3(f: QuadPoly2) -> QuadPoly3:
    """h(x, y, z) = f(x - z, y), expanded."""
    p = f.p
    return QuadPoly3(
        p,
        a=f.a, b=-2 * f.d, c=-f.a,
        d=f.d, e=f.e, gz=f.d,
        h=f.h, i=f.i, j=-f.h,
        const=f.const,
    )


PRESETS3 = {
    "x+yz": (0, 0, 1, 0, 0, 0, 1, 0, 0, 0),
    "x(y+z)": (1, 1, 0, 0, 0, 0, 0, 0, 0, 0),
}


def preset(name: str, p: int) -> QuadPoly3:
    try:
        return QuadPoly3.from_coeffs(PRESETS3[name], p)
    except KeyError:
        raise PreconditionError(f"unknown preset {name!r}; choose from {sorted(PRESETS3)}") from None


_LITERAL = re.compile(r"^\s*([^@]+?)\s*(?:@\s*(\d+)\s*)?$")


def parse_poly(text: str, p: int | None = None):
    """Parse "a,b,c,d,e,g,h,i,j,const @ p" (or the six-coefficient two-variable form).

    A preset name is accepted in place of the coefficient list. An explicit
    "@ p" must agree with ``p`` when both are given.
    """
    m = _LITERAL.match(text)
    if not m:
        raise PreconditionError(f"cannot parse polynomial literal {text!r}")
    body, lit_p = m.group(1), m.group(2)
    if lit_p is not None:
        lit_p = int(lit_p)
        if p is not None and p != lit_p:
            raise PreconditionError(f"literal says p={lit_p} but p={p} was requested")
        p = lit_p
    if p is None:
        raise PreconditionError("no prime given for polynomial literal")
    if body in PRESETS3:
        return preset(body, p)
    try:
        coeffs = [int(t) for t in body.split(",")]
    except ValueError:
        raise PreconditionError(f"non-integer coefficient in {text!r}") from None
    if len(coeffs) == 10:
        return QuadPoly3.from_coeffs(coeffs, p)
    if len(coeffs) == 6:
        return QuadPoly2.from_coeffs(coeffs, p)
    raise PreconditionError(f"expected 10 or 6 coefficients, got {len(coeffs)}")


def format_literal(f) -> str:
    return ",".join(str(c) for c in f.coeffs) + f" @ {f.p}"


def format_poly(f) -> str:
    if isinstance(f, QuadPoly3):
        monos = ("xy", "xz", "yz", "x^2", "y^2", "z^2", "x", "y", "z", "")
    else:
        monos = ("xy", "x^2", "y^2", "x", "y", "")
    terms = []
    for c, mono in zip(f.coeffs, monos):
        if not c:
            continue
        if not mono:
            terms.append(str(c))
        else:
            terms.append(mono if c == 1 else f"{c}{mono}")
    return (" + ".join(terms) or "0") + f" (mod {f.p})"
