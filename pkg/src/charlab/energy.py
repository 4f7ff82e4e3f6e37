"""Value histograms, polynomial energies, dyadic level sets and the shear count."""

from __future__ import annotations

import io
import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .quadpoly import QuadPoly2, QuadPoly3, eval2, eval3, shear_2_to_3

BRUTEFORCE_LIMIT = 10_000


def as_set(values, p: int, allow_zero: bool = False, name: str = "set") -> tuple[int, ...]:
    """Validate a subset of F_p (of F_p^* unless allow_zero) and return it sorted."""
    vals = sorted({int(v) for v in values})
    if not vals:
        raise PreconditionError(f"{name} is empty")
    lo = 0 if allow_zero else 1
    bad = [v for v in vals if not lo <= v < p]
    if bad:
        where = "F_p" if allow_zero else "F_p^*"
        raise PreconditionError(f"{name} has elements outside {where} (p={p}): {bad[:5]}")
    return tuple(vals)


def difference_set(A, B, p: int) -> tuple[int, ...]:
    """Sorted {a - b : a in A, b in B} mod p."""
    a = np.asarray(sorted(set(A)), dtype=np.int64)
    b = np.asarray(sorted(set(B)), dtype=np.int64)
    return tuple(np.unique((a[:, None] - b[None, :]) % p).tolist())


@dataclass(frozen=True)
class ValueHistogram:
    p: int
    counts: np.ndarray = field(repr=False)
    domain_size: int

    @property
    def energy(self) -> int:
        return sum(c * c for c in self.counts.tolist())

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.counts)[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("lambda,count\n")
        for lam, c in enumerate(self.counts.tolist()):
            buf.write(f"{lam},{c}\n")
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {"p": self.p, "domain_size": self.domain_size, "energy": self.energy,
                "counts": self.counts.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _grid(*sets):
    arrays = [np.asarray(s, dtype=np.int64) for s in sets]
    k = len(arrays)
    return [a.reshape([-1 if i == j else 1 for j in range(k)]) for i, a in enumerate(arrays)]


def histogram3(f: QuadPoly3, U, V, W, allow_zero: bool = False) -> ValueHistogram:
    p = f.p
    U, V, W = (as_set(s, p, allow_zero, n) for s, n in zip((U, V, W), "UVW"))
    vals = eval3(f, *_grid(U, V, W))
    counts = np.bincount(vals.reshape(-1), minlength=p)
    hist = ValueHistogram(p, counts, len(U) * len(V) * len(W))
    assert int(counts.sum()) == hist.domain_size
    return hist


def energy3(f: QuadPoly3, U, V, W, allow_zero: bool = False) -> int:
    """Number of (u, v, w, u', v', w') with f(u, v, w) = f(u', v', w')."""
    return histogram3(f, U, V, W, allow_zero).energy


def histogram2(f: QuadPoly2, U, V, allow_zero: bool = False) -> ValueHistogram:
    p = f.p
    U, V = (as_set(s, p, allow_zero, n) for s, n in zip((U, V), "UV"))
    vals = eval2(f, *_grid(U, V))
    counts = np.bincount(vals.reshape(-1), minlength=p)
    return ValueHistogram(p, counts, len(U) * len(V))


def energy2(f: QuadPoly2, U, V) -> int:
    return histogram2(f, U, V).energy


def _coincidences(values: list[int]) -> int:
    # all ordered pairs (s, s') with equal values, compared directly
    v = np.asarray(values, dtype=np.int64)
    total = 0
    step = 2048
    for lo in range(0, len(v), step):
        total += int((v[lo:lo + step, None] == v[None, :]).sum())
    return total


def energy3_bruteforce(f: QuadPoly3, U, V, W, allow_zero: bool = False) -> int:
    p = f.p
    U, V, W = (as_set(s, p, allow_zero, n) for s, n in zip((U, V, W), "UVW"))
    if len(U) * len(V) * len(W) > BRUTEFORCE_LIMIT:
        raise PreconditionError(f"brute force limited to |U||V||W| <= {BRUTEFORCE_LIMIT}")
    vals = [eval3(f, u, v, w) for u, v, w in itertools.product(U, V, W)]
    return _coincidences(vals)


def energy2_bruteforce(f: QuadPoly2, U, V) -> int:
    p = f.p
    U, V = (as_set(s, p, False, n) for s, n in zip((U, V), "UV"))
    if len(U) * len(V) > BRUTEFORCE_LIMIT:
        raise PreconditionError(f"brute force limited to |U||V| <= {BRUTEFORCE_LIMIT}")
    vals = [eval2(f, u, v) for u, v in itertools.product(U, V)]
    return _coincidences(vals)


@dataclass(frozen=True)
class DyadicProfile:
    """Dyadic decomposition of the multiplicities m_t of a value histogram.

    ``levels`` holds (j, k_{2^j}) with k_{2^j} = #{t : m_t >= 2^j}; ``level_sets[j]``
    is that set D_j. ``bands`` holds (j, #{t : 2^j <= m_t < 2^{j+1}}).
    ``cumulative_sum`` = sum_j 2^{2j+2} k_{2^j} bounds E from above but can reach
    16E/3; ``band_sum`` = sum_j 2^{2j+2} |band_j| satisfies E <= band_sum <= 4E.
    """

    levels: list[tuple[int, int]]
    bands: list[tuple[int, int]]
    level_sets: dict[int, tuple[int, ...]] = field(repr=False)
    band_sets: dict[int, tuple[int, ...]] = field(repr=False)
    max_mult: int
    energy: int
    cumulative_sum: int
    band_sum: int

    def k(self, j: int) -> int:
        return dict(self.levels).get(j, 0)

    def to_dict(self) -> dict:
        return {
            "levels": [list(t) for t in self.levels],
            "bands": [list(t) for t in self.bands],
            "max_mult": self.max_mult,
            "energy": self.energy,
            "cumulative_sum": self.cumulative_sum,
            "band_sum": self.band_sum,
        }


def dyadic_profile(hist: ValueHistogram) -> DyadicProfile:
    counts = hist.counts
    max_mult = int(counts.max())
    if max_mult == 0:
        raise PreconditionError("empty histogram")
    top = math.ceil(math.log2(max_mult)) if max_mult > 1 else 0
    levels, bands, level_sets, band_sets = [], [], {}, {}
    for j in range(top + 1):
        lo, hi = 1 << j, 1 << (j + 1)
        D = tuple(np.nonzero(counts >= lo)[0].tolist())
        B = tuple(np.nonzero((counts >= lo) & (counts < hi))[0].tolist())
        level_sets[j], band_sets[j] = D, B
        levels.append((j, len(D)))
        bands.append((j, len(B)))
    cum = sum((1 << (2 * j + 2)) * k for j, k in levels)
    band = sum((1 << (2 * j + 2)) * k for j, k in bands)
    return DyadicProfile(levels, bands, level_sets, band_sets, max_mult, hist.energy, cum, band)


def shear_domain(U, V, p: int):
    """(V, V, V - U): the domain of h(x, y, z) = f(x - z, y)."""
    V = as_set(V, p, name="V")
    return V, V, difference_set(V, as_set(U, p, name="U"), p)


def shear_count(f: QuadPoly2, U, V, D) -> int:
    """#{(x, y, z, t) : x, y in V, z in V - U, t in D, f(x - z, y) = t}."""
    D = sorted({int(t) % f.p for t in D})
    if not D:
        return 0
    h = shear_2_to_3(f)
    hist = histogram3(h, *shear_domain(U, V, f.p), allow_zero=True)
    return int(hist.counts[D].sum())


def shear_energy(f: QuadPoly2, U, V) -> int:
    """Energy of the sheared polynomial over V x V x (V - U)."""
    return energy3(shear_2_to_3(f), *shear_domain(U, V, f.p), allow_zero=True)


def _pair_max(U: float, V: float, W: float) -> float:
    return max(V * V * W * W, V * V * U * U, U * U * W * W)


def energy_regime(U: int, V: int, W: int, p: int) -> str:
    """"small" when UVW <= p^2 (incidence route with collinearity), else "large"."""
    return "small" if U * V * W <= p * p else "large"


def energy_bound_small(U: int, V: int, W: int) -> float:
    """(UVW)^{3/2} + max{V^2W^2, V^2U^2, U^2W^2}, constant 1; meaningful when UVW <= p^2."""
    return float(U * V * W) ** 1.5 + _pair_max(U, V, W)


def energy_bound_large(U: int, V: int, W: int, p: int) -> float:
    """(UVW)^2 / p + max{V^2W^2, V^2U^2, U^2W^2}, constant 1; meaningful when UVW >= p^2."""
    return float(U * V * W) ** 2 / p + _pair_max(U, V, W)


def energy2_bound_small(V: int, diff: int) -> float:
    """V |U-V|^{3/2} + |U-V|^2, meaningful when V^2 |U-V| <= p^2."""
    return float(V) * float(diff) ** 1.5 + float(diff) ** 2


def energy2_bound_large(V: int, diff: int, p: int) -> float:
    """V^2 |U-V|^2 / p + |U-V|^2, meaningful when V^2 |U-V| >= p^2."""
    return float(V) ** 2 * float(diff) ** 2 / p + float(diff) ** 2
