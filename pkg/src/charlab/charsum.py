"""Weighted multiple character sums, moment sums, the Hoelder chain and bound evaluators."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .energy import ValueHistogram, as_set, histogram2, histogram3
from .errors import PreconditionError
from .ff_core import MultChar, char_eval
from .quadpoly import QuadPoly2, QuadPoly3, eval2, eval3

WEIGHT_SCHEMES = ("unit", "random_phase", "random_modulus")
REL_TOL = 1e-9


class RegimeWarning(UserWarning):
    pass


@dataclass(frozen=True)
class WeightedSet:
    elements: tuple[int, ...]
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.complex128).reshape(-1)
        if len(w) != len(self.elements):
            raise PreconditionError("one weight per element required")
        if len(set(self.elements)) != len(self.elements) or 0 in self.elements:
            raise PreconditionError("elements must be distinct and nonzero")
        if np.any(np.abs(w) > 1 + 1e-12):
            raise PreconditionError("weights must have modulus <= 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def unit(cls, elements) -> "WeightedSet":
        el = tuple(sorted(set(int(t) for t in elements)))
        return cls(el, np.ones(len(el), dtype=np.complex128))

    def __len__(self) -> int:
        return len(self.elements)


def make_weights(scheme: str, shape, seed: int | None = None) -> np.ndarray:
    """Weights of modulus <= 1: all ones, uniform random phases, or random phase and modulus."""
    if scheme == "unit":
        return np.ones(shape, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    phase = np.exp(2j * np.pi * rng.random(shape))
    if scheme == "random_phase":
        return phase
    if scheme == "random_modulus":
        return phase * rng.random(shape)
    raise PreconditionError(f"unknown weight scheme {scheme!r}; choose from {WEIGHT_SCHEMES}")


def weighted_set(elements, scheme: str = "unit", seed: int | None = None) -> WeightedSet:
    el = tuple(sorted(set(int(t) for t in elements)))
    return WeightedSet(el, make_weights(scheme, len(el), seed))


def _check_weights(beta, shape) -> np.ndarray:
    if beta is None:
        return np.ones(shape, dtype=np.complex128)
    beta = np.asarray(beta, dtype=np.complex128)
    if beta.shape != tuple(shape):
        raise PreconditionError(f"weights have shape {beta.shape}, expected {tuple(shape)}")
    if np.any(np.abs(beta) > 1 + 1e-12):
        raise PreconditionError("weights must have modulus <= 1")
    return beta


def shift_profile(T: WeightedSet, chi: MultChar) -> np.ndarray:
    """c[lam] = sum_t alpha_t chi(t + lam) for every lam in F_p."""
    p = chi.ctx.p
    lam = np.arange(p)[:, None]
    t = np.asarray(T.elements, dtype=np.int64)[None, :]
    return chi.table[(lam + t) % p] @ T.weights


def _weighted_hist(vals: np.ndarray, beta: np.ndarray, p: int) -> np.ndarray:
    v = vals.reshape(-1)
    b = beta.reshape(-1)
    return (np.bincount(v, weights=b.real, minlength=p)
            + 1j * np.bincount(v, weights=b.imag, minlength=p))


def _values3(f, U, V, W):
    u = np.asarray(U, dtype=np.int64)[:, None, None]
    v = np.asarray(V, dtype=np.int64)[None, :, None]
    w = np.asarray(W, dtype=np.int64)[None, None, :]
    return eval3(f, u, v, w)


def _values2(f, U, V):
    return eval2(f, np.asarray(U, dtype=np.int64)[:, None], np.asarray(V, dtype=np.int64)[None, :])


def char_sum3(T: WeightedSet, U, V, W, beta, chi: MultChar, f: QuadPoly3) -> complex:
    """sum alpha_t beta_uvw chi(t + f(u, v, w)) via the weighted value histogram.

    ``beta`` is indexed like the sorted sets U, V, W; None means unit weights.
    """
    p = f.p
    U, V, W = (as_set(s, p, name=n) for s, n in zip((U, V, W), "UVW"))
    beta = _check_weights(beta, (len(U), len(V), len(W)))
    nb = _weighted_hist(_values3(f, U, V, W), beta, p)
    return complex(nb @ shift_profile(T, chi))


def char_sum2(T: WeightedSet, U, V, beta, chi: MultChar, f: QuadPoly2) -> complex:
    p = f.p
    U, V = (as_set(s, p, name=n) for s, n in zip((U, V), "UV"))
    beta = _check_weights(beta, (len(U), len(V)))
    nb = _weighted_hist(_values2(f, U, V), beta, p)
    return complex(nb @ shift_profile(T, chi))


def char_sum3_naive(T: WeightedSet, U, V, W, beta, chi, f) -> complex:
    U, V, W = (sorted(s) for s in (U, V, W))
    beta = _check_weights(beta, (len(U), len(V), len(W)))
    total = 0j
    for t, alpha in zip(T.elements, T.weights.tolist()):
        for (iu, u), (iv, v), (iw, w) in itertools.product(enumerate(U), enumerate(V), enumerate(W)):
            total += alpha * beta[iu, iv, iw] * char_eval(chi, t + eval3(f, u, v, w))
    return total


def char_sum2_naive(T: WeightedSet, U, V, beta, chi, f) -> complex:
    U, V = sorted(U), sorted(V)
    beta = _check_weights(beta, (len(U), len(V)))
    total = 0j
    for t, alpha in zip(T.elements, T.weights.tolist()):
        for (iu, u), (iv, v) in itertools.product(enumerate(U), enumerate(V)):
            total += alpha * beta[iu, iv] * char_eval(chi, t + eval2(f, u, v))
    return total


def moment_sum(T: WeightedSet, chi: MultChar, n: int) -> float:
    """M_{2n} = sum over lam in F_p of |sum_t alpha_t chi(lam + t)|^{2n}."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    return float(np.sum(np.abs(shift_profile(T, chi)) ** (2 * n)))


@dataclass(frozen=True)
class HolderCertificate:
    n: int
    s_abs: float          # |S| with the caller's weights
    majorant: float       # sum_lam N(lam) |c(lam)|
    extremal_abs: float   # |S| with the unit weights that attain the majorant
    moment: float         # M_{2n}
    energy: int
    domain_size: int
    lhs: float
    mid: float
    rhs: float

    @property
    def first_ok(self) -> bool:
        return self.lhs <= self.mid * (1 + REL_TOL)

    @property
    def second_ok(self) -> bool:
        return self.mid <= self.rhs * (1 + REL_TOL)

    @property
    def majorant_ok(self) -> bool:
        return self.s_abs <= self.majorant * (1 + REL_TOL) + 1e-9

    @property
    def holds(self) -> bool:
        return self.first_ok and self.second_ok and self.majorant_ok

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("n", "s_abs", "majorant", "extremal_abs", "moment",
                                           "energy", "domain_size", "lhs", "mid", "rhs")}
        d["holds"] = self.holds
        return d


def _certificate(n: int, vals: np.ndarray, beta: np.ndarray, hist: ValueHistogram,
                 T: WeightedSet, chi: MultChar) -> HolderCertificate:
    if n < 1:
        raise PreconditionError("n must be >= 1")
    p = hist.p
    c = shift_profile(T, chi)
    s = complex(_weighted_hist(vals, beta, p) @ c)
    N = hist.counts.astype(np.float64)
    absc = np.abs(c)
    majorant = float(N @ absc)
    # unit weights conj(c)/|c| make every term of the histogram sum nonnegative
    phase = np.where(absc > 0, np.conj(c) / np.where(absc > 0, absc, 1), 1)
    extremal = complex(_weighted_hist(vals, phase[vals], p) @ c)
    moment = float(np.sum(absc ** (2 * n)))
    q = 2 * n / (2 * n - 1)
    lhs = majorant ** (2 * n)
    mid = moment * float(np.sum(N ** q)) ** (2 * n - 1)
    rhs = float(hist.domain_size) ** (2 * n - 2) * hist.energy * moment
    return HolderCertificate(n, abs(s), majorant, abs(extremal), moment, hist.energy,
                             hist.domain_size, lhs, mid, rhs)


def holder_chain(T: WeightedSet, U, V, W, beta, chi: MultChar, f: QuadPoly3, n: int) -> HolderCertificate:
    """Evaluate |S|^{2n} <= M_{2n} (sum N^{2n/(2n-1)})^{2n-1} <= (UVW)^{2n-2} E M_{2n}.

    The left end uses the majorant sum_lam N(lam)|sum_t alpha_t chi(t + lam)|,
    which dominates |S| for every admissible beta.
    """
    p = f.p
    U, V, W = (as_set(s, p, name=nm) for s, nm in zip((U, V, W), "UVW"))
    beta = _check_weights(beta, (len(U), len(V), len(W)))
    vals = _values3(f, U, V, W)
    return _certificate(n, vals, beta, histogram3(f, U, V, W), T, chi)


def holder_chain2(T: WeightedSet, U, V, beta, chi: MultChar, f: QuadPoly2, n: int) -> HolderCertificate:
    p = f.p
    U, V = (as_set(s, p, name=nm) for s, nm in zip((U, V), "UV"))
    beta = _check_weights(beta, (len(U), len(V)))
    return _certificate(n, _values2(f, U, V), beta, histogram2(f, U, V), T, chi)


# ---------------------------------------------------------------------------
# bound evaluators, all with implicit constant 1

def moment_tail(T: float, p: float, n: int) -> float:
    """T^{1/2} p^{1/2} for n = 1, else T p^{1/4n} + T^{1/2} p^{1/2n}."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    if n == 1:
        return math.sqrt(T) * math.sqrt(p)
    return T * p ** (1 / (4 * n)) + math.sqrt(T) * p ** (1 / (2 * n))


def regime_thm14(U: int, V: int, W: int, p: int) -> str:
    return "small" if U * V * W <= p * p else "large"


def regime_thm17(V: int, diff: int, p: int) -> str:
    return "small" if V * V * diff <= p * p else "large"


def _warn_mismatch(expected: str, regime: str, what: str):
    if expected != regime:
        warnings.warn(f"regime-mismatch: {what} puts these sizes in the {expected} regime, "
                      f"evaluating the {regime} bound anyway", RegimeWarning, stacklevel=3)


def bound_thm14(U: int, V: int, W: int, T: int, p: int, n: int, regime: str) -> float:
    """Three-variable character sum bound.

    small: ((UVW)^{1-1/4n} + UVW Omega^{1/n}) * tail
    large: (UVW / p^{1/2n} + UVW Omega^{1/n}) * tail
    with Omega = max(1/U, 1/V, 1/W). Warns with RegimeWarning if UVW vs p^2
    disagrees with ``regime``.
    """
    if regime not in ("small", "large"):
        raise PreconditionError(f"regime must be 'small' or 'large', got {regime!r}")
    _warn_mismatch(regime_thm14(U, V, W, p), regime, "UVW vs p^2")
    uvw = float(U) * V * W
    omega = max(1 / U, 1 / V, 1 / W)
    if regime == "small":
        head = uvw ** (1 - 1 / (4 * n))
    else:
        head = uvw / p ** (1 / (2 * n))
    return (head + uvw * omega ** (1 / n)) * moment_tail(T, p, n)


def bound_thm17(U: int, V: int, T: int, p: int, k: float, n: int, regime: str) -> float:
    """Two-variable character sum bound with |U - V| ~ kU.

    small: (k^{3/4n} UV / (U^{1/4n} V^{1/2n}) + k^{1/n} UV / V^{1/n}) * tail
    large: (k^{1/n} UV / p^{1/2n} + k^{1/n} UV / V^{1/n}) * tail

    The large-regime head uses UV; the printed form carries a stray W that has
    no meaning with two variables.
    """
    if regime not in ("small", "large"):
        raise PreconditionError(f"regime must be 'small' or 'large', got {regime!r}")
    if k <= 0:
        raise PreconditionError("k must be positive")
    _warn_mismatch(regime_thm17(V, k * U, p), regime, "V^2 |U-V| vs p^2")
    uv = float(U) * V
    second = k ** (1 / n) * uv / V ** (1 / n)
    if regime == "small":
        first = k ** (3 / (4 * n)) * uv / (U ** (1 / (4 * n)) * V ** (1 / (2 * n)))
    else:
        first = k ** (1 / n) * uv / p ** (1 / (2 * n))
    return (first + second) * moment_tail(T, p, n)


def moment_bound(T: int, p: int, n: int) -> float:
    """Tp for n = 1, else T^{2n} p^{1/2} + T^n p."""
    if n == 1:
        return float(T) * p
    return float(T) ** (2 * n) * math.sqrt(p) + float(T) ** n * p
