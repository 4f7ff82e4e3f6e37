"""Point-plane configurations whose weighted incidence count equals the energy.

Every (u, v, w) in U x V x W contributes one point and one plane. Points and
planes are coalesced and carry multiplicities, so that

    sum over incident (P, H) of m_R(P) * m_S(H) == energy3(f, U, V, W)

holds exactly. Planes are stored as (A, B, D) meaning A X + B Y + Z = D.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .energy import as_set
from .errors import PreconditionError
from .quadpoly import PolyClass3, QuadPoly3, classify3, permute3

MAX_COLLINEAR_POINTS = 2000


@dataclass(frozen=True)
class IncidenceConfig:
    p: int
    points: np.ndarray = field(repr=False)       # (n, 3)
    point_mult: np.ndarray = field(repr=False)   # (n,)
    planes: np.ndarray = field(repr=False)       # (k, 3): A, B, D
    plane_mult: np.ndarray = field(repr=False)   # (k,)
    case_tag: str = ""

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_planes(self) -> int:
        return len(self.planes)

    def to_text(self) -> str:
        buf = io.StringIO()
        buf.write("# incidence config: P x1 x2 x3 m | H A B D m  (plane A*X + B*Y + Z = D)\n")
        buf.write(f"p {self.p}\n")
        buf.write(f"case {self.case_tag or '-'}\n")
        for (x1, x2, x3), m in zip(self.points.tolist(), self.point_mult.tolist()):
            buf.write(f"P {x1} {x2} {x3} {m}\n")
        for (A, B, D), m in zip(self.planes.tolist(), self.plane_mult.tolist()):
            buf.write(f"H {A} {B} {D} {m}\n")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> "IncidenceConfig":
        p, case = None, ""
        pts, pm, pls, sm = [], [], [], []
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tok = line.split()
            try:
                if tok[0] == "p":
                    p = int(tok[1])
                elif tok[0] == "case":
                    case = "" if tok[1] == "-" else tok[1]
                elif tok[0] in ("P", "H") and len(tok) == 5:
                    vals = [int(t) for t in tok[1:]]
                    if vals[3] < 1:
                        raise ValueError("multiplicity must be >= 1")
                    (pts if tok[0] == "P" else pls).append(vals[:3])
                    (pm if tok[0] == "P" else sm).append(vals[3])
                else:
                    raise ValueError(f"unknown record {tok[0]!r}")
            except (ValueError, IndexError) as exc:
                raise PreconditionError(f"line {lineno}: {exc}") from None
        if p is None:
            raise PreconditionError("config has no 'p' header")
        arr = lambda x: np.asarray(x, dtype=np.int64).reshape(-1, 3) % p  # noqa: E731
        return cls(p, arr(pts), np.asarray(pm, dtype=np.int64), arr(pls),
                   np.asarray(sm, dtype=np.int64), case)


def _coalesce(rows: np.ndarray):
    uniq, counts = np.unique(rows, axis=0, return_counts=True)
    return uniq.astype(np.int64), counts.astype(np.int64)


def _grid3(U, V, W):
    x, y, z = np.meshgrid(np.asarray(U), np.asarray(V), np.asarray(W), indexing="ij")
    return x.reshape(-1).astype(np.int64), y.reshape(-1).astype(np.int64), z.reshape(-1).astype(np.int64)


def build_config(f: QuadPoly3, U, V, W, cls: PolyClass3 | None = None) -> IncidenceConfig:
    """Point and plane multisets for f over U x V x W, following the Case 1-4 constructions."""
    p = f.p
    sets = [as_set(s, p, name=n) for s, n in zip((U, V, W), "UVW")]
    if cls is None:
        cls = classify3(f)
    if not cls.is_case:
        raise PreconditionError(f"no incidence construction for class {cls.tag}")
    perm = cls.permutation
    g = permute3(f, perm)
    U, V, W = (sets[k] for k in perm)
    a, b, c, d, e, gz, h, i, j = g.coeffs[:9]

    if cls.tag == "Case4":
        # point from (x, y', z'), plane from (x', y, z)
        x, y1, z1 = _grid3(U, V, W)
        pts = np.stack([x, a * y1 + b * z1,
                        d * x * x - e * y1 * y1 - c * y1 * z1 - gz * z1 * z1 + h * x - i * y1 - j * z1], axis=1)
        x2, y, z = _grid3(U, V, W)
        pls = np.stack([a * y + b * z, -x2,
                        d * x2 * x2 - e * y * y - c * y * z - gz * z * z + h * x2 - i * y - j * z], axis=1)
    else:
        if c:
            raise AssertionError("Case 1-3 template requires no yz term")
        r = lambda t: d * t * t + h * t    # noqa: E731
        s = lambda t: e * t * t + i * t    # noqa: E731
        tt = lambda t: gz * t * t + j * t  # noqa: E731
        # point from (x, y', z), plane from (x', y, z')
        x, y1, z = _grid3(U, V, W)
        pts = np.stack([x, y1, b * x * z + r(x) + tt(z) - s(y1)], axis=1)
        x2, y, z2 = _grid3(U, V, W)
        pls = np.stack([a * y, -a * x2, b * x2 * z2 + r(x2) + tt(z2) - s(y)], axis=1)

    P, pm = _coalesce(pts % p)
    H, hm = _coalesce(pls % p)
    return IncidenceConfig(p, P, pm, H, hm, cls.tag)


def count_incidences(cfg: IncidenceConfig, chunk: int = 1 << 22) -> tuple[int, int]:
    """(unweighted I, weighted sum of m_R * m_S) over incident point-plane pairs."""
    p = cfg.p
    if cfg.n_points == 0 or cfg.n_planes == 0:
        return 0, 0
    normals, group = np.unique(cfg.planes[:, :2], axis=0, return_inverse=True)
    group = group.reshape(-1)
    dense = np.zeros((len(normals), p), dtype=np.int64)
    np.add.at(dense, (group, cfg.planes[:, 2]), cfg.plane_mult)
    X = cfg.points
    unweighted = weighted = 0
    per = max(1, chunk // max(1, len(X)))
    for lo in range(0, len(normals), per):
        A = normals[lo:lo + per, 0:1]
        B = normals[lo:lo + per, 1:2]
        probe = (A * X[:, 0] + B * X[:, 1] + X[:, 2]) % p
        hit = np.take_along_axis(dense[lo:lo + per], probe, axis=1)
        unweighted += int(np.count_nonzero(hit))
        weighted += int((hit * cfg.point_mult[None, :]).sum())
    return unweighted, weighted


def count_incidences_naive(cfg: IncidenceConfig) -> tuple[int, int]:
    """Pairwise check of every point against every plane."""
    p = cfg.p
    unweighted = weighted = 0
    for (x1, x2, x3), mr in zip(cfg.points.tolist(), cfg.point_mult.tolist()):
        for (A, B, D), ms in zip(cfg.planes.tolist(), cfg.plane_mult.tolist()):
            if (A * x1 + B * x2 + x3 - D) % p == 0:
                unweighted += 1
                weighted += mr * ms
    return unweighted, weighted


def max_collinear(points, p: int) -> int:
    """Largest number of distinct points of F_p^3 on one line."""
    P = np.unique(np.asarray(points, dtype=np.int64).reshape(-1, 3) % p, axis=0)
    n = len(P)
    if n > MAX_COLLINEAR_POINTS:
        raise PreconditionError(f"max_collinear limited to {MAX_COLLINEAR_POINTS} points, got {n}")
    if n <= 2:
        return n
    inv = np.zeros(p, dtype=np.int64)
    inv[1:] = [pow(a, p - 2, p) for a in range(1, p)]
    best = 2
    for idx in range(n - 2):
        diff = (P[idx + 1:] - P[idx]) % p
        lead = np.argmax(diff != 0, axis=1)
        scale = inv[diff[np.arange(len(diff)), lead]]
        dirs = diff * scale[:, None] % p
        keys = (dirs[:, 0] * p + dirs[:, 1]) * p + dirs[:, 2]
        _, cnt = np.unique(keys, return_counts=True)
        best = max(best, int(cnt.max()) + 1)
    return best


def vertical_line_in_plane(plane, x0: int, y0: int, p: int) -> bool:
    """Whether the line {(x0, y0, z)} lies in the plane A X + B Y + Z = D (checked for all z)."""
    A, B, D = (int(v) for v in plane)
    return all((A * x0 + B * y0 + z - D) % p == 0 for z in range(p))


def rudnev_bound(nR: float, nS: float, k: float) -> float:
    """|R|^{1/2}|S| + k|S| with constant 1."""
    return nR ** 0.5 * nS + k * nS


def rudnev_hypotheses(nR: int, nS: int, p: int, slack: float = 2.0) -> bool:
    """|R| <= slack * |S| and |R| <= p^2."""
    return nR <= slack * nS and nR <= p * p


def vinh_bound(nR: float, nS: float, q: float, d: int) -> float:
    """|R||S|/q + q^{(d-1)/2} (|R||S|)^{1/2} with constant 1."""
    return nR * nS / q + q ** ((d - 1) / 2) * (nR * nS) ** 0.5


def kst_bound(nA: float, nB: float, t: float) -> float:
    """t^{1/2}|A||B|^{1/2} + |B| with constant 1."""
    return t ** 0.5 * nA * nB ** 0.5 + nB


@dataclass(frozen=True)
class BoundReport:
    exact_count: int
    comparator_value: float
    comparator_name: str
    params: dict

    @property
    def ratio(self) -> float:
        return self.exact_count / self.comparator_value if self.comparator_value else float("inf")

    def to_dict(self) -> dict:
        return {"exact_count": self.exact_count, "comparator_value": self.comparator_value,
                "comparator_name": self.comparator_name, "params": self.params, "ratio": self.ratio}


def rudnev_report(cfg: IncidenceConfig, k: int | None = None) -> BoundReport:
    if k is None:
        k = max_collinear(cfg.points, cfg.p)
    unweighted, _ = count_incidences(cfg)
    value = rudnev_bound(cfg.n_points, cfg.n_planes, k)
    return BoundReport(unweighted, value, "rudnev", {"k": k, "nR": cfg.n_points, "nS": cfg.n_planes})


def vinh_report(cfg: IncidenceConfig) -> BoundReport:
    unweighted, _ = count_incidences(cfg)
    value = vinh_bound(cfg.n_points, cfg.n_planes, cfg.p, 3)
    return BoundReport(unweighted, value, "vinh", {"q": cfg.p, "d": 3, "nR": cfg.n_points, "nS": cfg.n_planes})
