"""The boundary-to-boundary arc of the harmonic gasket as a de Rham curve.

The arc between the first two simplex vertices is built two independent
ways: by generic corner cutting with ratio r = 1/(N+2), and as the
attractor of the two-map affine system, refined by recursive doubling.
Both live in the invariant plane spanned by the two vertices; chart
coordinates (t, s) are taken relative to the second vertex with unit axes
e1 (along the chord) and e2 (toward the chord from the region's interior),
so the curve is the graph of a convex function s(t) <= 0 on [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import geometry
from .errors import DepthLimitError, InvalidDimensionError

MAX_DEPTH = 26


def _check_depth(depth: int) -> None:
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if depth > MAX_DEPTH:
        raise DepthLimitError(f"depth {depth} exceeds {MAX_DEPTH}")


def corner_cut(points: np.ndarray, r: float, k: int) -> np.ndarray:
    """k steps of the de Rham subdivision on an open polyline: each edge
    contributes two new vertices at parameters r and 1-r, old vertices are
    dropped.  k = 0 returns the input."""
    if not 0.0 < r < 0.5:
        raise ValueError(f"ratio r={r} outside (0, 1/2)")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 3:
        raise ValueError("need an open polyline with at least 2 edges")
    for _ in range(k):
        a, b = pts[:-1], pts[1:]
        cut = np.empty((2 * len(a),) + pts.shape[1:])
        cut[0::2] = a + r * (b - a)
        cut[1::2] = a + (1 - r) * (b - a)
        pts = cut
    return pts


def _s_affine(n: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    return geometry.s_map(n, j).as_float()


@lru_cache(maxsize=8)
def _gamma_cached(n: int, depth: int) -> np.ndarray:
    p1 = geometry.to_float_point(geometry.vertex(n, 1))
    p2 = geometry.to_float_point(geometry.vertex(n, 2))
    a1, b1 = _s_affine(n, 1)
    a2, b2 = _s_affine(n, 2)
    pts = np.stack([p2, p1])
    for _ in range(depth):
        left = pts @ a2.T + b2
        right = pts @ a1.T + b1
        pts = np.concatenate([left, right[1:]])
    pts.setflags(write=False)
    return pts


def gamma_polyline(n: int, depth: int) -> np.ndarray:
    """The 2^depth + 1 cell-junction points of the arc, every one exactly on
    the curve, ordered from p_2 (t = 0) to p_1 (t = 1).  Ambient actual
    coordinates, shape (2^depth + 1, N)."""
    geometry.check_dimension(n)
    _check_depth(depth)
    return _gamma_cached(n, depth)


def derham_midpoint_polyline(n: int, depth: int) -> np.ndarray:
    """The corner-cut vertex set of the arc at a given depth: the two
    endpoints plus the images of the chord-midpoint generator under all
    two-letter words, shape (2^depth + 2, N)."""
    geometry.check_dimension(n)
    _check_depth(depth)
    p1 = geometry.to_float_point(geometry.vertex(n, 1))
    p2 = geometry.to_float_point(geometry.vertex(n, 2))
    a1, b1 = _s_affine(n, 1)
    a2, b2 = _s_affine(n, 2)
    mids = np.zeros((1, n))
    for _ in range(depth):
        mids = np.concatenate([mids @ a2.T + b2, mids @ a1.T + b1])
    return np.concatenate([p2[None], mids, p1[None]])


def gamma_by_corner_cutting(n: int, depth: int) -> np.ndarray:
    """Independent construction of the same vertex set as
    derham_midpoint_polyline by generic corner cutting of the initial
    polygon [2 p_2, 0, 2 p_1] with r = 1/(N+2), keeping the arc between the
    fixed edge midpoints p_2 and p_1."""
    geometry.check_dimension(n)
    _check_depth(depth)
    p1 = geometry.to_float_point(geometry.vertex(n, 1))
    p2 = geometry.to_float_point(geometry.vertex(n, 2))
    pts = corner_cut(np.stack([2 * p2, np.zeros(n), 2 * p1]), 1.0 / (n + 2), depth)
    first_mid = 0.5 * (pts[0] + pts[1])
    last_mid = 0.5 * (pts[-2] + pts[-1])
    return np.concatenate([first_mid[None], pts[1:-1], last_mid[None]])


def polyline_length(points: np.ndarray) -> float:
    return float(np.sum(np.linalg.norm(np.diff(points, axis=0), axis=1)))


# ---------------------------------------------------------------------------
# the graph chart g(t) = p_2 + t e1 + s(t) e2

@dataclass(frozen=True)
class CurvePoint:
    t: float
    s: float
    point: np.ndarray  # ambient actual coordinates


@dataclass(frozen=True)
class GammaChart:
    """Chart of the arc over its chord: knot abscissas (strictly increasing)
    and ordinates of the depth-refined polyline."""

    n: int
    depth: int
    t_knots: np.ndarray
    s_knots: np.ndarray

    def eval_s(self, t) -> np.ndarray:
        return np.interp(t, self.t_knots, self.s_knots)

    def eval_point(self, t) -> np.ndarray:
        """Ambient actual coordinates of g(t) (array t allowed)."""
        t = np.asarray(t, dtype=float)
        s = self.eval_s(t)
        pp = geometry.plane_p(self.n)
        p2 = geometry.to_float_point(geometry.vertex(self.n, 2))
        e2 = pp.e2 if pp.e2 is not None else np.zeros(self.n)
        return p2 + t[..., None] * pp.e1 + s[..., None] * e2

    def tangent(self, t, scale: float | None = None) -> np.ndarray:
        """Normalized chord direction over a symmetric window (one-sided at
        the endpoints) in chart coordinates (dt, ds)."""
        t = np.asarray(t, dtype=float)
        if scale is None:
            scale = 2.0 ** (-(self.depth // 2))
        lo = np.clip(t - scale, 0.0, 1.0)
        hi = np.clip(t + scale, 0.0, 1.0)
        dt = hi - lo
        ds = self.eval_s(hi) - self.eval_s(lo)
        vec = np.stack([dt, ds], axis=-1)
        norm = np.linalg.norm(vec, axis=-1, keepdims=True)
        if np.any(norm == 0):
            raise DepthLimitError("degenerate tangent difference; refine depth")
        return vec / norm


def to_chart(n: int, points: np.ndarray) -> np.ndarray:
    """Ambient actual points -> (t, s) chart coordinates relative to p_2."""
    pp = geometry.plane_p(n)
    p2 = geometry.to_float_point(geometry.vertex(n, 2))
    rel = np.asarray(points, dtype=float) - p2
    t = rel @ pp.e1
    s = rel @ pp.e2 if pp.e2 is not None else np.zeros_like(t)
    return np.stack([t, s], axis=-1)


@lru_cache(maxsize=8)
def gamma_chart(n: int, depth: int) -> GammaChart:
    pts = gamma_polyline(n, depth)
    chart = to_chart(n, pts)
    t, s = chart[:, 0], chart[:, 1]
    assert np.all(np.diff(t) > 0), "abscissa not strictly increasing"
    return GammaChart(n=n, depth=depth, t_knots=t, s_knots=s)


def eval_g(n: int, t: float, depth: int) -> CurvePoint:
    """Point of the depth-refined arc at abscissa t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"abscissa {t} outside [0, 1]")
    chart = gamma_chart(n, depth)
    s = float(chart.eval_s(t))
    return CurvePoint(t=t, s=s, point=chart.eval_point(t))


def tangent_g(n: int, t: float, depth: int) -> np.ndarray:
    """Unit tangent of the arc at abscissa t, chart coordinates (dt, ds)."""
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"abscissa {t} outside [0, 1]")
    if depth < 4:
        raise ValueError("tangent estimation needs depth >= 4")
    return gamma_chart(n, depth).tangent(np.asarray(t, dtype=float))


# ---------------------------------------------------------------------------
# Hoelder regularity of the derivative

def closed_form_holder(n: int) -> float:
    """Hoelder exponent of the arc's derivative (closed form in N)."""
    if n < 3:
        raise InvalidDimensionError("exponent defined for N >= 3 (N = 2 is a segment)")
    root = 1.0 + np.sqrt(4.0 * n + 1.0)
    num = np.log(n) + 2.0 * np.log(2.0) - 2.0 * np.log(root)
    den = np.log(root) - np.log(2.0) - np.log(n + 2.0)
    return float(num / den)


def protasov_holder(r: float) -> float:
    """Hoelder exponent of a generic corner-cutting curve's derivative for
    ratio r in (0, 1/4)."""
    if not 0.0 < r < 0.25:
        raise ValueError(f"ratio r={r} outside (0, 1/4)")
    return float(
        np.log(r * (1.0 - 2.0 * r))
        / (np.log(r + np.sqrt(4.0 * r - 7.0 * r * r)) - np.log(2.0))
        - 2.0
    )


def holder_estimate(
    n: int,
    h_exponents=range(6, 13),
    points_per_scale: float = 8.0,
    depth: int = 20,
    window_ratio: float = 0.25,
) -> tuple[float, float]:
    """Least-squares slope of log sup_t ||g'(t+h) - g'(t)|| against log h
    over dyadic h; returns (slope, r_squared).

    The sup is taken over a grid with step h/points_per_scale and the
    tangents are chord directions over windows proportional to h, so the
    estimator is self-similar across scales; coarser fixed grids miss the
    parameter locations where the worst-case modulus is attained and
    overestimate the exponent badly."""
    if n < 3:
        raise InvalidDimensionError("exponent defined for N >= 3")
    chart = gamma_chart(n, depth)
    hs = np.array([2.0 ** (-e) for e in h_exponents])
    ys = []
    for h in hs:
        base = np.linspace(0.0, 1.0 - h, int(np.ceil(points_per_scale / h)))
        t0 = chart.tangent(base, scale=h * window_ratio)
        t1 = chart.tangent(base + h, scale=h * window_ratio)
        ys.append(np.log(np.max(np.linalg.norm(t1 - t0, axis=-1))))
    x = np.log(hs)
    y = np.array(ys)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    r2 = 1.0 - np.sum(resid**2) / np.sum((y - y.mean()) ** 2)
    return float(slope), float(r2)


# ---------------------------------------------------------------------------
# the region bounded by the arc, the chord, and the far vertex projection

@dataclass(frozen=True)
class UpsilonRegion:
    """Membership test for the closed region: the triangle (p, p_1, p_2)
    minus the open lens between the arc and the chord [p_1, p_2].  All
    coordinates are chart coordinates relative to p_2."""

    n: int
    depth: int
    t_knots: np.ndarray
    s_knots: np.ndarray
    apex: np.ndarray       # chart coordinates of the common projection p
    origin: np.ndarray     # chart coordinates of the Y origin

    def contains(self, chart_points: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(chart_points, dtype=float))
        t, s = pts[:, 0], pts[:, 1]
        ax, ay = self.apex
        # triangle (0,0), (1,0), apex: below the chord, above both sides
        below_chord = s <= tol
        # side from p_2=(0,0) to apex, interior on the p_1 side
        side1 = (ax * s - ay * t) * np.sign(-ay) >= -tol
        # side from p_1=(1,0) to apex
        side2 = ((ax - 1.0) * s - ay * (t - 1.0)) * np.sign(ay) >= -tol
        in_omega = below_chord & side1 & side2
        s_curve = np.interp(t, self.t_knots, self.s_knots)
        in_lens = (t > 0.0) & (t < 1.0) & (s > s_curve + tol) & (s < -tol)
        return in_omega & ~in_lens


@lru_cache(maxsize=8)
def upsilon_region(n: int, depth: int = 16) -> UpsilonRegion:
    if n < 3:
        raise InvalidDimensionError("the region needs N >= 3")
    chart = gamma_chart(n, depth)
    apex = to_chart(n, geometry.to_float_point(geometry.vertex(n, 3)))
    origin = to_chart(n, np.zeros(n))
    return UpsilonRegion(
        n=n,
        depth=depth,
        t_knots=chart.t_knots,
        s_knots=chart.s_knots,
        apex=apex,
        origin=origin,
    )


def upsilon_contains(n: int, chart_points, depth: int = 16,
                     tol: float = 1e-9) -> np.ndarray:
    """Membership in the closed region for chart-coordinate points;
    boundary points within tol count as inside."""
    return upsilon_region(n, depth).contains(chart_points, tol=tol)


def project_to_chart(n: int, points: np.ndarray) -> np.ndarray:
    """Orthogonal projection of ambient actual points onto the plane,
    reported in chart coordinates."""
    return to_chart(n, points)


def sample_attractor_points(n: int, word_depth: int, count: int,
                            seed: int = 0) -> np.ndarray:
    """Ambient actual coordinates of S_w(p_1) for `count` uniformly random
    words of the given length (points of the harmonic gasket)."""
    geometry.check_dimension(n)
    rng = np.random.default_rng(seed)
    letters = rng.integers(1, n + 1, size=(count, word_depth))
    maps = [_s_affine(n, j) for j in range(1, n + 1)]
    pts = np.tile(geometry.to_float_point(geometry.vertex(n, 1)), (count, 1))
    for pos in range(word_depth - 1, -1, -1):
        col = letters[:, pos]
        for j in range(1, n + 1):
            mask = col == j
            if np.any(mask):
                a, b = maps[j - 1]
                pts[mask] = pts[mask] @ a.T + b
    return pts
