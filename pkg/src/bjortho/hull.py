"""Planar convex hulls and the "does the hull contain the origin" test.

Points are complex numbers (or ``(k, 2)`` float arrays); the membership test
returns convex weights when the origin is inside, and a separating direction
when it is not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


def _as_xy(points) -> np.ndarray:
    pts = np.asarray(points)
    if np.iscomplexobj(pts) or pts.ndim == 1:
        pts = np.asarray(pts, dtype=complex).ravel()
        return np.stack([pts.real, pts.imag], axis=1)
    return np.asarray(pts, dtype=float).reshape(-1, 2)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points) -> list:
    """Indices of the hull vertices in counter-clockwise order (monotone chain).

    Collinear boundary points and duplicates are dropped; for duplicated
    points the first occurrence is kept.
    """
    xy = _as_xy(points)
    if len(xy) == 0:
        return []
    order = sorted(range(len(xy)), key=lambda i: (xy[i, 0], xy[i, 1], i))
    uniq = []
    for i in order:
        if uniq and xy[uniq[-1], 0] == xy[i, 0] and xy[uniq[-1], 1] == xy[i, 1]:
            continue
        uniq.append(i)
    if len(uniq) <= 2:
        return uniq

    lower: list = []
    for i in uniq:
        while len(lower) >= 2 and _cross(xy[lower[-2]], xy[lower[-1]], xy[i]) <= 0:
            lower.pop()
        lower.append(i)
    upper: list = []
    for i in reversed(uniq):
        while len(upper) >= 2 and _cross(xy[upper[-2]], xy[upper[-1]], xy[i]) <= 0:
            upper.pop()
        upper.append(i)
    return lower[:-1] + upper[:-1]


@dataclass(frozen=True)
class OriginMembership:
    """Result of testing whether the origin lies in conv(points).

    ``distance`` is the Euclidean distance from 0 to the hull; ``depth`` is how
    far 0 sits inside a full-dimensional hull (0 for degenerate hulls and for
    outside points).  ``support``/``weights`` give a convex combination whose
    value is the hull point nearest to the origin (the origin itself when
    inside).
    """

    inside: bool
    distance: float
    depth: float
    vertices: tuple
    support: tuple
    weights: tuple
    normal: Optional[tuple]

    @property
    def margin(self) -> float:
        return self.depth if self.distance == 0.0 else -self.distance


def _closest_on_segment(a, b):
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return 0.0, a
    t = float(np.clip(-(a @ d) / dd, 0.0, 1.0))
    return t, a + t * d


def origin_in_hull(points, tol: float = 0.0) -> OriginMembership:
    """Decide ``0 in conv(points)`` up to distance ``tol``."""
    xy = _as_xy(points)
    hull = convex_hull(xy)
    if not hull:
        raise ValueError("empty point set")

    if len(hull) >= 3:
        depth = np.inf
        for a, b in zip(hull, hull[1:] + hull[:1]):
            edge = xy[b] - xy[a]
            signed = _cross(xy[a], xy[b], np.zeros(2)) / float(np.hypot(*edge))
            depth = min(depth, signed)
        if depth >= 0.0:
            support, weights = _fan_barycentric(xy, hull)
            return OriginMembership(True, 0.0, float(depth), tuple(hull),
                                    support, weights, None)
        edges = list(zip(hull, hull[1:] + hull[:1]))
    elif len(hull) == 2:
        edges = [(hull[0], hull[1])]
    else:
        edges = []

    if edges:
        best = None
        for a, b in edges:
            t, q = _closest_on_segment(xy[a], xy[b])
            dist = float(np.hypot(*q))
            if best is None or dist < best[0]:
                best = (dist, a, b, t, q)
        dist, a, b, t, q = best
        if t == 0.0:
            support, weights = (a,), (1.0,)
        elif t == 1.0:
            support, weights = (b,), (1.0,)
        else:
            support, weights = (a, b), (1.0 - t, t)
    else:
        q = xy[hull[0]]
        dist = float(np.hypot(*q))
        support, weights = (hull[0],), (1.0,)

    normal = None if dist == 0.0 else (float(q[0] / dist), float(q[1] / dist))
    return OriginMembership(dist <= tol, dist, 0.0, tuple(hull), tuple(support),
                            tuple(float(w) for w in weights), normal)


def _fan_barycentric(xy, hull):
    """Barycentric weights of the origin in a fan triangle of the hull."""
    o = xy[hull[0]]
    best = None
    for j in range(1, len(hull) - 1):
        a, b = xy[hull[j]], xy[hull[j + 1]]
        mat = np.array([[a[0] - o[0], b[0] - o[0]], [a[1] - o[1], b[1] - o[1]]])
        det = np.linalg.det(mat)
        if det == 0.0:
            continue
        lam = np.linalg.solve(mat, -o)
        w = np.array([1.0 - lam.sum(), lam[0], lam[1]])
        if best is None or w.min() > best[1].min():
            best = ((hull[0], hull[j], hull[j + 1]), w)
    idx, w = best
    w = np.clip(w, 0.0, None)
    w /= w.sum()
    keep = [k for k in range(3) if w[k] > 0.0]
    return tuple(idx[k] for k in keep), tuple(float(w[k]) for k in keep)
