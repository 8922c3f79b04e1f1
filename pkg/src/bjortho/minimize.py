"""Global minimisation of convex functions of one scalar (real or complex).

The objective is always ``alpha -> ||x + alpha*y||``, which is convex, so a
coarse grid followed by golden-section search is globally correct:

* real scalars: the best grid point brackets the minimiser exactly, and the
  bracket is refined by golden section;
* complex scalars: golden section over Re(alpha) of the partial minimum over
  Im(alpha) (itself convex), each partial minimum again by golden section.

Every value reported is an actual evaluation of the objective, so the
returned minimum is always an upper bound that can be re-checked directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Minimum:
    alpha: complex
    value: float
    evaluations: int


class _Tracker:
    """Wraps the scalar objective and remembers the best point seen."""

    def __init__(self, fun: Callable[[complex], float]):
        self.fun = fun
        self.best_alpha = 0j
        self.best_value = math.inf
        self.count = 0

    def __call__(self, alpha: complex) -> float:
        v = float(self.fun(alpha))
        self.count += 1
        if v < self.best_value:
            self.best_value, self.best_alpha = v, alpha
        return v

    def offer(self, alpha: complex, value: float, n: int = 0) -> None:
        self.count += n
        if value < self.best_value:
            self.best_value, self.best_alpha = float(value), alpha


def golden_section(fun: Callable[[float], float], lo: float, hi: float,
                   xtol: float) -> tuple:
    """Minimise a unimodal ``fun`` on ``[lo, hi]``; returns ``(x, f(x))``."""
    if hi - lo <= xtol:
        mid = 0.5 * (lo + hi)
        return mid, fun(mid)
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    while hi - lo > xtol:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = fun(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def minimize_convex(fun: Callable[[complex], float],
                    batch: Callable[[np.ndarray], np.ndarray],
                    radius: float, complex_field: bool,
                    grid: int = 65, rel_step: float = 1e-10,
                    chunk: int = 4225) -> Minimum:
    """Globally minimise a convex ``fun`` over ``|alpha| <= radius``.

    ``batch`` evaluates ``fun`` on an array of alphas and is used for the
    coarse grid.  Refinement stops once the golden-section bracket is below
    ``rel_step * radius``.  ``chunk`` caps how many grid points go to
    ``batch`` at once.
    """
    track = _Tracker(fun)
    track(0j)
    if radius <= 0.0:
        return Minimum(track.best_alpha, track.best_value, track.count)
    xtol = rel_step * radius
    axis = np.linspace(-radius, radius, grid)

    if not complex_field:
        _bracket_and_refine(track, batch, axis, xtol)
        return Minimum(track.best_alpha, track.best_value, track.count)

    re, im = np.meshgrid(axis, axis, indexing="ij")
    pts = (re + 1j * im).ravel()
    pts = pts[np.abs(pts) <= radius * (1 + 1e-12)]
    for start in range(0, len(pts), chunk):
        part = pts[start:start + chunk]
        vals = np.asarray(batch(part))
        k = int(np.argmin(vals))
        track.offer(complex(part[k]), vals[k], len(part))

    def partial(a: float) -> float:
        half = math.sqrt(max(radius * radius - a * a, 0.0))
        _, v = golden_section(lambda b: track(complex(a, b)), -half, half, xtol)
        return v

    golden_section(partial, -radius, radius, xtol)
    return Minimum(track.best_alpha, track.best_value, track.count)


def _bracket_and_refine(track: _Tracker, batch, axis: np.ndarray, xtol: float) -> None:
    vals = np.asarray(batch(axis.astype(complex)))
    k = int(np.argmin(vals))
    track.offer(complex(axis[k]), vals[k], len(axis))
    lo = axis[max(k - 1, 0)]
    hi = axis[min(k + 1, len(axis) - 1)]
    golden_section(lambda a: track(complex(a)), lo, hi, xtol)


def minimize_interval(fun: Callable[[float], float],
                      batch: Callable[[np.ndarray], np.ndarray],
                      lo: float, hi: float, grid: int = 65,
                      rel_step: float = 1e-10) -> Minimum:
    """Minimise a convex function of one real variable on ``[lo, hi]``."""
    track = _Tracker(lambda a: fun(a.real))
    axis = np.linspace(lo, hi, grid)
    _bracket_and_refine(track, lambda al: batch(al.real), axis, rel_step * (hi - lo))
    return Minimum(track.best_alpha, track.best_value, track.count)
