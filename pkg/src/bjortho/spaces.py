"""Concrete finite-dimensional normed spaces.

Two element types live here:

* ``FiniteFunction`` -- a scalar function on a finite index set, normed either
  by the sup norm (an element of C(K) for finite K) or by a weighted p-norm
  (an element of discrete L^p(mu)).
* ``MatrixOperator`` -- a dense matrix under the spectral (operator 2-) norm.

Norms, norming functionals and norm-attainment sets are computed here; the
orthogonality procedures in :mod:`bjortho.bj` build on them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from bjortho.errors import BadExponent, DegenerateZero, FieldMismatch, RoleError, ShapeError


class ScalarField(enum.Enum):
    REAL = "real"
    COMPLEX = "complex"

    @classmethod
    def infer(cls, values) -> "ScalarField":
        values = np.asarray(values)
        if np.iscomplexobj(values) and np.any(values.imag != 0):
            return cls.COMPLEX
        return cls.REAL


def _as_field(field) -> ScalarField:
    if isinstance(field, ScalarField):
        return field
    return ScalarField(str(field).lower())


def _frozen_complex(values, field: ScalarField) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if field is ScalarField.REAL and np.any(arr.imag != 0):
        raise FieldMismatch("real space element has nonzero imaginary parts")
    if not np.all(np.isfinite(arr)):
        raise ValueError("values must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FiniteFunction:
    """A function on points ``0..n-1``.

    ``p is None`` means the sup-norm role (no weights); otherwise the element
    lives in discrete L^p with the given positive weights.
    """

    field: ScalarField
    values: np.ndarray
    p: Optional[float] = None
    weights: Optional[np.ndarray] = None

    def __post_init__(self):
        field = _as_field(self.field)
        object.__setattr__(self, "field", field)
        values = _frozen_complex(self.values, field)
        if values.ndim != 1 or values.size < 1:
            raise ShapeError("values must be a nonempty 1-d array")
        object.__setattr__(self, "values", values)
        if self.p is None:
            if self.weights is not None:
                raise RoleError("sup-norm functions carry no weights")
            return
        p = float(self.p)
        if not p > 1 or not np.isfinite(p):
            raise BadExponent(f"p must be a finite real > 1, got {self.p!r}")
        object.__setattr__(self, "p", p)
        if self.weights is None:
            weights = np.ones(values.size)
        else:
            weights = np.array(self.weights, dtype=float)
        if weights.shape != values.shape:
            raise ShapeError("weights must match values in length")
        if not np.all(weights > 0) or not np.all(np.isfinite(weights)):
            raise ValueError("weights must be finite and strictly positive")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def sup(cls, values, field=None) -> "FiniteFunction":
        field = ScalarField.infer(values) if field is None else field
        return cls(field, values)

    @classmethod
    def lp(cls, values, p, weights=None, field=None) -> "FiniteFunction":
        field = ScalarField.infer(values) if field is None else field
        return cls(field, values, p=p, weights=weights)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def role(self) -> str:
        return "sup" if self.p is None else "lp"

    def with_values(self, values) -> "FiniteFunction":
        """Same space (field, role, weights), new values."""
        return FiniteFunction(self.field, values, p=self.p, weights=self.weights)

    def __add__(self, other: "FiniteFunction") -> "FiniteFunction":
        check_same_space(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "FiniteFunction") -> "FiniteFunction":
        check_same_space(self, other)
        return self.with_values(self.values - other.values)

    def __mul__(self, c) -> "FiniteFunction":
        c = complex(c)
        if self.field is ScalarField.REAL and c.imag != 0:
            raise FieldMismatch("complex scalar on a real space")
        return self.with_values(c * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "FiniteFunction":
        return self.with_values(-self.values)

    def __repr__(self):
        role = "sup" if self.p is None else f"L^{self.p:g}"
        return f"FiniteFunction({role}, {self.field.value}, {np.round(self.values, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class MatrixOperator:
    field: ScalarField
    entries: np.ndarray

    def __post_init__(self):
        field = _as_field(self.field)
        object.__setattr__(self, "field", field)
        entries = _frozen_complex(self.entries, field)
        if entries.ndim != 2 or entries.size == 0:
            raise ShapeError("entries must be a nonempty 2-d array")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def of(cls, entries, field=None) -> "MatrixOperator":
        field = ScalarField.infer(entries) if field is None else field
        return cls(field, entries)

    @property
    def shape(self) -> tuple:
        return self.entries.shape

    def with_entries(self, entries) -> "MatrixOperator":
        return MatrixOperator(self.field, entries)

    def __add__(self, other: "MatrixOperator") -> "MatrixOperator":
        check_same_space(self, other)
        return self.with_entries(self.entries + other.entries)

    def __sub__(self, other: "MatrixOperator") -> "MatrixOperator":
        check_same_space(self, other)
        return self.with_entries(self.entries - other.entries)

    def __mul__(self, c) -> "MatrixOperator":
        c = complex(c)
        if self.field is ScalarField.REAL and c.imag != 0:
            raise FieldMismatch("complex scalar on a real space")
        return self.with_entries(c * self.entries)

    __rmul__ = __mul__

    def __neg__(self) -> "MatrixOperator":
        return self.with_entries(-self.entries)

    def __matmul__(self, vec):
        return self.entries @ np.asarray(vec)

    def __repr__(self):
        return f"MatrixOperator({self.field.value}, shape={self.shape})"


Element = Union[FiniteFunction, MatrixOperator]


def check_same_space(x: Element, y: Element) -> None:
    """Raise unless ``x`` and ``y`` live in the same normed space."""
    if type(x) is not type(y):
        raise RoleError(f"cannot mix {type(x).__name__} and {type(y).__name__}")
    if x.field is not y.field:
        raise FieldMismatch(f"field mismatch: {x.field.value} vs {y.field.value}")
    if isinstance(x, MatrixOperator):
        if x.shape != y.shape:
            raise ShapeError(f"shape mismatch: {x.shape} vs {y.shape}")
        return
    if x.n != y.n:
        raise ShapeError(f"length mismatch: {x.n} vs {y.n}")
    if x.p != y.p:
        raise RoleError(f"norm role mismatch: p={x.p} vs p={y.p}")
    if x.p is not None and not np.array_equal(x.weights, y.weights):
        raise RoleError("weight mismatch between L^p elements")


# ---------------------------------------------------------------------------
# norms


def spectral_norm(a) -> float:
    """Largest singular value (LAPACK SVD)."""
    return float(np.linalg.svd(np.asarray(a), compute_uv=False)[0])


def power_iteration_norm(a, restarts: int = 2, tol: float = 1e-12,
                         max_iter: int = 20000, seed: int = 0) -> float:
    """Spectral norm by power iteration on A^H A with random starts.

    Independent of the SVD path; used as a cross-check.
    """
    a = np.asarray(a, dtype=complex)
    gram = a.conj().T @ a
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(max(1, restarts)):
        v = rng.standard_normal(a.shape[1]) + 1j * rng.standard_normal(a.shape[1])
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(max_iter):
            w = gram @ v
            nw = np.linalg.norm(w)
            if nw == 0.0:
                break
            v = w / nw
            new_lam = float(np.real(np.vdot(v, gram @ v)))
            if abs(new_lam - lam) <= tol * max(new_lam, 1e-300):
                lam = new_lam
                break
            lam = new_lam
        best = max(best, lam)
    return float(np.sqrt(max(best, 0.0)))


def norm(x: Element) -> float:
    """Norm of ``x`` in its own space: sup, weighted p, or spectral."""
    if isinstance(x, MatrixOperator):
        return spectral_norm(x.entries)
    mod = np.abs(x.values)
    if x.p is None:
        return float(mod.max())
    return float(np.sum(x.weights * mod ** x.p) ** (1.0 / x.p))


def is_zero(x: Element) -> bool:
    arr = x.entries if isinstance(x, MatrixOperator) else x.values
    return not np.any(arr)


def norm_batch(x: Element, y: Element, alphas) -> np.ndarray:
    """``norm(x + a*y)`` for every ``a`` in ``alphas`` (vectorised)."""
    alphas = np.asarray(alphas, dtype=complex)
    if isinstance(x, MatrixOperator):
        stack = x.entries[None, :, :] + alphas[:, None, None] * y.entries[None, :, :]
        return np.linalg.svd(stack, compute_uv=False)[:, 0]
    mod = np.abs(x.values[None, :] + alphas[:, None] * y.values[None, :])
    if x.p is None:
        return mod.max(axis=1)
    return np.sum(x.weights[None, :] * mod ** x.p, axis=1) ** (1.0 / x.p)


def pencil_norm(x: Element, y: Element, alpha) -> float:
    """``norm(x + alpha*y)`` without building an intermediate element."""
    if isinstance(x, MatrixOperator):
        return spectral_norm(x.entries + alpha * y.entries)
    mod = np.abs(x.values + alpha * y.values)
    if x.p is None:
        return float(mod.max())
    return float(np.sum(x.weights * mod ** x.p) ** (1.0 / x.p))


# ---------------------------------------------------------------------------
# norm attainment


@dataclass(frozen=True)
class NormAttainmentSet:
    indices: tuple
    rel_tol: float

    def __contains__(self, i) -> bool:
        return i in self.indices

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def norm_attainment_set(f: FiniteFunction, rel_tol: float = 1e-9) -> NormAttainmentSet:
    """Indices where ``|f|`` reaches ``(1 - rel_tol) * max|f|``."""
    mod = np.abs(f.values)
    top = mod.max()
    if top == 0:
        raise DegenerateZero("norm attainment set of the zero function")
    idx = np.flatnonzero(mod >= (1.0 - rel_tol) * top)
    return NormAttainmentSet(tuple(int(i) for i in idx), float(rel_tol))


# ---------------------------------------------------------------------------
# dual vectors


@dataclass(frozen=True, eq=False)
class DualVector:
    """A linear functional acting by ``phi(x) = sum(coeffs * x)``.

    ``kind`` names the primal space so the dual norm can be evaluated:
    l1 for sup-norm spaces, the weighted q-norm for L^p, nuclear for matrices.
    """

    kind: str
    coeffs: np.ndarray
    p: Optional[float] = None
    weights: Optional[np.ndarray] = None

    def __call__(self, x) -> complex:
        arr = x.entries if isinstance(x, MatrixOperator) else getattr(x, "values", x)
        return complex(np.sum(self.coeffs * np.asarray(arr)))

    def dual_norm(self) -> float:
        c = self.coeffs
        if self.kind == "sup":
            return float(np.sum(np.abs(c)))
        if self.kind == "lp":
            q = self.p / (self.p - 1.0)
            return float(np.sum(self.weights * np.abs(c / self.weights) ** q) ** (1.0 / q))
        if self.kind == "matrix":
            return float(np.sum(np.linalg.svd(c, compute_uv=False)))
        raise ValueError(f"unknown dual kind {self.kind!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "coeffs": _pairs(self.coeffs)}
        if self.p is not None:
            out["p"] = self.p
        return out


def _pairs(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def point_evaluation(f: FiniteFunction, index: int, phase: complex = 1.0) -> DualVector:
    coeffs = np.zeros(f.n, dtype=complex)
    coeffs[index] = phase
    return DualVector("sup", coeffs)


def conjugate_functional(f: FiniteFunction) -> DualVector:
    """Norming functional of an L^p element: weights * |f|^(p-1) * conj(sgn f) / ||f||^(p-1)."""
    nf = norm(f)
    if nf == 0:
        raise DegenerateZero("norming functional of zero")
    mod = np.abs(f.values)
    phase = np.zeros_like(f.values)
    nz = mod > 0
    phase[nz] = np.conj(f.values[nz]) / mod[nz]
    coeffs = f.weights * (mod / nf) ** (f.p - 1.0) * phase
    return DualVector("lp", coeffs, p=f.p, weights=f.weights)


def norming_functional(x: Element) -> DualVector:
    """A unit dual vector ``phi`` with ``phi(x) = norm(x)``."""
    if is_zero(x):
        raise DegenerateZero("norming functional of zero")
    if isinstance(x, MatrixOperator):
        u, s, vh = np.linalg.svd(x.entries)
        # phi(B) = u1^H B v1
        coeffs = np.outer(u[:, 0].conj(), vh[0].conj())
        return DualVector("matrix", coeffs)
    if x.p is not None:
        return conjugate_functional(x)
    k = int(np.argmax(np.abs(x.values)))
    v = x.values[k]
    return point_evaluation(x, k, np.conj(v) / abs(v))
