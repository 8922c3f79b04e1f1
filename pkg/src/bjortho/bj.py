"""Deciding Birkhoff-James orthogonality.

``x`` is BJ-orthogonal to ``y`` when ``||x + a*y|| >= ||x||`` for every
scalar ``a``.  :func:`bj_generic` decides this straight from the definition by
convex minimisation; the other procedures use space-specific criteria and are
cross-checked against it in the test-suite.  Every decisive verdict carries a
certificate that :func:`bjortho.verdict.validate_certificate` can re-check.
"""

from __future__ import annotations

import math
from typing import Optional

import numpy as np
from scipy.optimize import least_squares

from bjortho.errors import DegenerateZero, FieldMismatch, NoCertificate, RoleError
from bjortho.hull import origin_in_hull
from bjortho.minimize import minimize_convex, minimize_interval
from bjortho.spaces import (
    DualVector,
    FiniteFunction,
    MatrixOperator,
    ScalarField,
    check_same_space,
    conjugate_functional,
    is_zero,
    norm,
    norm_attainment_set,
    norm_batch,
    norming_functional,
    pencil_norm,
)
from bjortho.verdict import (
    DEFAULT_TOL,
    ArgminCertificate,
    Decision,
    FunctionalCertificate,
    HullCertificate,
    PointCertificate,
    Tolerances,
    Verdict,
    WitnessVectorCertificate,
    validate_certificate,
)

ORTH = Decision.ORTHOGONAL
NOT = Decision.NOT_ORTHOGONAL
INCONCLUSIVE = Decision.INCONCLUSIVE


def _nonzero_norm(x) -> float:
    nx = norm(x)
    if nx == 0.0:
        raise DegenerateZero("x must be nonzero")
    return nx


def _require_sup(f: FiniteFunction, g: FiniteFunction) -> None:
    if not isinstance(f, FiniteFunction) or f.p is not None:
        raise RoleError("expected sup-norm functions")
    check_same_space(f, g)


def bj_generic(x, y, field: Optional[ScalarField] = None,
               tol: Tolerances = DEFAULT_TOL, grid: int = 65) -> Verdict:
    """Decide ``x ⊥ y`` by globally minimising ``a -> ||x + a*y||``.

    The search is restricted to ``|a| <= 2||x||/||y||``; outside that ball the
    norm already exceeds ``||x||``.  ``y = 0`` is orthogonal with ``a* = 0``.
    """
    check_same_space(x, y)
    field = x.field if field is None else ScalarField(field)
    if field is not x.field:
        raise FieldMismatch("scalar field of the pencil must match the space")
    nx = _nonzero_norm(x)
    used = tol.as_dict()
    if is_zero(y):
        cert = ArgminCertificate(0j, nx)
        return Verdict(ORTH, 0.0, cert, used, "generic", {"argmin": cert}, "drop")

    radius = 2.0 * nx / norm(y)
    m = minimize_convex(lambda a: pencil_norm(x, y, a),
                        lambda al: norm_batch(x, y, al),
                        radius, field is ScalarField.COMPLEX, grid=grid)
    margin = m.value / nx - 1.0
    decision = ORTH if margin >= -tol.decision else NOT
    cert = ArgminCertificate(complex(m.alpha), float(m.value))
    return Verdict(decision, float(margin), cert, used, "generic",
                   {"argmin": cert, "evaluations": m.evaluations, "radius": radius}, "drop")


def descend_along(x, y, direction: complex) -> ArgminCertificate:
    """Best point of the pencil on the ray ``a = s*direction``, ``s >= 0``."""
    direction = complex(direction)
    radius = 2.0 * norm(x) / (norm(y) * abs(direction))
    m = minimize_interval(lambda s: pencil_norm(x, y, s * direction),
                          lambda s: norm_batch(x, y, s * direction),
                          0.0, radius)
    return ArgminCertificate(complex(m.alpha.real * direction), float(m.value))


def _not_or_inconclusive(x, y, cert: ArgminCertificate, margin: float, tol: Tolerances,
                         method: str, details: dict) -> Verdict:
    """A criterion said "not orthogonal"; confirm with a strict decrease."""
    nx = norm(x)
    details = dict(details, argmin=cert)
    if cert.achieved_norm < nx * (1.0 - tol.decision):
        return Verdict(NOT, margin, cert, tol.as_dict(), method, details)
    details["reason"] = "criterion negative but norm decrease below tol_decision"
    return Verdict(INCONCLUSIVE, margin, cert, tol.as_dict(), method, details)


# ---------------------------------------------------------------------------
# C(K)


def bj_ck_complex(f: FiniteFunction, g: FiniteFunction,
                  tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Hull criterion: ``f ⊥ g`` iff 0 lies in conv{conj(f(t)) g(t) : t in M_f}."""
    _require_sup(f, g)
    nf = _nonzero_norm(f)
    attain = norm_attainment_set(f, tol.attain)
    m_idx = np.array(attain.indices)
    used = tol.as_dict()
    if is_zero(g):
        cert = HullCertificate((int(m_idx[0]),), (0j,), (1.0,))
        return Verdict(ORTH, 0.0, cert, used, "ck_complex",
                       {"attainment_set": attain.indices, "hull_vertices": [0j]})

    ng = norm(g)
    raw = np.conj(f.values[m_idx]) * g.values[m_idx]
    member = origin_in_hull(raw / (nf * ng), tol.eq)
    details = {
        "attainment_set": attain.indices,
        "hull_vertices": [complex(raw[i]) for i in member.vertices],
        "hull_distance": member.distance,
    }
    if member.inside:
        cert = HullCertificate(tuple(int(m_idx[i]) for i in member.support),
                               tuple(complex(raw[i]) for i in member.support),
                               member.weights)
        return Verdict(ORTH, member.margin, cert, used, "ck_complex", details)

    nu = complex(*member.normal)
    details["separating_normal"] = nu
    direction = -np.conj(nu)
    if f.field is ScalarField.REAL:
        direction = -math.copysign(1.0, nu.real)
    cert = descend_along(f, g, direction)
    return _not_or_inconclusive(f, g, cert, member.margin, tol, "ck_complex", details)


def bj_ck_real(f: FiniteFunction, g: FiniteFunction,
               tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Sign criterion for real C(K): need points of M_f with f*g >= 0 and f*g <= 0."""
    _require_sup(f, g)
    if f.field is not ScalarField.REAL:
        raise FieldMismatch("bj_ck_real needs real functions")
    nf = _nonzero_norm(f)
    attain = norm_attainment_set(f, tol.attain)
    m_idx = np.array(attain.indices)
    used = tol.as_dict()
    if is_zero(g):
        k = int(m_idx[0])
        return Verdict(ORTH, 0.0, PointCertificate((k, k)), used, "ck_real",
                       {"attainment_set": attain.indices})

    prod = (f.values[m_idx] * g.values[m_idx]).real / (nf * norm(g))
    k1 = int(m_idx[np.argmax(prod)])
    k2 = int(m_idx[np.argmin(prod)])
    margin = float(min(prod.max(), -prod.min()))
    details = {"attainment_set": attain.indices, "products": prod.tolist()}
    if margin >= -tol.eq:
        return Verdict(ORTH, margin, PointCertificate((k1, k2)), used, "ck_real", details)
    # every product has the same sign; move against it
    direction = -1.0 if prod.min() > 0 else 1.0
    cert = descend_along(f, g, direction)
    return _not_or_inconclusive(f, g, cert, margin, tol, "ck_real", details)


def sbj_ck(f: FiniteFunction, g: FiniteFunction,
           tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Strong orthogonality in C(K): ``||f + g*a|| >= ||f||`` for every function ``a``.

    Holds iff ``g`` vanishes somewhere on M_f.
    """
    _require_sup(f, g)
    nf = _nonzero_norm(f)
    attain = norm_attainment_set(f, tol.attain)
    m_idx = np.array(attain.indices)
    used = tol.as_dict()
    if is_zero(g):
        return Verdict(ORTH, 0.0, PointCertificate((int(m_idx[0]),), "zero"), used, "sbj",
                       {"attainment_set": attain.indices})
    ng = norm(g)
    mods = np.abs(g.values[m_idx]) / ng
    t = int(m_idx[np.argmin(mods)])
    margin = -float(mods.min())
    details = {"attainment_set": attain.indices}
    if mods.min() <= tol.eq:
        return Verdict(ORTH, margin, PointCertificate((t,), "zero"), used, "sbj", details)

    # a = -f/g wherever g is not negligible collapses f there
    big = np.abs(g.values) > tol.eq * ng
    a = np.zeros(f.n, dtype=complex)
    a[big] = -f.values[big] / g.values[big]
    achieved = float(np.abs(f.values + a * g.values).max())
    cert = ArgminCertificate(a, achieved)
    return _not_or_inconclusive(f, g, cert, margin, tol, "sbj", details)


# ---------------------------------------------------------------------------
# L^p


def lp_criterion_sum(f: FiniteFunction, g: FiniteFunction) -> complex:
    """``sum_s w(s) g(s) |f(s)|^(p-1) conj(sgn f(s))`` (real data: ``sgn``)."""
    mod = np.abs(f.values)
    phase = np.zeros_like(f.values)
    nz = mod > 0
    phase[nz] = np.conj(f.values[nz]) / mod[nz]
    return complex(np.sum(f.weights * g.values * mod ** (f.p - 1.0) * phase))


def in_span(f: FiniteFunction, g: FiniteFunction, tol: float) -> bool:
    """Whether ``f`` is (numerically) a multiple of ``g`` via the 2x2 Gram determinant."""
    nf, ng = np.linalg.norm(f.values), np.linalg.norm(g.values)
    if ng == 0:
        return False
    c = np.vdot(g.values / ng, f.values / nf)
    return bool(1.0 - abs(c) ** 2 <= tol)


def bj_lp(f: FiniteFunction, g: FiniteFunction, tol: Tolerances = DEFAULT_TOL) -> Verdict:
    """Weighted-sum criterion for discrete L^p, 1 < p < inf.

    When ``f`` is a multiple of ``g`` the criterion does not apply and the
    decision falls back to :func:`bj_generic`.
    """
    if not isinstance(f, FiniteFunction) or f.p is None:
        raise RoleError("expected L^p functions")
    check_same_space(f, g)
    nf = _nonzero_norm(f)
    used = tol.as_dict()
    phi = conjugate_functional(f)
    if is_zero(g):
        return Verdict(ORTH, 0.0, FunctionalCertificate(phi), used, "lp", {"weighted_sum": 0j})
    if in_span(f, g, tol.eq):
        v = bj_generic(f, g, tol=tol)
        return Verdict(v.decision, v.margin, v.certificate, used, "lp:generic",
                       dict(v.details, in_span=True), v.margin_kind)

    ng = norm(g)
    # phi(g) = sum / ||f||^(p-1); normalised so |s| <= 1
    s = phi(g) / ng
    margin = -abs(s)
    details = {"weighted_sum": lp_criterion_sum(f, g), "normalized_sum": s}
    if abs(s) <= tol.eq:
        return Verdict(ORTH, margin, FunctionalCertificate(phi), used, "lp", details)
    direction = -np.conj(s) / abs(s)
    if f.field is ScalarField.REAL:
        direction = -math.copysign(1.0, s.real)
    cert = descend_along(f, g, direction)
    return _not_or_inconclusive(f, g, cert, margin, tol, "lp", details)


# ---------------------------------------------------------------------------
# matrices


def top_singular_subspace(a: np.ndarray, gap: float):
    """Right singular vectors (columns) whose singular value is within ``gap`` of the top."""
    u, s, vh = np.linalg.svd(a)
    k = int(np.sum(s >= s[0] * (1.0 - gap)))
    return vh[:k].conj().T, float(s[0])


def find_witness(a: MatrixOperator, b: MatrixOperator, tol: Tolerances = DEFAULT_TOL,
                 seed: int = 0, restarts: int = 8) -> Optional[np.ndarray]:
    """Unit ``x`` with ``||Ax|| = ||A||`` and ``<Ax, Bx> = 0``, or ``None``.

    ``x`` ranges over the top right-singular subspace ``V`` of ``A``, so the
    condition is ``c^H M c = 0`` with ``M = V^H B^H A V``.
    """
    v, sigma = top_singular_subspace(a.entries, tol.gap)
    scale = sigma * max(norm(b), 1e-300)
    target = 0.5 * tol.eq * scale
    m = v.conj().T @ b.entries.conj().T @ a.entries @ v
    k = m.shape[0]
    if k == 1:
        return v[:, 0] if abs(m[0, 0]) <= target else None

    real = a.field is ScalarField.REAL and not np.any(np.iscomplex(v))

    def unpack(z):
        c = z if real else z[:k] + 1j * z[k:]
        return c / np.linalg.norm(c)

    def residual(z):
        c = unpack(z)
        q = np.vdot(c, m @ c) / scale
        return [q.real] if real else [q.real, q.imag]

    rng = np.random.default_rng(seed)
    dim = k if real else 2 * k
    for _ in range(restarts):
        z0 = rng.standard_normal(dim)
        sol = least_squares(residual, z0, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15)
        c = unpack(sol.x)
        x = v @ c
        x = x / np.linalg.norm(x)
        if abs(np.vdot(b.entries @ x, a.entries @ x)) <= target:
            return x
    return None


def bj_matrix(a: MatrixOperator, b: MatrixOperator, tol: Tolerances = DEFAULT_TOL,
              seed: int = 0, restarts: int = 8) -> Verdict:
    """Spectral-norm orthogonality: minimisation decides, a witness vector certifies."""
    if not isinstance(a, MatrixOperator):
        raise RoleError("expected matrices")
    check_same_space(a, b)
    v = bj_generic(a, b, tol=tol)
    if not v.orthogonal or is_zero(b):
        return Verdict(v.decision, v.margin, v.certificate, v.tolerances_used, "matrix",
                       v.details, v.margin_kind)
    x = find_witness(a, b, tol, seed=seed, restarts=restarts)
    if x is None:
        return Verdict(v.decision, v.margin, v.certificate, v.tolerances_used, "matrix",
                       dict(v.details, witness=None), v.margin_kind)
    return Verdict(v.decision, v.margin, WitnessVectorCertificate(x), v.tolerances_used,
                   "matrix", dict(v.details), v.margin_kind)


def rank_one_operator(x, y) -> MatrixOperator:
    """The operator ``h -> <h, y> x``, i.e. the matrix ``x y^H``."""
    x, y = np.asarray(x, dtype=complex), np.asarray(y, dtype=complex)
    field = ScalarField.COMPLEX if (np.any(x.imag) or np.any(y.imag)) else ScalarField.REAL
    return MatrixOperator(field, np.outer(x, y.conj()))


def bj_rank_one(x, y, z, w, tol: Tolerances = DEFAULT_TOL,
                field: Optional[ScalarField] = None) -> Verdict:
    """``x y^H ⊥ z w^H`` iff ``<x, z> = 0`` or ``<y, w> = 0``."""
    x, y, z, w = (np.asarray(v, dtype=complex) for v in (x, y, z, w))
    nx, ny, nz, nw = (float(np.linalg.norm(v)) for v in (x, y, z, w))
    if nx == 0 or ny == 0:
        raise DegenerateZero("rank-one operator x y^H needs x, y nonzero")
    used = tol.as_dict()
    witness = y / ny
    if nz == 0 or nw == 0:
        return Verdict(ORTH, 0.0, WitnessVectorCertificate(witness), used, "rank_one")
    c1 = abs(np.vdot(z, x)) / (nx * nz)
    c2 = abs(np.vdot(w, y)) / (ny * nw)
    margin = -float(min(c1, c2))
    details = {"inner_xz": c1, "inner_yw": c2}
    if min(c1, c2) <= tol.eq:
        return Verdict(ORTH, margin, WitnessVectorCertificate(witness), used, "rank_one", details)

    a, b = rank_one_operator(x, y), rank_one_operator(z, w)
    if field is not None:
        a, b = MatrixOperator(field, a.entries), MatrixOperator(field, b.entries)
    elif a.field is not b.field:
        a = MatrixOperator(ScalarField.COMPLEX, a.entries)
        b = MatrixOperator(ScalarField.COMPLEX, b.entries)
    r = np.vdot(a.entries @ witness, b.entries @ witness)
    direction = -np.conj(r) / abs(r)
    if a.field is ScalarField.REAL:
        direction = -math.copysign(1.0, r.real)
    cert = descend_along(a, b, direction)
    return _not_or_inconclusive(a, b, cert, margin, tol, "rank_one", details)


# ---------------------------------------------------------------------------
# dispatch and functionals


def bj(x, y, tol: Tolerances = DEFAULT_TOL, seed: int = 0) -> Verdict:
    """Decide with the most specific criterion available for the space."""
    if is_zero(y):
        return bj_generic(x, y, tol=tol)
    if isinstance(x, MatrixOperator):
        return bj_matrix(x, y, tol, seed=seed)
    if x.p is not None:
        return bj_lp(x, y, tol)
    if x.field is ScalarField.REAL:
        return bj_ck_real(x, y, tol)
    return bj_ck_complex(x, y, tol)


def _sup_functional(f: FiniteFunction, indices, weights) -> DualVector:
    coeffs = np.zeros(f.n, dtype=complex)
    for i, w in zip(indices, weights):
        coeffs[i] += w * np.conj(f.values[i]) / abs(f.values[i])
    return DualVector("sup", coeffs)


def functional_certificate(x, y, verdict: Verdict,
                           tol: Tolerances = DEFAULT_TOL) -> FunctionalCertificate:
    """A unit functional norming ``x`` and annihilating ``y``.

    Raises :class:`NoCertificate` unless the verdict is orthogonal and the
    constructed functional passes validation.
    """
    if verdict.decision is not ORTH:
        raise NoCertificate(f"verdict is {verdict.decision.value}")
    cert = verdict.certificate
    if is_zero(y):
        phi = norming_functional(x)
    elif isinstance(x, MatrixOperator):
        if isinstance(cert, WitnessVectorCertificate):
            v = cert.x
        else:
            v = find_witness(x, y, tol)
            if v is None:
                raise NoCertificate("no witness vector found")
        ax = x.entries @ v
        u = ax / np.linalg.norm(ax)
        phi = DualVector("matrix", np.outer(u.conj(), v))
    elif x.p is not None:
        phi = conjugate_functional(x)
    else:
        if isinstance(cert, HullCertificate):
            phi = _sup_functional(x, cert.indices, cert.weights)
        elif isinstance(cert, PointCertificate) and cert.relation == "zero":
            phi = _sup_functional(x, cert.indices, (1.0,))
        elif isinstance(cert, PointCertificate):
            k1, k2 = cert.indices
            a1 = (np.conj(x.values[k1]) * y.values[k1]).real
            a2 = (np.conj(x.values[k2]) * y.values[k2]).real
            if a1 - a2 == 0:
                weights = (1.0, 0.0)
            else:
                weights = (-a2 / (a1 - a2), a1 / (a1 - a2))
            phi = _sup_functional(x, (k1, k2), weights)
        else:
            hv = bj_ck_complex(x, y, tol)
            if not isinstance(hv.certificate, HullCertificate) or not hv.orthogonal:
                raise NoCertificate("hull criterion does not confirm orthogonality")
            phi = _sup_functional(x, hv.certificate.indices, hv.certificate.weights)

    out = FunctionalCertificate(phi)
    check = validate_certificate(out, x, y, ORTH, tol)
    if not check.ok:
        raise NoCertificate("; ".join(check.problems))
    return out
