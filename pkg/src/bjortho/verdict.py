"""Verdicts, certificates and certificate validators.

Validators recompute everything from the raw arrays (numpy only) and never
call the code that built the certificate.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Union

import numpy as np

from bjortho.spaces import DualVector, FiniteFunction, MatrixOperator


class Decision(enum.Enum):
    ORTHOGONAL = "orthogonal"
    NOT_ORTHOGONAL = "not-orthogonal"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class Tolerances:
    decision: float = 1e-7
    eq: float = 1e-9
    attain: float = 1e-9
    gap: float = 1e-9

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOL = Tolerances()


def _pair(z) -> list:
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


@dataclass(frozen=True, eq=False)
class ArgminCertificate:
    alpha_star: Union[complex, np.ndarray]
    achieved_norm: float
    kind = "argmin"

    def to_dict(self) -> dict:
        a = self.alpha_star
        alpha = [_pair(v) for v in np.ravel(a)] if isinstance(a, np.ndarray) else _pair(a)
        return {"kind": self.kind, "alpha_star": alpha, "achieved_norm": self.achieved_norm}


@dataclass(frozen=True, eq=False)
class FunctionalCertificate:
    phi: DualVector
    kind = "functional"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "phi": self.phi.to_dict()}


@dataclass(frozen=True)
class PointCertificate:
    """``relation`` is ``"sign-pair"`` (two points of M_f with products of
    opposite sign) or ``"zero"`` (one point of M_f where y vanishes)."""

    indices: tuple
    relation: str = "sign-pair"
    kind = "point"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices), "relation": self.relation}


@dataclass(frozen=True)
class HullCertificate:
    indices: tuple
    support_points: tuple
    weights: tuple
    kind = "hull"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "indices": list(self.indices),
                "support_points": [_pair(p) for p in self.support_points],
                "weights": list(self.weights)}


@dataclass(frozen=True, eq=False)
class WitnessVectorCertificate:
    x: np.ndarray
    kind = "witness"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "x": [_pair(v) for v in self.x]}


Certificate = Union[ArgminCertificate, FunctionalCertificate, PointCertificate,
                    HullCertificate, WitnessVectorCertificate]


@dataclass(frozen=True, eq=False)
class Verdict:
    """Outcome of an orthogonality decision.

    ``margin`` is signed so that negative means "not orthogonal".  With
    ``margin_kind == "drop"`` it is ``min ||x + a y|| / ||x|| - 1`` (never
    positive); with ``"slack"`` it is a normalised criterion slack whose zero
    is the exact boundary.  ``details`` carries method-specific extras
    such as hull vertices or a separating direction.
    """

    decision: Decision
    margin: float
    certificate: Optional[Certificate]
    tolerances_used: dict
    method: str
    details: dict = field(default_factory=dict)
    margin_kind: str = "slack"

    @property
    def orthogonal(self) -> bool:
        return self.decision is Decision.ORTHOGONAL

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.value,
            "margin": self.margin,
            "method": self.method,
            "margin_kind": self.margin_kind,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "tolerances": dict(self.tolerances_used),
            "details": _jsonable(self.details),
        }


def _jsonable(obj: Any):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return _pair(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# ---------------------------------------------------------------------------
# validators


@dataclass
class CertificateCheck:
    ok: bool
    problems: list

    def __bool__(self):
        return self.ok


def _raw(x):
    return x.entries if isinstance(x, MatrixOperator) else x.values


def _direct_norm(x, arr=None) -> float:
    arr = _raw(x) if arr is None else arr
    if isinstance(x, MatrixOperator):
        return float(np.linalg.svd(arr, compute_uv=False)[0])
    if x.p is None:
        return float(np.max(np.abs(arr)))
    return float(np.sum(x.weights * np.abs(arr) ** x.p) ** (1.0 / x.p))


def _direct_dual_norm(phi: DualVector) -> float:
    c = np.asarray(phi.coeffs)
    if phi.kind == "sup":
        return float(np.sum(np.abs(c)))
    if phi.kind == "lp":
        q = phi.p / (phi.p - 1.0)
        return float(np.sum(phi.weights * np.abs(c / phi.weights) ** q) ** (1.0 / q))
    return float(np.sum(np.linalg.svd(c, compute_uv=False)))


def validate_certificate(cert: Certificate, x, y, decision: Decision,
                         tol: Tolerances = DEFAULT_TOL) -> CertificateCheck:
    """Check ``cert`` against ``x``, ``y`` straight from the definitions."""
    problems: list = []
    nx = _direct_norm(x)
    ny = _direct_norm(y)

    if isinstance(cert, ArgminCertificate):
        a = cert.alpha_star
        moved = _raw(x) + (np.asarray(a) * _raw(y) if isinstance(a, np.ndarray) else a * _raw(y))
        val = _direct_norm(x, moved)
        if abs(val - cert.achieved_norm) > tol.eq * max(nx, 1e-300):
            problems.append(f"achieved_norm {cert.achieved_norm!r} != recomputed {val!r}")
        if decision is Decision.NOT_ORTHOGONAL and not val < nx * (1.0 - tol.decision):
            problems.append(f"no strict decrease: {val!r} vs ||x||={nx!r}")
        if decision is Decision.ORTHOGONAL and val < nx * (1.0 - tol.decision):
            problems.append(f"argmin contradicts orthogonality: {val!r} < ||x||={nx!r}")

    elif isinstance(cert, FunctionalCertificate):
        phi = cert.phi
        dn = _direct_dual_norm(phi)
        fx = complex(np.sum(phi.coeffs * _raw(x)))
        fy = complex(np.sum(phi.coeffs * _raw(y)))
        if abs(abs(fx) - dn * nx) > tol.eq * max(dn * nx, 1e-300):
            problems.append(f"|phi(x)|={abs(fx)!r} but ||phi||*||x||={dn * nx!r}")
        if abs(fy) > tol.eq * max(dn * ny, 1e-300) and ny > 0:
            problems.append(f"phi(y)={fy!r} is not zero")
        if dn == 0:
            problems.append("phi is zero")

    elif isinstance(cert, PointCertificate):
        vx, vy = np.asarray(_raw(x)), np.asarray(_raw(y))
        mod = np.abs(vx)
        for i in cert.indices:
            if not mod[i] >= (1.0 - tol.attain) * nx:
                problems.append(f"index {i} is not a norm-attaining point")
        scale = max(nx * ny, 1e-300)
        if cert.relation == "zero":
            if len(cert.indices) != 1:
                problems.append("zero relation takes exactly one index")
            elif abs(vy[cert.indices[0]]) > tol.eq * max(ny, 1e-300) and ny > 0:
                problems.append("y does not vanish at the certified point")
        elif cert.relation == "sign-pair":
            if len(cert.indices) != 2:
                problems.append("sign-pair relation takes exactly two indices")
            else:
                k1, k2 = cert.indices
                p1 = (np.conj(vx[k1]) * vy[k1]).real
                p2 = (np.conj(vx[k2]) * vy[k2]).real
                if p1 < -tol.eq * scale:
                    problems.append(f"x*y at k1={k1} is negative ({p1!r})")
                if p2 > tol.eq * scale:
                    problems.append(f"x*y at k2={k2} is positive ({p2!r})")
        else:
            problems.append(f"unknown relation {cert.relation!r}")

    elif isinstance(cert, HullCertificate):
        vx, vy = np.asarray(_raw(x)), np.asarray(_raw(y))
        w = np.asarray(cert.weights, dtype=float)
        pts = np.asarray(cert.support_points, dtype=complex)
        scale = max(nx * ny, 1e-300)
        if np.any(w < 0):
            problems.append("negative weight")
        if abs(w.sum() - 1.0) > tol.eq:
            problems.append(f"weights sum to {w.sum()!r}")
        for i, pt in zip(cert.indices, pts):
            if not abs(vx[i]) >= (1.0 - tol.attain) * nx:
                problems.append(f"index {i} is not a norm-attaining point")
            if abs(np.conj(vx[i]) * vy[i] - pt) > tol.eq * scale:
                problems.append(f"support point {i} does not match conj(x)*y")
        if abs(np.sum(w * pts)) > tol.eq * scale:
            problems.append(f"convex combination misses origin by {abs(np.sum(w * pts))!r}")

    elif isinstance(cert, WitnessVectorCertificate):
        a, b = np.asarray(_raw(x)), np.asarray(_raw(y))
        v = np.asarray(cert.x, dtype=complex)
        if abs(np.linalg.norm(v) - 1.0) > tol.eq:
            problems.append("witness is not a unit vector")
        av, bv = a @ v, b @ v
        if abs(np.linalg.norm(av) - nx) > tol.eq * max(nx, 1e-300):
            problems.append(f"||Ax||={np.linalg.norm(av)!r} != ||A||={nx!r}")
        if abs(np.vdot(bv, av)) > tol.eq * max(nx * ny, 1e-300) and ny > 0:
            problems.append(f"<Ax,Bx>={np.vdot(bv, av)!r} is not zero")

    else:
        problems.append(f"unknown certificate type {type(cert).__name__}")

    return CertificateCheck(not problems, problems)


def validate_verdict(verdict: Verdict, x, y, tol: Optional[Tolerances] = None) -> CertificateCheck:
    """Validate the verdict's certificate and, if present, its argmin extra."""
    tol = tol or Tolerances(**{k: verdict.tolerances_used[k] for k in
                               ("decision", "eq", "attain", "gap") if k in verdict.tolerances_used})
    problems: list = []
    if verdict.certificate is None:
        if verdict.decision is not Decision.INCONCLUSIVE:
            problems.append("decisive verdict without certificate")
    else:
        problems += validate_certificate(verdict.certificate, x, y, verdict.decision, tol).problems
    extra = verdict.details.get("argmin")
    if isinstance(extra, ArgminCertificate) and extra is not verdict.certificate:
        problems += validate_certificate(extra, x, y, verdict.decision, tol).problems
    return CertificateCheck(not problems, problems)
