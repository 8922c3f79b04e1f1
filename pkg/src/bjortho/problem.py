"""Problem files: a self-contained description of one orthogonality question.

YAML or JSON (JSON is read by the YAML parser).  Complex scalars are written
as ``[re, im]``.  Example::

    version: 1
    field: complex
    space: {kind: sup}
    mode: tensor-bj
    operands:
      - [{left: [1, [1, 2], [1, -2]], right: [1, [-1, 2], [-1, -2]]}]
      - [{left: [1, 1, 1], right: [2, 2, 2]}]

Tensor operands are term lists ``{coef?, left, right}``.  ``hilbert`` operands
are rank-one operators ``{left: x, right: y}`` meaning ``h -> <h, y> x``.
Errors carry the 1-based line and column of the offending node.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import yaml

from bjortho.bj import bj, bj_generic, bj_rank_one, rank_one_operator, sbj_ck
from bjortho.errors import BJError, Unsupported
from bjortho.spaces import FiniteFunction, MatrixOperator, ScalarField
from bjortho.tensor import NormKind, TensorElement, pencil_min
from bjortho.verdict import DEFAULT_TOL, Tolerances, Verdict

VERSION = 1
KINDS = ("sup", "lp", "matrix", "hilbert")
MODES = ("bj", "sbj", "tensor-bj")
TOP_KEYS = ("version", "field", "space", "mode", "operands", "tolerances")
SPACE_KEYS = ("kind", "p", "weights", "right_weights", "norm")
TERM_KEYS = ("coef", "left", "right")
TOL_KEYS = ("decision", "eq", "attain", "gap")


class ProblemError(BJError):
    """Malformed problem file; ``line``/``column`` are 1-based when known."""

    def __init__(self, message: str, node: Optional[yaml.Node] = None, mark=None):
        mark = mark if mark is not None else (node.start_mark if node is not None else None)
        self.line = mark.line + 1 if mark is not None else None
        self.column = mark.column + 1 if mark is not None else None
        self.message = message
        where = f"line {self.line}, column {self.column}: " if mark is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True, eq=False)
class Space:
    kind: str
    p: Optional[float] = None
    weights: Optional[tuple] = None
    right_weights: Optional[tuple] = None
    norm: Optional[str] = None


@dataclass(frozen=True, eq=False)
class Problem:
    version: int
    field: ScalarField
    space: Space
    mode: str
    operands: tuple
    tolerances: Tolerances = DEFAULT_TOL
    tolerance_overrides: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        sp: dict = {"kind": self.space.kind}
        for key in SPACE_KEYS[1:]:
            val = getattr(self.space, key)
            if val is not None:
                sp[key] = list(val) if isinstance(val, tuple) else val
        out = {
            "version": self.version,
            "field": self.field.value,
            "space": sp,
            "mode": self.mode,
            "operands": [_operand_out(op, self) for op in self.operands],
        }
        if self.tolerance_overrides:
            out["tolerances"] = dict(self.tolerance_overrides)
        return out


# ---------------------------------------------------------------------------
# parsing


def parse_problem(text: str) -> Problem:
    try:
        root = yaml.compose(text)
    except yaml.MarkedYAMLError as exc:
        raise ProblemError(exc.problem or str(exc), mark=exc.problem_mark) from None
    except yaml.YAMLError as exc:
        raise ProblemError(str(exc)) from None
    if root is None:
        raise ProblemError("empty problem file")
    top = _mapping(root, TOP_KEYS, "problem")
    for key in ("version", "field", "space", "mode", "operands"):
        if key not in top:
            raise ProblemError(f"missing required field {key!r}", root)

    version = _scalar(top["version"])
    if not isinstance(version, int) or isinstance(version, bool) or version != VERSION:
        raise ProblemError(f"unsupported version {version!r} (expected {VERSION})", top["version"])
    fld = _scalar(top["field"])
    if fld not in ("real", "complex"):
        raise ProblemError("field must be 'real' or 'complex'", top["field"])
    fld = ScalarField(fld)
    space = _parse_space(top["space"])
    mode = _scalar(top["mode"])
    if mode not in MODES:
        raise ProblemError(f"mode must be one of {', '.join(MODES)}", top["mode"])
    _check_mode(mode, space, top["mode"], top["space"])

    overrides: dict = {}
    if "tolerances" in top:
        tmap = _mapping(top["tolerances"], TOL_KEYS, "tolerances")
        for key, node in tmap.items():
            val = _real(node)
            if not val > 0:
                raise ProblemError(f"tolerance {key} must be positive", node)
            overrides[key] = val
    tol = Tolerances(**{**DEFAULT_TOL.as_dict(), **overrides})

    ops_node = top["operands"]
    if not isinstance(ops_node, yaml.SequenceNode) or len(ops_node.value) != 2:
        raise ProblemError("operands must be a list of exactly two elements", ops_node)
    ops = tuple(_parse_operand(n, space, mode, fld) for n in ops_node.value)
    _check_shapes(ops, ops_node.value, mode, space)
    return Problem(version, fld, space, mode, ops, tol, overrides)


def load_problem(path: str) -> Problem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_problem(fh.read())


def dump_problem(problem: Problem, fmt: str = "yaml") -> str:
    doc = problem.to_dict()
    if fmt == "json":
        return json.dumps(doc, indent=2) + "\n"
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def _check_mode(mode: str, space: Space, node, space_node) -> None:
    if mode == "sbj" and space.kind != "sup":
        raise ProblemError("strong orthogonality is defined here for sup-norm spaces only", node)
    if mode == "tensor-bj" and space.kind == "hilbert":
        raise ProblemError("tensor mode does not take hilbert operands", node)
    if space.norm is not None and mode != "tensor-bj":
        raise ProblemError("space.norm only applies to tensor-bj", space_node)
    if space.right_weights is not None and not (mode == "tensor-bj" and space.kind == "lp"):
        raise ProblemError("space.right_weights only applies to tensor-bj over lp", space_node)


def _parse_space(node) -> Space:
    m = _mapping(node, SPACE_KEYS, "space")
    if "kind" not in m:
        raise ProblemError("space needs a kind", node)
    kind = _scalar(m["kind"])
    if kind not in KINDS:
        raise ProblemError(f"space.kind must be one of {', '.join(KINDS)}", m["kind"])
    p = None
    if "p" in m:
        if kind != "lp":
            raise ProblemError("p only applies to lp spaces", m["p"])
        p = _real(m["p"])
        if not p > 1:
            raise ProblemError("p must be > 1", m["p"])
    elif kind == "lp":
        raise ProblemError("lp space needs p", node)
    weights = right = None
    for key in ("weights", "right_weights"):
        if key in m:
            if kind != "lp":
                raise ProblemError(f"{key} only applies to lp spaces", m[key])
            vals = tuple(_real(v) for v in _seq(m[key], key))
            bad = [i for i, v in enumerate(vals) if not v > 0]
            if bad:
                raise ProblemError(f"{key} must be positive", m[key].value[bad[0]])
            if key == "weights":
                weights = vals
            else:
                right = vals
    norm = None
    if "norm" in m:
        norm = _scalar(m["norm"])
        try:
            NormKind(norm)
        except ValueError:
            raise ProblemError(f"unknown norm {norm!r}; one of "
                               f"{', '.join(k.value for k in NormKind)}", m["norm"]) from None
    return Space(kind, p, weights, right, norm)


def _parse_operand(node, space: Space, mode: str, fld: ScalarField):
    if mode == "tensor-bj":
        terms = []
        for tn in _seq(node, "tensor operand (list of terms)"):
            t = _mapping(tn, TERM_KEYS, "term")
            for key in ("left", "right"):
                if key not in t:
                    raise ProblemError(f"term needs {key!r}", tn)
            coef = _number(t["coef"], fld) if "coef" in t else 1.0
            terms.append((coef, _parse_factor(t["left"], space, fld, "left"),
                          _parse_factor(t["right"], space, fld, "right")))
        if not terms:
            raise ProblemError("tensor operand needs at least one term", node)
        return tuple(terms)
    if space.kind == "hilbert":
        t = _mapping(node, ("left", "right"), "rank-one operand")
        for key in ("left", "right"):
            if key not in t:
                raise ProblemError(f"rank-one operand needs {key!r}", node)
        x = _vector(t["left"], fld)
        y = _vector(t["right"], fld)
        return (x, y)
    return _parse_factor(node, space, fld, "left")


def _factor_shape(factor) -> tuple:
    if factor and isinstance(factor[0], tuple):
        return (len(factor), len(factor[0]))
    return (len(factor),)


def _operand_shape(op, mode: str, space: Space) -> set:
    if mode == "tensor-bj":
        return {(_factor_shape(l), _factor_shape(r)) for _, l, r in op}
    if space.kind == "hilbert":
        return {(len(op[0]), len(op[1]))}
    return {_factor_shape(op)}


def _check_shapes(ops, nodes, mode: str, space: Space) -> None:
    first = _operand_shape(ops[0], mode, space)
    if len(first) != 1:
        raise ProblemError("tensor terms must share factor shapes", nodes[0])
    for op, node in zip(ops[1:], nodes[1:]):
        if _operand_shape(op, mode, space) != first:
            raise ProblemError("operands have different shapes", node)


def _parse_factor(node, space: Space, fld: ScalarField, side: str):
    if space.kind == "matrix":
        rows = [_vector(r, fld) for r in _seq(node, "matrix (list of rows)")]
        if not rows or len({len(r) for r in rows}) != 1 or not rows[0]:
            raise ProblemError("matrix rows must be non-empty and of equal length", node)
        return tuple(rows)
    vec = _vector(node, fld)
    if not vec:
        raise ProblemError("vector must be non-empty", node)
    w = space.right_weights if (side == "right" and space.right_weights is not None) else space.weights
    if w is not None and len(w) != len(vec):
        raise ProblemError(f"vector has {len(vec)} entries but weights have {len(w)}", node)
    return vec


def _vector(node, fld: ScalarField) -> tuple:
    return tuple(_number(v, fld) for v in _seq(node, "vector"))


def _number(node, fld: ScalarField):
    if isinstance(node, yaml.SequenceNode):
        if len(node.value) != 2:
            raise ProblemError("complex scalar must be [re, im]", node)
        re, im = (_real(v) for v in node.value)
        if fld is ScalarField.REAL and im != 0:
            raise ProblemError("imaginary part in a real-field problem", node)
        return complex(re, im) if fld is ScalarField.COMPLEX else re
    val = _real(node)
    return complex(val) if fld is ScalarField.COMPLEX else val


def _real(node) -> float:
    val = _scalar(node)
    if isinstance(val, str) and isinstance(node, yaml.ScalarNode) and node.style is None:
        # JSON writes exponents without a dot (1e-06), which YAML 1.1 reads as text
        try:
            val = float(val)
        except ValueError:
            pass
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ProblemError(f"expected a number, got {val!r}", node)
    val = float(val)
    if not np.isfinite(val):
        raise ProblemError("number must be finite", node)
    return val


def _scalar(node) -> Any:
    if not isinstance(node, yaml.ScalarNode):
        raise ProblemError("expected a scalar", node)
    return yaml.constructor.SafeConstructor().construct_object(node)


def _seq(node, what: str) -> list:
    if not isinstance(node, yaml.SequenceNode):
        raise ProblemError(f"expected a list for {what}", node)
    return node.value


def _mapping(node, allowed, what: str) -> dict:
    if not isinstance(node, yaml.MappingNode):
        raise ProblemError(f"expected a mapping for {what}", node)
    out: dict = {}
    for knode, vnode in node.value:
        key = _scalar(knode)
        if key not in allowed:
            raise ProblemError(f"unknown field {key!r} in {what} (allowed: {', '.join(allowed)})", knode)
        if key in out:
            raise ProblemError(f"duplicate field {key!r} in {what}", knode)
        out[key] = vnode
    return out


# ---------------------------------------------------------------------------
# serialisation back to plain data


def _num_out(z, fld: ScalarField):
    z = complex(z)
    return [z.real, z.imag] if fld is ScalarField.COMPLEX else z.real


def _operand_out(op, pb: Problem):
    fld = pb.field
    vec = lambda v: [_num_out(z, fld) for z in v]
    factor = (lambda f: [vec(r) for r in f]) if pb.space.kind == "matrix" else vec
    if pb.mode == "tensor-bj":
        return [{"coef": _num_out(c, fld), "left": factor(l), "right": factor(r)} for c, l, r in op]
    if pb.space.kind == "hilbert":
        return {"left": vec(op[0]), "right": vec(op[1])}
    return factor(op)


# ---------------------------------------------------------------------------
# building elements and solving


def _element(data, pb: Problem, side: str = "left"):
    fld = pb.field
    if pb.space.kind == "matrix":
        return MatrixOperator(fld, np.array(data, dtype=complex))
    vals = np.array(data, dtype=complex)
    if pb.space.kind == "lp":
        w = pb.space.right_weights if (side == "right" and pb.space.right_weights is not None) \
            else pb.space.weights
        return FiniteFunction(fld, vals, p=pb.space.p, weights=None if w is None else np.array(w))
    return FiniteFunction(fld, vals)


def build_operands(pb: Problem) -> tuple:
    """The two operands as library objects.

    Tensor mode gives :class:`TensorElement` pairs, hilbert mode gives the
    vector quadruple ``(x, y, z, w)``, otherwise two elements.
    """
    if pb.mode == "tensor-bj":
        kind = NormKind(pb.space.norm) if pb.space.norm else None
        return tuple(TensorElement(tuple((c, _element(l, pb, "left"), _element(r, pb, "right"))
                                         for c, l, r in op), kind)
                     for op in pb.operands)
    if pb.space.kind == "hilbert":
        (x, y), (z, w) = pb.operands
        return tuple(np.array(v, dtype=complex) for v in (x, y, z, w))
    return tuple(_element(op, pb) for op in pb.operands)


def decision_inputs(pb: Problem) -> tuple:
    """The pair ``(x, y)`` the verdict's certificate refers to."""
    ops = build_operands(pb)
    if pb.mode == "tensor-bj":
        return ops[0].materialize(), ops[1].materialize()
    if pb.space.kind == "hilbert":
        x, y, z, w = ops
        return rank_one_operator(x, y), rank_one_operator(z, w)
    return ops


def solve(pb: Problem, method: str = "auto", seed: int = 0) -> Verdict:
    """Decide the problem.  ``method='generic'`` forces direct minimisation."""
    tol = pb.tolerances
    if method not in ("auto", "generic"):
        raise ValueError(f"unknown method {method!r}")
    ops = build_operands(pb)
    if pb.mode == "tensor-bj":
        if method == "generic" and ops[0].norm_kind is not NormKind.INJECTIVE_ESTIMATED:
            return bj_generic(ops[0].materialize(), ops[1].materialize(), field=pb.field, tol=tol)
        return pencil_min(ops[0], ops[1], field=pb.field, tol=tol, seed=seed)
    if pb.mode == "sbj":
        if method == "generic":
            raise Unsupported("strong orthogonality has no generic minimisation path")
        return sbj_ck(ops[0], ops[1], tol)
    if pb.space.kind == "hilbert":
        if method == "generic":
            x, y = decision_inputs(pb)
            return bj_generic(x, y, field=pb.field, tol=tol)
        return bj_rank_one(*ops, tol=tol, field=pb.field)
    if method == "generic":
        return bj_generic(ops[0], ops[1], field=pb.field, tol=tol)
    return bj(ops[0], ops[1], tol, seed=seed)
