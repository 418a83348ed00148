"""A small arithmetic expression language for problem files.

Expressions are parsed with :mod:`ast` and only a whitelisted subset is
accepted: numbers, the variables ``x``, ``y``, ``t``, the constants ``pi``
and ``e``, arithmetic and comparison operators, ``and``/``or``/``not`` and
the functions in :data:`FUNCTIONS`. ``piecewise(c1, v1, c2, v2, ..., default)``
selects the first branch whose condition holds. Evaluation is vectorised.
"""
from __future__ import annotations

import ast
import math
import operator
from typing import Callable

import numpy as np
from scipy import special


class ExpressionError(ValueError):
    pass


def _piecewise(*args):
    if len(args) < 3 or len(args) % 2 == 0:
        raise ExpressionError("piecewise expects cond, value pairs followed by a default")
    conds = [np.asarray(c, dtype=bool) for c in args[0:-1:2]]
    vals = list(args[1:-1:2])
    shape = np.broadcast_shapes(*(np.shape(a) for a in args))
    conds = [np.broadcast_to(c, shape) for c in conds]
    with np.errstate(all="ignore"):
        return np.select(conds, [np.broadcast_to(v, shape) for v in vals], default=args[-1])


FUNCTIONS: dict[str, Callable] = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "abs": np.abs,
    "pow": np.power,
    "gamma": special.gamma,
    "min": np.minimum,
    "max": np.maximum,
    "piecewise": _piecewise,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "y", "t")

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.Mod: operator.mod,
}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}
_COMPARE = {
    ast.Lt: operator.lt,
    ast.LtE: operator.le,
    ast.Gt: operator.gt,
    ast.GtE: operator.ge,
    ast.Eq: operator.eq,
    ast.NotEq: operator.ne,
}


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in CONSTANTS:
            return CONSTANTS[node.id]
        raise ExpressionError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.UnaryOp):
        if type(node.op) in _UNARY:
            return _UNARY[type(node.op)](_eval(node.operand, env))
        if isinstance(node.op, ast.Not):
            return np.logical_not(_eval(node.operand, env))
    if isinstance(node, ast.BoolOp):
        op = np.logical_and if isinstance(node.op, ast.And) else np.logical_or
        vals = [_eval(v, env) for v in node.values]
        out = vals[0]
        for v in vals[1:]:
            out = op(out, v)
        return out
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env)
        out = True
        for op, right_node in zip(node.ops, node.comparators):
            if type(op) not in _COMPARE:
                raise ExpressionError("unsupported comparison")
            right = _eval(right_node, env)
            out = np.logical_and(out, _COMPARE[type(op)](left, right))
            left = right
        return out
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        fn = FUNCTIONS.get(node.func.id)
        if fn is None:
            raise ExpressionError(f"unknown function {node.func.id!r}")
        return fn(*[_eval(a, env) for a in node.args])
    raise ExpressionError(f"unsupported syntax: {ast.dump(node)[:60]}")


class Expression:
    """Compiled expression callable as ``f(x, y)`` or ``f(x, y, t)``."""

    def __init__(self, source):
        self.source = str(source)
        try:
            self._tree = ast.parse(self.source.strip(), mode="eval")
        except SyntaxError as exc:
            raise ExpressionError(f"cannot parse {self.source!r}: {exc.msg}") from exc
        # validate names once, with scalar probes
        self(0.5, 0.5, 0.5)

    def __call__(self, x, y=0.0, t=0.0):
        env = {"x": np.asarray(x, dtype=float), "y": np.asarray(y, dtype=float), "t": float(t)}
        with np.errstate(all="ignore"):
            out = _eval(self._tree, env)
        return np.asarray(out, dtype=float)

    def __repr__(self) -> str:
        return f"Expression({self.source!r})"


def evaluate_constant(source) -> float:
    """Evaluate an expression with no variables, e.g. ``"pi/4"``."""
    if isinstance(source, (int, float)):
        return float(source)
    tree = ast.parse(str(source).strip(), mode="eval")
    return float(_eval(tree, {}))
