"""Safe arithmetic expressions for inline vector fields.

Grammar: numbers, +, -, *, /, ** and unary minus; functions sin, cos, exp;
names th1..thm (angles), x1..xd (state), eps and pi.  Expressions compile
to vectorized numpy callables.
"""
import ast
import operator

import numpy as np

from .base_flow import BaseFlow
from .cocycle import VectorField
from .errors import ConfigurationError

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}


def compile_expression(text, m, d):
    """Compile ``text`` to fn(theta (n, m), x (n, d), eps) -> (n,)."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigurationError(f"cannot parse expression {text!r}: {exc.msg}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            c = float(node.value)
            return lambda th, x, eps: c
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op, left, right = _BINOPS[type(node.op)], build(node.left), build(node.right)
            return lambda th, x, eps: op(left(th, x, eps), right(th, x, eps))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            inner = build(node.operand)
            sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
            return lambda th, x, eps: sign * inner(th, x, eps)
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
            fn, arg = _FUNCS[node.func.id], build(node.args[0])
            return lambda th, x, eps: fn(arg(th, x, eps))
        if isinstance(node, ast.Name):
            return _name(node.id)
        raise ConfigurationError(f"unsupported construct in expression {text!r}")

    def _name(name):
        if name == "eps":
            return lambda th, x, eps: eps
        if name == "pi":
            return lambda th, x, eps: np.pi
        for prefix, size, pick in (("th", m, lambda th, x, j: th[:, j]), ("x", d, lambda th, x, j: x[:, j])):
            if name.startswith(prefix) and name[len(prefix):].isdigit():
                j = int(name[len(prefix):]) - 1
                if not 0 <= j < size:
                    raise ConfigurationError(f"{name} out of range in {text!r}")
                return lambda th, x, eps, j=j, pick=pick: pick(th, x, j)
        raise ConfigurationError(f"unknown name {name!r} in {text!r}")

    fn = build(tree)

    def vectorized(theta, x, eps):
        out = fn(theta, x, eps)
        return np.broadcast_to(np.asarray(out, dtype=float), (x.shape[0],))
    return vectorized


def inline_field(frequencies, components, name="inline"):
    """VectorField from expression strings, one per state component."""
    flow = BaseFlow(tuple(frequencies))
    d = len(components)
    fns = [compile_expression(c, flow.dim, d) for c in components]

    def func(theta, x, eps):
        return np.stack([f(theta, x, eps) for f in fns], axis=1)

    return VectorField(d, func, flow, name=name)
