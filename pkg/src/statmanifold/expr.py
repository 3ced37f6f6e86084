"""Expression DSL for metric and cubic-form components.

Grammar (whitespace-insensitive)::

    expr    :=  term (('+' | '-') term)*
    term    :=  unary (('*' | '/') unary)*
    unary   :=  '-' unary | primary
    primary :=  NUMBER | IDENT | IDENT '(' expr (',' expr)* ')' | '(' expr ')'
    NUMBER  :=  decimal literal, optional fraction and exponent
    IDENT   :=  [a-zA-Z][a-zA-Z0-9]*

Calls are restricted to ``pow(base, const-exponent)``, ``exp``, ``log``,
``sin``, ``cos``, ``sqrt``.  Identifiers resolve against the declared chart
coordinates and the parameter map; anything else is an error.  ASTs are
immutable and safe to share; evaluation is pure.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .jets import Jet, JetDomainError, coordinate_jets, jet_space

FUNCTIONS = {"pow": 2, "exp": 1, "log": 1, "sin": 1, "cos": 1, "sqrt": 1}


class ExprError(ValueError):
    """Base class of expression errors; ``offset`` is a byte offset into the source."""

    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    pass


class NonConstantExponentError(ExprError):
    pass


class EvalDomainError(ExprError):
    """Evaluation left the domain; carries the offending subexpression and point."""

    def __init__(self, message, node=None, point=None):
        offset = node.span[0] if node is not None else None
        super().__init__(message, offset)
        self.node = node
        self.point = point


def offset_to_line_col(source, offset):
    """1-based (line, column) of a byte offset, for error reporting."""
    line = source.count("\n", 0, offset) + 1
    col = offset - (source.rfind("\n", 0, offset) + 1) + 1
    return line, col


# -- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float
    span: tuple = (0, 0)


@dataclass(frozen=True)
class Var:
    name: str
    index: int
    span: tuple = (0, 0)


@dataclass(frozen=True)
class Param:
    name: str
    span: tuple = (0, 0)


@dataclass(frozen=True)
class Unary:
    op: str
    child: object
    span: tuple = (0, 0)


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object
    span: tuple = (0, 0)


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple
    span: tuple = (0, 0)


_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z][A-Za-z0-9]*)"
    r"|(?P<op>[+\-*/(),])"
)


def _tokenize(src):
    tokens = []
    pos = 0
    while pos < len(src):
        match = _TOKEN.match(src, pos)
        if match is None:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r} at offset {pos}", pos)
        if match.lastgroup != "ws":
            tokens.append((match.lastgroup, match.group(), match.start()))
        pos = match.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src, variables, parameters, substitute):
        self.src = src
        self.tokens = _tokenize(src)
        self.pos = 0
        self.variables = {name: i for i, name in enumerate(variables)}
        self.parameters = dict(parameters or {})
        self.substitute = substitute

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text):
        kind, value, offset = self.peek()
        if kind == "op" and value == text:
            return self.advance()
        shown = value if kind != "end" else "end of input"
        raise ExprSyntaxError(f"expected {text!r} but found {shown!r} at offset {offset}", offset)

    def parse(self):
        node = self.expr()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected trailing input {value!r} at offset {offset}", offset)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                right = self.term()
                node = Binary(value, node, right, (node.span[0], right.span[1]))
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                right = self.unary()
                node = Binary(value, node, right, (node.span[0], right.span[1]))
            else:
                return node

    def unary(self):
        kind, value, offset = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            child = self.unary()
            return Unary("-", child, (offset, child.span[1]))
        return self.primary()

    def primary(self):
        kind, value, offset = self.advance()
        if kind == "num":
            return Const(float(value), (offset, offset + len(value)))
        if kind == "ident":
            if value in FUNCTIONS:
                return self.call(value, offset)
            if value in self.variables:
                return Var(value, self.variables[value], (offset, offset + len(value)))
            if value in self.parameters:
                span = (offset, offset + len(value))
                if self.substitute:
                    return Const(float(self.parameters[value]), span)
                return Param(value, span)
            raise UnknownIdentifierError(f"unknown identifier {value!r} at offset {offset}", offset)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        shown = value if kind != "end" else "end of input"
        raise ExprSyntaxError(f"unexpected {shown!r} at offset {offset}", offset)

    def call(self, func, offset):
        kind, value, open_offset = self.peek()
        if not (kind == "op" and value == "("):
            raise ExprSyntaxError(
                f"function name {func!r} must be followed by '(' at offset {open_offset}",
                open_offset,
            )
        self.advance()
        args = [self.expr()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == ",":
                self.advance()
                args.append(self.expr())
            else:
                break
        close = self.expect(")")
        span = (offset, close[2] + 1)
        if len(args) != FUNCTIONS[func]:
            raise ExprSyntaxError(
                f"{func} takes {FUNCTIONS[func]} argument(s), got {len(args)} at offset {offset}",
                offset,
            )
        if func == "pow":
            exponent = _fold_constant(args[1])
            if exponent is None:
                raise NonConstantExponentError(
                    f"pow exponent must be a constant at offset {args[1].span[0]}",
                    args[1].span[0],
                )
            args[1] = Const(exponent, args[1].span)
        return Call(func, tuple(args), span)


def _fold_constant(node):
    """Value of a variable-free subtree, or None if it contains a variable/parameter."""
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Unary):
        inner = _fold_constant(node.child)
        return None if inner is None else -inner
    if isinstance(node, Binary):
        left = _fold_constant(node.left)
        right = _fold_constant(node.right)
        if left is None or right is None:
            return None
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        return left / right
    return None


def parse_expression(src, variables, parameters=None, *, substitute_parameters=True):
    """Parse a component expression against declared coordinates and parameters.

    Parameters are substituted as constants by default; pass
    ``substitute_parameters=False`` to retain them as named nodes (they must
    then be bound at evaluation time).
    """
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    names = list(variables)
    if len(set(names)) != len(names):
        raise ValueError("coordinate names must be distinct")
    return _Parser(src, names, parameters, substitute_parameters).parse()


def free_parameters(node):
    if isinstance(node, Param):
        return {node.name}
    if isinstance(node, Unary):
        return free_parameters(node.child)
    if isinstance(node, Binary):
        return free_parameters(node.left) | free_parameters(node.right)
    if isinstance(node, Call):
        out = set()
        for arg in node.args:
            out |= free_parameters(arg)
        return out
    return set()


# -- pretty printing ---------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def to_source(node):
    """Render an AST back to DSL source (round-trip stable)."""
    text, _ = _render(node)
    return text


def _render(node):
    if isinstance(node, Const):
        if node.value < 0:
            return f"-{-node.value!r}", 3
        return repr(node.value), 4
    if isinstance(node, (Var, Param)):
        return node.name, 4
    if isinstance(node, Unary):
        text, prec = _render(node.child)
        if prec < 3:
            text = f"({text})"
        return f"-{text}", 3
    if isinstance(node, Binary):
        prec = _PREC[node.op]
        left, lp = _render(node.left)
        right, rp = _render(node.right)
        if lp < prec:
            left = f"({left})"
        if rp < prec or (rp == prec and node.op in "-/"):
            right = f"({right})"
        return f"{left} {node.op} {right}", prec
    if isinstance(node, Call):
        args = ", ".join(_render(a)[0] for a in node.args)
        return f"{node.func}({args})", 4
    raise TypeError(f"not an expression node: {node!r}")


# -- evaluation --------------------------------------------------------------


def eval_jet(node, point, order, parameters=None):
    """Evaluate an expression as a jet of the requested order at ``point``.

    ``point`` is a single chart point (m,) or a batch (N, m); coefficients of
    the result equal the analytic partial derivatives (up to factorials) of
    the expression.  Domain violations raise :class:`EvalDomainError` naming
    the offending subexpression.
    """
    point = np.asarray(point, dtype=float)
    coords = coordinate_jets(point, order)
    space = jet_space(point.shape[-1], order)
    batch = point.shape[:-1]

    def ev(n):
        if isinstance(n, Const):
            return Jet.constant(space, n.value, batch)
        if isinstance(n, Var):
            return coords[n.index]
        if isinstance(n, Param):
            if parameters is None or n.name not in parameters:
                raise ExprError(f"unbound parameter {n.name!r}", n.span[0])
            return Jet.constant(space, float(parameters[n.name]), batch)
        if isinstance(n, Unary):
            return -ev(n.child)
        if isinstance(n, Binary):
            left = ev(n.left)
            right = ev(n.right)
            try:
                if n.op == "+":
                    return left + right
                if n.op == "-":
                    return left - right
                if n.op == "*":
                    return left * right
                return left / right
            except JetDomainError as err:
                raise _domain_error(err, n, point) from None
        if isinstance(n, Call):
            args = [ev(a) for a in n.args]
            try:
                if n.func == "pow":
                    return args[0].powc(n.args[1].value)
                return getattr(args[0], n.func)()
            except JetDomainError as err:
                raise _domain_error(err, n, point) from None
        raise TypeError(f"not an expression node: {n!r}")

    return ev(node)


def _domain_error(err, node, point):
    where = err.where
    if where is not None and np.ndim(where) > 0 and point.ndim > 1:
        bad = int(np.argmax(np.asarray(where).reshape(-1)))
        at = point.reshape(-1, point.shape[-1])[bad]
    else:
        at = point
    return EvalDomainError(
        f"{err} in subexpression {to_source(node)!r} at point {np.asarray(at).tolist()}",
        node,
        np.asarray(at),
    )


def eval_value(node, point, parameters=None):
    """Plain evaluation (order-0 jet value)."""
    return eval_jet(node, point, 0, parameters).value


def fd_jet(node, point, order, h, parameters=None):
    """Central-difference estimate of the jet, for cross-checking only.

    Supports orders 1 and 2; the point must sit inside the expression's
    domain with margin at least ``2h`` in every coordinate, otherwise the
    stencil evaluation raises the usual domain error.
    """
    if order not in (1, 2):
        raise ValueError("fd_jet supports orders 1 and 2")
    if h <= 0:
        raise ValueError("fd step must be positive")
    point = np.asarray(point, dtype=float)
    m = point.shape[-1]

    def f(q):
        return eval_value(node, q, parameters)

    def shifted(i, si, j=None, sj=None):
        q = point.copy()
        q[..., i] = q[..., i] + si * h
        if j is not None:
            q[..., j] = q[..., j] + sj * h
        return f(q)

    value = f(point)
    gradient = np.stack(
        [(shifted(i, +1) - shifted(i, -1)) / (2.0 * h) for i in range(m)], axis=-1
    )
    if order == 1:
        return Jet.from_derivatives(m, 1, value, gradient)
    hessian = np.zeros(np.shape(value) + (m, m))
    for i in range(m):
        hessian[..., i, i] = (shifted(i, +1) - 2.0 * value + shifted(i, -1)) / h**2
        for j in range(i + 1, m):
            mixed = (
                shifted(i, +1, j, +1)
                - shifted(i, +1, j, -1)
                - shifted(i, -1, j, +1)
                + shifted(i, -1, j, -1)
            ) / (4.0 * h**2)
            hessian[..., i, j] = mixed
            hessian[..., j, i] = mixed
    return Jet.from_derivatives(m, 2, value, gradient, hessian)
