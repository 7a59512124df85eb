"""Expression evaluation with SPARQL error semantics.

Evaluation errors are signalled by :class:`EvalError` and absorbed by the
caller: a failing FILTER behaves as false for that row, a failing BIND leaves
its variable unbound. Numeric comparison and arithmetic promote
integer -> decimal -> double; integer division yields a decimal.
"""

from __future__ import annotations

from decimal import Decimal, DivisionByZero, InvalidOperation, Overflow
from typing import Optional, Union

from ..namespaces import XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING
from ..terms import BlankNode, Iri, Literal, Term, numeric_value
from .algebra import BinaryExpr, ConstExpr, Expr, IfExpr, UnaryExpr, VarExpr

Number = Union[int, Decimal, float]
Value = Union[Term, bool, Number]


class EvalError(Exception):
    """Expression error (unbound variable, type error, bad arithmetic)."""


def term_from_value(value: Value) -> Term:
    """Wrap a computed value as a term for row binding and serialization."""
    if isinstance(value, bool):
        return Literal("true" if value else "false", XSD_BOOLEAN)
    if isinstance(value, int):
        return Literal(str(value), XSD_INTEGER)
    if isinstance(value, Decimal):
        return Literal(format(value, "f"), XSD_DECIMAL)
    if isinstance(value, float):
        if value != value:
            return Literal("NaN", XSD_DOUBLE)
        if value == float("inf"):
            return Literal("INF", XSD_DOUBLE)
        if value == float("-inf"):
            return Literal("-INF", XSD_DOUBLE)
        return Literal(repr(value), XSD_DOUBLE)
    return value


def _as_number(value: Value) -> Number:
    if isinstance(value, bool):
        raise EvalError("boolean is not numeric")
    if isinstance(value, (int, Decimal, float)):
        return value
    if isinstance(value, Literal):
        n = numeric_value(value)
        if n is not None:
            return n
    raise EvalError(f"not a number: {value}")


def _promote(left: Number, right: Number) -> tuple[Number, Number]:
    if isinstance(left, float) or isinstance(right, float):
        return float(left), float(right)
    return left, right  # int and Decimal mix natively and exactly


def effective_boolean(value: Value) -> bool:
    """SPARQL effective boolean value; raises EvalError where EBV is undefined."""
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, Decimal)):
        return value != 0
    if isinstance(value, float):
        if value != value:  # NaN
            return False
        return value != 0.0
    if isinstance(value, Literal):
        if value.datatype == XSD_BOOLEAN:
            return value.lexical in ("true", "1")
        n = numeric_value(value)
        if n is not None:
            return effective_boolean(n)
        if value.datatype == XSD_STRING or value.language is not None:
            return len(value.lexical) > 0
        raise EvalError(f"no boolean value for {value}")
    raise EvalError(f"no boolean value for {value}")


_STRINGLY = (XSD_STRING,)


def _compare(op: str, left: Value, right: Value) -> bool:
    """Comparison following RDF term/value equality rules.

    Numeric pairs compare in value space; strings lexically; IRI/blank by
    identity for (in)equality. Mismatched kinds are unequal under '='/'!=' and
    an error under the order operators. Literal pairs whose value space is
    unknown are an error unless the terms are identical.
    """
    lnum = _try_number(left)
    rnum = _try_number(right)
    if lnum is not None and rnum is not None:
        a, b = _promote(lnum, rnum)
        return _apply_order(op, a, b)
    if isinstance(left, bool) or isinstance(right, bool):
        lb, rb = _as_boolean_pair(left, right)
        if op == "=":
            return lb == rb
        if op == "!=":
            return lb != rb
        raise EvalError("booleans only support = and !=")
    if isinstance(left, Literal) and isinstance(right, Literal):
        return _compare_literals(op, left, right)
    if isinstance(left, Iri) and isinstance(right, Iri):
        return _identity_compare(op, left.value == right.value)
    if isinstance(left, BlankNode) and isinstance(right, BlankNode):
        return _identity_compare(op, left.label == right.label)
    # Distinct term kinds: clearly different terms.
    if op == "=":
        return False
    if op == "!=":
        return True
    raise EvalError(f"cannot order {left} against {right}")


def _try_number(value: Value) -> Optional[Number]:
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, Decimal, float)):
        return value
    if isinstance(value, Literal):
        return numeric_value(value)
    return None


def _as_boolean_pair(left: Value, right: Value) -> tuple[bool, bool]:
    def to_bool(v: Value) -> bool:
        if isinstance(v, bool):
            return v
        if isinstance(v, Literal) and v.datatype == XSD_BOOLEAN:
            return v.lexical in ("true", "1")
        raise EvalError(f"not a boolean: {v}")

    return to_bool(left), to_bool(right)


def _identity_compare(op: str, equal: bool) -> bool:
    if op == "=":
        return equal
    if op == "!=":
        return not equal
    raise EvalError("IRIs and blank nodes only support = and !=")


def _compare_literals(op: str, left: Literal, right: Literal) -> bool:
    if left.language is not None or right.language is not None:
        if op in ("=", "!="):
            same = (
                left.language is not None
                and right.language is not None
                and left.language.lower() == right.language.lower()
                and left.lexical == right.lexical
            )
            return same if op == "=" else not same
        raise EvalError("language-tagged literals only support = and !=")
    if left.datatype in _STRINGLY and right.datatype in _STRINGLY:
        return _apply_order(op, left.lexical, right.lexical)
    if left.datatype == XSD_BOOLEAN and right.datatype == XSD_BOOLEAN:
        return _identity_compare(op, (left.lexical in ("true", "1")) == (right.lexical in ("true", "1")))
    if left.datatype == right.datatype:
        # Unknown value space: identical terms are equal, anything else is an error.
        if left.lexical == right.lexical:
            return _identity_compare(op, True)
        if op in ("=", "!="):
            raise EvalError(f"cannot compare values of datatype {left.datatype}")
        raise EvalError(f"cannot order values of datatype {left.datatype}")
    raise EvalError(f"cannot compare {left} against {right}")


def _apply_order(op: str, a, b) -> bool:
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise EvalError(f"unknown comparison {op}")


def _arith(op: str, left: Value, right: Value) -> Number:
    a, b = _promote(_as_number(left), _as_number(right))
    try:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if isinstance(a, float) or isinstance(b, float):
                try:
                    return float(a) / float(b)
                except ZeroDivisionError:
                    if float(a) == 0.0:
                        return float("nan")
                    return float("inf") if (a > 0) == (b >= 0) else float("-inf")
            if b == 0:
                raise EvalError("division by zero")
            if isinstance(a, int) and isinstance(b, int):
                a = Decimal(a)
                b = Decimal(b)
            return a / b
    except (InvalidOperation, DivisionByZero, Overflow) as exc:
        raise EvalError(f"arithmetic error: {exc}") from exc
    raise EvalError(f"unknown operator {op}")


def evaluate(expr: Expr, row: list, slots: dict[str, int]) -> Value:
    """Evaluate against a binding row; raises :class:`EvalError` on failure."""
    if isinstance(expr, VarExpr):
        idx = slots.get(expr.var.name)
        term = row[idx] if idx is not None else None
        if term is None:
            raise EvalError(f"unbound variable {expr.var}")
        return term
    if isinstance(expr, ConstExpr):
        return expr.term
    if isinstance(expr, UnaryExpr):
        if expr.op == "!":
            return not effective_boolean(evaluate(expr.operand, row, slots))
        value = _as_number(evaluate(expr.operand, row, slots))
        return -value
    if isinstance(expr, IfExpr):
        if effective_boolean(evaluate(expr.condition, row, slots)):
            return evaluate(expr.then, row, slots)
        return evaluate(expr.otherwise, row, slots)
    if isinstance(expr, BinaryExpr):
        op = expr.op
        if op == "&&":
            return _logical_and(expr, row, slots)
        if op == "||":
            return _logical_or(expr, row, slots)
        left = evaluate(expr.left, row, slots)
        right = evaluate(expr.right, row, slots)
        if op in ("=", "!=", "<", "<=", ">", ">="):
            return _compare(op, left, right)
        return _arith(op, left, right)
    raise EvalError(f"unknown expression {expr!r}")


def _logical_and(expr: BinaryExpr, row, slots) -> bool:
    # SPARQL three-valued logic: error && false is false, error && true is error.
    try:
        left = effective_boolean(evaluate(expr.left, row, slots))
    except EvalError:
        right = effective_boolean(evaluate(expr.right, row, slots))
        if right is False:
            return False
        raise
    if not left:
        return False
    return effective_boolean(evaluate(expr.right, row, slots))


def _logical_or(expr: BinaryExpr, row, slots) -> bool:
    try:
        left = effective_boolean(evaluate(expr.left, row, slots))
    except EvalError:
        right = effective_boolean(evaluate(expr.right, row, slots))
        if right is True:
            return True
        raise
    if left:
        return True
    return effective_boolean(evaluate(expr.right, row, slots))
