"""Independent reference implementations the engine is checked against.

The query oracle is a nested-loop join over the raw triple list, followed by
BINDs in textual order, then filters, then projection. Its expression
arithmetic uses Fractions for the exact numeric types (the engine uses
int/Decimal), so agreement is meaningful rather than shared code. Row
multisets are compared through a value-canonical encoding: numeric literals
collapse to their exact value, everything else to its lexical identity.
"""

from __future__ import annotations

import random
from collections import Counter
from decimal import Decimal
from fractions import Fraction
from typing import Optional, Union

from semlink.namespaces import (
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from semlink.sparql.algebra import (
    BinaryExpr,
    ConstExpr,
    ExtendOp,
    FilterOp,
    IfExpr,
    QueryAlgebra,
    TriplePattern,
    UnaryExpr,
    Var,
    VarExpr,
)
from semlink.terms import BlankNode, Iri, Literal, Term, Triple

# -- value model ---------------------------------------------------------------

_NUMERIC = {XSD_INTEGER: "i", XSD_DECIMAL: "d", XSD_DOUBLE: "f"}


class OracleError(Exception):
    pass


def _numeric_of(term: Term) -> Optional[tuple[str, Union[Fraction, float]]]:
    if not isinstance(term, Literal):
        return None
    kind = _NUMERIC.get(term.datatype)
    if kind is None:
        return None
    lex = term.lexical
    if kind == "i":
        return ("i", Fraction(int(lex)))
    if kind == "d":
        return ("d", Fraction(Decimal(lex)))
    if lex in ("INF", "+INF"):
        return ("f", float("inf"))
    if lex == "-INF":
        return ("f", float("-inf"))
    return ("f", float(lex))


def value_equal(a: Term, b: Term) -> bool:
    """Term compatibility: value-space for numeric literals, identity otherwise."""
    na, nb = _numeric_of(a), _numeric_of(b)
    if na is not None and nb is not None:
        if na[0] == "f" or nb[0] == "f":
            return float(na[1]) == float(nb[1])
        return na[1] == nb[1]
    return a == b


def canonical(term: Optional[Term]) -> tuple:
    """Row-encoding for multiset comparison; numeric literals by exact value."""
    if term is None:
        return ("unbound",)
    n = _numeric_of(term)
    if n is not None:
        kind, value = n
        if kind == "f" or isinstance(value, float):
            return ("num", "f", repr(float(value)))
        return ("num", kind, value.numerator, value.denominator)
    return ("term", str(term))


# -- expression evaluation -------------------------------------------------------

_Value = Union[Term, bool, tuple]


def _as_value(term: Term) -> _Value:
    n = _numeric_of(term)
    if n is not None:
        return n
    return term


def _num(v: _Value) -> tuple[str, Union[Fraction, float]]:
    if isinstance(v, tuple) and v and v[0] in ("i", "d", "f"):
        return v
    if isinstance(v, Term):
        n = _numeric_of(v)
        if n is not None:
            return n
    raise OracleError(f"not numeric: {v!r}")


_RANK = {"i": 0, "d": 1, "f": 2}


def _arith(op: str, a: _Value, b: _Value) -> tuple:
    (ka, va), (kb, vb) = _num(a), _num(b)
    kind = max(ka, kb, key=_RANK.get)
    if kind == "f":
        x, y = float(va), float(vb)
        if op == "+":
            return ("f", x + y)
        if op == "-":
            return ("f", x - y)
        if op == "*":
            return ("f", x * y)
        if y == 0.0:
            if x == 0.0:
                return ("f", float("nan"))
            return ("f", float("inf") if (x > 0) == (y >= 0) else float("-inf"))
        return ("f", x / y)
    if op == "+":
        return (kind, va + vb)
    if op == "-":
        return (kind, va - vb)
    if op == "*":
        return (kind, va * vb)
    if vb == 0:
        raise OracleError("division by zero")
    return ("d", va / vb)


def _is_numeric_value(v: _Value) -> bool:
    return isinstance(v, tuple) and bool(v) and v[0] in ("i", "d", "f")


def _compare(op: str, a: _Value, b: _Value) -> bool:
    try:
        (ka, va), (kb, vb) = _num(a), _num(b)
        if ka == "f" or kb == "f":
            x, y = float(va), float(vb)
        else:
            x, y = va, vb
        return {
            "=": lambda: x == y,
            "!=": lambda: x != y,
            "<": lambda: x < y,
            "<=": lambda: x <= y,
            ">": lambda: x > y,
            ">=": lambda: x >= y,
        }[op]()
    except OracleError:
        pass
    if _is_numeric_value(a) or _is_numeric_value(b):
        # one side is a number, the other is not: only a different TERM KIND
        # (IRI/blank) is cleanly unequal; any literal pairing is a type error
        other = b if _is_numeric_value(a) else a
        if isinstance(other, (Iri, BlankNode)):
            if op == "=":
                return False
            if op == "!=":
                return True
        raise OracleError("numeric against non-numeric literal")
    if isinstance(a, bool) or isinstance(b, bool):
        ba, bb = _bool_of(a), _bool_of(b)
        if op == "=":
            return ba == bb
        if op == "!=":
            return ba != bb
        raise OracleError("bad boolean comparison")
    if isinstance(a, Literal) and isinstance(b, Literal):
        if a.language is not None or b.language is not None:
            same = (
                a.language is not None
                and b.language is not None
                and a.language.lower() == b.language.lower()
                and a.lexical == b.lexical
            )
            if op == "=":
                return same
            if op == "!=":
                return not same
            raise OracleError("bad langString comparison")
        if a.datatype == XSD_STRING and b.datatype == XSD_STRING:
            return {
                "=": lambda: a.lexical == b.lexical,
                "!=": lambda: a.lexical != b.lexical,
                "<": lambda: a.lexical < b.lexical,
                "<=": lambda: a.lexical <= b.lexical,
                ">": lambda: a.lexical > b.lexical,
                ">=": lambda: a.lexical >= b.lexical,
            }[op]()
        if a.datatype == XSD_BOOLEAN and b.datatype == XSD_BOOLEAN:
            if op == "=":
                return a.lexical == b.lexical
            if op == "!=":
                return a.lexical != b.lexical
            raise OracleError("bad boolean order")
        if a.datatype == b.datatype:
            if a.lexical == b.lexical:
                if op in ("=", "<=", ">="):
                    return True
                if op in ("!=", "<", ">"):
                    return False
            if op in ("=", "!="):
                raise OracleError("unknown datatype comparison")
            raise OracleError("unknown datatype order")
        raise OracleError("mismatched literal datatypes")
    if isinstance(a, Iri) and isinstance(b, Iri):
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        raise OracleError("IRI order")
    if isinstance(a, BlankNode) and isinstance(b, BlankNode):
        if op == "=":
            return a == b
        if op == "!=":
            return a != b
        raise OracleError("blank order")
    if op == "=":
        return False
    if op == "!=":
        return True
    raise OracleError("cross-kind order")


def _bool_of(v: _Value) -> bool:
    if isinstance(v, bool):
        return v
    if isinstance(v, tuple) and v and v[0] in ("i", "d", "f"):
        x = v[1]
        if isinstance(x, float) and x != x:
            return False
        return x != 0
    if isinstance(v, Literal):
        if v.datatype == XSD_BOOLEAN:
            return v.lexical in ("true", "1")
        n = _numeric_of(v)
        if n is not None:
            return _bool_of(n)
        if v.datatype == XSD_STRING or v.language is not None:
            return len(v.lexical) > 0
    raise OracleError(f"no EBV for {v!r}")


def oracle_eval(expr, row: dict) -> _Value:
    if isinstance(expr, VarExpr):
        term = row.get(expr.var.name)
        if term is None:
            raise OracleError("unbound")
        return _as_value(term)
    if isinstance(expr, ConstExpr):
        return _as_value(expr.term)
    if isinstance(expr, UnaryExpr):
        if expr.op == "!":
            return not _bool_of(oracle_eval(expr.operand, row))
        kind, value = _num(oracle_eval(expr.operand, row))
        return (kind, -value)
    if isinstance(expr, IfExpr):
        if _bool_of(oracle_eval(expr.condition, row)):
            return oracle_eval(expr.then, row)
        return oracle_eval(expr.otherwise, row)
    if isinstance(expr, BinaryExpr):
        if expr.op == "&&":
            try:
                left = _bool_of(oracle_eval(expr.left, row))
            except OracleError:
                if _bool_of(oracle_eval(expr.right, row)) is False:
                    return False
                raise
            if not left:
                return False
            return _bool_of(oracle_eval(expr.right, row))
        if expr.op == "||":
            try:
                left = _bool_of(oracle_eval(expr.left, row))
            except OracleError:
                if _bool_of(oracle_eval(expr.right, row)) is True:
                    return True
                raise
            if left:
                return True
            return _bool_of(oracle_eval(expr.right, row))
        a = oracle_eval(expr.left, row)
        b = oracle_eval(expr.right, row)
        if expr.op in ("=", "!=", "<", "<=", ">", ">="):
            return _compare(expr.op, a, b)
        return _arith(expr.op, a, b)
    raise OracleError(f"unknown expr {expr!r}")


def _value_to_term_key(v: _Value) -> tuple:
    """Canonical key of a computed value (mirrors `canonical` for terms)."""
    if isinstance(v, bool):
        return ("term", f'"{"true" if v else "false"}"^^<{XSD_BOOLEAN}>')
    if isinstance(v, tuple) and v and v[0] in ("i", "d", "f"):
        kind, value = v
        if kind == "f" or isinstance(value, float):
            return ("num", "f", repr(float(value)))
        return ("num", kind, value.numerator, value.denominator)
    return canonical(v)


# -- the nested-loop query oracle ----------------------------------------------


def oracle_execute(triples: list[Triple], algebra: QueryAlgebra) -> Counter:
    """Reference result multiset (canonical row encodings) for a query.

    Supports patterns, FILTER, BIND, projection, DISTINCT. Solution
    modifiers beyond that (grouping, ordering, slicing) are out of scope
    here and checked by dedicated tests.
    """
    assert not algebra.group_keys and not algebra.aggregates
    assert not algebra.order_by and algebra.limit is None and not algebra.offset

    patterns = [e for e in algebra.elements if isinstance(e, TriplePattern)]
    extends = [e for e in algebra.elements if isinstance(e, ExtendOp)]
    filters = [e for e in algebra.elements if isinstance(e, FilterOp)]

    rows: list[dict] = [{}]
    for pattern in patterns:
        # constant prefilter once per pattern, then nested-loop extension
        candidates = [t for t in triples if _const_match(pattern, t)]
        new_rows = []
        for row in rows:
            for t in candidates:
                merged = _unify(pattern, t, row)
                if merged is not None:
                    new_rows.append(merged)
        rows = new_rows
        if not rows:
            break

    # BINDs in textual order (a bind may feed a later bind), then filters.
    computed: list[dict] = []
    for row in rows:
        values = dict(row)
        for op in extends:
            try:
                v = oracle_eval(op.expr, values)
            except OracleError:
                continue
            values[op.var.name] = _reify(v)
        computed.append(values)
    kept = []
    for values in computed:
        ok = True
        for op in filters:
            try:
                if not _bool_of(oracle_eval(op.expr, values)):
                    ok = False
                    break
            except OracleError:
                ok = False
                break
        if ok:
            kept.append(values)

    projection = [v.name for v in algebra.projection]
    out = []
    for values in kept:
        out.append(tuple(canonical(values.get(name)) for name in projection))
    if algebra.distinct:
        seen = set()
        unique = []
        for row_key, values in zip(out, kept):
            ident = tuple(str(values.get(name)) for name in projection)
            if ident not in seen:
                seen.add(ident)
                unique.append(row_key)
        out = unique
    return Counter(out)


def _reify(v: _Value) -> Term:
    """Computed value back to a term (value-faithful; lexical may differ)."""
    if isinstance(v, bool):
        return Literal("true" if v else "false", XSD_BOOLEAN)
    if isinstance(v, tuple) and v and v[0] in ("i", "d", "f"):
        kind, value = v
        if kind == "i":
            return Literal(str(value.numerator), XSD_INTEGER)
        if kind == "d":
            dec = Decimal(value.numerator) / Decimal(value.denominator)
            return Literal(format(dec, "f"), XSD_DECIMAL)
        return Literal(repr(float(value)), XSD_DOUBLE)
    return v


def _const_match(pattern: TriplePattern, t: Triple) -> bool:
    for p_term, value in ((pattern.subject, t.subject), (pattern.predicate, t.predicate), (pattern.object, t.object)):
        if not isinstance(p_term, Var) and not value_equal(p_term, value):
            return False
    return True


def _unify(pattern: TriplePattern, t: Triple, row: dict) -> Optional[dict]:
    merged = None
    local: dict[str, Term] = {}
    for p_term, value in ((pattern.subject, t.subject), (pattern.predicate, t.predicate), (pattern.object, t.object)):
        if isinstance(p_term, Var):
            name = p_term.name
            if name in local:
                if local[name] != value:  # same variable twice in one pattern
                    return None
                continue
            bound = row.get(name)
            if bound is not None:
                if not value_equal(bound, value):
                    return None
            else:
                local[name] = value
    if local:
        merged = dict(row)
        merged.update(local)
        return merged
    return dict(row)


def engine_counter(table, projection: list[str]) -> Counter:
    """Engine rows rendered with the oracle's canonical encoding."""
    assert list(table.vars) == projection
    return Counter(tuple(canonical(t) for t in row) for row in table.rows)


# -- randomized (graph, query) instances -----------------------------------------


PREDICATES = [Iri(f"http://ex/p{i}") for i in range(8)]
CLASSES = [Iri(f"http://ex/C{i}") for i in range(3)]
SUBJECTS = [Iri(f"http://ex/s{i}") for i in range(40)]
STRINGS = ["alpha", "beta", "gamma", "delta"]


def random_graph(rng: random.Random, max_triples: int = 1500) -> list[Triple]:
    n = rng.randrange(40, max_triples + 1)
    triples = set()
    type_iri = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    while len(triples) < n:
        s = rng.choice(SUBJECTS)
        roll = rng.random()
        if roll < 0.15:
            triples.add(Triple(s, type_iri, rng.choice(CLASSES)))
            continue
        p = rng.choice(PREDICATES)
        kind = rng.random()
        if kind < 0.35:
            o: Term = rng.choice(SUBJECTS)
        elif kind < 0.55:
            o = Literal(str(rng.randrange(0, 16)), XSD_INTEGER)
        elif kind < 0.70:
            o = Literal(f"{rng.randrange(0, 16)}.{rng.choice('05')}", XSD_DECIMAL)
        elif kind < 0.78:
            o = Literal(f"{rng.randrange(1, 30)}.5e1", XSD_DOUBLE)
        else:
            o = Literal(rng.choice(STRINGS), XSD_STRING)
        triples.add(Triple(s, p, o))
    return list(triples)


def random_query(rng: random.Random) -> str:
    """Query text over the random-graph vocabulary (1-4 chained patterns)."""
    var_pool = ["a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "m"]
    used: list[str] = []

    def new_var() -> str:
        v = var_pool[len(used)]
        used.append(v)
        return v

    def graph_const() -> str:
        roll = rng.random()
        if roll < 0.4:
            return f"<{rng.choice(SUBJECTS).value}>"
        if roll < 0.6:
            return str(rng.randrange(0, 16))
        if roll < 0.75:
            return f"{rng.randrange(0, 16)}.{rng.choice('05')}"
        return f'"{rng.choice(STRINGS)}"'

    lines = []
    n_patterns = rng.randrange(1, 5)
    first = new_var()
    for i in range(n_patterns):
        if i == 0:
            subj = f"?{first}"
        else:
            subj = f"?{rng.choice(used)}"
        use_path = rng.random() < 0.15
        if use_path:
            pred = f"<{rng.choice(PREDICATES).value}>/<{rng.choice(PREDICATES).value}>"
        elif rng.random() < 0.1:
            pred = f"?{new_var()}"
        else:
            pred = f"<{rng.choice(PREDICATES).value}>"
        roll = rng.random()
        if roll < 0.5:
            obj = f"?{new_var()}"
        elif roll < 0.65 and used:
            obj = f"?{rng.choice(used)}"
        else:
            obj = graph_const()
        lines.append(f"  {subj} {pred} {obj} .")

    has_bind = rng.random() < 0.35
    bind_var = None
    if has_bind:
        source = rng.choice(used)
        bind_var = new_var()
        k = rng.randrange(1, 4)
        c = rng.randrange(0, 5)
        lines.append(f"  BIND(?{source} * {k} + {c} AS ?{bind_var})")

    if rng.random() < 0.55:
        target = bind_var if (bind_var and rng.random() < 0.5) else rng.choice(used)
        op = rng.choice(["=", "!=", "<", "<=", ">", ">="])
        const = rng.choice([str(rng.randrange(0, 20)), f"{rng.randrange(0, 20)}.5"])
        clause = f"?{target} {op} {const}"
        if rng.random() < 0.3:
            other = rng.choice(used)
            clause = f"({clause}) && (?{other} > 2)" if rng.random() < 0.5 else \
                     f"({clause}) || (?{other} = 3)"
        if rng.random() < 0.15:
            clause = f"IF(?{rng.choice(used)} > 5, 1, 0) = 1"
        lines.append(f"  FILTER({clause})")

    distinct = rng.random() < 0.25
    if distinct:
        pattern_vars = [v for v in used if v != bind_var]
        k = rng.randrange(1, len(pattern_vars) + 1)
        select = "DISTINCT " + " ".join(f"?{v}" for v in pattern_vars[:k])
    elif rng.random() < 0.3:
        select = "*"
    else:
        k = rng.randrange(1, len(used) + 1)
        select = " ".join(f"?{v}" for v in used[:k])
    return "SELECT " + select + " WHERE {\n" + "\n".join(lines) + "\n}"
