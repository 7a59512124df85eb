"""Recursive-descent parser for the SELECT-only query subset.

Grammar (EBNF, terminals quoted; see README for the full reference):

    Query        := Prologue Select Where Modifiers
    Prologue     := ( 'PREFIX' PNAME_NS IRIREF )*
    Select       := 'SELECT' 'DISTINCT'? ( '*' | SelectItem+ )
    SelectItem   := Var | '(' Aggregate 'AS' Var ')'
    Aggregate    := ( 'COUNT' '(' ( '*' | Var ) ')' )
                  | ( ('SUM'|'AVG'|'MIN'|'MAX') '(' Var ')' )
    Where        := 'WHERE' '{' ( Triples | Filter | Bind )* '}'
    Triples      := TermOrVar PropertyList ( '.' )?
    PropertyList := Verb ObjectList ( ';' ( Verb ObjectList )? )*
    Verb         := 'a' | Path | Var
    Path         := Iri ( '/' Iri )*
    ObjectList   := Object ( ',' Object )*
    Filter       := 'FILTER' '(' Expression ')'
    Bind         := 'BIND' '(' Expression 'AS' Var ')'
    Modifiers    := ( 'GROUP' 'BY' Var+ )? ( 'ORDER' 'BY' OrderCond+ )?
                    ( ('LIMIT' INT | 'OFFSET' INT)* )
    OrderCond    := Var | ( 'ASC' | 'DESC' ) '(' Expression ')'
    Expression   := Or; Or := And ('||' And)*; And := Cmp ('&&' Cmp)*
    Cmp          := Add ( ('='|'!='|'<'|'<='|'>'|'>=') Add )?
    Add          := Mul ( ('+'|'-') Mul )*; Mul := Unary ( ('*'|'/') Unary )*
    Unary        := ('!'|'-')? Primary
    Primary      := '(' Expression ')' | 'IF' '(' E ',' E ',' E ')'
                  | Var | NumericLiteral | StringLiteral | BooleanLiteral | Iri

Prefixed names resolve against the query's own PREFIX declarations, falling
back to the registry defaults, so the published query texts run verbatim.
Aggregates are only legal with an explicit GROUP BY, and every bare variable
selected alongside aggregates must be a grouping key.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from ..namespaces import (
    DEFAULT_PREFIXES,
    RDF_LANGSTRING,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from ..terms import Iri, Literal, Term
from .algebra import (
    AggregateSpec,
    BinaryExpr,
    ConstExpr,
    Element,
    Expr,
    ExtendOp,
    FilterOp,
    IfExpr,
    OrderCondition,
    QueryAlgebra,
    TriplePattern,
    UnaryExpr,
    Var,
    VarExpr,
    build_tree,
    expr_variables,
)


@dataclass
class QuerySyntaxError(Exception):
    """Query rejected, with the 1-based position of the offending token."""

    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self) -> str:
        tok = f" near {self.token!r}" if self.token else ""
        return f"line {self.line}, column {self.column}: {self.message}{tok}"


_KEYWORDS = {
    "SELECT", "DISTINCT", "WHERE", "PREFIX", "FILTER", "BIND", "AS",
    "GROUP", "BY", "ORDER", "ASC", "DESC", "LIMIT", "OFFSET",
    "COUNT", "SUM", "AVG", "MIN", "MAX", "IF",
}
_AGGREGATES = {"COUNT", "SUM", "AVG", "MIN", "MAX"}

_TOKEN_SPECS = [
    ("VAR", re.compile(r"\?[A-Za-z_][A-Za-z0-9_]*")),
    ("IRIREF", re.compile(r"<[^<>\"{}|^`\\\x00-\x20]*>")),
    ("DOUBLE", re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+")),
    ("DECIMAL", re.compile(r"[+-]?[0-9]*\.[0-9]+")),
    ("INTEGER", re.compile(r"[+-]?[0-9]+")),
    ("PNAME", re.compile(r"([A-Za-z_][A-Za-z0-9_-]*)?:([A-Za-z0-9_][A-Za-z0-9_.\-]*)?")),
    ("WORD", re.compile(r"[A-Za-z_][A-Za-z0-9_]*")),
    ("PUNCT", re.compile(r"\|\||&&|\^\^|!=|<=|>=|[=<>!+\-*/(){}.;,]")),
]


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
            pos += 1
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            value, consumed = _scan_string(text, pos, start_line, start_col)
            tokens.append(_Token("STRING", value, start_line, start_col))
            for c in text[pos : pos + consumed]:
                if c == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
            pos += consumed
            continue
        if ch == "@":
            m = re.compile(r"@[A-Za-z]+(-[A-Za-z0-9]+)*").match(text, pos)
            if m:
                tokens.append(_Token("LANGTAG", m.group(0)[1:], line, col))
                col += m.end() - pos
                pos = m.end()
                continue
        for kind, pattern in _TOKEN_SPECS:
            m = pattern.match(text, pos)
            if m:
                tok_text = m.group(0)
                # '?x<?y' style input: a PNAME ending in '.' gives the dot back
                if kind == "PNAME" and tok_text.endswith("."):
                    tok_text = tok_text.rstrip(".")
                tokens.append(_Token(kind, tok_text, line, col))
                col += len(tok_text)
                pos += len(tok_text)
                break
        else:
            raise QuerySyntaxError(line, col, f"unexpected character {ch!r}", ch)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


def _scan_string(text: str, pos: int, line: int, col: int) -> tuple[str, int]:
    """Return (decoded value, characters consumed) for a quoted string at pos."""
    out: list[str] = []
    i = pos + 1
    escapes = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
    while i < len(text):
        ch = text[i]
        if ch == '"':
            return "".join(out), i - pos + 1
        if ch == "\n":
            break
        if ch == "\\":
            if i + 1 >= len(text):
                break
            esc = text[i + 1]
            if esc in escapes:
                out.append(escapes[esc])
                i += 2
                continue
            if esc in ("u", "U"):
                width = 4 if esc == "u" else 8
                digits = text[i + 2 : i + 2 + width]
                if len(digits) == width and re.fullmatch(r"[0-9A-Fa-f]+", digits):
                    out.append(chr(int(digits, 16)))
                    i += 2 + width
                    continue
            raise QuerySyntaxError(line, col, f"bad escape \\{esc} in string")
        else:
            out.append(ch)
            i += 1
    raise QuerySyntaxError(line, col, "unterminated string literal")


class _Parser:
    def __init__(self, text: str, prefixes: Optional[dict[str, str]] = None):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0
        self.prefixes = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
        self.elements: list[Element] = []
        self.bound_vars: set[Var] = set()
        self.seen_order: list[Var] = []
        self._fresh = 0

    # -- token helpers --

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None) -> QuerySyntaxError:
        tok = tok or self.peek()
        return QuerySyntaxError(tok.line, tok.col, message, tok.text)

    def at_keyword(self, *names: str) -> bool:
        tok = self.peek()
        return tok.kind == "WORD" and tok.text.upper() in names

    def expect_keyword(self, name: str) -> _Token:
        if not self.at_keyword(name):
            raise self.error(f"expected {name}")
        return self.next()

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == text

    def expect_punct(self, text: str) -> _Token:
        if not self.at_punct(text):
            raise self.error(f"expected {text!r}")
        return self.next()

    def fresh_var(self) -> Var:
        # '.' is outside the surface variable grammar, so no collision.
        self._fresh += 1
        return Var(f".p{self._fresh}")

    # -- grammar --

    def parse(self) -> QueryAlgebra:
        self._prologue()
        distinct, select_items, star = self._select_clause()
        self._where_clause()
        group_keys = self._group_clause()
        order_by = self._order_clause()
        offset, limit = self._slice_clause()
        if not self.peek().kind == "EOF":
            raise self.error("unexpected trailing input")

        aggregates = [item for item in select_items if isinstance(item, AggregateSpec)]
        plain = [item for item in select_items if isinstance(item, Var)]
        if aggregates and not group_keys:
            raise QuerySyntaxError(1, 1, "aggregate used outside GROUP BY context")
        if group_keys:
            if star:
                raise QuerySyntaxError(1, 1, "SELECT * cannot be combined with GROUP BY")
            for var in plain:
                if var not in group_keys:
                    raise QuerySyntaxError(
                        1, 1, f"variable {var} must be a GROUP BY key or an aggregate"
                    )

        if star:
            projection = [v for v in self.seen_order if not v.name.startswith(".")]
        else:
            projection = [
                item if isinstance(item, Var) else item.alias for item in select_items
            ]

        algebra = QueryAlgebra(
            root=None,  # type: ignore[arg-type]  (filled below)
            elements=self.elements,
            projection=projection,
            select_star=star,
            distinct=distinct,
            group_keys=group_keys,
            aggregates=aggregates,
            order_by=order_by,
            offset=offset,
            limit=limit,
            prefixes=dict(self.prefixes),
            text=self.text,
        )
        algebra.root = build_tree(algebra)
        return algebra

    def _prologue(self) -> None:
        while self.at_keyword("PREFIX"):
            self.next()
            tok = self.next()
            if tok.kind != "PNAME" or not tok.text.endswith(":"):
                raise self.error("expected prefix name ending in ':'", tok)
            prefix = tok.text[:-1]
            iri_tok = self.next()
            if iri_tok.kind != "IRIREF":
                raise self.error("expected namespace IRI", iri_tok)
            self.prefixes[prefix] = iri_tok.text[1:-1]

    def _select_clause(self):
        self.expect_keyword("SELECT")
        distinct = False
        if self.at_keyword("DISTINCT"):
            self.next()
            distinct = True
        items: list = []
        star = False
        if self.at_punct("*"):
            self.next()
            star = True
        else:
            while True:
                tok = self.peek()
                if tok.kind == "VAR":
                    self.next()
                    items.append(Var(tok.text[1:]))
                elif self.at_punct("("):
                    items.append(self._aggregate_item())
                else:
                    break
            if not items:
                raise self.error("SELECT needs '*' or at least one variable")
        return distinct, items, star

    def _aggregate_item(self) -> AggregateSpec:
        self.expect_punct("(")
        tok = self.next()
        if tok.kind != "WORD" or tok.text.upper() not in _AGGREGATES:
            raise self.error("expected aggregate function", tok)
        func = tok.text.upper()
        self.expect_punct("(")
        arg: Optional[Var] = None
        if self.at_punct("*"):
            if func != "COUNT":
                raise self.error(f"{func}(*) is not supported")
            self.next()
        else:
            var_tok = self.next()
            if var_tok.kind != "VAR":
                raise self.error("expected variable in aggregate", var_tok)
            arg = Var(var_tok.text[1:])
        self.expect_punct(")")
        self.expect_keyword("AS")
        alias_tok = self.next()
        if alias_tok.kind != "VAR":
            raise self.error("expected alias variable after AS", alias_tok)
        self.expect_punct(")")
        return AggregateSpec(func, arg, Var(alias_tok.text[1:]))

    def _where_clause(self) -> None:
        self.expect_keyword("WHERE")
        self.expect_punct("{")
        while not self.at_punct("}"):
            if self.peek().kind == "EOF":
                raise self.error("unterminated WHERE block")
            if self.at_keyword("FILTER"):
                self.next()
                self.expect_punct("(")
                expr = self._expression()
                self.expect_punct(")")
                self.elements.append(FilterOp(expr))
            elif self.at_keyword("BIND"):
                self._bind()
            else:
                self._triples_same_subject()
                if self.at_punct("."):
                    self.next()
        self.next()  # consume '}'

    def _bind(self) -> None:
        bind_tok = self.next()
        self.expect_punct("(")
        expr = self._expression()
        self.expect_keyword("AS")
        var_tok = self.next()
        if var_tok.kind != "VAR":
            raise self.error("expected variable after AS", var_tok)
        var = Var(var_tok.text[1:])
        self.expect_punct(")")
        if var in self.bound_vars:
            raise QuerySyntaxError(
                bind_tok.line, bind_tok.col, f"BIND would rebind variable {var}"
            )
        self.elements.append(ExtendOp(var, expr))
        self._note_var(var)

    def _note_var(self, var: Var) -> None:
        self.bound_vars.add(var)
        if var not in self.seen_order:
            self.seen_order.append(var)

    def _triples_same_subject(self) -> None:
        subject = self._pattern_term(position="subject")
        while True:
            verbs = self._verb_path()
            while True:
                obj = self._pattern_term(position="object")
                self._emit_path(subject, verbs, obj)
                if self.at_punct(","):
                    self.next()
                    continue
                break
            if self.at_punct(";"):
                self.next()
                if self.at_punct(".") or self.at_punct("}") or self.at_punct(";"):
                    while self.at_punct(";"):
                        self.next()
                    return
                continue
            return

    def _emit_path(self, subject, verbs, obj) -> None:
        if len(verbs) == 1:
            self._add_pattern(TriplePattern(subject, verbs[0], obj))
            return
        node = subject
        for i, verb in enumerate(verbs):
            target = obj if i == len(verbs) - 1 else self.fresh_var()
            self._add_pattern(TriplePattern(node, verb, target, from_path=True))
            node = target

    def _add_pattern(self, pattern: TriplePattern) -> None:
        self.elements.append(pattern)
        for var in pattern.variables():
            self._note_var(var)

    def _verb_path(self) -> list:
        tok = self.peek()
        if tok.kind == "VAR":
            self.next()
            return [Var(tok.text[1:])]
        first = self._verb_iri()
        verbs = [first]
        while self.at_punct("/"):
            self.next()
            verbs.append(self._verb_iri())
        return verbs

    def _verb_iri(self) -> Iri:
        tok = self.next()
        if tok.kind == "WORD" and tok.text == "a":
            return Iri(RDF_TYPE)
        if tok.kind == "IRIREF":
            return Iri(tok.text[1:-1])
        if tok.kind == "PNAME":
            return self._expand_pname(tok)
        raise self.error("expected predicate", tok)

    def _expand_pname(self, tok: _Token) -> Iri:
        prefix, _, local = tok.text.partition(":")
        if prefix not in self.prefixes:
            raise QuerySyntaxError(tok.line, tok.col, f"undeclared prefix {prefix!r}", tok.text)
        return Iri(self.prefixes[prefix] + local)

    def _pattern_term(self, position: str):
        tok = self.next()
        if tok.kind == "VAR":
            return Var(tok.text[1:])
        if tok.kind == "IRIREF":
            return Iri(tok.text[1:-1])
        if tok.kind == "PNAME":
            return self._expand_pname(tok)
        if position == "object":
            literal = self._literal_from(tok)
            if literal is not None:
                return literal
        raise self.error(f"expected {position} term", tok)

    def _literal_from(self, tok: _Token) -> Optional[Literal]:
        if tok.kind == "STRING":
            if self.peek().kind == "LANGTAG":
                lang = self.next().text
                return Literal(tok.text, RDF_LANGSTRING, lang)
            if self.at_punct("^^"):
                self.next()
                dt_tok = self.next()
                if dt_tok.kind == "IRIREF":
                    return Literal(tok.text, dt_tok.text[1:-1])
                if dt_tok.kind == "PNAME":
                    return Literal(tok.text, self._expand_pname(dt_tok).value)
                raise self.error("expected datatype IRI", dt_tok)
            return Literal(tok.text, XSD_STRING)
        if tok.kind == "INTEGER":
            return Literal(tok.text, XSD_INTEGER)
        if tok.kind == "DECIMAL":
            return Literal(tok.text, XSD_DECIMAL)
        if tok.kind == "DOUBLE":
            return Literal(tok.text, XSD_DOUBLE)
        if tok.kind == "WORD" and tok.text in ("true", "false"):
            return Literal(tok.text, XSD_BOOLEAN)
        return None

    # -- solution modifiers --

    def _group_clause(self) -> list[Var]:
        if not self.at_keyword("GROUP"):
            return []
        self.next()
        self.expect_keyword("BY")
        keys = []
        while self.peek().kind == "VAR":
            keys.append(Var(self.next().text[1:]))
        if not keys:
            raise self.error("GROUP BY needs at least one variable")
        return keys

    def _order_clause(self) -> list[OrderCondition]:
        if not self.at_keyword("ORDER"):
            return []
        self.next()
        self.expect_keyword("BY")
        conditions = []
        while True:
            if self.at_keyword("ASC", "DESC"):
                ascending = self.next().text.upper() == "ASC"
                self.expect_punct("(")
                expr = self._expression()
                self.expect_punct(")")
                conditions.append(OrderCondition(expr, ascending))
            elif self.peek().kind == "VAR":
                conditions.append(OrderCondition(VarExpr(Var(self.next().text[1:]))))
            else:
                break
        if not conditions:
            raise self.error("ORDER BY needs at least one sort key")
        return conditions

    def _slice_clause(self) -> tuple[int, Optional[int]]:
        offset, limit = 0, None
        while self.at_keyword("LIMIT", "OFFSET"):
            word = self.next().text.upper()
            tok = self.next()
            if tok.kind != "INTEGER" or tok.text.startswith("-"):
                raise self.error(f"{word} needs a non-negative integer", tok)
            if word == "LIMIT":
                limit = int(tok.text)
            else:
                offset = int(tok.text)
        return offset, limit

    # -- expressions --

    def _expression(self) -> Expr:
        return self._or_expr()

    def _or_expr(self) -> Expr:
        left = self._and_expr()
        while self.at_punct("||"):
            self.next()
            left = BinaryExpr("||", left, self._and_expr())
        return left

    def _and_expr(self) -> Expr:
        left = self._cmp_expr()
        while self.at_punct("&&"):
            self.next()
            left = BinaryExpr("&&", left, self._cmp_expr())
        return left

    def _cmp_expr(self) -> Expr:
        left = self._add_expr()
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text in ("=", "!=", "<", "<=", ">", ">="):
            self.next()
            return BinaryExpr(tok.text, left, self._add_expr())
        return left

    def _add_expr(self) -> Expr:
        left = self._mul_expr()
        while True:
            tok = self.peek()
            if tok.kind == "PUNCT" and tok.text in ("+", "-"):
                self.next()
                left = BinaryExpr(tok.text, left, self._mul_expr())
            elif tok.kind in ("INTEGER", "DECIMAL", "DOUBLE") and tok.text[0] in "+-":
                # '?x-3' tokenizes the sign into the number; treat it as an op.
                self.next()
                literal = Literal(
                    tok.text[1:],
                    {"INTEGER": XSD_INTEGER, "DECIMAL": XSD_DECIMAL, "DOUBLE": XSD_DOUBLE}[tok.kind],
                )
                left = BinaryExpr(tok.text[0], left, ConstExpr(literal))
            else:
                return left

    def _mul_expr(self) -> Expr:
        left = self._unary_expr()
        while True:
            tok = self.peek()
            if tok.kind == "PUNCT" and tok.text in ("*", "/"):
                self.next()
                left = BinaryExpr(tok.text, left, self._unary_expr())
            else:
                return left

    def _unary_expr(self) -> Expr:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text in ("!", "-"):
            self.next()
            return UnaryExpr(tok.text, self._unary_expr())
        if tok.kind == "PUNCT" and tok.text == "+":
            self.next()
            return self._unary_expr()
        return self._primary_expr()

    def _primary_expr(self) -> Expr:
        tok = self.next()
        if tok.kind == "PUNCT" and tok.text == "(":
            expr = self._expression()
            self.expect_punct(")")
            return expr
        if tok.kind == "WORD" and tok.text.upper() == "IF":
            self.expect_punct("(")
            cond = self._expression()
            self.expect_punct(",")
            then = self._expression()
            self.expect_punct(",")
            otherwise = self._expression()
            self.expect_punct(")")
            return IfExpr(cond, then, otherwise)
        if tok.kind == "VAR":
            return VarExpr(Var(tok.text[1:]))
        if tok.kind == "IRIREF":
            return ConstExpr(Iri(tok.text[1:-1]))
        if tok.kind == "PNAME":
            return ConstExpr(self._expand_pname(tok))
        literal = self._literal_from(tok)
        if literal is not None:
            return ConstExpr(literal)
        raise self.error("expected expression", tok)


def parse_query(text: str, prefixes: Optional[dict[str, str]] = None) -> QueryAlgebra:
    """Parse a query into :class:`QueryAlgebra`.

    ``prefixes`` supplies the fallback prefix table (the registry defaults
    when omitted); PREFIX declarations inside the query win.
    """
    parser = _Parser(text, prefixes)
    return parser.parse()
