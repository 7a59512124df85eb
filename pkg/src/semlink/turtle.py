"""Turtle subset parser and deterministic serializer.

The grammar covers what the ETL and persistence layers emit: ``@prefix``
declarations, angle-bracket IRIs, prefixed names, the ``a`` keyword,
predicate lists (``;``), object lists (``,``), labeled blank nodes, string
literals with escapes, typed literals, language tags, bare numeric
abbreviations, and ``#`` comments. Anonymous ``[ ... ]`` blank nodes and the
collection syntax are deliberately out: nothing upstream produces them.

Round-trip guarantee: ``parse_turtle(serialize(triples, prefixes))`` yields
the same triple set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .namespaces import RDF_LANGSTRING, RDF_TYPE, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING
from .terms import BlankNode, Iri, Literal, Term, Triple, validate_triple


@dataclass
class ParseError(Exception):
    """Syntax error with a 1-based position inside the input."""

    line: int
    column: int
    message: str
    token: str = ""

    def __str__(self) -> str:
        tok = f" near {self.token!r}" if self.token else ""
        return f"line {self.line}, column {self.column}: {self.message}{tok}"


@dataclass
class TurtleDocument:
    prefixes: list[tuple[str, str]] = field(default_factory=list)
    triples: list[Triple] = field(default_factory=list)


_PNAME = re.compile(r"([A-Za-z_][A-Za-z0-9_-]*)?:([A-Za-z0-9_][A-Za-z0-9_.\-]*)?")
_BLANK = re.compile(r"_:([A-Za-z_][A-Za-z0-9_.\-]*)")
_DOUBLE = re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+")
_DECIMAL = re.compile(r"[+-]?[0-9]*\.[0-9]+")
_INTEGER = re.compile(r"[+-]?[0-9]+")
_LANGTAG = re.compile(r"@[A-Za-z]+(-[A-Za-z0-9]+)*")
_PREFIX_DECL = re.compile(r"@prefix\b")

_ESCAPES = {
    "t": "\t",
    "n": "\n",
    "r": "\r",
    "b": "\b",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


class _Scanner:
    """Character cursor with line/column tracking."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self, n: int = 1) -> str:
        chunk = self.text[self.pos : self.pos + n]
        for ch in chunk:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n
        return chunk

    def skip_ws(self) -> None:
        while not self.eof():
            ch = self.peek()
            if ch in " \t\r\n":
                self.advance()
            elif ch == "#":
                while not self.eof() and self.peek() != "\n":
                    self.advance()
            else:
                return

    def error(self, message: str, token: str = "") -> ParseError:
        return ParseError(self.line, self.col, message, token)

    def match_regex(self, pattern: re.Pattern) -> str | None:
        m = pattern.match(self.text, self.pos)
        if m is None:
            return None
        self.advance(m.end() - self.pos)
        return m.group(0)

    def expect(self, literal: str) -> None:
        if not self.text.startswith(literal, self.pos):
            raise self.error(f"expected {literal!r}", self.peek())
        self.advance(len(literal))


def _read_string(sc: _Scanner) -> str:
    start_line, start_col = sc.line, sc.col
    sc.expect('"')
    out: list[str] = []
    while True:
        if sc.eof():
            raise ParseError(start_line, start_col, "unterminated string literal")
        ch = sc.advance()
        if ch == '"':
            return "".join(out)
        if ch == "\n":
            raise ParseError(start_line, start_col, "newline in string literal")
        if ch == "\\":
            if sc.eof():
                raise sc.error("dangling escape in string literal")
            esc = sc.advance()
            if esc in _ESCAPES:
                out.append(_ESCAPES[esc])
            elif esc == "u" or esc == "U":
                width = 4 if esc == "u" else 8
                digits = sc.advance(width)
                if len(digits) != width or not re.fullmatch(r"[0-9A-Fa-f]+", digits):
                    raise sc.error(f"bad \\{esc} escape", digits)
                out.append(chr(int(digits, 16)))
            else:
                raise sc.error(f"unknown escape \\{esc}")
        else:
            out.append(ch)


def _read_iriref(sc: _Scanner) -> Iri:
    line, col = sc.line, sc.col
    sc.expect("<")
    out: list[str] = []
    while True:
        if sc.eof():
            raise ParseError(line, col, "unterminated IRI")
        ch = sc.advance()
        if ch == ">":
            value = "".join(out)
            if not value:
                raise ParseError(line, col, "empty IRI")
            return Iri(value)
        if ch in " \t\n\r<\">{}|^`":
            raise ParseError(line, col, f"character {ch!r} not allowed in IRI")
        if ch == "\\":
            esc = sc.advance()
            if esc in ("u", "U"):
                width = 4 if esc == "u" else 8
                digits = sc.advance(width)
                if len(digits) != width or not re.fullmatch(r"[0-9A-Fa-f]+", digits):
                    raise sc.error(f"bad \\{esc} escape in IRI", digits)
                out.append(chr(int(digits, 16)))
            else:
                raise sc.error(f"unknown escape \\{esc} in IRI")
        else:
            out.append(ch)


class _Parser:
    def __init__(self, text: str):
        self.sc = _Scanner(text)
        self.prefixes: dict[str, str] = {}
        self.prefix_decls: list[tuple[str, str]] = []
        self.triples: list[Triple] = []

    def parse(self) -> TurtleDocument:
        sc = self.sc
        sc.skip_ws()
        while not sc.eof():
            if _PREFIX_DECL.match(sc.text, sc.pos):
                self._prefix_declaration()
            else:
                self._triples_block()
            sc.skip_ws()
        return TurtleDocument(prefixes=self.prefix_decls, triples=self.triples)

    def _prefix_declaration(self) -> None:
        sc = self.sc
        sc.advance(len("@prefix"))
        sc.skip_ws()
        line, col = sc.line, sc.col
        name = sc.match_regex(re.compile(r"([A-Za-z_][A-Za-z0-9_-]*)?:"))
        if name is None:
            raise ParseError(line, col, "expected prefix name", sc.peek())
        prefix = name[:-1]
        sc.skip_ws()
        iri = _read_iriref(sc)
        sc.skip_ws()
        sc.expect(".")
        self.prefixes[prefix] = iri.value
        self.prefix_decls.append((prefix, iri.value))

    def _triples_block(self) -> None:
        sc = self.sc
        subject = self._subject()
        sc.skip_ws()
        self._predicate_object_list(subject)
        sc.skip_ws()
        sc.expect(".")

    def _predicate_object_list(self, subject) -> None:
        sc = self.sc
        while True:
            predicate = self._verb()
            sc.skip_ws()
            while True:
                obj = self._object()
                triple = Triple(subject, predicate, obj)
                try:
                    validate_triple(triple)
                except Exception as exc:
                    raise sc.error(str(exc)) from exc
                self.triples.append(triple)
                sc.skip_ws()
                if sc.peek() == ",":
                    sc.advance()
                    sc.skip_ws()
                    continue
                break
            if sc.peek() == ";":
                sc.advance()
                sc.skip_ws()
                # Trailing ';' before '.' is legal Turtle.
                if sc.peek() in ".;":
                    while sc.peek() == ";":
                        sc.advance()
                        sc.skip_ws()
                    return
                continue
            return

    def _subject(self):
        sc = self.sc
        ch = sc.peek()
        if ch == "<":
            return _read_iriref(sc)
        if ch == "_":
            return self._blank_node()
        return self._prefixed_name()

    def _verb(self) -> Iri:
        sc = self.sc
        if sc.peek() == "a" and not _PNAME.match(sc.text, sc.pos):
            sc.advance()
            return Iri(RDF_TYPE)
        if sc.peek() == "<":
            return _read_iriref(sc)
        return self._prefixed_name()

    def _object(self) -> Term:
        sc = self.sc
        ch = sc.peek()
        if ch == "<":
            return _read_iriref(sc)
        if ch == "_":
            return self._blank_node()
        if ch == '"':
            return self._literal()
        if ch and (ch.isdigit() or ch in "+-."):
            return self._numeric()
        return self._prefixed_name()

    def _blank_node(self) -> BlankNode:
        sc = self.sc
        line, col = sc.line, sc.col
        label = sc.match_regex(_BLANK)
        if label is None:
            raise ParseError(line, col, "expected blank node label", sc.peek())
        name = label[2:]
        if name.endswith("."):
            # PN_LOCAL cannot end with '.'; give back the statement terminator.
            back = len(name) - len(name.rstrip("."))
            sc.pos -= back
            sc.col -= back
            name = name.rstrip(".")
        return BlankNode(name)

    def _prefixed_name(self) -> Iri:
        sc = self.sc
        line, col = sc.line, sc.col
        m = _PNAME.match(sc.text, sc.pos)
        if m is None:
            raise ParseError(line, col, "expected term", sc.peek() or "<eof>")
        text = m.group(0)
        sc.advance(len(text))
        prefix, _, local = text.partition(":")
        if local.endswith("."):
            back = len(local) - len(local.rstrip("."))
            sc.pos -= back
            sc.col -= back
            local = local.rstrip(".")
        if prefix not in self.prefixes:
            raise ParseError(line, col, f"undeclared prefix {prefix!r}", text)
        return Iri(self.prefixes[prefix] + local)

    def _literal(self) -> Literal:
        sc = self.sc
        lexical = _read_string(sc)
        if sc.peek() == "@":
            tag = sc.match_regex(_LANGTAG)
            if tag is None:
                raise sc.error("bad language tag")
            return Literal(lexical, RDF_LANGSTRING, tag[1:])
        if sc.text.startswith("^^", sc.pos):
            sc.advance(2)
            if sc.peek() == "<":
                dt = _read_iriref(sc)
            else:
                dt = self._prefixed_name()
            return Literal(lexical, dt.value)
        return Literal(lexical, XSD_STRING)

    def _numeric(self) -> Literal:
        sc = self.sc
        line, col = sc.line, sc.col
        for pattern, datatype in (
            (_DOUBLE, XSD_DOUBLE),
            (_DECIMAL, XSD_DECIMAL),
            (_INTEGER, XSD_INTEGER),
        ):
            lex = sc.match_regex(pattern)
            if lex is not None:
                return Literal(lex, datatype)
        raise ParseError(line, col, "expected numeric literal", sc.peek())


def parse_turtle(text: str) -> TurtleDocument:
    """Parse a Turtle document; raises :class:`ParseError` with position."""
    return _Parser(text).parse()


# -- serialization -----------------------------------------------------------

_BARE_INTEGER = re.compile(r"[+-]?[0-9]+$")
_BARE_DECIMAL = re.compile(r"[+-]?[0-9]*\.[0-9]+$")
_BARE_DOUBLE = re.compile(r"[+-]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)[eE][+-]?[0-9]+$")
_SAFE_LOCAL = re.compile(r"[A-Za-z0-9_]([A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?$")


def _escape_string(value: str) -> str:
    out = []
    for ch in value:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        elif ord(ch) < 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _format_iri(iri: str, prefixes: list[tuple[str, str]], as_predicate: bool = False) -> str:
    if as_predicate and iri == RDF_TYPE:
        return "a"
    best = None
    for prefix, ns in prefixes:
        if iri.startswith(ns) and (best is None or len(ns) > len(best[1])):
            local = iri[len(ns):]
            if local == "" or _SAFE_LOCAL.match(local):
                best = (prefix, ns, local)
    if best is not None:
        return f"{best[0]}:{best[2]}"
    return f"<{iri}>"


def _format_literal(lit: Literal, prefixes: list[tuple[str, str]]) -> str:
    if lit.language:
        return f'"{_escape_string(lit.lexical)}"@{lit.language}'
    if lit.datatype == XSD_INTEGER and _BARE_INTEGER.match(lit.lexical):
        return lit.lexical
    if lit.datatype == XSD_DECIMAL and _BARE_DECIMAL.match(lit.lexical):
        return lit.lexical
    if lit.datatype == XSD_DOUBLE and _BARE_DOUBLE.match(lit.lexical):
        return lit.lexical
    if lit.datatype == XSD_STRING:
        return f'"{_escape_string(lit.lexical)}"'
    dt = _format_iri(lit.datatype, prefixes)
    return f'"{_escape_string(lit.lexical)}"^^{dt}'


def _format_term(term: Term, prefixes: list[tuple[str, str]]) -> str:
    if isinstance(term, Iri):
        return _format_iri(term.value, prefixes)
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    return _format_literal(term, prefixes)


def serialize(triples, prefixes: dict[str, str] | None = None) -> str:
    """Serialize triples deterministically (sorted by subject, predicate, object).

    Triples sharing a subject are grouped with ``;`` and ``,`` abbreviations.
    """
    from .terms import triple_sort_key

    prefix_items = sorted((prefixes or {}).items())
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in prefix_items]
    if lines:
        lines.append("")
    ordered = sorted(set(triples), key=triple_sort_key)
    i = 0
    while i < len(ordered):
        subject = ordered[i].subject
        group = []
        while i < len(ordered) and ordered[i].subject == subject:
            group.append(ordered[i])
            i += 1
        subj_text = _format_term(subject, prefix_items)
        parts = []
        j = 0
        while j < len(group):
            predicate = group[j].predicate
            objs = []
            while j < len(group) and group[j].predicate == predicate:
                objs.append(_format_term(group[j].object, prefix_items))
                j += 1
            pred_text = _format_iri(predicate.value, prefix_items, as_predicate=True)
            parts.append(f"{pred_text} {', '.join(objs)}")
        lines.append(f"{subj_text} {' ; '.join(parts)} .")
    return "\n".join(lines) + "\n"
