"""RDF term and triple model.

Terms come in three variants: IRIs, blank nodes, and literals. Literals always
carry exactly one datatype IRI; language-tagged literals use rdf:langString.
Term equality is lexical (two literals are the same term only if datatype,
lexical form, and language all match); value-space equality for numerics is a
query-engine concern, see :func:`numeric_value`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

from .namespaces import (
    RDF_LANGSTRING,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1

_WHITESPACE = re.compile(r"\s")
_INTEGER_LEXICAL = re.compile(r"^[+-]?[0-9]+$")
_DECIMAL_LEXICAL = re.compile(r"^[+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)$")
_DOUBLE_LEXICAL = re.compile(
    r"^([+-]?([0-9]+(\.[0-9]*)?|\.[0-9]+)([eE][+-]?[0-9]+)?|[+-]?INF|NaN)$"
)

NUMERIC_DATATYPES = frozenset({XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE})


class TermError(ValueError):
    """A term violates the model invariants (empty IRI, bad lexical form...)."""


@dataclass(frozen=True, slots=True)
class Iri:
    value: str

    def __str__(self) -> str:
        return f"<{self.value}>"


@dataclass(frozen=True, slots=True)
class BlankNode:
    label: str

    def __str__(self) -> str:
        return f"_:{self.label}"


@dataclass(frozen=True, slots=True)
class Literal:
    lexical: str
    datatype: str = XSD_STRING
    language: Optional[str] = None

    def __str__(self) -> str:
        if self.language:
            return f'"{self.lexical}"@{self.language}'
        if self.datatype == XSD_STRING:
            return f'"{self.lexical}"'
        return f'"{self.lexical}"^^<{self.datatype}>'


Term = Union[Iri, BlankNode, Literal]
Subject = Union[Iri, BlankNode]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))


def validate_term(term: Term) -> None:
    """Raise :class:`TermError` if ``term`` violates the model invariants."""
    if isinstance(term, Iri):
        if not term.value:
            raise TermError("IRI must be non-empty")
        if _WHITESPACE.search(term.value):
            raise TermError(f"IRI contains whitespace: {term.value!r}")
    elif isinstance(term, BlankNode):
        if not term.label:
            raise TermError("blank node label must be non-empty")
    elif isinstance(term, Literal):
        if term.language is not None:
            if term.datatype != RDF_LANGSTRING:
                raise TermError(
                    "language-tagged literal must use rdf:langString, "
                    f"got {term.datatype}"
                )
        elif term.datatype == RDF_LANGSTRING:
            raise TermError("rdf:langString literal requires a language tag")
        if not term.datatype:
            raise TermError("literal datatype must be non-empty")
        if term.datatype in NUMERIC_DATATYPES:
            _validate_numeric_lexical(term)
    else:
        raise TermError(f"not an RDF term: {term!r}")


def _validate_numeric_lexical(term: Literal) -> None:
    lex = term.lexical
    if term.datatype == XSD_INTEGER:
        if not _INTEGER_LEXICAL.match(lex):
            raise TermError(f"bad xsd:integer lexical form: {lex!r}")
        if not INT64_MIN <= int(lex) <= INT64_MAX:
            raise TermError(f"xsd:integer out of 64-bit range: {lex}")
    elif term.datatype == XSD_DECIMAL:
        if not _DECIMAL_LEXICAL.match(lex):
            raise TermError(f"bad xsd:decimal lexical form: {lex!r}")
    elif term.datatype == XSD_DOUBLE:
        if not _DOUBLE_LEXICAL.match(lex):
            raise TermError(f"bad xsd:double lexical form: {lex!r}")


def validate_triple(triple: Triple) -> None:
    """Check positional rules: literals only in object position, IRI predicate."""
    if not isinstance(triple.subject, (Iri, BlankNode)):
        raise TermError(f"triple subject must be IRI or blank node: {triple.subject!r}")
    if not isinstance(triple.predicate, Iri):
        raise TermError(f"triple predicate must be an IRI: {triple.predicate!r}")
    if not isinstance(triple.object, (Iri, BlankNode, Literal)):
        raise TermError(f"triple object is not a term: {triple.object!r}")
    validate_term(triple.subject)
    validate_term(triple.predicate)
    validate_term(triple.object)


@lru_cache(maxsize=65536)
def numeric_value(term: Term) -> Union[int, Decimal, float, None]:
    """Value-space interpretation of a numeric literal, else ``None``.

    xsd:integer maps to int, xsd:decimal to Decimal (exact), xsd:double to
    float. Non-literals and non-numeric datatypes map to None.
    """
    if not isinstance(term, Literal) or term.datatype not in NUMERIC_DATATYPES:
        return None
    try:
        if term.datatype == XSD_INTEGER:
            return int(term.lexical)
        if term.datatype == XSD_DECIMAL:
            return Decimal(term.lexical)
        lex = term.lexical
        if lex == "INF" or lex == "+INF":
            return float("inf")
        if lex == "-INF":
            return float("-inf")
        return float(lex)
    except (ValueError, InvalidOperation):
        return None


def numeric_key(term: Term) -> Optional[tuple]:
    """Exact hashable key identifying a numeric literal's value.

    Two numeric literals share a key iff they denote the same number, so 12,
    12.0, and 1.2e1 all collide. NaN gets its own key (it compares unequal to
    everything in query evaluation; the key only drives index grouping).
    """
    value = numeric_value(term)
    if value is None:
        return None
    if isinstance(value, float):
        if value != value:  # NaN
            return ("nan",)
        if value in (float("inf"), float("-inf")):
            return ("inf", value > 0)
        frac = Fraction(value)
    elif isinstance(value, Decimal):
        frac = Fraction(value)
    else:
        frac = Fraction(value)
    return (frac.numerator, frac.denominator)


_KIND_RANK = {BlankNode: 0, Iri: 1, Literal: 2}


def sort_key(term: Term) -> tuple:
    """Total order over terms: blank < IRI < literal, literals by datatype then value.

    Within a numeric datatype, ordering follows the numeric value; other
    literals order by lexical form (then language tag). Deterministic for any
    pair of valid terms.
    """
    if isinstance(term, BlankNode):
        return (0, term.label)
    if isinstance(term, Iri):
        return (1, term.value)
    if term.datatype in NUMERIC_DATATYPES:
        value = numeric_value(term)
        if isinstance(value, float):
            if value != value:  # NaN after everything
                return (2, term.datatype, 2, Fraction(0), term.lexical)
            if value == float("inf"):
                return (2, term.datatype, 1, Fraction(0), term.lexical)
            if value == float("-inf"):
                return (2, term.datatype, -1, Fraction(0), term.lexical)
            return (2, term.datatype, 0, Fraction(value), term.lexical)
        return (2, term.datatype, 0, Fraction(value), term.lexical)
    return (2, term.datatype, 0, term.lexical, term.language or "")


def triple_sort_key(triple: Triple) -> tuple:
    return (sort_key(triple.subject), sort_key(triple.predicate), sort_key(triple.object))


def encode_term(term: Optional[Term]) -> str:
    """Canonical string encoding used for hashing rows (DISTINCT, oracles)."""
    if term is None:
        return ""
    return str(term)
