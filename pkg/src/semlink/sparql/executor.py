"""Plan execution: index-backed joins, aggregates, solution modifiers.

A single query runs single-threaded against a read-locked store snapshot, so
intermediate row counts are deterministic. Timing wraps plan execution only
(parse and plan time excluded) and is reported in milliseconds.
"""

from __future__ import annotations

import csv
import functools
import io
import time
from dataclasses import dataclass, field
from decimal import Decimal
from itertools import product
from typing import Optional

from ..namespaces import XSD_STRING
from ..store import GraphStore
from ..terms import BlankNode, Iri, Literal, Term, encode_term, numeric_key, numeric_value, sort_key
from .algebra import TriplePattern, Var, VarExpr
from .eval import EvalError, effective_boolean, evaluate, term_from_value
from .planner import ExtendStep, FilterStep, PatternStep, Plan


@dataclass
class ResultTable:
    """Solution sequence plus execution metadata."""

    vars: list[str]
    rows: list[tuple]
    elapsed_ms: float = 0.0
    intermediate_counts: list[int] = field(default_factory=list)

    @property
    def row_count(self) -> int:
        return len(self.rows)

    def to_csv(self) -> str:
        """RFC 4180 CSV; header = projected variables, cells = lexical forms."""
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\r\n")
        writer.writerow(self.vars)
        for row in self.rows:
            writer.writerow([_csv_cell(t) for t in row])
        return out.getvalue()

    def to_json_rows(self) -> list[dict]:
        """Simple JSON table: one object per row, terms as {type, value, ...}."""
        out = []
        for row in self.rows:
            obj = {}
            for var, term in zip(self.vars, row):
                if term is None:
                    continue
                obj[var] = _json_term(term)
            out.append(obj)
        return out


def _csv_cell(term: Optional[Term]) -> str:
    if term is None:
        return ""
    if isinstance(term, Iri):
        return term.value
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    return term.lexical


def _json_term(term: Term) -> dict:
    if isinstance(term, Iri):
        return {"type": "iri", "value": term.value}
    if isinstance(term, BlankNode):
        return {"type": "bnode", "value": term.label}
    obj = {"type": "literal", "value": term.lexical}
    if term.language:
        obj["language"] = term.language
    elif term.datatype != XSD_STRING:
        obj["datatype"] = term.datatype
    return obj


def execute(plan: Plan, store: GraphStore) -> ResultTable:
    """Run the plan; the result multiset matches the nested-loop semantics."""
    algebra = plan.algebra
    slots: dict[str, int] = {}

    def slot(var: Var) -> int:
        if var.name not in slots:
            slots[var.name] = len(slots)
        return slots[var.name]

    for step in plan.steps:
        if isinstance(step, PatternStep):
            for v in step.pattern.variables():
                slot(v)
        elif isinstance(step, ExtendStep):
            slot(step.op.var)
    for v in algebra.projection:
        slot(v)
    for agg in algebra.aggregates:
        slot(agg.alias)

    width = len(slots)
    counts: list[int] = []

    with store.read():
        start = time.perf_counter()
        rows: list[list] = [[None] * width]
        for step in plan.steps:
            if isinstance(step, PatternStep):
                rows = _match_step(store, plan.graph, step.pattern, rows, slots)
            elif isinstance(step, FilterStep):
                rows = _filter_step(step, rows, slots)
            else:
                rows = _extend_step(step, rows, slots)
            counts.append(len(rows))

        if algebra.group_keys or algebra.aggregates:
            rows = _group_step(algebra, rows, slots)
            counts.append(len(rows))

        if algebra.order_by:
            rows = _order_step(algebra, rows, slots)

        projection = [v.name for v in algebra.projection]
        out_rows = [
            tuple(row[slots[name]] if name in slots else None for name in projection)
            for row in rows
        ]

        if algebra.distinct:
            seen = set()
            unique = []
            for row in out_rows:
                key = tuple(encode_term(t) for t in row)
                if key not in seen:
                    seen.add(key)
                    unique.append(row)
            out_rows = unique

        if algebra.offset:
            out_rows = out_rows[algebra.offset:]
        if algebra.limit is not None:
            out_rows = out_rows[: algebra.limit]
        elapsed_ms = (time.perf_counter() - start) * 1000.0

    return ResultTable(
        vars=projection,
        rows=out_rows,
        elapsed_ms=elapsed_ms,
        intermediate_counts=counts,
    )


def _candidate_ids(store: GraphStore, term: Term) -> list[int]:
    """Store ids a bound term can match: value-equal ids for numeric literals."""
    if isinstance(term, Literal) and numeric_key(term) is not None:
        return store._value_sibling_ids(term)
    tid = store._id_of(term)
    return [] if tid is None else [tid]


def _match_step(
    store: GraphStore,
    graph: Optional[str],
    pattern: TriplePattern,
    rows: list[list],
    slots: dict[str, int],
) -> list[list]:
    positions = (pattern.subject, pattern.predicate, pattern.object)
    const_ids: list[Optional[list[int]]] = []
    var_slots: list[Optional[int]] = []
    for term in positions:
        if isinstance(term, Var):
            const_ids.append(None)
            var_slots.append(slots[term.name])
        else:
            const_ids.append(_candidate_ids(store, term))
            var_slots.append(None)

    output: list[list] = []
    for row in rows:
        probes: list[list[Optional[int]]] = []
        ok = True
        for i in range(3):
            if const_ids[i] is not None:
                if not const_ids[i]:
                    ok = False
                    break
                probes.append(const_ids[i])
            else:
                bound_term = row[var_slots[i]]
                if bound_term is None:
                    probes.append([None])
                else:
                    ids = _candidate_ids(store, bound_term)
                    if not ids:
                        ok = False
                        break
                    probes.append(ids)
        if not ok:
            continue
        for s_probe, p_probe, o_probe in product(*probes):
            for s_id, p_id, o_id in store._match_ids(graph, s_probe, p_probe, o_probe):
                new_row = row[:]
                matched = (s_id, p_id, o_id)
                consistent = True
                for i in range(3):
                    vslot = var_slots[i]
                    if vslot is None:
                        continue
                    term = store._term(matched[i])
                    current = new_row[vslot]
                    if current is None:
                        new_row[vslot] = term
                    elif probes[i][0] is None and current != term:
                        # same unbound variable twice in one pattern
                        consistent = False
                        break
                if consistent:
                    output.append(new_row)
    return output


def _filter_step(step: FilterStep, rows: list[list], slots) -> list[list]:
    output = []
    for row in rows:
        try:
            keep = effective_boolean(evaluate(step.op.expr, row, slots))
        except EvalError:
            keep = False  # an erroring FILTER behaves as false
        if keep:
            output.append(row)
    return output


def _extend_step(step: ExtendStep, rows: list[list], slots) -> list[list]:
    idx = slots[step.op.var.name]
    for row in rows:
        try:
            row[idx] = term_from_value(evaluate(step.op.expr, row, slots))
        except EvalError:
            row[idx] = None  # an erroring BIND leaves the variable unbound
    return rows


def _group_step(algebra, rows: list[list], slots) -> list[list]:
    key_slots = [slots[k.name] for k in algebra.group_keys]
    groups: dict[tuple, list[list]] = {}
    order: list[tuple] = []
    for row in rows:
        key = tuple(encode_term(row[i]) for i in key_slots)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    width = len(slots)
    out = []
    for key in order:
        members = groups[key]
        new_row: list = [None] * width
        for k in key_slots:
            new_row[k] = members[0][k]
        for agg in algebra.aggregates:
            new_row[slots[agg.alias.name]] = _aggregate(agg, members, slots)
        out.append(new_row)
    return out


def _aggregate(agg, members: list[list], slots) -> Optional[Term]:
    if agg.func == "COUNT":
        if agg.arg is None:
            return term_from_value(len(members))
        idx = slots.get(agg.arg.name)
        if idx is None:
            return term_from_value(0)
        return term_from_value(sum(1 for m in members if m[idx] is not None))

    idx = slots.get(agg.arg.name) if agg.arg is not None else None
    values = [m[idx] for m in members if idx is not None and m[idx] is not None]
    if not values:
        return None

    if agg.func in ("SUM", "AVG"):
        total: object = 0
        for term in values:
            n = numeric_value(term)
            if n is None:
                return None  # erroring aggregate leaves the alias unbound
            if isinstance(n, float) or isinstance(total, float):
                total = float(total) + float(n)
            else:
                total = total + n
        if agg.func == "SUM":
            return term_from_value(total)
        count = len(values)
        if isinstance(total, float):
            return term_from_value(total / count)
        if isinstance(total, int):
            total = Decimal(total)
        return term_from_value(total / Decimal(count))

    # MIN / MAX over a comparable domain: numeric by value, strings lexically.
    numerics = [numeric_value(t) for t in values]
    if all(n is not None for n in numerics):
        chosen = min(range(len(values)), key=lambda i: _num_order(numerics[i])) \
            if agg.func == "MIN" else max(range(len(values)), key=lambda i: _num_order(numerics[i]))
        return values[chosen]
    if all(isinstance(t, Literal) and t.datatype == XSD_STRING for t in values):
        lex = [t.lexical for t in values]
        target = min(lex) if agg.func == "MIN" else max(lex)
        return values[lex.index(target)]
    return None


def _num_order(n):
    return float(n) if isinstance(n, Decimal) else n


def _order_step(algebra, rows: list[list], slots) -> list[list]:
    conditions = algebra.order_by

    def key_for(row, cond):
        expr = cond.expr
        if isinstance(expr, VarExpr):
            idx = slots.get(expr.var.name)
            term = row[idx] if idx is not None else None
            return (0, (-1,) if term is None else sort_key(term))
        try:
            value = evaluate(expr, row, slots)
        except EvalError:
            return (1, ())  # errored keys sort last, deterministically
        return (0, sort_key(term_from_value(value)))

    def compare(a, b) -> int:
        for cond in conditions:
            ka = key_for(a, cond)
            kb = key_for(b, cond)
            if ka[0] != kb[0]:  # errors last regardless of direction
                return ka[0] - kb[0]
            if ka[1] == kb[1]:
                continue
            less = ka[1] < kb[1]
            if cond.ascending:
                return -1 if less else 1
            return 1 if less else -1
        return 0

    return sorted(rows, key=functools.cmp_to_key(compare))
