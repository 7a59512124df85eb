"""Greedy join-order planner driven by exact index counts.

The planner repeatedly picks the cheapest remaining pattern: constants probe
the store's count indexes directly, and positions holding an already-bound
variable are discounted by the observed number of distinct terms in that
position (a uniformity estimate of the per-binding fan-out). Filters run as
soon as their variables are bound, BINDs as soon as their inputs are, which
is what shrinks intermediate row counts.

The unoptimized baseline keeps patterns and BINDs in textual order; it is
used for optimization-effectiveness comparisons and must produce identical
results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..store import GraphStore
from ..terms import Literal, Term, numeric_key
from .algebra import (
    ExtendOp,
    FilterOp,
    QueryAlgebra,
    TriplePattern,
    Var,
    expr_variables,
)


@dataclass
class PatternStep:
    pattern: TriplePattern
    estimate: float
    text_index: int

    def __str__(self) -> str:
        tag = " [path]" if self.pattern.from_path else ""
        return f"match {self.pattern}{tag}"


@dataclass
class FilterStep:
    op: FilterOp

    def __str__(self) -> str:
        return f"filter {self.op.expr}"


@dataclass
class ExtendStep:
    op: ExtendOp

    def __str__(self) -> str:
        return f"bind {self.op.var} := {self.op.expr}"


Step = Union[PatternStep, FilterStep, ExtendStep]


@dataclass
class Plan:
    """Ordered execution steps plus the query's solution modifiers."""

    algebra: QueryAlgebra
    steps: list[Step]
    optimized: bool
    graph: Optional[str] = None
    estimates: list[float] = field(default_factory=list)


def _pattern_probe(store: GraphStore, graph: Optional[str], pattern: TriplePattern) -> float:
    """Exact count of the pattern with only its constant positions bound."""
    consts = []
    for position in (pattern.subject, pattern.predicate, pattern.object):
        consts.append(None if isinstance(position, Var) else position)
    s, p, o = consts
    if isinstance(o, Literal) and numeric_key(o) is not None:
        # Numeric objects match in value space: sum counts over equal-valued terms.
        total = 0
        for sibling in _value_siblings(store, o):
            total += store.count(graph, s, p, sibling)
        return float(total)
    return float(store.count(graph, s, p, o))


def _value_siblings(store: GraphStore, literal: Literal) -> list[Term]:
    return [store._term(tid) for tid in store._value_sibling_ids(literal)]


def _distinct_counts(store: GraphStore, graph: Optional[str], pattern: TriplePattern):
    """Distinct terms per position among triples matching the constants.

    Cached on the store keyed by (version, graph, constant signature); the
    scan is linear in the number of matching triples.
    """
    consts = tuple(
        None if isinstance(t, Var) else t
        for t in (pattern.subject, pattern.predicate, pattern.object)
    )
    cache = getattr(store, "_plan_stats_cache", None)
    if cache is None or cache[0] != store.version:
        cache = (store.version, {})
        store._plan_stats_cache = cache
    key = (graph, consts)
    hit = cache[1].get(key)
    if hit is not None:
        return hit
    ids = []
    for const in consts:
        if const is None:
            ids.append(None)
        else:
            tid = store._id_of(const)
            if tid is None:  # constant not in the store: nothing matches
                cache[1][key] = (0, 0, 0)
                return cache[1][key]
            ids.append(tid)
    subjects, predicates, objects = set(), set(), set()
    for s, p, o in store._match_ids(graph, *ids):
        subjects.add(s)
        predicates.add(p)
        objects.add(o)
    result = (len(subjects), len(predicates), len(objects))
    cache[1][key] = result
    return result


def estimate_pattern(
    store: GraphStore,
    graph: Optional[str],
    pattern: TriplePattern,
    bound: set[Var],
) -> float:
    """Estimated result rows per current binding set.

    Starting from the exact count over constant positions, each position
    whose variable is already bound divides the estimate by the distinct
    count observed in that position (uniformity assumption).
    """
    raw = _pattern_probe(store, graph, pattern)
    if raw == 0.0:
        return 0.0
    positions = (pattern.subject, pattern.predicate, pattern.object)
    bound_positions = [
        i for i, t in enumerate(positions) if isinstance(t, Var) and t in bound
    ]
    if not bound_positions:
        return raw
    distinct = _distinct_counts(store, graph, pattern)
    est = raw
    for i in bound_positions:
        est /= max(1, distinct[i])
    return est


def plan(
    algebra: QueryAlgebra,
    store: GraphStore,
    graph: Optional[str] = None,
    optimize: bool = True,
) -> Plan:
    """Order the WHERE elements into an executable plan.

    With ``optimize=False`` the textual order is kept (filters still wait for
    their variables, as required for correctness).
    """
    patterns = [
        (i, e) for i, e in enumerate(algebra.elements) if isinstance(e, TriplePattern)
    ]
    filters = [(i, e) for i, e in enumerate(algebra.elements) if isinstance(e, FilterOp)]
    extends = [(i, e) for i, e in enumerate(algebra.elements) if isinstance(e, ExtendOp)]

    steps: list[Step] = []
    estimates: list[float] = []
    bound: set[Var] = set()
    placed_filters: set[int] = set()
    placed_extends: set[int] = set()

    def place_eligible() -> None:
        # BINDs first (their outputs can enable filters), then filters.
        progress = True
        while progress:
            progress = False
            for i, op in extends:
                if i in placed_extends:
                    continue
                if expr_variables(op.expr) <= bound:
                    steps.append(ExtendStep(op))
                    placed_extends.add(i)
                    bound.add(op.var)
                    progress = True
            for i, op in filters:
                if i in placed_filters:
                    continue
                if expr_variables(op.expr) <= bound:
                    steps.append(FilterStep(op))
                    placed_filters.add(i)
                    progress = True

    place_eligible()
    remaining = list(patterns)
    if optimize:
        while remaining:
            best_index = 0
            best_cost = None
            for idx, (text_idx, pattern) in enumerate(remaining):
                est = estimate_pattern(store, graph, pattern, bound)
                shares = any(v in bound for v in pattern.variables())
                # Prefer join-connected patterns at equal cost to avoid
                # gratuitous cross products.
                cost = (est, 0 if shares or not bound else 1, text_idx)
                if best_cost is None or cost < best_cost:
                    best_cost = cost
                    best_index = idx
            text_idx, pattern = remaining.pop(best_index)
            est = estimate_pattern(store, graph, pattern, bound)
            steps.append(PatternStep(pattern, est, text_idx))
            estimates.append(est)
            bound.update(pattern.variables())
            place_eligible()
    else:
        ordered = sorted(
            [(i, p) for i, p in patterns] + [(i, e) for i, e in extends],
            key=lambda pair: pair[0],
        )
        for text_idx, element in ordered:
            if isinstance(element, TriplePattern):
                est = estimate_pattern(store, graph, element, bound)
                steps.append(PatternStep(element, est, text_idx))
                estimates.append(est)
                bound.update(element.variables())
            else:
                if text_idx in placed_extends:
                    continue
                steps.append(ExtendStep(element))
                placed_extends.add(text_idx)
                bound.add(element.var)
            # Filters still attach at the earliest correct point.
            for i, op in filters:
                if i not in placed_filters and expr_variables(op.expr) <= bound:
                    steps.append(FilterStep(op))
                    placed_filters.add(i)

    # Anything never satisfied still runs (and errors per SPARQL semantics).
    for i, op in extends:
        if i not in placed_extends:
            steps.append(ExtendStep(op))
            bound.add(op.var)
    for i, op in filters:
        if i not in placed_filters:
            steps.append(FilterStep(op))

    return Plan(algebra=algebra, steps=steps, optimized=optimize, graph=graph, estimates=estimates)


def explain(plan_: Plan, result=None) -> str:
    """Human-readable step list with estimated and, after execution, actual rows."""
    algebra = plan_.algebra
    header = "plan ({}){}".format(
        "optimized" if plan_.optimized else "textual order",
        f" graph <{plan_.graph}>" if plan_.graph else "",
    )
    lines = [header]
    actuals = list(result.intermediate_counts) if result is not None else None
    for i, step in enumerate(plan_.steps):
        note = ""
        if isinstance(step, PatternStep):
            note = f" est={step.estimate:.1f}"
        if actuals is not None and i < len(actuals):
            note += f" rows={actuals[i]}"
        lines.append(f"  {i + 1}. {step}{note}")
    if algebra.group_keys or algebra.aggregates:
        keys = " ".join(str(k) for k in algebra.group_keys)
        aggs = " ".join(str(a) for a in algebra.aggregates)
        lines.append(f"  group by {keys} {aggs}".rstrip())
    if algebra.order_by:
        conds = " ".join(
            ("" if c.ascending else "DESC ") + str(c.expr) for c in algebra.order_by
        )
        lines.append(f"  order by {conds}")
    projection = " ".join(str(v) for v in algebra.projection) or "*"
    lines.append(f"  project{' distinct' if algebra.distinct else ''} {projection}")
    if algebra.offset or algebra.limit is not None:
        lines.append(f"  slice offset={algebra.offset} limit={algebra.limit}")
    return "\n".join(lines)
