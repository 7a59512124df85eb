"""Indexed in-memory quad store.

Each named graph keeps three nested-dict orderings (subject-first,
predicate-first, object-first) over dictionary-encoded term ids, so pattern
matching can always start from the longest bound prefix. Concurrency follows
a readers/writer discipline: any number of concurrent readers or one
exclusive writer; bulk loads block queries.

Persistence is a whole-store snapshot: one Turtle file per named graph plus a
JSON manifest mapping graph IRIs to filenames and recording the prefix table.
"""

from __future__ import annotations

import json
import threading
from contextlib import contextmanager
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .namespaces import DEFAULT_GRAPH, DEFAULT_PREFIXES
from .terms import (
    BlankNode,
    Iri,
    Literal,
    Term,
    TermError,
    Triple,
    numeric_key,
    validate_triple,
)

MANIFEST_NAME = "manifest.json"


class PrefixError(KeyError):
    """Raised when expanding a qualified name whose prefix is unregistered."""

    def __init__(self, prefix: str):
        super().__init__(prefix)
        self.prefix = prefix

    def __str__(self) -> str:
        return f"unregistered prefix: {self.prefix!r}"


class _RWLock:
    """Readers/writer lock; writers wait for active readers and vice versa."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writer = False

    def acquire_read(self):
        with self._cond:
            while self._writer:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        with self._cond:
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self):
        with self._cond:
            while self._writer or self._readers:
                self._cond.wait()
            self._writer = True

    def release_write(self):
        with self._cond:
            self._writer = False
            self._cond.notify_all()


class _Graph:
    """One named graph: the same triple-id set in three orderings."""

    __slots__ = ("spo", "pos", "osp", "size")

    def __init__(self):
        self.spo: dict[int, dict[int, set[int]]] = {}
        self.pos: dict[int, dict[int, set[int]]] = {}
        self.osp: dict[int, dict[int, set[int]]] = {}
        self.size = 0

    def add(self, s: int, p: int, o: int) -> bool:
        objects = self.spo.setdefault(s, {}).setdefault(p, set())
        if o in objects:
            return False
        objects.add(o)
        self.pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self.osp.setdefault(o, {}).setdefault(s, set()).add(p)
        self.size += 1
        return True


class GraphStore:
    """Named-graph triple store with prefix management and pattern matching."""

    def __init__(self, prefixes: Optional[dict[str, str]] = None):
        self._lock = _RWLock()
        self._graphs: dict[str, _Graph] = {}
        self._prefixes: dict[str, str] = dict(DEFAULT_PREFIXES if prefixes is None else prefixes)
        # Term interning: id -> Term and Term -> id, plus a value index that
        # groups numeric literal ids by exact numeric value (12 vs 12.0).
        self._terms: list[Term] = []
        self._ids: dict[Term, int] = {}
        self._numeric_ids: dict[tuple, list[int]] = {}
        self._blank_counter = 0
        self._version = 0

    # -- locking ----------------------------------------------------------

    @contextmanager
    def read(self):
        self._lock.acquire_read()
        try:
            yield self
        finally:
            self._lock.release_read()

    @contextmanager
    def write(self):
        self._lock.acquire_write()
        try:
            yield self
        finally:
            self._lock.release_write()

    @property
    def version(self) -> int:
        """Mutation counter; caches keyed on it stay valid while it is unchanged."""
        return self._version

    # -- prefixes ----------------------------------------------------------

    @property
    def prefixes(self) -> dict[str, str]:
        return dict(self._prefixes)

    def register_prefix(self, prefix: str, namespace: str) -> None:
        self._prefixes[prefix] = namespace

    def expand(self, qname: str) -> Iri:
        """Expand ``prefix:local`` against the prefix table."""
        prefix, sep, local = qname.partition(":")
        if not sep:
            raise PrefixError(qname)
        if prefix not in self._prefixes:
            raise PrefixError(prefix)
        return Iri(self._prefixes[prefix] + local)

    # -- interning ---------------------------------------------------------

    def _intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is not None:
            return tid
        tid = len(self._terms)
        self._terms.append(term)
        self._ids[term] = tid
        key = numeric_key(term)
        if key is not None:
            self._numeric_ids.setdefault(key, []).append(tid)
        return tid

    def _term(self, tid: int) -> Term:
        return self._terms[tid]

    def _id_of(self, term: Term) -> Optional[int]:
        return self._ids.get(term)

    def _value_sibling_ids(self, term: Term) -> list[int]:
        """Ids of all stored literals numerically equal to ``term`` (else exact id)."""
        key = numeric_key(term)
        if key is not None:
            return self._numeric_ids.get(key, [])
        tid = self._ids.get(term)
        return [] if tid is None else [tid]

    # -- mutation ----------------------------------------------------------

    def insert(self, graph: str, triple: Triple) -> bool:
        """Insert one triple; returns True iff it was not already present."""
        validate_triple(triple)
        with self.write():
            return self._insert_unlocked(graph, triple)

    def bulk_insert(self, graph: str, triples: Iterable[Triple], validate: bool = True) -> int:
        """Insert many triples under one write lock; returns count of new ones."""
        added = 0
        with self.write():
            for triple in triples:
                if validate:
                    validate_triple(triple)
                if self._insert_unlocked(graph, triple):
                    added += 1
        return added

    def _insert_unlocked(self, graph: str, triple: Triple) -> bool:
        g = self._graphs.get(graph)
        if g is None:
            g = self._graphs[graph] = _Graph()
        s = self._intern(triple.subject)
        p = self._intern(triple.predicate)
        o = self._intern(triple.object)
        added = g.add(s, p, o)
        if added:
            self._version += 1
        return added

    def fresh_blank(self) -> BlankNode:
        """Store-unique blank node (document labels are rewritten to these)."""
        self._blank_counter += 1
        return BlankNode(f"b{self._blank_counter}")

    # -- matching ----------------------------------------------------------

    def graph_names(self) -> list[str]:
        return sorted(self._graphs)

    def size(self, graph: Optional[str] = None) -> int:
        if graph is not None:
            g = self._graphs.get(graph)
            return 0 if g is None else g.size
        if len(self._graphs) <= 1:
            return sum(g.size for g in self._graphs.values())
        return self.count()

    def match(
        self,
        graph: Optional[str] = None,
        s: Optional[Term] = None,
        p: Optional[Term] = None,
        o: Optional[Term] = None,
    ) -> list[Triple]:
        """All triples matching the bound positions; None is a wildcard.

        Omitting the graph unions over all named graphs (deduplicated).
        Unknown graph IRIs yield an empty result.
        """
        with self.read():
            ids = self._pattern_ids(s, p, o)
            if ids is None:
                return []
            si, pi, oi = ids
            out = []
            for s_id, p_id, o_id in self._match_ids(graph, si, pi, oi):
                out.append(Triple(self._terms[s_id], self._terms[p_id], self._terms[o_id]))
            return out

    def count(
        self,
        graph: Optional[str] = None,
        s: Optional[Term] = None,
        p: Optional[Term] = None,
        o: Optional[Term] = None,
    ) -> int:
        """Number of matching triples, computed from index sizes where possible."""
        with self.read():
            ids = self._pattern_ids(s, p, o)
            if ids is None:
                return 0
            si, pi, oi = ids
            if graph is None and len(self._graphs) > 1:
                # Union semantics require deduplication across graphs.
                return len(set(self._match_ids(None, si, pi, oi)))
            graphs = self._target_graphs(graph)
            return sum(self._count_in_graph(g, si, pi, oi) for g in graphs)

    def _pattern_ids(self, s, p, o) -> Optional[tuple]:
        """Map bound terms to ids; None means no stored term can match."""
        out = []
        for term in (s, p, o):
            if term is None:
                out.append(None)
            else:
                tid = self._ids.get(term)
                if tid is None:
                    return None
                out.append(tid)
        return tuple(out)

    def _target_graphs(self, graph: Optional[str]) -> list[_Graph]:
        if graph is None:
            return list(self._graphs.values())
        g = self._graphs.get(graph)
        return [] if g is None else [g]

    def _match_ids(
        self,
        graph: Optional[str],
        s: Optional[int],
        p: Optional[int],
        o: Optional[int],
    ) -> Iterator[tuple[int, int, int]]:
        graphs = self._target_graphs(graph)
        if graph is None and len(graphs) > 1:
            seen: set[tuple[int, int, int]] = set()
            for g in graphs:
                for ids in self._match_ids_in_graph(g, s, p, o):
                    if ids not in seen:
                        seen.add(ids)
                        yield ids
            return
        for g in graphs:
            yield from self._match_ids_in_graph(g, s, p, o)

    @staticmethod
    def _match_ids_in_graph(g: _Graph, s, p, o) -> Iterator[tuple[int, int, int]]:
        # Pick the ordering whose leading bound positions are longest.
        if s is not None:
            by_p = g.spo.get(s)
            if by_p is None:
                return
            if p is not None:
                objects = by_p.get(p)
                if objects is None:
                    return
                if o is not None:
                    if o in objects:
                        yield (s, p, o)
                    return
                for o_id in objects:
                    yield (s, p, o_id)
                return
            if o is not None:
                by_s = g.osp.get(o)
                if by_s is None:
                    return
                preds = by_s.get(s)
                if preds is None:
                    return
                for p_id in preds:
                    yield (s, p_id, o)
                return
            for p_id, objects in by_p.items():
                for o_id in objects:
                    yield (s, p_id, o_id)
            return
        if p is not None:
            by_o = g.pos.get(p)
            if by_o is None:
                return
            if o is not None:
                subjects = by_o.get(o)
                if subjects is None:
                    return
                for s_id in subjects:
                    yield (s_id, p, o)
                return
            for o_id, subjects in by_o.items():
                for s_id in subjects:
                    yield (s_id, p, o_id)
            return
        if o is not None:
            by_s = g.osp.get(o)
            if by_s is None:
                return
            for s_id, preds in by_s.items():
                for p_id in preds:
                    yield (s_id, p_id, o)
            return
        for s_id, by_p in g.spo.items():
            for p_id, objects in by_p.items():
                for o_id in objects:
                    yield (s_id, p_id, o_id)

    @staticmethod
    def _count_in_graph(g: _Graph, s, p, o) -> int:
        if s is not None and p is not None and o is not None:
            objects = g.spo.get(s, {}).get(p)
            return 1 if objects and o in objects else 0
        if s is not None and p is not None:
            return len(g.spo.get(s, {}).get(p, ()))
        if s is not None and o is not None:
            return len(g.osp.get(o, {}).get(s, ()))
        if p is not None and o is not None:
            return len(g.pos.get(p, {}).get(o, ()))
        if s is not None:
            return sum(len(v) for v in g.spo.get(s, {}).values())
        if p is not None:
            return sum(len(v) for v in g.pos.get(p, {}).values())
        if o is not None:
            return sum(len(v) for v in g.osp.get(o, {}).values())
        return g.size

    # -- document loading ---------------------------------------------------

    def load_turtle(
        self,
        text: str,
        graph: Optional[str] = None,
        rewrite_blanks: bool = True,
    ) -> int:
        """Parse a Turtle document and insert its triples into ``graph``.

        Blank node labels are document-scoped, so by default they are
        rewritten to store-unique labels; snapshot restores pass
        ``rewrite_blanks=False`` because persisted labels are already unique.
        Declared prefixes are merged into the store prefix table.
        """
        from .turtle import parse_turtle

        doc = parse_turtle(text)
        target = graph if graph is not None else DEFAULT_GRAPH
        added = 0
        with self.write():
            for prefix, ns in doc.prefixes:
                self._prefixes.setdefault(prefix, ns)
            mapping: dict[str, BlankNode] = {}

            def resolve(term: Term) -> Term:
                if rewrite_blanks and isinstance(term, BlankNode):
                    node = mapping.get(term.label)
                    if node is None:
                        node = mapping[term.label] = self.fresh_blank()
                    return node
                return term

            for triple in doc.triples:
                t = Triple(resolve(triple.subject), triple.predicate, resolve(triple.object))
                if self._insert_unlocked(target, t):
                    added += 1
        return added

    # -- persistence ---------------------------------------------------------

    def save(self, directory: str | Path) -> None:
        """Snapshot every named graph to Turtle plus a manifest file."""
        from .turtle import serialize

        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        manifest = {"prefixes": self._prefixes, "graphs": {}}
        with self.read():
            for index, name in enumerate(self.graph_names()):
                filename = f"graph_{index}.ttl"
                manifest["graphs"][name] = filename
                triples = self.match(name)
                (directory / filename).write_text(
                    serialize(triples, self._prefixes), encoding="utf-8"
                )
        (directory / MANIFEST_NAME).write_text(
            json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8"
        )

    @classmethod
    def load(cls, directory: str | Path) -> "GraphStore":
        """Restore a snapshot written by :meth:`save`."""
        directory = Path(directory)
        manifest = json.loads((directory / MANIFEST_NAME).read_text(encoding="utf-8"))
        store = cls(prefixes=manifest.get("prefixes", {}))
        for graph, filename in manifest.get("graphs", {}).items():
            text = (directory / filename).read_text(encoding="utf-8")
            store.load_turtle(text, graph=graph, rewrite_blanks=False)
        return store
