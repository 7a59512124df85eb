"""Cross-species age mapping and the equivalent-subject query.

Age maps are cited piecewise-linear functions: ``map(x) = intercept +
slope*x`` at or above the threshold, 0 below it. The two defaults convert
human postnatal years to rodent postnatal days and vice versa; they are
independent published approximations, deliberately not mutual inverses, and
are never composed.

``equivalent_subjects`` generates and runs the parameterized cross-species
query: select subjects of the source species with their ages, bind the
mapped age, and match target-species subjects whose age agrees within the
tolerance. Tolerance 0 uses exact value-space equality.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

from .sparql import execute, parse_query, plan
from .store import GraphStore
from .terms import numeric_value


@dataclass(frozen=True)
class AgeMap:
    """Named, cited linear age conversion between two species."""

    name: str
    from_species: str
    to_species: str
    threshold: float
    intercept: float
    slope: float
    input_units: str
    output_units: str
    citation: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("age map needs a name")
        if self.slope <= 0:
            raise ValueError(f"age map {self.name!r}: slope must be positive")
        if not self.input_units or not self.output_units:
            raise ValueError(f"age map {self.name!r}: units must be non-empty")
        for label in ("threshold", "intercept", "slope"):
            if not math.isfinite(getattr(self, label)):
                raise ValueError(f"age map {self.name!r}: {label} must be finite")

    def __call__(self, age: float) -> float:
        return map_age(self, age)


def map_age(age_map: AgeMap, age: float) -> float:
    """Piecewise-linear evaluation: intercept + slope*age at/above threshold, else 0."""
    if not math.isfinite(age):
        raise ValueError(f"age must be finite, got {age!r}")
    if age >= age_map.threshold:
        return age_map.intercept + age_map.slope * age
    return 0.0


@dataclass(frozen=True)
class SpeciesProfile:
    """How a species is represented in the graphs: label, id attribute, age units."""

    label: str
    id_predicate: str  # qualified name of the subject-identifier attribute
    age_units: str


DEFAULT_SPECIES_PROFILES: dict[str, SpeciesProfile] = {
    "Sprague-Dawley": SpeciesProfile("Sprague-Dawley", "cuci:animalNumber", "postnatal days"),
    "Homo sapiens": SpeciesProfile("Homo sapiens", "ncit:subjectID", "postnatal years"),
}

HUMAN_TO_RODENT = AgeMap(
    name="human-to-rodent-linear",
    from_species="Homo sapiens",
    to_species="Sprague-Dawley",
    threshold=0.0,
    intercept=7.5,
    slope=2.1,
    input_units="postnatal years",
    output_units="postnatal days",
    citation="Center default linear mapping (investigator consensus).",
)

RODENT_TO_HUMAN = AgeMap(
    name="rodent-to-human-linear",
    from_species="Sprague-Dawley",
    to_species="Homo sapiens",
    threshold=7.0,
    intercept=-3.5,
    slope=0.5,
    input_units="postnatal days",
    output_units="postnatal years",
    citation="Center default linear mapping (investigator consensus).",
)


class MapRegistry:
    """Thread-safe catalog of age maps; reads are lock-free snapshots."""

    def __init__(self, maps: Optional[list[AgeMap]] = None):
        self._maps: dict[str, AgeMap] = {}
        self._lock = threading.Lock()
        for age_map in maps or ():
            self.register(age_map)

    def register(self, age_map: AgeMap) -> str:
        with self._lock:
            if age_map.name in self._maps:
                raise ValueError(f"age map {age_map.name!r} already registered")
            self._maps[age_map.name] = age_map
        return age_map.name

    def get(self, name: str) -> AgeMap:
        try:
            return self._maps[name]
        except KeyError:
            raise KeyError(f"unknown age map {name!r}") from None

    def list(self) -> list[AgeMap]:
        return sorted(self._maps.values(), key=lambda m: m.name)

    def save(self, path: str | Path) -> None:
        payload = [asdict(m) for m in self.list()]
        Path(path).write_text(json.dumps(payload, indent=2), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "MapRegistry":
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls([AgeMap(**entry) for entry in payload])


def default_registry() -> MapRegistry:
    return MapRegistry([HUMAN_TO_RODENT, RODENT_TO_HUMAN])


@dataclass(frozen=True)
class EquivalencePair:
    """One matched subject pair with the ages that produced the match."""

    from_subject: str
    from_age: float
    from_units: str
    mapped_age: float
    mapped_units: str
    to_subject: str
    to_age: float
    to_units: str
    map_name: str
    tolerance: float


def _number_text(x: float) -> str:
    """Render a coefficient as a query decimal literal (exact in the engine)."""
    return repr(float(x))


def build_equivalence_query(
    age_map: AgeMap,
    tolerance: float,
    profiles: dict[str, SpeciesProfile] = DEFAULT_SPECIES_PROFILES,
) -> str:
    """The parameterized cross-species query text for a map and tolerance."""
    from_profile = profiles[age_map.from_species]
    to_profile = profiles[age_map.to_species]
    threshold = _number_text(age_map.threshold)
    formula = f"({_number_text(age_map.intercept)} + {_number_text(age_map.slope)}*?from_age)"
    if tolerance == 0:
        match_filter = "FILTER((?to_age = ?mapped_age))"
    else:
        t = repr(float(tolerance))
        match_filter = (
            f"FILTER((?to_age >= ?mapped_age - {t}) && (?to_age <= ?mapped_age + {t}))"
        )
    return f"""SELECT ?from_id ?from_age ?mapped_age ?to_id ?to_age WHERE {{
  ?from_agent a prov:Agent ;
      ncit:species "{age_map.from_species}" ;
      {from_profile.id_predicate} ?from_id .
  ?from_entity prov:wasGeneratedBy/prov:wasAssociatedWith ?from_agent ;
      ncit:age ?from_age .
  BIND(IF(?from_age >= {threshold},{formula},0) as ?mapped_age)
  ?to_agent rdf:type prov:Agent ;
      ncit:species "{age_map.to_species}" ;
      {to_profile.id_predicate} ?to_id .
  ?to_activity prov:wasAssociatedWith ?to_agent .
  ?to_entity prov:wasGeneratedBy ?to_activity ;
      ncit:age ?to_age .
  {match_filter}
}}"""


def equivalent_subjects(
    store: GraphStore,
    age_map: AgeMap,
    tolerance: float = 0.0,
    graph: Optional[str] = None,
    profiles: dict[str, SpeciesProfile] = DEFAULT_SPECIES_PROFILES,
) -> list[EquivalencePair]:
    """Run the cross-species query; pairs sorted by (from subject, to subject).

    Refuses maps whose units disagree with the species' declared age units,
    and negative tolerances.
    """
    if tolerance < 0:
        raise ValueError(f"tolerance must be >= 0, got {tolerance}")
    from_profile = profiles.get(age_map.from_species)
    to_profile = profiles.get(age_map.to_species)
    if from_profile is None or to_profile is None:
        raise KeyError(f"no species profile for {age_map.from_species!r}/{age_map.to_species!r}")
    if age_map.input_units != from_profile.age_units:
        raise ValueError(
            f"age map {age_map.name!r} expects {age_map.input_units}, but "
            f"{from_profile.label!r} ages are in {from_profile.age_units}"
        )
    if age_map.output_units != to_profile.age_units:
        raise ValueError(
            f"age map {age_map.name!r} produces {age_map.output_units}, but "
            f"{to_profile.label!r} ages are in {to_profile.age_units}"
        )

    text = build_equivalence_query(age_map, tolerance, profiles)
    algebra = parse_query(text, prefixes=store.prefixes)
    table = execute(plan(algebra, store, graph=graph), store)

    pairs = []
    index = {name: i for i, name in enumerate(table.vars)}
    for row in table.rows:
        from_age = numeric_value(row[index["from_age"]])
        to_age = numeric_value(row[index["to_age"]])
        pairs.append(
            EquivalencePair(
                from_subject=row[index["from_id"]].lexical,
                from_age=float(from_age),
                from_units=from_profile.age_units,
                mapped_age=map_age(age_map, float(from_age)),
                mapped_units=to_profile.age_units,
                to_subject=row[index["to_id"]].lexical,
                to_age=float(to_age),
                to_units=to_profile.age_units,
                map_name=age_map.name,
                tolerance=float(tolerance),
            )
        )
    pairs.sort(key=lambda p: (p.from_subject, p.to_subject))
    return pairs
