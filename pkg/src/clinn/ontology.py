"""Domain ontology: the slot inventory and dialogue-act catalogue.

An ontology bounds what names may appear in rules, corpora, and beliefs.
Belief slots ("slots") are the trackable state; "act_slots" additionally
permits slots that only ever appear inside dialogue acts (address, phone,
...) and never in a belief. When "act_slots" is omitted from a config
file, act-internal slot names are not validated.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from clinn.errors import OntologyError, SchemaError, UnknownAct, UnknownSlot


@dataclass(frozen=True, slots=True)
class Ontology:
    domain: str
    slots: tuple[str, ...]
    db_slots: tuple[str, ...]
    acts: tuple[str, ...]
    act_slots: tuple[str, ...] | None = None

    def __post_init__(self):
        for name in ("slots", "db_slots", "acts"):
            values = getattr(self, name)
            if len(set(values)) != len(values):
                raise OntologyError(f"{name} contains duplicates")
        missing = set(self.db_slots) - set(self.slots)
        if missing:
            raise OntologyError(f"db_slots not in slots: {sorted(missing)}")
        if self.act_slots is not None:
            missing = set(self.slots) - set(self.act_slots)
            if missing:
                raise OntologyError(f"act_slots must include all slots, missing {sorted(missing)}")

    def check_act(self, act: str, location: str = "") -> None:
        if act not in self.acts:
            raise UnknownAct(act, location)

    def check_slot(self, slot: str, location: str = "") -> None:
        """Validate a belief-state slot name."""
        if slot not in self.slots:
            raise UnknownSlot(slot, location)

    def check_act_slot(self, slot: str, location: str = "") -> None:
        """Validate a slot name used inside a dialogue act."""
        if self.act_slots is not None and slot not in self.act_slots:
            raise UnknownSlot(slot, location)


#: Restaurant-domain default used by the CLI when --config is omitted.
RESTAURANT_ONTOLOGY = Ontology(
    domain="restaurant",
    slots=("food", "area", "pricerange", "name", "day", "time", "people"),
    db_slots=("food", "area", "pricerange", "name"),
    acts=(
        "inform",
        "request",
        "nooffer",
        "recommend",
        "select",
        "offerbook",
        "offerbooked",
        "nobook",
        "bye",
        "greet",
        "reqmore",
        "welcome",
        "getrecommend",
        "acceptance",
        "rejection",
        "alternatives",
    ),
    act_slots=(
        "food",
        "area",
        "pricerange",
        "name",
        "day",
        "time",
        "people",
        "address",
        "phone",
        "postcode",
        "price",
    ),
)


def ontology_from_dict(raw: dict, location: str = "ontology") -> Ontology:
    if not isinstance(raw, dict):
        raise SchemaError(location, "expected a JSON object")
    for key in ("domain", "slots", "db_slots", "acts"):
        if key not in raw:
            raise SchemaError(location, f"missing key {key!r}")
    for key in ("slots", "db_slots", "acts"):
        if not isinstance(raw[key], list) or not all(isinstance(x, str) for x in raw[key]):
            raise SchemaError(location, f"{key!r} must be a list of strings")
    act_slots = raw.get("act_slots")
    if act_slots is not None and (
        not isinstance(act_slots, list) or not all(isinstance(x, str) for x in act_slots)
    ):
        raise SchemaError(location, "'act_slots' must be a list of strings")
    try:
        return Ontology(
            domain=str(raw["domain"]),
            slots=tuple(s.lower() for s in raw["slots"]),
            db_slots=tuple(s.lower() for s in raw["db_slots"]),
            acts=tuple(a.lower() for a in raw["acts"]),
            act_slots=tuple(s.lower() for s in act_slots) if act_slots is not None else None,
        )
    except OntologyError as exc:
        raise SchemaError(location, str(exc)) from exc


def load_ontology(path: str | Path) -> Ontology:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON: {exc}") from exc
    return ontology_from_dict(raw, location=str(path))
