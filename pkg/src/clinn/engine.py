"""Unification-based rule matching over one turn's dialogue state.

A rule's precondition sections are matched against the turn's user acts,
belief facts, and previous system action by finding a substitution under
which every pattern equals a distinct item of its section. Subset mode
allows extra items; ExactSet additionally demands a bijection per section.
Search order is pinned so results are reproducible everywhere: patterns in
declaration order, items in canonical sorted order, backtracking across
sections, first solution wins.

Strings are interned to ints once and the search itself runs in a small
kernel (clinn._match) with interchangeable pure-Python and compiled
backends.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from clinn import _match
from clinn._match_py import KIND_CONST, KIND_NOVAL, KIND_VAR
from clinn.core import (
    ActItem,
    ActPattern,
    BeliefState,
    FactItem,
    FactPattern,
    GroundItem,
    Pattern,
    RuleKind,
    Substitution,
    TransitionRule,
    Var,
    norm_name,
    norm_value,
    substitute,
)
from clinn.errors import (
    MissingDbCount,
    SchemaError,
    UnboundEffectVariable,
    UnboundVariable,
)
from clinn.ontology import Ontology


class ApplyMode(Enum):
    """Which precondition sections take part in matching.

    FREE drops the previous-action section of belief rules and the belief
    section of action rules; FULL keeps every section the designer wrote.
    """

    FULL = "full"
    FREE = "free"


class MatchMode(Enum):
    """Subset: extra state items are allowed. ExactSet: per-section bijection."""

    SUBSET = "subset"
    EXACTSET = "exactset"


@dataclass(frozen=True)
class MatchContext:
    """One turn's matchable state.

    belief holds the prior belief for belief rules and the current belief
    for action rules; the tracker builds the right one per phase.
    """

    user: frozenset[ActItem]
    belief: BeliefState
    prev_action: frozenset[ActItem]
    db_count: int | None = None


@dataclass(frozen=True)
class FireResult:
    rule_id: str
    substitution: dict[str, str]
    ground_effect: tuple[GroundItem, ...]


# --- interning --------------------------------------------------------------

_SYM: dict[str, int] = {}
_SYM_REV: list[str] = []
_SYM_LOCK = threading.Lock()


def _intern(text: str) -> int:
    idx = _SYM.get(text)
    if idx is None:
        with _SYM_LOCK:
            idx = _SYM.get(text)
            if idx is None:
                idx = len(_SYM_REV)
                _SYM_REV.append(text)
                _SYM[text] = idx
    return idx


def _encode_act_item(item: ActItem) -> tuple[int, int, int]:
    return (
        _intern(item.act),
        -1 if item.slot is None else _intern(item.slot),
        -1 if item.value is None else _intern(item.value),
    )


def _encode_fact_item(item: FactItem) -> tuple[int, int, int]:
    return (-1, _intern(item.feature), _intern(item.value))


def _encode_items(items: Iterable[GroundItem]) -> list[int]:
    """Dedup, canonically sort, and flatten a section's ground items."""
    ordered = sorted(set(items), key=lambda it: it.sort_key())
    flat: list[int] = []
    for it in ordered:
        enc = _encode_fact_item(it) if isinstance(it, FactItem) else _encode_act_item(it)
        flat.extend(enc)
    return flat


def _belief_items(belief: BeliefState) -> list[FactItem]:
    return [FactItem(slot, value) for slot, value in belief.items()]


def _encode_pattern(p: Pattern, var_index: dict[str, int]) -> tuple[int, int, int, int]:
    if isinstance(p, FactPattern):
        act = -1
        slot = _intern(p.feature)
        term = p.value
    else:
        act = _intern(p.act)
        slot = -1 if p.slot is None else _intern(p.slot)
        term = p.value
    if term is None:
        return (act, slot, KIND_NOVAL, -1)
    if isinstance(term, Var):
        return (act, slot, KIND_VAR, var_index[term.name])
    return (act, slot, KIND_CONST, _intern(term))


@lru_cache(maxsize=None)
def _encode_rule(rule: TransitionRule):
    """Per-rule encoding, cached: (per-section flat patterns, variable order)."""
    var_index: dict[str, int] = {}
    for section in (rule.pre_user, rule.pre_belief, rule.pre_prev_action):
        if section is None:
            continue
        for p in section:
            for v in p.variables():
                var_index.setdefault(v, len(var_index))
    encoded = []
    for section in (rule.pre_user, rule.pre_belief, rule.pre_prev_action):
        if section is None:
            encoded.append(None)
        else:
            flat: list[int] = []
            for p in section:
                flat.extend(_encode_pattern(p, var_index))
            encoded.append(tuple(flat))
    return tuple(encoded), tuple(var_index)


def _decode_bindings(var_names: Sequence[str], bindings: Sequence[int]) -> dict[str, str]:
    return {
        name: _SYM_REV[val]
        for name, val in zip(var_names, bindings)
        if val != -1
    }


# --- public matching operations ---------------------------------------------


def match_section(
    patterns: Sequence[Pattern],
    items: Iterable[GroundItem],
    mode: MatchMode = MatchMode.SUBSET,
    seed_subst: Substitution | None = None,
) -> dict[str, str] | None:
    """Match one section's patterns against ground items.

    Returns the first substitution (under the pinned search order) mapping
    every pattern onto a distinct item, extended consistently from
    seed_subst; None when no such substitution exists.
    """
    seed_subst = dict(seed_subst or {})
    var_index: dict[str, int] = {}
    for p in patterns:
        for v in p.variables():
            var_index.setdefault(v, len(var_index))
    flat_pats: list[int] = []
    for p in patterns:
        flat_pats.extend(_encode_pattern(p, var_index))
    flat_items = _encode_items(items)

    seed = [-1] * len(var_index)
    for name, idx in var_index.items():
        if name in seed_subst:
            seed[idx] = _intern(norm_value(seed_subst[name]))

    n_pats = len(flat_pats) // 4
    n_items = len(flat_items) // 3
    bindings = _match.match_first(
        flat_pats,
        (0, n_pats),
        flat_items,
        (0, n_items),
        (mode is MatchMode.EXACTSET,),
        len(var_index),
        seed,
    )
    if bindings is None:
        return None
    out = dict(seed_subst)
    out.update(_decode_bindings(tuple(var_index), bindings))
    return out


def rule_fires(
    rule: TransitionRule,
    ctx: MatchContext,
    apply_mode: ApplyMode = ApplyMode.FULL,
    match_mode: MatchMode = MatchMode.SUBSET,
) -> FireResult | None:
    """Check the rule's preconditions against one turn's state.

    Sections are tried in order user, belief, prev_action, db, with
    backtracking across them for a consistent substitution. Explicitly
    empty sections require the matching state section to be empty in
    either MatchMode. On success the effect is grounded under the found
    substitution.
    """
    if rule.pre_db is not None and ctx.db_count is None:
        raise MissingDbCount(rule.id)

    (enc_user, enc_belief, enc_prev), var_names = _encode_rule(rule)
    drop_prev = apply_mode is ApplyMode.FREE and rule.kind is RuleKind.BELIEF
    drop_belief = apply_mode is ApplyMode.FREE and rule.kind is RuleKind.ACTION

    sections: list[tuple[tuple[int, ...], list[int], bool]] = []
    raw = (
        (enc_user, lambda: _encode_items(ctx.user)),
        (None if drop_belief else enc_belief, lambda: _encode_items(_belief_items(ctx.belief))),
        (None if drop_prev else enc_prev, lambda: _encode_items(ctx.prev_action)),
    )
    for enc, get_items in raw:
        if enc is None:
            continue
        exact = match_mode is MatchMode.EXACTSET or len(enc) == 0
        sections.append((enc, get_items(), exact))

    flat_pats: list[int] = []
    pat_off = [0]
    flat_items: list[int] = []
    item_off = [0]
    sec_exact: list[bool] = []
    for enc, items, exact in sections:
        flat_pats.extend(enc)
        pat_off.append(len(flat_pats) // 4)
        flat_items.extend(items)
        item_off.append(len(flat_items) // 3)
        sec_exact.append(exact)

    bindings = _match.match_first(
        flat_pats,
        pat_off,
        flat_items,
        item_off,
        sec_exact,
        len(var_names),
        [-1] * len(var_names),
    )
    if bindings is None:
        return None
    if rule.pre_db is not None and not rule.pre_db.holds(ctx.db_count):
        return None

    subst = _decode_bindings(var_names, bindings)
    try:
        ground = tuple(substitute(p, subst) for p in rule.effect)
    except UnboundVariable as exc:
        raise UnboundEffectVariable(rule.id, exc.name) from exc
    return FireResult(rule.id, subst, ground)


def select_rule(
    rules: Sequence[TransitionRule],
    ctx: MatchContext,
    apply_mode: ApplyMode = ApplyMode.FULL,
    match_mode: MatchMode = MatchMode.SUBSET,
) -> FireResult | None:
    """First-match selection: the earliest rule in the list that fires."""
    for rule in rules:
        result = rule_fires(rule, ctx, apply_mode, match_mode)
        if result is not None:
            return result
    return None


def free_retained(rules: Sequence[TransitionRule]) -> tuple[tuple[TransitionRule, ...], list[str]]:
    """Filter rules usable under FREE mode.

    A rule is dropped when some effect variable is bound only in the
    section FREE removes for its kind; keeping it would make the effect
    ungroundable. Returns the retained rules and one warning per drop.
    """
    kept: list[TransitionRule] = []
    warnings: list[str] = []
    for rule in rules:
        names: set[str] = set()
        keep_sections = (
            (rule.pre_user, rule.pre_belief)
            if rule.kind is RuleKind.BELIEF
            else (rule.pre_user, rule.pre_prev_action)
        )
        for section in keep_sections:
            if section is not None:
                for p in section:
                    names.update(p.variables())
        unbound = sorted(rule.effect_variables() - names)
        if unbound:
            dropped = "prev_action" if rule.kind is RuleKind.BELIEF else "belief"
            warnings.append(
                f"rule {rule.id}: excluded under free mode; effect variable "
                f"?{unbound[0]} is bound only in the dropped {dropped} section"
            )
        else:
            kept.append(rule)
    return tuple(kept), warnings


# --- restaurant database ------------------------------------------------------


@dataclass(frozen=True)
class RestaurantDb:
    """Queryable entity table; entities are maps over the ontology's db slots."""

    entities: tuple[dict, ...]
    db_slots: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.entities)


def load_db(path: str | Path, ontology: Ontology) -> RestaurantDb:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(str(path), f"invalid JSON: {exc}") from exc
    return db_from_records(raw, ontology, location=str(path))


def db_from_records(raw, ontology: Ontology, location: str = "db") -> RestaurantDb:
    if not isinstance(raw, list):
        raise SchemaError(location, "expected a JSON array of entities")
    entities = []
    seen_names: set[str] = set()
    for i, rec in enumerate(raw):
        where = f"{location}[{i}]"
        if not isinstance(rec, dict):
            raise SchemaError(where, "expected an object")
        entity: dict[str, str] = {}
        for key, value in rec.items():
            slot = norm_name(key)
            if slot not in ontology.db_slots:
                raise SchemaError(where, f"slot {slot!r} is not a db slot")
            if not isinstance(value, str):
                raise SchemaError(where, f"slot {slot!r} must hold a string")
            entity[slot] = norm_value(value)
        if "name" not in entity:
            raise SchemaError(where, "entity has no name")
        if entity["name"] in seen_names:
            raise SchemaError(where, f"duplicate entity name {entity['name']!r}")
        seen_names.add(entity["name"])
        entities.append(entity)
    return RestaurantDb(tuple(entities), ontology.db_slots)


def db_count(db: RestaurantDb, belief: BeliefState) -> int:
    """Number of entities matching the belief on every constrained db slot."""
    constraints = [(s, v) for s, v in belief.items() if s in db.db_slots]
    count = 0
    for entity in db.entities:
        if all(entity.get(slot) == value for slot, value in constraints):
            count += 1
    return count


def db_pred_eval(pred, count: int) -> bool:
    """Evaluate a db-count predicate; Between bounds are inclusive."""
    return pred.holds(count)
