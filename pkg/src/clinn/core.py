"""Ground and pattern-level data model for dialogue states and rules.

Dialogue state is symbolic: belief facts are (feature, value) pairs and
dialogue acts are act(slot(value)) atoms with the slot and value optional.
Rules pair precondition patterns (which may hold variables in value
position only) with a belief- or action-effect. Everything here is
immutable and every operation is pure, so values can be shared freely
across concurrent replays.

Normalization happens at construction: names and values are lowercased and
stripped, and value equality is exact string equality afterwards. There is
no fuzzy matching anywhere in the pipeline.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Union

from clinn.errors import RangeRestrictionError, UnboundVariable, UnknownSlot
from clinn.ontology import Ontology

_VAR_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


def norm_name(text: str) -> str:
    """Normalize an act or slot name: strip and lowercase."""
    name = text.strip().lower()
    if not name:
        raise ValueError("empty name")
    return name


def norm_value(text: str) -> str:
    """Normalize a slot value: strip and lowercase; must be non-empty."""
    value = text.strip().lower()
    if not value:
        raise ValueError("empty value")
    return value


@dataclass(frozen=True, slots=True)
class Var:
    """A rule variable; only value positions may hold one."""

    name: str

    def __post_init__(self):
        if not _VAR_NAME.match(self.name):
            raise ValueError(f"bad variable name {self.name!r}")

    def __str__(self) -> str:
        return f"?{self.name}"


#: A value position in a pattern: either a constant (plain string) or a Var.
Term = Union[str, Var]


@dataclass(frozen=True, slots=True)
class FactItem:
    """A ground belief fact, feature(value)."""

    feature: str
    value: str

    def __post_init__(self):
        object.__setattr__(self, "feature", norm_name(self.feature))
        object.__setattr__(self, "value", norm_value(self.value))

    def sort_key(self) -> tuple:
        return (self.feature, self.value)

    def __str__(self) -> str:
        return f"{self.feature}({self.value})"


@dataclass(frozen=True, slots=True)
class ActItem:
    """A ground dialogue act: act, act(slot) or act(slot(value))."""

    act: str
    slot: str | None = None
    value: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "act", norm_name(self.act))
        if self.slot is not None:
            object.__setattr__(self, "slot", norm_name(self.slot))
        if self.value is not None:
            if self.slot is None:
                raise ValueError(f"act {self.act!r} has a value but no slot")
            object.__setattr__(self, "value", norm_value(self.value))

    def sort_key(self) -> tuple:
        return (self.act, self.slot or "", self.value or "")

    def __str__(self) -> str:
        if self.slot is None:
            return f"{self.act}()"
        if self.value is None:
            return f"{self.act}({self.slot})"
        return f"{self.act}({self.slot}({self.value}))"


@dataclass(frozen=True, slots=True)
class FactPattern:
    """A belief-fact pattern; the value position may be a variable."""

    feature: str
    value: Term

    def __post_init__(self):
        object.__setattr__(self, "feature", norm_name(self.feature))
        if isinstance(self.value, str):
            object.__setattr__(self, "value", norm_value(self.value))

    def variables(self) -> tuple[str, ...]:
        return (self.value.name,) if isinstance(self.value, Var) else ()

    def is_ground(self) -> bool:
        return not isinstance(self.value, Var)

    def __str__(self) -> str:
        return f"{self.feature}({self.value})"


@dataclass(frozen=True, slots=True)
class ActPattern:
    """A dialogue-act pattern; only the value position may be a variable."""

    act: str
    slot: str | None = None
    value: Term | None = None

    def __post_init__(self):
        object.__setattr__(self, "act", norm_name(self.act))
        if self.slot is not None:
            object.__setattr__(self, "slot", norm_name(self.slot))
        if self.value is not None:
            if self.slot is None:
                raise ValueError(f"act pattern {self.act!r} has a value but no slot")
            if isinstance(self.value, str):
                object.__setattr__(self, "value", norm_value(self.value))

    def variables(self) -> tuple[str, ...]:
        return (self.value.name,) if isinstance(self.value, Var) else ()

    def is_ground(self) -> bool:
        return not isinstance(self.value, Var)

    def __str__(self) -> str:
        if self.slot is None:
            return f"{self.act}()"
        if self.value is None:
            return f"{self.act}({self.slot})"
        return f"{self.act}({self.slot}({self.value}))"


Pattern = Union[FactPattern, ActPattern]
GroundItem = Union[FactItem, ActItem]

#: Belief state: at most one value per slot.
BeliefState = Mapping[str, str]

#: Variable bindings produced by matching.
Substitution = Mapping[str, str]


@dataclass(frozen=True, slots=True)
class Between:
    """Database-count constraint lo <= count <= hi (inclusive)."""

    lo: int
    hi: int

    def __post_init__(self):
        if self.lo < 0 or self.lo > self.hi:
            raise ValueError(f"bad range between({self.lo},{self.hi})")

    def holds(self, count: int) -> bool:
        return self.lo <= count <= self.hi

    def __str__(self) -> str:
        return f"between({self.lo},{self.hi})"


@dataclass(frozen=True, slots=True)
class EqCount:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"bad count eq({self.n})")

    def holds(self, count: int) -> bool:
        return count == self.n

    def __str__(self) -> str:
        return f"eq({self.n})"


@dataclass(frozen=True, slots=True)
class AnyCount:
    def holds(self, count: int) -> bool:
        return True

    def __str__(self) -> str:
        return "any"


DbPredicate = Union[Between, EqCount, AnyCount]


class RuleKind(Enum):
    BELIEF = "belief"
    ACTION = "action"


def _dedup(patterns: Iterable[Pattern]) -> tuple:
    """Drop duplicate patterns, keeping first occurrence (set semantics)."""
    seen = []
    for p in patterns:
        if p not in seen:
            seen.append(p)
    return tuple(seen)


@dataclass(frozen=True, slots=True)
class TransitionRule:
    """One precondition -> effect rule over a turn's matchable state.

    Precondition sections are None when omitted (unconstrained) and an
    empty tuple when written explicitly empty (the matched state section
    must itself be empty). Belief rules carry FactPattern effects applied
    on top of the prior belief; action rules carry ActPattern effects that
    become the system action.
    """

    id: str
    kind: RuleKind
    pre_user: tuple[ActPattern, ...] | None = None
    pre_belief: tuple[FactPattern, ...] | None = None
    pre_prev_action: tuple[ActPattern, ...] | None = None
    pre_db: DbPredicate | None = None
    effect: tuple[Pattern, ...] = ()
    order_index: int = 0

    def __post_init__(self):
        for name in ("pre_user", "pre_prev_action"):
            section = getattr(self, name)
            if section is not None:
                if not all(isinstance(p, ActPattern) for p in section):
                    raise TypeError(f"{name} must hold act patterns")
                object.__setattr__(self, name, _dedup(section))
        if self.pre_belief is not None:
            if not all(isinstance(p, FactPattern) for p in self.pre_belief):
                raise TypeError("pre_belief must hold fact patterns")
            object.__setattr__(self, "pre_belief", _dedup(self.pre_belief))
        want = FactPattern if self.kind is RuleKind.BELIEF else ActPattern
        if not all(isinstance(p, want) for p in self.effect):
            raise TypeError(f"{self.kind.value} rule effect must hold {want.__name__}s")
        object.__setattr__(self, "effect", tuple(self.effect))
        bound = self.precondition_variables()
        for p in self.effect:
            for v in p.variables():
                if v not in bound:
                    raise RangeRestrictionError(self.id, v)

    def precondition_variables(self) -> frozenset[str]:
        names: set[str] = set()
        for section in (self.pre_user, self.pre_belief, self.pre_prev_action):
            if section is not None:
                for p in section:
                    names.update(p.variables())
        return frozenset(names)

    def effect_variables(self) -> frozenset[str]:
        names: set[str] = set()
        for p in self.effect:
            names.update(p.variables())
        return frozenset(names)


def substitute(pattern: Pattern, subst: Substitution) -> GroundItem:
    """Replace the pattern's variable (if any) with its bound value.

    Act and slot names are never altered; a missing binding raises
    UnboundVariable.
    """
    value = pattern.value
    if isinstance(value, Var):
        if value.name not in subst:
            raise UnboundVariable(value.name)
        value = subst[value.name]
    if isinstance(pattern, FactPattern):
        return FactItem(pattern.feature, value)
    return ActItem(pattern.act, pattern.slot, value)


def belief_apply(belief: BeliefState, facts: Iterable[FactItem], ontology: Ontology) -> dict[str, str]:
    """Merge ground facts into a belief: later entries win per slot.

    Slots absent from the fact list keep their prior value, so repeated
    application of the same facts is idempotent.
    """
    out = dict(belief)
    for fact in facts:
        if fact.feature not in ontology.slots:
            raise UnknownSlot(fact.feature, "belief update")
        out[fact.feature] = fact.value
    return out


# --- canonical rule form ----------------------------------------------------
#
# Two rules are "the same rule" when they differ only in variable names or
# in the written order of items inside a section. The canonical form makes
# that an exact string equality: items are sorted on a variable-blind key,
# variables are then renamed ?V1, ?V2, ... ordered by their occurrence
# signature (section-major first occurrence, with symmetric variables tied
# stably), and the whole rule is rendered as one JSON string.

_SECTIONS = ("user", "belief", "prev_action")


def _blind_key(pattern: Pattern) -> tuple:
    if isinstance(pattern, FactPattern):
        head: tuple = ("", pattern.feature)
    else:
        head = (pattern.act, pattern.slot or "")
    v = pattern.value
    if v is None:
        return head + (0, "")
    if isinstance(v, Var):
        return head + (2, "")
    return head + (1, v)


def _term_json(term: Term | None, renaming: Mapping[str, str]):
    if term is None:
        return None
    if isinstance(term, Var):
        return ["var", renaming[term.name]]
    return ["val", term]


def _pattern_json(pattern: Pattern, renaming: Mapping[str, str]):
    if isinstance(pattern, FactPattern):
        return ["fact", pattern.feature, _term_json(pattern.value, renaming)]
    return ["act", pattern.act, pattern.slot, _term_json(pattern.value, renaming)]


def canonicalize_rule(rule: TransitionRule) -> str:
    """Render the rule as a deterministic, alpha-invariant string.

    The rule id and source position are excluded, so canonical equality
    compares only what the rule means. Used to intersect rule sets when
    scoring inter-designer agreement, and to state round-trip contracts.
    """
    sections = {
        "user": rule.pre_user,
        "belief": rule.pre_belief,
        "prev_action": rule.pre_prev_action,
    }
    ordered: dict[str, tuple | None] = {
        name: None if sec is None else tuple(sorted(sec, key=_blind_key))
        for name, sec in sections.items()
    }
    effect_sorted = tuple(sorted(rule.effect, key=_blind_key))

    # Occurrence signature per variable: where it appears once items are in
    # blind-sorted order. Variables with identical signatures are fully
    # symmetric, so the stable name tiebreak cannot change the output.
    signature: dict[str, list] = {}
    occurrences: list[tuple[str, int, tuple]] = []
    for si, name in enumerate(_SECTIONS):
        if ordered[name] is None:
            continue
        for p in ordered[name]:
            for v in p.variables():
                occurrences.append((v, si, _blind_key(p)))
    for p in effect_sorted:
        for v in p.variables():
            occurrences.append((v, len(_SECTIONS) + 1, _blind_key(p)))
    for v, si, key in occurrences:
        signature.setdefault(v, []).append((si, key))
    order = sorted(signature, key=lambda v: (sorted(signature[v]), v))
    renaming = {v: f"V{i + 1}" for i, v in enumerate(order)}

    doc = {
        "kind": rule.kind.value,
        "user": None if ordered["user"] is None else [_pattern_json(p, renaming) for p in ordered["user"]],
        "belief": None
        if ordered["belief"] is None
        else [_pattern_json(p, renaming) for p in ordered["belief"]],
        "prev_action": None
        if ordered["prev_action"] is None
        else [_pattern_json(p, renaming) for p in ordered["prev_action"]],
        "db": None if rule.pre_db is None else str(rule.pre_db),
        "effect": [_pattern_json(p, renaming) for p in effect_sorted],
    }
    return json.dumps(doc, separators=(",", ":"))
