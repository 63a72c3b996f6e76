"""Exception types raised across the toolkit.

Every error a caller is expected to handle derives from ClinnError, so the
CLI can map "bad input" failures to a single exit code without catching
bare Exception.
"""

from __future__ import annotations


class ClinnError(Exception):
    """Base class for all toolkit errors."""


class OntologyError(ClinnError):
    """Malformed ontology configuration."""


class EmptyOntology(OntologyError):
    """An operation needs at least one slot in the ontology."""


class UnknownAct(ClinnError):
    def __init__(self, act: str, location: str = ""):
        self.act = act
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"unknown dialogue act {act!r}{where}")


class UnknownSlot(ClinnError):
    def __init__(self, slot: str, location: str = ""):
        self.slot = slot
        self.location = location
        where = f" at {location}" if location else ""
        super().__init__(f"unknown slot {slot!r}{where}")


class UnboundVariable(ClinnError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"variable ?{name} has no binding")


class UnboundEffectVariable(ClinnError):
    """An effect variable survived matching without a binding.

    Rules that could reach this state are filtered out at load time, so
    seeing this error means a pipeline bug, not a designer mistake.
    """

    def __init__(self, rule_id: str, name: str):
        self.rule_id = rule_id
        self.name = name
        super().__init__(f"rule {rule_id}: effect variable ?{name} is unbound")


class MissingDbCount(ClinnError):
    def __init__(self, rule_id: str):
        self.rule_id = rule_id
        super().__init__(
            f"rule {rule_id} has a db precondition but the context carries no db count"
        )


class ParseError(ClinnError):
    """Rule-file syntax error; carries the offending position."""

    def __init__(self, diagnostic):
        self.diagnostic = diagnostic
        super().__init__(str(diagnostic))


class RangeRestrictionError(ClinnError):
    def __init__(self, rule_id: str, variable: str):
        self.rule_id = rule_id
        self.variable = variable
        super().__init__(
            f"rule {rule_id}: effect variable ?{variable} does not appear in any precondition"
        )


class DuplicateRuleId(ClinnError):
    def __init__(self, rule_id: str):
        self.rule_id = rule_id
        super().__init__(f"duplicate rule id {rule_id!r}")


class SchemaError(ClinnError):
    def __init__(self, location: str, message: str):
        self.location = location
        super().__init__(f"{location}: {message}")


class DuplicateDialogueId(ClinnError):
    def __init__(self, dialogue_id: str):
        self.dialogue_id = dialogue_id
        super().__init__(f"duplicate dialogue id {dialogue_id!r}")


class DuplicatePrediction(ClinnError):
    def __init__(self, dialogue_id: str, turn: int):
        self.dialogue_id = dialogue_id
        self.turn = turn
        super().__init__(f"duplicate prediction for ({dialogue_id!r}, turn {turn})")


class MissingPrediction(ClinnError):
    def __init__(self, dialogue_id: str, turn: int):
        self.dialogue_id = dialogue_id
        self.turn = turn
        super().__init__(f"no prediction for ({dialogue_id!r}, turn {turn})")


class SampleTooLarge(ClinnError):
    def __init__(self, n: int, size: int):
        self.n = n
        self.size = size
        super().__init__(f"cannot sample {n} dialogues from a corpus of {size}")


class CorpusEmpty(ClinnError):
    """The corpus has no dialogues to replay."""


class NoTurns(ClinnError):
    """A turn-level metric needs at least one turn."""


class NoPairs(ClinnError):
    """The sign test needs at least one pair."""
