"""The textual rule language designers author transition rules in.

A rule names its kind, lists precondition sections over the turn state,
and gives the effect after "=>":

    rule r1: belief {
      user { inform(food(?X)) }
      belief { area(?Y) }
      prev_action { request(food) }
      => { area(?Y), food(?X) }
    }

Sections may be omitted (unconstrained); writing one empty, "user { }",
constrains that part of the state to be empty. Keywords and act/slot names
are case-insensitive and normalize to lowercase. Values are barewords or
quoted strings (quotes are required when a value contains characters like
":", e.g. "15:00"). "#" starts a line comment. Files use UTF-8 and the
.rules extension.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from clinn.core import (
    ActPattern,
    AnyCount,
    Between,
    DbPredicate,
    EqCount,
    FactPattern,
    Pattern,
    RuleKind,
    Term,
    TransitionRule,
    Var,
)
from clinn.errors import DuplicateRuleId, ParseError
from clinn.ontology import Ontology


@dataclass(frozen=True)
class ParseDiagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass(frozen=True)
class RuleSet:
    """Parsed rules split by kind, in source order within each list."""

    belief_rules: tuple[TransitionRule, ...]
    action_rules: tuple[TransitionRule, ...]
    source_name: str = "<rules>"

    def __len__(self) -> int:
        return len(self.belief_rules) + len(self.action_rules)

    def rules_of_kind(self, kind: RuleKind) -> tuple[TransitionRule, ...]:
        return self.belief_rules if kind is RuleKind.BELIEF else self.action_rules


# --- tokenizer ---------------------------------------------------------------

_WORD = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.'\-]*")
_VAR = re.compile(r"\?([A-Za-z][A-Za-z0-9_]*)")
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_\-]*\Z")
_PUNCT = {"{", "}", "(", ")", ",", ":"}


@dataclass(frozen=True)
class _Token:
    type: str  # word | string | var | punct | arrow | eof
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line = 1
    col = 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("=>", i):
            tokens.append(_Token("arrow", "=>", line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch == '"':
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n and text[j + 1] in ('"', "\\"):
                    out.append(text[j + 1])
                    j += 2
                elif text[j] == "\n":
                    raise ParseError(ParseDiagnostic(line, col, "unterminated string"))
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise ParseError(ParseDiagnostic(line, col, "unterminated string"))
            tokens.append(_Token("string", "".join(out), line, col))
            col += j + 1 - i
            i = j + 1
            continue
        if ch == "?":
            m = _VAR.match(text, i)
            if not m:
                raise ParseError(
                    ParseDiagnostic(line, col, "expected a variable name after '?'")
                )
            tokens.append(_Token("var", m.group(1), line, col))
            col += m.end() - i
            i = m.end()
            continue
        m = _WORD.match(text, i)
        if m:
            tokens.append(_Token("word", m.group(0), line, col))
            col += m.end() - i
            i = m.end()
            continue
        raise ParseError(ParseDiagnostic(line, col, f"unexpected character {ch!r}"))
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ------------------------------------------------------------------

_SECTION_NAMES = ("user", "belief", "prev_action", "db")


class _Parser:
    def __init__(self, text: str, ontology: Ontology, source_name: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.ontology = ontology
        self.source_name = source_name

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Token, message: str):
        raise ParseError(ParseDiagnostic(tok.line, tok.column, message))

    def expect_punct(self, text: str) -> _Token:
        tok = self.next()
        if tok.type != "punct" or tok.text != text:
            self.fail(tok, f"expected {text!r}, found {tok.text or 'end of input'!r}")
        return tok

    def expect_word(self, what: str) -> _Token:
        tok = self.next()
        if tok.type != "word":
            self.fail(tok, f"expected {what}, found {tok.text or 'end of input'!r}")
        return tok

    def loc(self, tok: _Token) -> str:
        return f"{self.source_name}:{tok.line}:{tok.column}"

    # items

    def parse_term(self) -> Term:
        tok = self.next()
        if tok.type == "var":
            return Var(tok.text)
        if tok.type in ("word", "string"):
            if not tok.text.strip():
                self.fail(tok, "empty value")
            return tok.text.lower().strip()
        self.fail(tok, f"expected a value or ?variable, found {tok.text or 'end of input'!r}")

    def parse_fact_pattern(self) -> FactPattern:
        name_tok = self.expect_word("a slot name")
        slot = name_tok.text.lower()
        self.ontology.check_slot(slot, self.loc(name_tok))
        self.expect_punct("(")
        term = self.parse_term()
        self.expect_punct(")")
        return FactPattern(slot, term)

    def parse_act_pattern(self) -> ActPattern:
        act_tok = self.expect_word("a dialogue act")
        act = act_tok.text.lower()
        self.ontology.check_act(act, self.loc(act_tok))
        self.expect_punct("(")
        tok = self.peek()
        if tok.type == "punct" and tok.text == ")":
            self.next()
            return ActPattern(act)
        if tok.type != "word":
            self.fail(tok, "expected a slot name or ')' inside the act")
        slot_tok = self.next()
        slot = slot_tok.text.lower()
        self.ontology.check_act_slot(slot, self.loc(slot_tok))
        tok = self.peek()
        if tok.type == "punct" and tok.text == "(":
            self.next()
            term = self.parse_term()
            self.expect_punct(")")
            self.expect_punct(")")
            return ActPattern(act, slot, term)
        self.expect_punct(")")
        return ActPattern(act, slot)

    def parse_int(self, what: str) -> int:
        tok = self.expect_word(what)
        if not tok.text.isdigit():
            self.fail(tok, f"expected {what}, found {tok.text!r}")
        return int(tok.text)

    def parse_db_pred(self) -> DbPredicate:
        tok = self.expect_word("a db predicate (between/eq/any)")
        name = tok.text.lower()
        if name == "any":
            return AnyCount()
        if name == "eq":
            self.expect_punct("(")
            n = self.parse_int("a count")
            self.expect_punct(")")
            return EqCount(n)
        if name == "between":
            self.expect_punct("(")
            lo = self.parse_int("a lower bound")
            self.expect_punct(",")
            hi = self.parse_int("an upper bound")
            self.expect_punct(")")
            if lo > hi:
                self.fail(tok, f"empty range between({lo},{hi})")
            return Between(lo, hi)
        self.fail(tok, f"unknown db predicate {tok.text!r}")

    def parse_item_list(self, parse_one) -> tuple:
        items = []
        tok = self.peek()
        if tok.type == "punct" and tok.text == "}":
            return ()
        items.append(parse_one())
        while True:
            tok = self.peek()
            if tok.type == "punct" and tok.text == ",":
                self.next()
                items.append(parse_one())
            else:
                return tuple(items)

    # rules

    def parse_rule(self, order_index: int) -> TransitionRule:
        kw = self.expect_word("'rule'")
        if kw.text.lower() != "rule":
            self.fail(kw, f"expected 'rule', found {kw.text!r}")
        id_tok = self.expect_word("a rule id")
        if not _IDENT.match(id_tok.text):
            self.fail(id_tok, f"bad rule id {id_tok.text!r}")
        rule_id = id_tok.text
        self.expect_punct(":")
        kind_tok = self.expect_word("'belief' or 'action'")
        kind_name = kind_tok.text.lower()
        if kind_name not in ("belief", "action"):
            self.fail(kind_tok, f"expected 'belief' or 'action', found {kind_tok.text!r}")
        kind = RuleKind(kind_name)
        self.expect_punct("{")

        sections: dict[str, object] = {}
        while True:
            tok = self.peek()
            if tok.type == "arrow":
                self.next()
                break
            if tok.type != "word" or tok.text.lower() not in _SECTION_NAMES:
                self.fail(
                    tok,
                    "expected a section (user/belief/prev_action/db) or '=>', "
                    f"found {tok.text or 'end of input'!r}",
                )
            name_tok = self.next()
            name = name_tok.text.lower()
            if name in sections:
                self.fail(name_tok, f"duplicate section {name!r}")
            self.expect_punct("{")
            if name == "db":
                pred = self.parse_db_pred()
                sections[name] = pred
            elif name == "belief":
                sections[name] = self.parse_item_list(self.parse_fact_pattern)
            else:
                sections[name] = self.parse_item_list(self.parse_act_pattern)
            self.expect_punct("}")

        self.expect_punct("{")
        if kind is RuleKind.BELIEF:
            effect: tuple[Pattern, ...] = self.parse_item_list(self.parse_fact_pattern)
        else:
            effect = self.parse_item_list(self.parse_act_pattern)
        self.expect_punct("}")
        self.expect_punct("}")

        return TransitionRule(
            id=rule_id,
            kind=kind,
            pre_user=sections.get("user"),
            pre_belief=sections.get("belief"),
            pre_prev_action=sections.get("prev_action"),
            pre_db=sections.get("db"),
            effect=effect,
            order_index=order_index,
        )

    def parse_ruleset(self) -> RuleSet:
        belief_rules: list[TransitionRule] = []
        action_rules: list[TransitionRule] = []
        seen_ids: set[str] = set()
        order_index = 0
        while self.peek().type != "eof":
            rule = self.parse_rule(order_index)
            order_index += 1
            if rule.id in seen_ids:
                raise DuplicateRuleId(rule.id)
            seen_ids.add(rule.id)
            if rule.kind is RuleKind.BELIEF:
                belief_rules.append(rule)
            else:
                action_rules.append(rule)
        return RuleSet(tuple(belief_rules), tuple(action_rules), self.source_name)


def parse_rules(text: str, ontology: Ontology, source_name: str = "<rules>") -> RuleSet:
    """Parse rule-file source into belief/action rule lists in file order.

    Raises ParseError on syntax problems, UnknownAct/UnknownSlot for names
    outside the ontology, RangeRestrictionError for effect variables with
    no precondition binding, and DuplicateRuleId for repeated ids.
    """
    return _Parser(text, ontology, source_name).parse_ruleset()


def load_rules(path: str | Path, ontology: Ontology) -> RuleSet:
    path = Path(path)
    return parse_rules(path.read_text(encoding="utf-8"), ontology, source_name=str(path))


# --- serializer --------------------------------------------------------------

_BARE = re.compile(r"[a-z0-9_][a-z0-9_.'\-]*\Z")


def _render_value(value: str) -> str:
    if _BARE.match(value):
        return value
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _render_term(term: Term) -> str:
    if isinstance(term, Var):
        return f"?{term.name}"
    return _render_value(term)


def _render_pattern(p: Pattern) -> str:
    if isinstance(p, FactPattern):
        return f"{p.feature}({_render_term(p.value)})"
    if p.slot is None:
        return f"{p.act}()"
    if p.value is None:
        return f"{p.act}({p.slot})"
    return f"{p.act}({p.slot}({_render_term(p.value)}))"


def serialize_rule(rule: TransitionRule) -> str:
    """Emit rule-file source that parses back canonically equal to the rule."""
    lines = [f"rule {rule.id}: {rule.kind.value} {{"]
    for name, section in (
        ("user", rule.pre_user),
        ("belief", rule.pre_belief),
        ("prev_action", rule.pre_prev_action),
    ):
        if section is None:
            continue
        body = ", ".join(_render_pattern(p) for p in section)
        lines.append(f"  {name} {{ {body} }}" if body else f"  {name} {{ }}")
    if rule.pre_db is not None:
        lines.append(f"  db {{ {rule.pre_db} }}")
    body = ", ".join(_render_pattern(p) for p in rule.effect)
    lines.append(f"  => {{ {body} }}" if body else "  => { }")
    lines.append("}")
    return "\n".join(lines)


def serialize_ruleset(ruleset: RuleSet) -> str:
    ordered = sorted(
        ruleset.belief_rules + ruleset.action_rules, key=lambda r: r.order_index
    )
    return "\n\n".join(serialize_rule(r) for r in ordered) + "\n"
