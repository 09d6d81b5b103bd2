"""Scenario DSL: agents, initial facts, commonsense rules, interview topics
and recruiter profiles, read from `.tom` files.

A scenario file is a sequence of blocks:

    agents M J
    thresholds { str_th 0.75 }
    state M { <one formula per line> }
    rule name {
      when Bel(self, ?l, Ideal(?b, ?k, ?phi)) if ?l > str_th
      then next Ideal(self, ?k, ?phi)
    }
    topic salary {
      ask neutral "What are your salary expectations?" <R,C,Request(salary_stated)> expect 0
      on HES > 0.5: qualification -0.2, believe !candidate_is_qualified
    }
    profile A { affect_goal positive }

`self` in rule patterns stands for the owner of the state the rule runs
over. `?name` tokens are pattern variables. Comments start with `#`.
All validation problems are reported together, with source spans.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .logic import (
    Att,
    Bel,
    Des,
    Dom,
    Emo,
    EventProp,
    FVar,
    Formula,
    Ideal,
    Int,
    Like,
    Thresholds,
    Var,
    agents_of,
    canonicalize,
    walk,
)
from .parsing import (
    Diagnostic,
    FormulaError,
    FormulaParser,
    SourceSpan,
    TokenStream,
    tokenize,
)

AFFECT_CHANNELS = (
    "relieved",
    "embarrassed",
    "hesitating",
    "stressed",
    "ill_at_ease",
    "focused",
    "aggressive",
    "bored",
)

CHANNEL_CODES = {
    "REL": "relieved",
    "EMB": "embarrassed",
    "HES": "hesitating",
    "STR": "stressed",
    "IAE": "ill_at_ease",
    "FOC": "focused",
    "AGG": "aggressive",
    "BOR": "bored",
}

ASSESSMENT_FIELDS = ("self_confidence", "motivation", "qualification")

QUESTION_VARIANTS = ("neutral", "at_ease", "embarrassing")


class ScenarioError(ValueError):
    def __init__(self, diagnostics: list[Diagnostic], filename: str = "<input>"):
        self.diagnostics = diagnostics
        super().__init__("\n".join(d.render(filename) for d in diagnostics))


@dataclass(frozen=True)
class Guard:
    """A degree comparison such as `?l > str_th` or `abs(?k) >= 0.5`."""

    lhs: str
    lhs_abs: bool
    op: str  # > >= < <= ==
    rhs: object  # float | str (threshold or variable name)
    rhs_abs: bool

    def variables(self) -> set[str]:
        out = {self.lhs}
        if isinstance(self.rhs, str) and self.rhs not in ("mod_th", "str_th", "des_th"):
            out.add(self.rhs)
        return out


@dataclass(frozen=True)
class GoalPattern:
    """Premise matching a derived goal: Goal(self, ?k, content-pattern)."""

    degree_var: str
    content: Formula


@dataclass
class RuleDecl:
    name: str
    premises: list
    guards: list[Guard]
    effect: Formula
    timing: str  # "now" | "next"
    span: SourceSpan = field(default=SourceSpan(1, 1, 1))


@dataclass
class TTRule:
    """Interpretation of one affect channel while a topic is active."""

    channel: str
    op: str
    threshold: float
    deltas: dict[str, float]
    believe: Optional[Formula]
    span: SourceSpan = field(default=SourceSpan(1, 1, 1))


@dataclass
class Question:
    variant: str
    utterance: str
    event: object  # logic.Event
    expect: float = 0.0


@dataclass
class TopicDecl:
    id: str
    questions: list[Question]
    tt_rules: list[TTRule]
    span: SourceSpan = field(default=SourceSpan(1, 1, 1))

    def question(self, variant: str) -> Optional[Question]:
        for q in self.questions:
            if q.variant == variant:
                return q
        return None


@dataclass
class ProfileDecl:
    id: str
    affect_goal: Optional[str]  # "positive" | "negative" | None


@dataclass
class ScenarioDoc:
    name: str = "<input>"
    agents: list[str] = field(default_factory=list)
    initial_facts: list[tuple[str, Formula]] = field(default_factory=list)
    rules: list[RuleDecl] = field(default_factory=list)
    topics: list[TopicDecl] = field(default_factory=list)
    profiles: list[ProfileDecl] = field(default_factory=list)
    thresholds: Thresholds = field(default_factory=Thresholds)

    def profile(self, profile_id: str) -> Optional[ProfileDecl]:
        for p in self.profiles:
            if p.id == profile_id:
                return p
        return None


_TOP_KEYWORDS = {"agents", "thresholds", "state", "rule", "topic", "profile"}
_THRESHOLD_NAMES = ("mod_th", "str_th", "des_th")
_OPS = (">", ">=", "<", "<=", "==")


def _guard_operand(ts: TokenStream):
    tok = ts.peek()
    if tok.kind == "VAR":
        ts.next()
        return tok.text, False
    if tok.kind == "NUMBER":
        ts.next()
        return float(tok.text), False
    if tok.kind == "IDENT" and tok.text == "abs":
        ts.next()
        ts.expect("(")
        inner = ts.peek()
        if inner.kind != "VAR":
            raise FormulaError("expected a variable inside abs()", inner.span)
        ts.next()
        ts.expect(")")
        return inner.text, True
    if tok.kind == "IDENT" and tok.text in _THRESHOLD_NAMES:
        ts.next()
        return tok.text, False
    raise FormulaError("expected a variable, number or threshold name", tok.span)


def parse_guard(ts: TokenStream) -> Guard:
    lhs, lhs_abs = _guard_operand(ts)
    if not isinstance(lhs, str):
        raise FormulaError("guard left side must be a variable", ts.peek().span)
    tok = ts.peek()
    if tok.kind != "PUNCT" or tok.text not in _OPS:
        raise FormulaError("expected a comparison operator", tok.span)
    ts.next()
    rhs, rhs_abs = _guard_operand(ts)
    return Guard(lhs, lhs_abs, tok.text, rhs, rhs_abs)


class _ScenarioParser:
    def __init__(self, text: str):
        self.diags: list[Diagnostic] = []
        self.doc = ScenarioDoc()
        try:
            self.ts = TokenStream(tokenize(text))
        except FormulaError as exc:
            self.diags.append(exc.diagnostic)
            self.ts = TokenStream(tokenize(""))

    def error(self, message: str, span: SourceSpan):
        self.diags.append(Diagnostic(message, span))

    def sync(self):
        """Skip tokens to the next top-level keyword or closing brace."""
        depth = 0
        while True:
            tok = self.ts.peek()
            if tok.kind == "EOF":
                return
            if tok.kind == "PUNCT" and tok.text == "{":
                depth += 1
            elif tok.kind == "PUNCT" and tok.text == "}":
                if depth == 0:
                    self.ts.next()
                    return
                depth -= 1
            elif depth == 0 and tok.kind == "IDENT" and tok.text in _TOP_KEYWORDS:
                return
            self.ts.next()

    def run(self) -> ScenarioDoc:
        while True:
            tok = self.ts.peek()
            if tok.kind == "EOF":
                break
            if tok.kind != "IDENT" or tok.text not in _TOP_KEYWORDS:
                self.error(f"expected a declaration, found {tok.text or 'end of input'!r}", tok.span)
                self.ts.next()
                self.sync()
                continue
            try:
                getattr(self, f"parse_{tok.text}")()
            except FormulaError as exc:
                self.diags.append(exc.diagnostic)
                self.sync()
        self.validate()
        return self.doc

    # -- blocks ---------------------------------------------------------------

    def parse_agents(self):
        self.ts.next()
        tok = self.ts.peek()
        while tok.kind == "IDENT" and tok.text not in _TOP_KEYWORDS:
            if tok.text in self.doc.agents:
                self.error(f"agent {tok.text!r} declared twice", tok.span)
            else:
                self.doc.agents.append(tok.text)
            self.ts.next()
            tok = self.ts.peek()

    def parse_thresholds(self):
        self.ts.next()
        self.ts.expect("{")
        values = {}
        while not self.ts.take("}"):
            tok = self.ts.peek()
            if tok.kind != "IDENT" or tok.text not in _THRESHOLD_NAMES:
                raise FormulaError("expected one of mod_th/str_th/des_th", tok.span)
            self.ts.next()
            num = self.ts.peek()
            if num.kind != "NUMBER":
                raise FormulaError("expected a number", num.span)
            self.ts.next()
            values[tok.text] = float(num.text)
        try:
            self.doc.thresholds = Thresholds(**{**self.doc.thresholds.__dict__, **values})
        except ValueError as exc:
            self.error(str(exc), self.ts.peek().span)

    def parse_state(self):
        self.ts.next()
        tok = self.ts.peek()
        if tok.kind != "IDENT":
            raise FormulaError("expected an agent name", tok.span)
        owner = tok.text
        if owner not in self.doc.agents:
            self.error(f"state block for undeclared agent {owner!r}", tok.span)
        self.ts.next()
        self.ts.expect("{")
        parser = FormulaParser(self.ts, allow_vars=False)
        while not self.ts.take("}"):
            if self.ts.peek().kind == "EOF":
                raise FormulaError("unterminated state block", self.ts.peek().span)
            span = self.ts.peek().span
            phi = parser.formula()
            for name in sorted(agents_of(phi)):
                if name not in self.doc.agents:
                    self.error(f"formula references undeclared agent {name!r}", span)
            self.doc.initial_facts.append((owner, canonicalize(phi)))

    def parse_rule(self):
        self.ts.next()
        tok = self.ts.peek()
        if tok.kind != "IDENT":
            raise FormulaError("expected a rule name", tok.span)
        name, span = tok.text, tok.span
        self.ts.next()
        self.ts.expect("{")
        premises, guards = [], []
        effect, timing = None, None
        parser = FormulaParser(self.ts, allow_vars=True)
        while not self.ts.take("}"):
            tok = self.ts.peek()
            if tok.kind == "EOF":
                raise FormulaError("unterminated rule block", tok.span)
            if tok.kind == "IDENT" and tok.text == "when":
                self.ts.next()
                premises.append(self._premise(parser))
                if self.ts.peek().kind == "IDENT" and self.ts.peek().text == "if":
                    self.ts.next()
                    guards.append(self._guard())
                    while self.ts.take(","):
                        guards.append(self._guard())
            elif tok.kind == "IDENT" and tok.text == "then":
                self.ts.next()
                mode = self.ts.peek()
                if mode.kind == "IDENT" and mode.text in ("now", "next"):
                    timing = mode.text
                    self.ts.next()
                else:
                    raise FormulaError("expected 'now' or 'next' after 'then'", mode.span)
                effect = parser.formula()
            else:
                raise FormulaError(f"expected 'when' or 'then', found {tok.text!r}", tok.span)
        if effect is None or timing is None:
            self.error(f"rule {name!r} has no effect", span)
            return
        if not premises:
            self.error(f"rule {name!r} has no premises", span)
            return
        self.doc.rules.append(RuleDecl(name, premises, guards, effect, timing, span))

    def _premise(self, parser: FormulaParser):
        tok = self.ts.peek()
        if (
            tok.kind == "IDENT"
            and tok.text == "Goal"
            and self.ts.peek(1).kind == "PUNCT"
            and self.ts.peek(1).text == "("
        ):
            self.ts.next()
            self.ts.next()
            agent = self.ts.peek()
            if agent.kind != "IDENT" or agent.text != "self":
                raise FormulaError("goal premises read the owner's goals: Goal(self, ...)", agent.span)
            self.ts.next()
            self.ts.expect(",")
            var = self.ts.peek()
            if var.kind != "VAR":
                raise FormulaError("expected a degree variable", var.span)
            self.ts.next()
            self.ts.expect(",")
            content = parser.formula()
            self.ts.expect(")")
            return GoalPattern(var.text, content)
        return parser.formula()

    def _guard(self) -> Guard:
        return parse_guard(self.ts)

    def parse_topic(self):
        self.ts.next()
        tok = self.ts.peek()
        if tok.kind != "IDENT":
            raise FormulaError("expected a topic id", tok.span)
        topic_id, span = tok.text, tok.span
        self.ts.next()
        self.ts.expect("{")
        questions: list[Question] = []
        tt_rules: list[TTRule] = []
        parser = FormulaParser(self.ts, allow_vars=False)
        while not self.ts.take("}"):
            tok = self.ts.peek()
            if tok.kind == "EOF":
                raise FormulaError("unterminated topic block", tok.span)
            if tok.kind == "IDENT" and tok.text == "ask":
                self.ts.next()
                variant = self.ts.peek()
                if variant.kind != "IDENT" or variant.text not in QUESTION_VARIANTS:
                    raise FormulaError(
                        f"expected a question variant {QUESTION_VARIANTS}", variant.span
                    )
                self.ts.next()
                utter = self.ts.peek()
                if utter.kind != "STRING":
                    raise FormulaError("expected the utterance string", utter.span)
                self.ts.next()
                event = parser.event()
                expect = 0.0
                if self.ts.peek().kind == "IDENT" and self.ts.peek().text == "expect":
                    self.ts.next()
                    num = self.ts.peek()
                    if num.kind != "NUMBER":
                        raise FormulaError("expected a number after 'expect'", num.span)
                    self.ts.next()
                    expect = float(num.text)
                    if expect < -1 or expect > 1:
                        self.error(f"expectation offset {expect} outside [-1, 1]", num.span)
                if any(q.variant == variant.text for q in questions):
                    self.error(f"duplicate question variant {variant.text!r}", variant.span)
                if not event.is_concrete():
                    self.error("questions must be concrete events", variant.span)
                questions.append(Question(variant.text, utter.text, event, expect))
            elif tok.kind == "IDENT" and tok.text == "on":
                tt_rules.append(self._tt_rule(parser, tok.span))
            else:
                raise FormulaError(f"expected 'ask' or 'on', found {tok.text!r}", tok.span)
        if not questions:
            self.error(f"topic {topic_id!r} declares no questions", span)
        if any(t.id == topic_id for t in self.doc.topics):
            self.error(f"duplicate topic id {topic_id!r}", span)
            return
        self.doc.topics.append(TopicDecl(topic_id, questions, tt_rules, span))

    def _tt_rule(self, parser: FormulaParser, span: SourceSpan) -> TTRule:
        self.ts.next()
        chan = self.ts.peek()
        if chan.kind != "IDENT":
            raise FormulaError("expected an affect channel", chan.span)
        channel = CHANNEL_CODES.get(chan.text, chan.text)
        if channel not in AFFECT_CHANNELS:
            raise FormulaError(f"unknown affect channel {chan.text!r}", chan.span)
        self.ts.next()
        op = self.ts.peek()
        if op.kind != "PUNCT" or op.text not in _OPS:
            raise FormulaError("expected a comparison operator", op.span)
        self.ts.next()
        num = self.ts.peek()
        if num.kind != "NUMBER":
            raise FormulaError("expected a threshold value", num.span)
        self.ts.next()
        self.ts.expect(":")
        deltas: dict[str, float] = {}
        believe = None
        while True:
            tok = self.ts.peek()
            if tok.kind == "IDENT" and tok.text == "believe":
                self.ts.next()
                believe = canonicalize(parser.formula())
            elif tok.kind == "IDENT" and tok.text in ASSESSMENT_FIELDS:
                self.ts.next()
                coef = self.ts.peek()
                if coef.kind != "NUMBER":
                    raise FormulaError("expected a delta coefficient", coef.span)
                self.ts.next()
                deltas[tok.text] = float(coef.text)
            else:
                raise FormulaError(
                    "expected an assessment field or 'believe'", tok.span
                )
            if not self.ts.take(","):
                break
        return TTRule(channel, op.text, float(num.text), deltas, believe, span)

    def parse_profile(self):
        self.ts.next()
        tok = self.ts.peek()
        if tok.kind != "IDENT" or tok.text not in ("A", "B", "C"):
            raise FormulaError("expected a profile id A, B or C", tok.span)
        profile_id, span = tok.text, tok.span
        self.ts.next()
        self.ts.expect("{")
        affect_goal = None
        while not self.ts.take("}"):
            tok = self.ts.peek()
            if tok.kind == "IDENT" and tok.text == "affect_goal":
                self.ts.next()
                goal = self.ts.peek()
                if goal.kind != "IDENT" or goal.text not in ("positive", "negative"):
                    raise FormulaError("expected 'positive' or 'negative'", goal.span)
                self.ts.next()
                affect_goal = goal.text
            else:
                raise FormulaError(f"unexpected token {tok.text!r} in profile", tok.span)
        if any(p.id == profile_id for p in self.doc.profiles):
            self.error(f"duplicate profile {profile_id!r}", span)
            return
        if profile_id == "B" and affect_goal is not None:
            self.error("profile B declares no affect goals", span)
            return
        self.doc.profiles.append(ProfileDecl(profile_id, affect_goal))

    # -- validation ----------------------------------------------------------

    def validate(self):
        for rule in self.doc.rules:
            bound = set()
            for prem in rule.premises:
                if isinstance(prem, GoalPattern):
                    bound.add(prem.degree_var)
                    bound |= _vars_of(prem.content)
                else:
                    bound |= _vars_of(prem)
            for guard in rule.guards:
                missing = guard.variables() - bound
                for name in sorted(missing):
                    self.error(f"guard variable ?{name} is not bound by a premise", rule.span)
            missing = _vars_of(rule.effect) - bound
            for name in sorted(missing):
                self.error(f"effect variable ?{name} is not bound by a premise", rule.span)
            top = rule.effect
            if isinstance(top, (Bel, Att, Des, Ideal, Int, Like, Dom, Emo)):
                agent = getattr(top, "agent", None) or getattr(top, "source", None) or getattr(
                    top, "holder", None
                )
                if agent != "self" and not isinstance(agent, Var):
                    self.error(
                        f"rule {rule.name!r}: effects are asserted into the owner's state, "
                        "write the subject as 'self'",
                        rule.span,
                    )
        for owner, _phi in self.doc.initial_facts:
            if owner not in self.doc.agents:
                pass  # already reported at the state block
        for topic in self.doc.topics:
            for question in topic.questions:
                for name in sorted(agents_of(EventProp(question.event))):
                    if name not in self.doc.agents:
                        self.error(
                            f"question references undeclared agent {name!r}", topic.span
                        )


def _vars_of(phi: Formula) -> set[str]:
    out = set()
    for node in walk(phi):
        if isinstance(node, FVar):
            out.add(node.name)
        from dataclasses import fields as _fields

        if hasattr(node, "__dataclass_fields__"):
            for f in _fields(node):
                v = getattr(node, f.name)
                if isinstance(v, Var):
                    out.add(v.name)
                if isinstance(v, (tuple,)):
                    pass
        if isinstance(node, EventProp):
            ev = node.event
            for v in (ev.actor, ev.recipient, ev.act):
                if isinstance(v, Var):
                    out.add(v.name)
    return out


def parse_scenario(text: str, name: str = "<input>") -> ScenarioDoc:
    """Parse and validate a scenario document.

    Raises ScenarioError carrying every diagnostic, not just the first.
    """
    parser = _ScenarioParser(text)
    doc = parser.run()
    doc.name = name
    if parser.diags:
        raise ScenarioError(parser.diags, name)
    return doc


def load_scenario(path) -> ScenarioDoc:
    from pathlib import Path

    p = Path(path)
    return parse_scenario(p.read_text(encoding="utf-8"), name=str(p))
