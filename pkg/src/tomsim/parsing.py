"""Textual syntax for formulas: tokenizer, parser and serializer.

Surface syntax, spanning the whole modal language:

    Bel(a,0.8,phi)   Att(a,-0.3,phi)   Des(a,0.77,phi)   Ideal(a,0.8,phi)
    Int(a,phi)       Like(a,b,0.5)     Dom(a,b,-0.2)
    Emo(Joy,a,_,0.6,phi)               Resp(a,phi)
    <a,b,act>        <a,none,act>      <a,_,act>         <a,b,Assert(phi)>
    N(phi)  F(phi)  G(phi)  U(phi,psi)   !phi   phi & psi   phi | psi
    phi -> psi       true   false

`_` is the any-marker, allowed in event slots of patterns. `?name` tokens
are pattern variables, accepted only by `parse_pattern`. The serializer
restores Des/Ideal sugar where an attitude wraps a temporal content, so
round trips land on the canonical form.
"""
from __future__ import annotations

from dataclasses import dataclass

from .logic import (
    ANY,
    ILLOCUTIONS,
    And,
    Att,
    Atom,
    Bel,
    Bottom,
    DegreeError,
    Des,
    Dom,
    Emo,
    Event,
    EventProp,
    FVar,
    Formula,
    Future,
    Globally,
    Ideal,
    Implies,
    Int,
    Like,
    Next,
    Not,
    Or,
    Resp,
    SpeechAct,
    Top,
    Until,
    Var,
    canonicalize,
    is_emotion_kind,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int

    def __str__(self):
        return f"{self.line}:{self.column}"


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: SourceSpan

    def render(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.span.line}:{self.span.column}: {self.message}"


class FormulaError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.diagnostic = Diagnostic(message, span)
        self.span = span


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT NUMBER STRING PUNCT VAR EOF
    text: str
    line: int
    column: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.line, self.column, max(len(self.text), 1))


_PUNCT2 = ("->", ">=", "<=", "==", "=>")
_PUNCT1 = "<>(),!&|{}:?*=-"


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
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
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while i < n and text[i] != '"':
                if text[i] == "\n":
                    raise FormulaError("unterminated string", SourceSpan(start_line, start_col, 1))
                if text[i] == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i += 2
                    col += 2
                    continue
                buf.append(text[i])
                i += 1
                col += 1
            if i >= n:
                raise FormulaError("unterminated string", SourceSpan(start_line, start_col, 1))
            i += 1
            col += 1
            tokens.append(Token("STRING", "".join(buf), start_line, start_col))
            continue
        if ch == "?":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            if j == i + 1:
                raise FormulaError("bare '?' is not a variable", SourceSpan(line, col, 1))
            tokens.append(Token("VAR", text[i + 1 : j], line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit() or (
            ch == "-" and i + 1 < n and (text[i + 1].isdigit() or text[i + 1] == ".")
        ):
            j = i + 1
            seen_dot = False
            while j < n and (text[j].isdigit() or (text[j] == "." and not seen_dot)):
                if text[j] == ".":
                    seen_dot = True
                j += 1
            tokens.append(Token("NUMBER", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], line, col))
            col += j - i
            i = j
            continue
        two = text[i : i + 2]
        if two in _PUNCT2:
            tokens.append(Token("PUNCT", two, line, col))
            i += 2
            col += 2
            continue
        if ch in _PUNCT1:
            tokens.append(Token("PUNCT", ch, line, col))
            i += 1
            col += 1
            continue
        raise FormulaError(f"unexpected character {ch!r}", SourceSpan(line, col, 1))
    tokens.append(Token("EOF", "", line, col))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind == "PUNCT" and tok.text == text:
            return self.next()
        raise FormulaError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.span)

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == text

    def take(self, text: str) -> bool:
        if self.at(text):
            self.next()
            return True
        return False


_TEMPORAL1 = {"N": Next, "F": Future, "G": Globally}


_MAX_DEPTH = 120


class FormulaParser:
    """Recursive descent over the token stream; one lookahead token."""

    def __init__(self, stream: TokenStream, allow_vars: bool = False):
        self.ts = stream
        self.allow_vars = allow_vars
        self._depth = 0

    # precedence: -> (right)  <  |  <  &  <  unary !

    def formula(self) -> Formula:
        self._depth += 1
        if self._depth > _MAX_DEPTH:
            raise FormulaError("formula nests too deeply", self.ts.peek().span)
        try:
            left = self.disjunct()
            if self.ts.take("->"):
                return Implies(left, self.formula())
            return left
        finally:
            self._depth -= 1

    def disjunct(self) -> Formula:
        node = self.conjunct()
        while self.ts.at("|"):
            self.ts.next()
            node = Or(node, self.conjunct())
        return node

    def conjunct(self) -> Formula:
        node = self.unary()
        while self.ts.at("&"):
            self.ts.next()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        bangs = 0
        while self.ts.at("!"):
            bangs += 1
            if bangs > _MAX_DEPTH:
                raise FormulaError("formula nests too deeply", self.ts.peek().span)
            self.ts.next()
        node = self.primary()
        for _ in range(bangs):
            node = Not(node)
        return node

    def primary(self) -> Formula:
        tok = self.ts.peek()
        if tok.kind == "PUNCT" and tok.text == "(":
            self.ts.next()
            node = self.formula()
            self.ts.expect(")")
            return node
        if tok.kind == "PUNCT" and tok.text == "<":
            return EventProp(self.event())
        if tok.kind == "VAR":
            self.ts.next()
            self._check_var(tok)
            return FVar(tok.text)
        if tok.kind == "IDENT":
            name = tok.text
            if name == "true":
                self.ts.next()
                return Top()
            if name == "false":
                self.ts.next()
                return Bottom()
            follows_paren = self.ts.peek(1).kind == "PUNCT" and self.ts.peek(1).text == "("
            if follows_paren and name in _TEMPORAL1:
                self.ts.next()
                self.ts.next()
                body = self.formula()
                self.ts.expect(")")
                return _TEMPORAL1[name](body)
            if follows_paren and name == "U":
                self.ts.next()
                self.ts.next()
                left = self.formula()
                self.ts.expect(",")
                right = self.formula()
                self.ts.expect(")")
                return Until(left, right)
            if follows_paren and name in ("Bel", "Att", "Des", "Ideal"):
                self.ts.next()
                self.ts.next()
                agent = self.agent_slot()
                self.ts.expect(",")
                degree = self.degree(tok, unit=(name == "Bel"))
                self.ts.expect(",")
                body = self.formula()
                self.ts.expect(")")
                ctor = {"Bel": Bel, "Att": Att, "Des": Des, "Ideal": Ideal}[name]
                return self._build(ctor, tok, agent, degree, body)
            if follows_paren and name == "Int":
                self.ts.next()
                self.ts.next()
                agent = self.agent_slot()
                self.ts.expect(",")
                body = self.formula()
                self.ts.expect(")")
                return Int(agent, body)
            if follows_paren and name in ("Like", "Dom"):
                self.ts.next()
                self.ts.next()
                source = self.agent_slot()
                self.ts.expect(",")
                target = self.agent_slot()
                self.ts.expect(",")
                degree = self.degree(tok, unit=False)
                self.ts.expect(")")
                ctor = Like if name == "Like" else Dom
                return self._build(ctor, tok, source, target, degree)
            if follows_paren and name == "Resp":
                self.ts.next()
                self.ts.next()
                agent = self.agent_slot()
                self.ts.expect(",")
                body = self.formula()
                self.ts.expect(")")
                return Resp(agent, body)
            if follows_paren and name == "Emo":
                self.ts.next()
                self.ts.next()
                kind_tok = self.ts.peek()
                kind = self.emotion_kind()
                self.ts.expect(",")
                holder = self.agent_slot()
                self.ts.expect(",")
                target = self.target_slot()
                self.ts.expect(",")
                intensity = self.degree(tok, unit=True)
                self.ts.expect(",")
                body = self.formula()
                self.ts.expect(")")
                try:
                    return Emo(kind, holder, target, intensity, body)
                except ValueError as exc:
                    raise FormulaError(str(exc), kind_tok.span) from None
            if follows_paren and name == "Goal":
                raise FormulaError("Goal is a derived query, not a storable formula", tok.span)
            self.ts.next()
            return Atom(name)
        raise FormulaError(f"expected a formula, found {tok.text or 'end of input'!r}", tok.span)

    def _build(self, ctor, tok, *args):
        try:
            return ctor(*args)
        except DegreeError as exc:
            raise FormulaError(str(exc), tok.span) from None

    def _check_var(self, tok: Token):
        if not self.allow_vars:
            raise FormulaError("pattern variables are not allowed here", tok.span)

    def agent_slot(self):
        tok = self.ts.peek()
        if tok.kind == "VAR":
            self.ts.next()
            self._check_var(tok)
            return Var(tok.text)
        if tok.kind == "IDENT":
            if tok.text == "_":
                self.ts.next()
                return ANY
            self.ts.next()
            return tok.text
        raise FormulaError(f"expected an agent name, found {tok.text!r}", tok.span)

    def target_slot(self):
        tok = self.ts.peek()
        if tok.kind == "IDENT" and tok.text == "_":
            self.ts.next()
            return None
        return self.agent_slot()

    def degree(self, ctx: Token, unit: bool):
        tok = self.ts.peek()
        if tok.kind == "VAR":
            self.ts.next()
            self._check_var(tok)
            return Var(tok.text)
        if tok.kind != "NUMBER":
            raise FormulaError(f"expected a degree, found {tok.text or 'end of input'!r}", tok.span)
        self.ts.next()
        value = float(tok.text)
        low = 0.0 if unit else -1.0
        if value < low or value > 1.0:
            raise FormulaError(f"degree {tok.text} out of range [{low:g}, 1]", tok.span)
        return value

    def emotion_kind(self):
        tok = self.ts.peek()
        if tok.kind == "VAR":
            self.ts.next()
            self._check_var(tok)
            return Var(tok.text)
        if tok.kind != "IDENT":
            raise FormulaError("expected an emotion kind", tok.span)
        if not is_emotion_kind(tok.text):
            raise FormulaError(f"unknown emotion kind {tok.text!r}", tok.span)
        self.ts.next()
        return tok.text

    def event(self) -> Event:
        open_tok = self.ts.expect("<")
        actor = self.agent_slot()
        self.ts.expect(",")
        tok = self.ts.peek()
        if tok.kind == "IDENT" and tok.text == "none":
            self.ts.next()
            recipient = None
        else:
            recipient = self.agent_slot()
        self.ts.expect(",")
        act = self.act()
        self.ts.expect(">")
        try:
            return Event(actor, recipient, act)
        except ValueError as exc:
            raise FormulaError(str(exc), open_tok.span) from None

    def act(self):
        tok = self.ts.peek()
        if tok.kind == "VAR":
            self.ts.next()
            self._check_var(tok)
            return Var(tok.text)
        if tok.kind != "IDENT":
            raise FormulaError(f"expected an act, found {tok.text or 'end of input'!r}", tok.span)
        name = tok.text
        if name in ILLOCUTIONS:
            self.ts.next()
            self.ts.expect("(")
            content = self.formula()
            self.ts.expect(")")
            return SpeechAct(name, content)
        self.ts.next()
        return name


def _parse(text: str, allow_vars: bool) -> Formula:
    stream = TokenStream(tokenize(text))
    parser = FormulaParser(stream, allow_vars=allow_vars)
    node = parser.formula()
    tail = stream.peek()
    if tail.kind != "EOF":
        raise FormulaError(f"trailing input {tail.text!r}", tail.span)
    return node


def parse_formula(text: str) -> Formula:
    """Parse a concrete formula and return its canonical form."""
    return canonicalize(_parse(text, allow_vars=False))


def parse_pattern(text: str) -> Formula:
    """Parse a formula that may contain `?var` pattern variables."""
    return _parse(text, allow_vars=True)


# --------------------------------------------------------------------------
# Serialization
# --------------------------------------------------------------------------

_PREC_IMPLIES, _PREC_OR, _PREC_AND, _PREC_UNARY = 0, 1, 2, 3


def _deg(value) -> str:
    if isinstance(value, Var):
        return f"?{value.name}"
    return repr(float(value))


def _agent(value) -> str:
    if value is ANY:
        return "_"
    if isinstance(value, Var):
        return f"?{value.name}"
    return value


def serialize_event(event: Event) -> str:
    recipient = "none" if event.recipient is None else _agent(event.recipient)
    if isinstance(event.act, SpeechAct):
        act = f"{event.act.illocution}({serialize_formula(event.act.content)})"
    elif isinstance(event.act, Var):
        act = f"?{event.act.name}"
    else:
        act = event.act
    return f"<{_agent(event.actor)},{recipient},{act}>"


def serialize_formula(phi: Formula) -> str:
    """Canonical text form; `parse_formula(serialize_formula(f))` is identity
    on canonical formulas. Des/Ideal sugar is restored for attitude nodes
    wrapping a temporal content."""
    return _ser(phi, _PREC_IMPLIES)


def _ser(phi: Formula, ctx: int) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bottom):
        return "false"
    if isinstance(phi, Atom):
        return phi.name
    if isinstance(phi, FVar):
        return f"?{phi.name}"
    if isinstance(phi, EventProp):
        return serialize_event(phi.event)
    if isinstance(phi, Like):
        return f"Like({_agent(phi.source)},{_agent(phi.target)},{_deg(phi.degree)})"
    if isinstance(phi, Dom):
        return f"Dom({_agent(phi.source)},{_agent(phi.target)},{_deg(phi.degree)})"
    if isinstance(phi, Bel):
        return f"Bel({_agent(phi.agent)},{_deg(phi.degree)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Att):
        if isinstance(phi.body, Future):
            return f"Des({_agent(phi.agent)},{_deg(phi.degree)},{_ser(phi.body.body, _PREC_IMPLIES)})"
        if isinstance(phi.body, Globally):
            return f"Ideal({_agent(phi.agent)},{_deg(phi.degree)},{_ser(phi.body.body, _PREC_IMPLIES)})"
        return f"Att({_agent(phi.agent)},{_deg(phi.degree)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Des):
        return f"Des({_agent(phi.agent)},{_deg(phi.degree)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Ideal):
        return f"Ideal({_agent(phi.agent)},{_deg(phi.degree)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Int):
        return f"Int({_agent(phi.agent)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Emo):
        target = "_" if phi.target is None else _agent(phi.target)
        kind = phi.kind if isinstance(phi.kind, str) else f"?{phi.kind.name}"
        return f"Emo({kind},{_agent(phi.holder)},{target},{_deg(phi.intensity)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Resp):
        return f"Resp({_agent(phi.agent)},{_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Next):
        return f"N({_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Future):
        return f"F({_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Globally):
        return f"G({_ser(phi.body, _PREC_IMPLIES)})"
    if isinstance(phi, Until):
        return f"U({_ser(phi.left, _PREC_IMPLIES)},{_ser(phi.right, _PREC_IMPLIES)})"
    if isinstance(phi, Not):
        return f"!{_ser(phi.body, _PREC_UNARY)}"
    if isinstance(phi, And):
        # left-associative: force parens on a nested right child
        text = f"{_ser(phi.left, _PREC_AND)} & {_ser(phi.right, _PREC_AND + 1)}"
        return f"({text})" if ctx > _PREC_AND else text
    if isinstance(phi, Or):
        text = f"{_ser(phi.left, _PREC_OR)} | {_ser(phi.right, _PREC_OR + 1)}"
        return f"({text})" if ctx > _PREC_OR else text
    if isinstance(phi, Implies):
        # right-associative
        text = f"{_ser(phi.left, _PREC_IMPLIES + 1)} -> {_ser(phi.right, _PREC_IMPLIES)}"
        return f"({text})" if ctx > _PREC_IMPLIES else text
    raise TypeError(f"not a formula: {phi!r}")
