"""Logical vocabulary: degrees, events and the formula AST.

Everything in this module is an immutable value type, safe to share between
threads. Formulas are frozen dataclasses; `canonicalize` rewrites a formula
into the normal form the rest of the engine assumes:

- desire/ideal sugar expanded into attitudes over temporal contents,
- double negation removed, `U(true, x)` collapsed to `F(x)`,
- negation pushed out of `F`/`G` (`F(!x)` becomes `!G(x)` and dually),
- negated belief contents folded into the certainty (`Bel 1-l`),
- negated attitude contents folded into the sign (`Att -k`),
- disjunction desugared to negated conjunction.

After canonicalization, belief and attitude contents never start with a
negation, which is what makes the complement/consistency bookkeeping of the
stores a by-construction property instead of a runtime check.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass, fields
from typing import Optional, Union

EPS = 1e-9

ILLOCUTIONS = ("Assert", "Request", "Commit", "Express")


class DegreeError(ValueError):
    """A degree is outside its admissible interval."""


class PatternError(ValueError):
    """A concrete value was required but a pattern was supplied."""


def unit_degree(value):
    """Validate a certainty/intensity degree in [0, 1]. Never clamps."""
    if not isinstance(value, numbers.Real):
        raise DegreeError(f"degree must be a real number, got {value!r}")
    if value < 0 or value > 1:
        raise DegreeError(f"degree {value} outside [0, 1]")
    return value


def signed_degree(value):
    """Validate a signed attitude/relation degree in [-1, 1]. Never clamps."""
    if not isinstance(value, numbers.Real):
        raise DegreeError(f"degree must be a real number, got {value!r}")
    if value < -1 or value > 1:
        raise DegreeError(f"degree {value} outside [-1, 1]")
    return value


def deg_eq(a, b) -> bool:
    return abs(a - b) <= EPS


def deg_gt(a, b) -> bool:
    """Strict comparison with tolerance: a value at the threshold never passes."""
    return a > b + EPS


def deg_lt(a, b) -> bool:
    return a < b - EPS


def avg_unit(*degrees) -> float:
    """Average combination mapped into [0, 1]: ((d1+..+dn) / 2n) + 0.5.

    With two arguments this is the combination used for attitude dynamics
    and credibility; it generalizes pointwise to more arguments.
    """
    return sum(degrees) / (2 * len(degrees)) + 0.5


def mean(*degrees) -> float:
    return sum(degrees) / len(degrees)


@dataclass(frozen=True)
class Thresholds:
    """Engine thresholds for moderate/strong belief and desire adoption."""

    mod_th: float = 0.5
    str_th: float = 0.75
    des_th: float = 0.7

    def __post_init__(self):
        unit_degree(self.mod_th)
        unit_degree(self.str_th)
        unit_degree(self.des_th)
        if self.mod_th < 0.5 or not self.mod_th < self.str_th:
            raise DegreeError(
                f"thresholds must satisfy 0.5 <= mod_th < str_th, "
                f"got mod_th={self.mod_th}, str_th={self.str_th}"
            )


class _AnyAgent:
    """The any-marker usable in event slots of rule patterns; written `_`."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "_"


ANY = _AnyAgent()


@dataclass(frozen=True)
class Var:
    """A named pattern variable, written `?name` in rule sources."""

    name: str

    def __repr__(self):
        return f"?{self.name}"


# --------------------------------------------------------------------------
# Emotion kind registry
# --------------------------------------------------------------------------

_EMOTION_KINDS: dict[str, float] = {}


def register_emotion_kind(name: str, valence: float) -> None:
    """Register an emotion kind with its valence sign. Load-time only."""
    if name in _EMOTION_KINDS:
        raise ValueError(f"emotion kind {name!r} already registered")
    _EMOTION_KINDS[name] = signed_degree(valence)


def emotion_kinds() -> dict[str, float]:
    return dict(_EMOTION_KINDS)


def emotion_valence(name: str) -> float:
    return _EMOTION_KINDS[name]


def is_emotion_kind(name: str) -> bool:
    return name in _EMOTION_KINDS


for _kind, _val in (
    ("Joy", 1.0),
    ("Fear", -1.0),
    ("Gloating", 1.0),
    ("Admiration", 1.0),
    ("Gratitude", 1.0),
):
    register_emotion_kind(_kind, _val)


# --------------------------------------------------------------------------
# Events
# --------------------------------------------------------------------------

AgentSlot = Union[str, _AnyAgent, Var]


@dataclass(frozen=True)
class SpeechAct:
    illocution: str
    content: "Formula"

    def __post_init__(self):
        if self.illocution not in ILLOCUTIONS:
            raise ValueError(f"unknown illocution {self.illocution!r}")


@dataclass(frozen=True)
class Event:
    """An act tuple: actor, optional recipient, physical act or speech act.

    `ANY` slots are pattern markers; a concrete (occurred) event has none.
    A recipient of None means the act has no passive party, which is only
    allowed for physical acts.
    """

    actor: AgentSlot
    recipient: Optional[AgentSlot]
    act: Union[str, SpeechAct, Var]

    def __post_init__(self):
        if isinstance(self.act, SpeechAct) and self.recipient is None:
            raise ValueError("speech acts always have a recipient")
        if isinstance(self.actor, str) and not self.actor:
            raise ValueError("agent names are nonempty")

    def is_concrete(self) -> bool:
        if self.actor is ANY or isinstance(self.actor, Var):
            return False
        if self.recipient is ANY or isinstance(self.recipient, Var):
            return False
        if isinstance(self.act, Var):
            return False
        if isinstance(self.act, SpeechAct) and is_pattern(self.act.content):
            return False
        return True


def is_responsible(agent: str, event: Event) -> bool:
    """True iff the agent performed the act itself."""
    if not event.is_concrete():
        raise PatternError(f"pattern not concrete: {event}")
    return event.actor == agent


def is_witness(agent: str, event: Event) -> bool:
    """True iff the agent took part in the event, as actor or recipient."""
    if not event.is_concrete():
        raise PatternError(f"pattern not concrete: {event}")
    return event.actor == agent or event.recipient == agent


# --------------------------------------------------------------------------
# Formulas
# --------------------------------------------------------------------------


class Formula:
    """Base class for all formula nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class EventProp(Formula):
    """An event used as a proposition ("the event occurred/occurs")."""

    event: Event


@dataclass(frozen=True)
class Like(Formula):
    source: AgentSlot
    target: AgentSlot
    degree: float

    def __post_init__(self):
        if not isinstance(self.degree, Var):
            signed_degree(self.degree)


@dataclass(frozen=True)
class Dom(Formula):
    source: AgentSlot
    target: AgentSlot
    degree: float

    def __post_init__(self):
        if not isinstance(self.degree, Var):
            signed_degree(self.degree)


@dataclass(frozen=True)
class Bel(Formula):
    agent: AgentSlot
    degree: float
    body: Formula

    def __post_init__(self):
        if not isinstance(self.degree, Var):
            unit_degree(self.degree)


@dataclass(frozen=True)
class Att(Formula):
    agent: AgentSlot
    degree: float
    body: Formula

    def __post_init__(self):
        if not isinstance(self.degree, Var):
            signed_degree(self.degree)


@dataclass(frozen=True)
class Des(Formula):
    """Surface sugar: positive/negative stance toward a future fact."""

    agent: AgentSlot
    degree: float
    body: Formula

    def __post_init__(self):
        if not isinstance(self.degree, Var):
            signed_degree(self.degree)


@dataclass(frozen=True)
class Ideal(Formula):
    """Surface sugar: stance toward a fact holding from now on."""

    agent: AgentSlot
    degree: float
    body: Formula

    def __post_init__(self):
        if not isinstance(self.degree, Var):
            signed_degree(self.degree)


@dataclass(frozen=True)
class Int(Formula):
    agent: AgentSlot
    body: Formula


@dataclass(frozen=True)
class Emo(Formula):
    """`holder` feels `kind` (toward `target`) about `body` with `intensity`."""

    kind: Union[str, Var]
    holder: AgentSlot
    target: Optional[AgentSlot]
    intensity: float
    body: Formula

    def __post_init__(self):
        if not isinstance(self.intensity, Var):
            unit_degree(self.intensity)
        if isinstance(self.kind, str) and not is_emotion_kind(self.kind):
            raise ValueError(f"unregistered emotion kind {self.kind!r}")
        if not is_pattern(self.body) and not temporal_free(self.body):
            raise ValueError("emotion contents cannot contain temporal operators")


@dataclass(frozen=True)
class Resp(Formula):
    """`agent` is directly responsible for the state of affairs `body`."""

    agent: AgentSlot
    body: Formula


@dataclass(frozen=True)
class Next(Formula):
    body: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Future(Formula):
    body: Formula


@dataclass(frozen=True)
class Globally(Formula):
    body: Formula


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class FVar(Formula):
    """A formula-valued pattern variable."""

    name: str

    def __repr__(self):
        return f"?{self.name}"


_BINARY = (Until, And, Or, Implies)
_UNARY = (Next, Future, Globally, Not)


def children(phi: Formula) -> tuple:
    if isinstance(phi, _BINARY):
        return (phi.left, phi.right)
    if isinstance(phi, _UNARY):
        return (phi.body,)
    if isinstance(phi, (Bel, Att, Des, Ideal, Int, Resp, Emo)):
        return (phi.body,)
    if isinstance(phi, EventProp) and isinstance(phi.event.act, SpeechAct):
        return (phi.event.act.content,)
    return ()


def walk(phi: Formula):
    yield phi
    for child in children(phi):
        yield from walk(child)


def temporal_free(phi: Formula) -> bool:
    return not any(isinstance(f, (Next, Until, Future, Globally)) for f in walk(phi))


def formula_depth(phi: Formula) -> int:
    """Nesting depth, computed without recursion."""
    deepest = 0
    stack = [(phi, 1)]
    while stack:
        node, d = stack.pop()
        if d > deepest:
            deepest = d
        for child in children(node):
            stack.append((child, d + 1))
    return deepest


def is_pattern(phi: Formula) -> bool:
    """True if the formula contains variables or any-markers."""
    for f in walk(phi):
        if isinstance(f, FVar):
            return True
        vals = [getattr(f, fld.name) for fld in fields(f)] if hasattr(f, "__dataclass_fields__") else []
        for v in vals:
            if isinstance(v, (Var, _AnyAgent)):
                return True
            if isinstance(v, Event):
                if v.actor is ANY or v.recipient is ANY:
                    return True
                if isinstance(v.actor, Var) or isinstance(v.recipient, Var) or isinstance(v.act, Var):
                    return True
    return False


def atoms_of(phi: Formula) -> set:
    return {f.name for f in walk(phi) if isinstance(f, Atom)}


def events_of(phi: Formula) -> set:
    return {f.event for f in walk(phi) if isinstance(f, EventProp)}


def agents_of(phi: Formula) -> set:
    """All concrete agent names mentioned anywhere in the formula."""
    found = set()
    for f in walk(phi):
        for name in ("agent", "source", "target", "holder"):
            v = getattr(f, name, None)
            if isinstance(v, str):
                found.add(v)
        if isinstance(f, EventProp):
            for v in (f.event.actor, f.event.recipient):
                if isinstance(v, str):
                    found.add(v)
    return found


# --------------------------------------------------------------------------
# Canonicalization
# --------------------------------------------------------------------------


def canonicalize(phi: Formula) -> Formula:
    """Rewrite into normal form. Idempotent; preserves atoms and events."""
    if isinstance(phi, (Top, Bottom, Atom, Like, Dom, FVar)):
        return phi
    if isinstance(phi, EventProp):
        ev = phi.event
        if isinstance(ev.act, SpeechAct):
            content = canonicalize(ev.act.content)
            if content is not ev.act.content:
                return EventProp(Event(ev.actor, ev.recipient, SpeechAct(ev.act.illocution, content)))
        return phi
    if isinstance(phi, Not):
        body = canonicalize(phi.body)
        if isinstance(body, Not):
            return body.body
        if isinstance(body, Top):
            return Bottom()
        if isinstance(body, Bottom):
            return Top()
        return Not(body)
    if isinstance(phi, And):
        return And(canonicalize(phi.left), canonicalize(phi.right))
    if isinstance(phi, Or):
        return canonicalize(Not(And(Not(phi.left), Not(phi.right))))
    if isinstance(phi, Implies):
        return Implies(canonicalize(phi.left), canonicalize(phi.right))
    if isinstance(phi, Next):
        return Next(canonicalize(phi.body))
    if isinstance(phi, Until):
        left = canonicalize(phi.left)
        right = canonicalize(phi.right)
        if isinstance(left, Top):
            return _canon_future(right)
        return Until(left, right)
    if isinstance(phi, Future):
        return _canon_future(canonicalize(phi.body))
    if isinstance(phi, Globally):
        return _canon_globally(canonicalize(phi.body))
    if isinstance(phi, Bel):
        body = canonicalize(phi.body)
        if isinstance(body, Not) and not isinstance(phi.degree, Var):
            return Bel(phi.agent, 1 - phi.degree, body.body)
        return Bel(phi.agent, phi.degree, body)
    if isinstance(phi, Att):
        return _canon_att(phi.agent, phi.degree, canonicalize(phi.body))
    if isinstance(phi, Des):
        return _canon_att(phi.agent, phi.degree, _canon_future(canonicalize(phi.body)))
    if isinstance(phi, Ideal):
        return _canon_att(phi.agent, phi.degree, _canon_globally(canonicalize(phi.body)))
    if isinstance(phi, Int):
        return Int(phi.agent, canonicalize(phi.body))
    if isinstance(phi, Emo):
        return Emo(phi.kind, phi.holder, phi.target, phi.intensity, canonicalize(phi.body))
    if isinstance(phi, Resp):
        return Resp(phi.agent, canonicalize(phi.body))
    raise TypeError(f"not a formula: {phi!r}")


def _canon_future(body: Formula) -> Formula:
    # F(!x) is the same statement as !G(x)
    if isinstance(body, Not):
        return Not(Globally(body.body))
    return Future(body)


def _canon_globally(body: Formula) -> Formula:
    # G(!x) is the same statement as !F(x)
    if isinstance(body, Not):
        return Not(Future(body.body))
    return Globally(body)


def _canon_att(agent, degree, body: Formula) -> Formula:
    # An attitude toward !x is the opposite attitude toward x.
    if isinstance(body, Not) and not isinstance(degree, Var):
        return Att(agent, -degree, body.body)
    return Att(agent, degree, body)


def negate(phi: Formula) -> Formula:
    """Canonical negation of an already-canonical formula."""
    return canonicalize(Not(phi))


# --------------------------------------------------------------------------
# Structural comparison and pattern matching
# --------------------------------------------------------------------------


def formula_eq(a: Formula, b: Formula) -> bool:
    """Structural equality with degree tolerance. No wildcard leniency."""
    return _cmp(a, b, wild=False)


def overlap(a: Formula, b: Formula) -> bool:
    """Structural compatibility where `_` on either side matches anything.

    Used by the built-in rules when relating stored contents; collapses to
    structural equality when neither side carries any-markers.
    """
    return _cmp(a, b, wild=True)


def _cmp(a, b, wild: bool) -> bool:
    if wild and (a is ANY or b is ANY):
        return True
    if isinstance(a, Formula) or isinstance(b, Formula):
        if type(a) is not type(b):
            return False
        for fld in fields(a):
            if not _cmp(getattr(a, fld.name), getattr(b, fld.name), wild):
                return False
        return True
    if isinstance(a, Event) and isinstance(b, Event):
        return (
            _cmp(a.actor, b.actor, wild)
            and _cmp(a.recipient, b.recipient, wild)
            and _cmp(a.act, b.act, wild)
        )
    if isinstance(a, SpeechAct) and isinstance(b, SpeechAct):
        return a.illocution == b.illocution and _cmp(a.content, b.content, wild)
    if isinstance(a, numbers.Real) and isinstance(b, numbers.Real):
        return deg_eq(a, b)
    return a == b


def subsumes(pattern: Formula, instance: Formula) -> bool:
    """True if every instance of `instance` is an instance of `pattern`.

    Any-markers are allowed on the pattern side only; a concrete pattern
    slot does not subsume an any-marker.
    """
    return _subs(pattern, instance)


def _subs(p, t) -> bool:
    if p is ANY:
        return True
    if isinstance(p, Formula) or isinstance(t, Formula):
        if type(p) is not type(t):
            return False
        return all(_subs(getattr(p, f.name), getattr(t, f.name)) for f in fields(p))
    if isinstance(p, Event) and isinstance(t, Event):
        return _subs(p.actor, t.actor) and _subs(p.recipient, t.recipient) and _subs(p.act, t.act)
    if isinstance(p, SpeechAct) and isinstance(t, SpeechAct):
        return p.illocution == t.illocution and _subs(p.content, t.content)
    if isinstance(p, numbers.Real) and isinstance(t, numbers.Real):
        return deg_eq(p, t)
    return p == t


class MatchFailure(Exception):
    pass


def match(pattern: Formula, target: Formula, bindings: Optional[dict] = None) -> Optional[dict]:
    """Match a pattern with variables/any-markers against a target.

    Returns the binding map, or None on failure. Any-markers match anything
    without binding; variables bind consistently (degree variables compare
    with tolerance on repeated occurrences).
    """
    env = dict(bindings) if bindings else {}
    try:
        _match(pattern, target, env)
    except MatchFailure:
        return None
    return env


def _bind(env, name, value):
    if name in env:
        old = env[name]
        if isinstance(old, numbers.Real) and isinstance(value, numbers.Real):
            if not deg_eq(old, value):
                raise MatchFailure
        elif isinstance(old, Formula) and isinstance(value, Formula):
            if not formula_eq(old, value):
                raise MatchFailure
        elif old != value:
            raise MatchFailure
    else:
        env[name] = value


def _match(p, t, env):
    if isinstance(p, FVar):
        if not isinstance(t, Formula):
            raise MatchFailure
        _bind(env, p.name, t)
        return
    if isinstance(p, Var):
        _bind(env, p.name, t)
        return
    if p is ANY:
        return
    if isinstance(p, Formula):
        if type(p) is not type(t):
            raise MatchFailure
        for fld in fields(p):
            _match(getattr(p, fld.name), getattr(t, fld.name), env)
        return
    if isinstance(p, Event):
        if not isinstance(t, Event):
            raise MatchFailure
        _match(p.actor, t.actor, env)
        _match(p.recipient, t.recipient, env)
        _match(p.act, t.act, env)
        return
    if isinstance(p, SpeechAct):
        if not isinstance(t, SpeechAct) or p.illocution != t.illocution:
            raise MatchFailure
        _match(p.content, t.content, env)
        return
    if isinstance(p, numbers.Real) and isinstance(t, numbers.Real):
        if not deg_eq(p, t):
            raise MatchFailure
        return
    if p != t:
        raise MatchFailure


def substitute(bindings: dict, pattern: Formula) -> Formula:
    """Apply a binding map to a pattern, producing a formula."""
    return canonicalize(_subst(pattern, bindings))


def _subst(p, env):
    if isinstance(p, FVar):
        if p.name not in env:
            raise KeyError(f"unbound formula variable ?{p.name}")
        return env[p.name]
    if isinstance(p, Var):
        if p.name not in env:
            raise KeyError(f"unbound variable ?{p.name}")
        return env[p.name]
    if isinstance(p, Formula):
        vals = {f.name: _subst(getattr(p, f.name), env) for f in fields(p)}
        return type(p)(**vals)
    if isinstance(p, Event):
        return Event(_subst(p.actor, env), _subst(p.recipient, env), _subst(p.act, env))
    if isinstance(p, SpeechAct):
        return SpeechAct(p.illocution, _subst(p.content, env))
    return p


# --------------------------------------------------------------------------
# Temporal stripping helpers shared by the inference rules
# --------------------------------------------------------------------------


_AGENT_FIELDS = ("agent", "source", "target", "holder")


def rename_agent(phi: Formula, old: str, new: str) -> Formula:
    """Replace an agent name everywhere it appears in an agent slot."""

    def slot(v):
        return new if v == old else v

    def ren(v):
        if isinstance(v, Formula):
            vals = {}
            for f in fields(v):
                value = getattr(v, f.name)
                if f.name in _AGENT_FIELDS and isinstance(value, str):
                    vals[f.name] = slot(value)
                elif f.name == "event" and isinstance(value, Event):
                    vals[f.name] = ren_event(value)
                elif isinstance(value, Formula):
                    vals[f.name] = ren(value)
                else:
                    vals[f.name] = value
            return type(v)(**vals)
        return v

    def ren_event(ev: Event) -> Event:
        act = ev.act
        if isinstance(act, SpeechAct):
            act = SpeechAct(act.illocution, ren(act.content))
        actor = slot(ev.actor) if isinstance(ev.actor, str) else ev.actor
        recipient = slot(ev.recipient) if isinstance(ev.recipient, str) else ev.recipient
        return Event(actor, recipient, act)

    return ren(phi)


def strip_temporal_head(phi: Formula) -> Formula:
    """Reduce `F(x)`, `G(x)`, `!F(x)`, `!G(x)` to `x` resp. `!x`.

    Used when relating the consequent of a believed implication to the
    content of a stored desire: bringing about x "in time" counts both for
    eventual and for global contents.
    """
    if isinstance(phi, (Future, Globally)):
        return phi.body
    if isinstance(phi, Not) and isinstance(phi.body, (Future, Globally)):
        return negate(phi.body.body)
    return phi
