"""One agent's graded mental state: beliefs, attitudes, intentions, emotions
and social relations, plus the derived queries (desires, goals, attributed
views of the interlocutor).

Storage discipline: every content is canonical (see `logic.canonicalize`),
so belief contents never start with a negation (the complement is folded
into the degree) and attitude contents never do either (the sign flips).
Queries remain negation-aware by re-canonicalizing their argument.
"""
from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Iterable, Optional

from .logic import (
    Att,
    Bel,
    Dom,
    Emo,
    EventProp,
    Formula,
    Future,
    Globally,
    Implies,
    Int,
    Like,
    Not,
    Thresholds,
    canonicalize,
    deg_eq,
    deg_gt,
    formula_eq,
    negate,
    overlap,
    strip_temporal_head,
    unit_degree,
)


@dataclass(frozen=True)
class EmotionInstance:
    kind: str
    holder: str
    target: Optional[str]
    intensity: float
    about: Formula
    tick: int

    def key(self):
        return (self.kind, self.holder, self.target, self.about)


class IntentionConflict(Exception):
    """Adding this intention would contradict a held one."""


@dataclass
class AttitudeReading:
    """One way of reading a stored attitude entry.

    flavor is "des" (stance toward a future fact), "ideal" (stance toward a
    fact holding from now on) or "att" (stance toward a current fact). A
    single entry yields several readings because a negated content is the
    mirrored stance toward the positive content, and wanting something
    always includes wanting it eventually.
    """

    flavor: str
    content: Formula
    degree: float
    key: Formula


class MentalState:
    def __init__(self, owner: str):
        if not owner:
            raise ValueError("owner name is nonempty")
        self.owner = owner
        self.beliefs: dict[Formula, float] = {}
        self.attitudes: dict[Formula, float] = {}
        self.intentions: dict[Formula, None] = {}
        self.emotions: list[EmotionInstance] = []
        self.likes: dict[str, float] = {}
        self.doms: dict[str, float] = {}

    # -- beliefs ------------------------------------------------------------

    def belief_entry(self, content: Formula, degree: float) -> tuple[Formula, float]:
        """Canonical (key, degree) pair for a belief about `content`."""
        wrapped = canonicalize(Bel(self.owner, unit_degree(degree), content))
        return wrapped.body, wrapped.degree

    def assert_belief(self, content: Formula, degree: float) -> bool:
        """Store a belief, last writer wins. Returns True if anything changed."""
        key, deg = self.belief_entry(content, degree)
        old = self._lookup(self.beliefs, key)
        if old is not None and deg_eq(old[1], deg):
            return False
        if old is not None:
            del self.beliefs[old[0]]
        self.beliefs[key] = deg
        return True

    def belief(self, content: Formula) -> Optional[float]:
        """Stored certainty of `content`, complement-aware; None if unknown.

        Unknown is distinct from certainty 0. The query also answers
        introspective contents (own beliefs, attitudes, intentions,
        relations and current emotions) with certainty 1.
        """
        content = canonicalize(content)
        flip = False
        if isinstance(content, Not):
            content, flip = content.body, True
        hit = self._lookup(self.beliefs, content)
        if hit is not None:
            return 1 - hit[1] if flip else hit[1]
        intro = self._introspect(content)
        if intro is not None:
            return (1 - intro) if flip else intro
        return None

    def _introspect(self, content: Formula) -> Optional[float]:
        if isinstance(content, Bel) and content.agent == self.owner:
            key, deg = self.belief_entry(content.body, content.degree)
            hit = self._lookup(self.beliefs, key)
            if hit is not None and deg_eq(hit[1], deg):
                return 1.0
            return None
        if isinstance(content, Att) and content.agent == self.owner:
            k = self.attitude(content.body)
            if k is not None and deg_eq(k, content.degree):
                return 1.0
            return None
        if isinstance(content, Int) and content.agent == self.owner:
            if self.has_intention(content.body):
                return 1.0
            return None
        if isinstance(content, Like) and content.source == self.owner:
            k = self.likes.get(content.target)
            if k is not None and deg_eq(k, content.degree):
                return 1.0
            return None
        if isinstance(content, Dom) and content.source == self.owner:
            k = self.doms.get(content.target)
            if k is not None and deg_eq(k, content.degree):
                return 1.0
            return None
        if isinstance(content, Emo) and content.holder == self.owner:
            for emo in self.emotions:
                if (
                    emo.kind == content.kind
                    and emo.target == content.target
                    and deg_eq(emo.intensity, content.intensity)
                    and formula_eq(emo.about, content.body)
                ):
                    return 1.0
            return None
        return None

    @staticmethod
    def _lookup(store: dict, key: Formula):
        if key in store:
            return key, store[key]
        for stored, value in store.items():
            if formula_eq(stored, key):
                return stored, value
        return None

    def implication_beliefs(self, floor: float) -> list[tuple[Formula, Formula, float]]:
        """(antecedent, consequent, certainty) for believed implications above floor."""
        out = []
        for key, deg in self.beliefs.items():
            if isinstance(key, Implies) and deg_gt(deg, floor):
                out.append((key.left, key.right, deg))
        return out

    # -- attitudes ------------------------------------------------------------

    def attitude_entry(self, content: Formula, degree: float) -> tuple[Formula, float]:
        wrapped = canonicalize(Att(self.owner, degree, content))
        return wrapped.body, wrapped.degree

    def assert_attitude(self, content: Formula, degree: float) -> bool:
        key, deg = self.attitude_entry(content, degree)
        old = self._lookup(self.attitudes, key)
        if old is not None and deg_eq(old[1], deg):
            return False
        if old is not None:
            del self.attitudes[old[0]]
        self.attitudes[key] = deg
        return True

    def attitude(self, content: Formula) -> Optional[float]:
        """Signed stance toward `content`; sign-flips for negated queries."""
        content = canonicalize(content)
        flip = False
        if isinstance(content, Not):
            content, flip = content.body, True
        hit = self._lookup(self.attitudes, content)
        if hit is None:
            return None
        return -hit[1] if flip else hit[1]

    def attitude_readings(self) -> list[AttitudeReading]:
        out: list[AttitudeReading] = []
        for key, k in self.attitudes.items():
            if isinstance(key, Future):
                out.append(AttitudeReading("des", key.body, k, key))
                out.append(AttitudeReading("ideal", negate(key.body), -k, key))
            elif isinstance(key, Globally):
                out.append(AttitudeReading("ideal", key.body, k, key))
                out.append(AttitudeReading("des", negate(key.body), -k, key))
            else:
                out.append(AttitudeReading("att", key, k, key))
        return out

    def desire(self, content: Formula) -> Optional[float]:
        content = canonicalize(content)
        for reading in self.attitude_readings():
            if reading.flavor == "des" and formula_eq(reading.content, content):
                return reading.degree
        for reading in self.attitude_readings():
            if reading.flavor == "des" and overlap(reading.content, content):
                return reading.degree
        return None

    # -- intentions -----------------------------------------------------------

    def add_intention(self, content: Formula) -> bool:
        content = canonicalize(content)
        if self._lookup(self.intentions, content) is not None:
            return False
        if self._lookup(self.intentions, negate(content)) is not None:
            raise IntentionConflict(f"would contradict held intention about {content}")
        self.intentions[content] = None
        return True

    def has_intention(self, content: Formula) -> bool:
        return self._lookup(self.intentions, canonicalize(content)) is not None

    def drop_intention(self, content: Formula) -> None:
        hit = self._lookup(self.intentions, canonicalize(content))
        if hit is not None:
            del self.intentions[hit[0]]

    # -- relations ------------------------------------------------------------

    def set_like(self, other: str, degree: float) -> None:
        self.likes[other] = degree

    def set_dom(self, other: str, degree: float) -> None:
        self.doms[other] = degree

    def like(self, other: str) -> Optional[float]:
        return self.likes.get(other)

    def dom(self, other: str) -> Optional[float]:
        return self.doms.get(other)

    # -- emotions ---------------------------------------------------------------

    def set_emotions(self, instances: Iterable[EmotionInstance]) -> None:
        """Replace the current emotion set (emotions are re-derived per tick)."""
        seen = {}
        for inst in instances:
            seen[inst.key()] = inst
        self.emotions = list(seen.values())

    # -- inconsistency checks and goals ----------------------------------------

    def inconsistency_witness(
        self, content: Formula, thresholds: Thresholds, stronger_than: Optional[float] = None
    ):
        """A stored desire defeated or violated by `content`, if any.

        Finds a desire reading (chi, k') and a strongly believed implication
        from `content` such that adopting/achieving `content` either destroys
        a wanted chi (k' > 0) or brings about an unwanted chi (k' < 0). With
        `stronger_than` set, only desires of strictly larger magnitude count,
        which is the weak-inconsistency test used at the goal stage.
        """
        content = canonicalize(content)
        impls = []
        for left, right, deg in self.implication_beliefs(thresholds.str_th):
            if overlap(left, content):
                impls.append((left, strip_temporal_head(right), deg))
        if not impls:
            return None
        for reading in self.attitude_readings():
            if reading.flavor != "des":
                continue
            k = reading.degree
            if deg_eq(k, 0.0):
                continue
            if stronger_than is not None and not deg_gt(abs(k), abs(stronger_than)):
                continue
            neg_content = negate(reading.content)
            for left, outcome, deg in impls:
                if k > 0 and overlap(outcome, neg_content):
                    return (reading.content, k, left, outcome, deg)
                if k < 0 and overlap(outcome, reading.content):
                    return (reading.content, k, left, outcome, deg)
        return None

    def achievability(self, content: Formula) -> Optional[float]:
        """Certainty that `content` can come true, or None.

        Held as a belief about the future content, as a belief that it is
        already true, or implicit when it is an act of the owner itself.
        """
        content = canonicalize(content)
        hit = self._lookup(self.beliefs, canonicalize(Future(content)))
        if hit is not None and deg_gt(hit[1], 0.0):
            return hit[1]
        hit = self._lookup(self.beliefs, content)
        if hit is not None and deg_gt(hit[1], 0.0):
            return hit[1]
        if isinstance(content, EventProp):
            ev = content.event
            if ev.is_concrete() and ev.actor == self.owner:
                return 1.0
        return None

    def query_goal(self, content: Formula, thresholds: Thresholds) -> Optional[float]:
        """Desire degree if `content` is a goal: wanted above the adoption
        threshold, achievable, and not weakly inconsistent."""
        content = canonicalize(content)
        k = self.desire(content)
        if k is None or not deg_gt(k, thresholds.des_th):
            return None
        if self.achievability(content) is None:
            return None
        if self.inconsistency_witness(content, thresholds, stronger_than=k) is not None:
            return None
        return k

    def desire_candidates(self, thresholds: Thresholds) -> list[tuple[Formula, float]]:
        """Distinct desires above the adoption threshold, strongest first."""
        from .parsing import serialize_formula

        seen: dict[str, tuple[Formula, float]] = {}
        for reading in self.attitude_readings():
            if reading.flavor != "des" or not deg_gt(reading.degree, thresholds.des_th):
                continue
            text = serialize_formula(reading.content)
            if text not in seen:
                seen[text] = (reading.content, reading.degree)
        return [seen[t] for t in sorted(seen, key=lambda t: (-seen[t][1], t))]

    # -- attributed views --------------------------------------------------------

    def attributed_view(self, other: str, thresholds: Optional[Thresholds] = None) -> "MentalState":
        view, _ = self.attributed_with_certainty(other, thresholds or Thresholds())
        return view

    def attributed_with_certainty(self, other: str, thresholds: Thresholds):
        """First-person state for `other`, compiled from strong beliefs about
        its mental states, plus the certainty each compiled fact carries."""
        view = MentalState(other)
        certainty: dict = {}
        for key, l in self.beliefs.items():
            if not deg_gt(l, thresholds.str_th):
                continue
            if isinstance(key, Bel) and key.agent == other:
                inner_key, inner_deg = view.belief_entry(key.body, key.degree)
                view.beliefs[inner_key] = inner_deg
                certainty[("bel", inner_key)] = l
            elif isinstance(key, Att) and key.agent == other:
                inner_key, inner_deg = view.attitude_entry(key.body, key.degree)
                view.attitudes[inner_key] = inner_deg
                certainty[("att", inner_key)] = l
            elif isinstance(key, Int) and key.agent == other:
                view.intentions[canonicalize(key.body)] = None
                certainty[("int", canonicalize(key.body))] = l
            elif isinstance(key, Like) and key.source == other and isinstance(key.target, str):
                view.likes[key.target] = key.degree
                certainty[("like", key.target)] = l
            elif isinstance(key, Dom) and key.source == other and isinstance(key.target, str):
                view.doms[key.target] = key.degree
                certainty[("dom", key.target)] = l
        return view, certainty

    # -- snapshots ---------------------------------------------------------------

    def snapshot_lines(self) -> list[str]:
        """Deterministic, sorted line export of the whole state."""
        from .parsing import serialize_formula

        lines = []
        for key, deg in self.beliefs.items():
            lines.append(f"Bel({self.owner},{repr(float(deg))},{serialize_formula(key)})")
        for key, deg in self.attitudes.items():
            lines.append(
                serialize_formula(Att(self.owner, deg, key))
            )
        for key in self.intentions:
            lines.append(f"Int({self.owner},{serialize_formula(key)})")
        for other in self.likes:
            lines.append(f"Like({self.owner},{other},{repr(float(self.likes[other]))})")
        for other in self.doms:
            lines.append(f"Dom({self.owner},{other},{repr(float(self.doms[other]))})")
        for emo in self.emotions:
            target = emo.target if emo.target else "_"
            lines.append(
                f"Emo({emo.kind},{emo.holder},{target},{repr(float(emo.intensity))},"
                f"{serialize_formula(emo.about)})"
            )
        return sorted(lines)

    def clone(self) -> "MentalState":
        return copy.deepcopy(self)

    def __repr__(self):
        return (
            f"<MentalState {self.owner}: {len(self.beliefs)} bel, "
            f"{len(self.attitudes)} att, {len(self.intentions)} int>"
        )
