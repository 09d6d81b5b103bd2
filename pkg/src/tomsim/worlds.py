"""Finite possible-world models used as an independent semantics oracle.

The running engine is syntactic; this module provides the model-theoretic
side for the graded-belief fragment so its laws (introspection, the
complement rule) can be checked exhaustively on desk-scale frames, with
exact rational arithmetic for the accessible-world proportions.

The truth condition for a bare event is literal from the frame definition:
an event holds at a world when every world the event maps to satisfies the
trivially true formula. That condition is vacuously true for any event the
frame knows, and this module implements it literally rather than inventing
a stronger one.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .logic import (
    And,
    Atom,
    Bel,
    Bottom,
    Des,
    EventProp,
    Formula,
    Int,
    Not,
    Top,
)


class UndefinedProportionError(ValueError):
    """A graded-belief query at a world with no belief-accessible worlds."""


class UnsupportedConstructError(ValueError):
    """The oracle only evaluates constructs with printed truth conditions."""


@dataclass
class FiniteModel:
    worlds: tuple
    valuation: dict  # world -> frozenset[str]
    bel: dict  # agent -> {world -> frozenset[world]}
    des: dict = field(default_factory=dict)  # agent -> {(world, level) -> frozenset}
    intent: dict = field(default_factory=dict)  # agent -> {world -> frozenset[world]}
    events: dict = field(default_factory=dict)  # Event -> frozenset[world]

    def bel_worlds(self, agent, world) -> frozenset:
        return self.bel.get(agent, {}).get(world, frozenset())


def proportion(model: FiniteModel, agent, world, phi: Formula) -> Fraction:
    """Exact share of belief-accessible worlds satisfying phi."""
    accessible = model.bel_worlds(agent, world)
    if not accessible:
        raise UndefinedProportionError(f"no belief-accessible worlds at {world!r} for {agent!r}")
    holding = [v for v in accessible if eval_formula(model, v, phi)]
    return Fraction(len(holding), len(accessible))


def eval_formula(model: FiniteModel, world, phi: Formula) -> bool:
    """Truth at a world, for the fragment with printed truth conditions."""
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bottom):
        return False
    if isinstance(phi, Atom):
        return phi.name in model.valuation.get(world, frozenset())
    if isinstance(phi, Not):
        return not eval_formula(model, world, phi.body)
    if isinstance(phi, And):
        return eval_formula(model, world, phi.left) and eval_formula(model, world, phi.right)
    if isinstance(phi, Bel):
        return proportion(model, phi.agent, world, phi.body) == phi.degree
    if isinstance(phi, Des):
        levels = model.des.get(phi.agent, {})
        worlds = levels.get((world, phi.degree), frozenset())
        return all(eval_formula(model, v, phi.body) for v in worlds)
    if isinstance(phi, Int):
        worlds = model.intent.get(phi.agent, {}).get(world, frozenset())
        return all(eval_formula(model, v, phi.body) for v in worlds)
    if isinstance(phi, EventProp):
        mapped = model.events.get(phi.event, frozenset())
        for v in mapped:
            if v not in model.worlds:
                raise UnsupportedConstructError(f"event maps outside the frame: {phi.event}")
        return all(eval_formula(model, v, Top()) for v in mapped)
    raise UnsupportedConstructError(f"no printed truth condition for {type(phi).__name__}")


def recount_proportion(model: FiniteModel, agent, world, phi: Formula) -> Fraction:
    """Independent recount of the same proportion, written separately so the
    two implementations can cross-check each other."""
    accessible = sorted(model.bel_worlds(agent, world))
    if len(accessible) == 0:
        raise UndefinedProportionError("empty accessibility set")
    total = 0
    hits = 0
    for v in accessible:
        total += 1
        if _naive_eval(model, v, phi):
            hits += 1
    return Fraction(hits, total)


def _naive_eval(model: FiniteModel, world, phi: Formula) -> bool:
    stack_result = None
    if isinstance(phi, Atom):
        stack_result = phi.name in model.valuation.get(world, frozenset())
    elif isinstance(phi, Top):
        stack_result = True
    elif isinstance(phi, Bottom):
        stack_result = False
    elif isinstance(phi, Not):
        stack_result = not _naive_eval(model, world, phi.body)
    elif isinstance(phi, And):
        stack_result = _naive_eval(model, world, phi.left)
        if stack_result:
            stack_result = _naive_eval(model, world, phi.right)
    elif isinstance(phi, Bel):
        acc = model.bel_worlds(phi.agent, world)
        if not acc:
            raise UndefinedProportionError("empty accessibility set")
        count = sum(1 for v in acc if _naive_eval(model, v, phi.body))
        stack_result = Fraction(count, len(acc)) == phi.degree
    else:
        raise UnsupportedConstructError(type(phi).__name__)
    return stack_result


# --------------------------------------------------------------------------
# Frame checking
# --------------------------------------------------------------------------


def check_frame(model: FiniteModel) -> list[str]:
    """Report violations of the frame conditions: belief accessibility must
    be transitive and euclidean, intention accessibility serial, and every
    referenced world must exist."""
    problems = []
    worlds = set(model.worlds)
    for agent, relation in model.bel.items():
        for w, targets in relation.items():
            if w not in worlds or not targets <= worlds:
                problems.append(f"bel[{agent!r}] at {w!r} references unknown worlds")
        for w in relation:
            acc_w = relation.get(w, frozenset())
            for v in acc_w:
                for u in relation.get(v, frozenset()):
                    if u not in acc_w:
                        problems.append(
                            f"bel[{agent!r}] not transitive at ({w!r},{v!r},{u!r})"
                        )
            for v in acc_w:
                for u in acc_w:
                    if u not in relation.get(v, frozenset()):
                        problems.append(
                            f"bel[{agent!r}] not euclidean at ({w!r},{v!r},{u!r})"
                        )
    for agent, relation in model.intent.items():
        for w in model.worlds:
            if not relation.get(w, frozenset()):
                problems.append(f"intent[{agent!r}] not serial at {w!r}")
            if not relation.get(w, frozenset()) <= worlds:
                problems.append(f"intent[{agent!r}] at {w!r} references unknown worlds")
    for event, targets in model.events.items():
        if not set(targets) <= worlds:
            problems.append(f"event {event} maps outside the frame")
    return problems


# --------------------------------------------------------------------------
# Enumeration
# --------------------------------------------------------------------------

_ATOM_POOL = ("p", "q", "r", "s")


def _trans_euclid_relations(n: int) -> list[tuple[frozenset, ...]]:
    """All transitive and euclidean relations on n worlds, as images per world."""
    worlds = range(n)
    pairs = [(w, v) for w in worlds for v in worlds]
    out = []
    for mask in range(2 ** len(pairs)):
        images = [set() for _ in worlds]
        for idx, (w, v) in enumerate(pairs):
            if mask & (1 << idx):
                images[w].add(v)
        ok = True
        for w in worlds:
            for v in images[w]:
                if not images[v] <= images[w]:  # transitive
                    ok = False
                    break
                if not images[w] <= images[v]:  # euclidean
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(tuple(frozenset(img) for img in images))
    return out


def enumerate_models(
    max_atoms: int, max_worlds: int, agents: int = 1
) -> Iterable[FiniteModel]:
    """Exhaustive, deterministic stream of admissible belief frames.

    Intention accessibility is fixed to the identity (serial by
    construction) and the desire grid is left empty: the sweep targets the
    graded-belief fragment. Guarded against runaway sizes.
    """
    if max_worlds > 5:
        raise ValueError("bounds too large: enumeration is desk-scale only (worlds <= 5)")
    if agents > 2:
        raise ValueError("bounds too large: at most 2 agents")
    atom_names = _ATOM_POOL[:max_atoms]
    agent_names = ("a", "b")[:agents]
    for n in range(1, max_worlds + 1):
        worlds = tuple(range(n))
        relations = _trans_euclid_relations(n)
        atom_sets = [frozenset(s) for r in range(len(atom_names) + 1)
                     for s in itertools.combinations(atom_names, r)]
        valuations = itertools.product(atom_sets, repeat=n)
        for valuation in valuations:
            val = {w: valuation[w] for w in worlds}
            for combo in itertools.product(relations, repeat=len(agent_names)):
                bel = {
                    agent_names[i]: {w: combo[i][w] for w in worlds}
                    for i in range(len(agent_names))
                }
                intent = {
                    name: {w: frozenset({w}) for w in worlds} for name in agent_names
                }
                yield FiniteModel(worlds, val, bel, {}, intent, {})


def random_model(rng: random.Random, max_worlds: int = 4, max_atoms: int = 2) -> FiniteModel:
    """A random single-agent model with nonempty accessibility everywhere."""
    n = rng.randint(1, max_worlds)
    worlds = tuple(range(n))
    atoms = _ATOM_POOL[:max_atoms]
    valuation = {
        w: frozenset(a for a in atoms if rng.random() < 0.5) for w in worlds
    }
    bel = {"a": {}}
    for w in worlds:
        size = rng.randint(1, n)
        bel["a"][w] = frozenset(rng.sample(worlds, size))
    return FiniteModel(worlds, valuation, bel)


# --------------------------------------------------------------------------
# Law sweeps
# --------------------------------------------------------------------------


def _probe_formulas(model: FiniteModel) -> list[Formula]:
    atoms = sorted({a for val in model.valuation.values() for a in val})
    atoms = atoms or ["p"]
    probes: list[Formula] = [Atom(atoms[0]), Not(Atom(atoms[0]))]
    if len(atoms) > 1:
        probes.append(And(Atom(atoms[0]), Atom(atoms[1])))
        probes.append(Atom(atoms[1]))
    return probes


def introspection_counterexamples(model: FiniteModel, agent: str = "a") -> list[str]:
    """Worlds where a held graded belief is not itself believed with
    certainty, which transitive and euclidean accessibility forbids."""
    problems = []
    for w in model.worlds:
        if not model.bel_worlds(agent, w):
            continue
        for phi in _probe_formulas(model):
            l = proportion(model, agent, w, phi)
            inner = Bel(agent, l, phi)
            if not eval_formula(model, w, Bel(agent, Fraction(1), inner)):
                problems.append(f"introspection fails at {w!r} for {phi}")
    return problems


def complement_counterexamples(model: FiniteModel, agent: str = "a") -> list[str]:
    """Worlds where Bel at level l does not force Bel of the negation at 1-l."""
    problems = []
    for w in model.worlds:
        if not model.bel_worlds(agent, w):
            continue
        for phi in _probe_formulas(model):
            l = proportion(model, agent, w, phi)
            if not eval_formula(model, w, Bel(agent, 1 - l, Not(phi))):
                problems.append(f"complement fails at {w!r} for {phi}")
    return problems


@dataclass
class SweepReport:
    models: int
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def sweep_belief_laws(max_atoms: int, max_worlds: int, agents: int = 1) -> SweepReport:
    """Check introspection and complement soundness over the whole space."""
    count = 0
    violations: list[str] = []
    for model in enumerate_models(max_atoms, max_worlds, agents):
        count += 1
        frame_problems = check_frame(model)
        if frame_problems:
            violations.extend(f"model {count}: {p}" for p in frame_problems)
            continue
        for agent in model.bel:
            violations.extend(
                f"model {count}: {p}" for p in introspection_counterexamples(model, agent)
            )
            violations.extend(
                f"model {count}: {p}" for p in complement_counterexamples(model, agent)
            )
    return SweepReport(count, violations)
